#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace omerg {

/// Shift on Z/m starting at `start`, observing the indicator of `target`.
struct PeriodicSystem {
    std::uint64_t modulus = 2;
    std::uint64_t start = 0;
    std::set<std::uint64_t> target{0};
};

/// x -> x + alpha mod 1 observed through the indicator of [a, b).
struct RotationSystem {
    double alpha = 0.6180339887498949;
    double x0 = 0.0;
    double a = 0.0;
    double b = 0.5;
};

/// Explicit orbit values f(T^k x), k = 0, 1, ...
struct TableSystem {
    std::vector<double> values;
};

using DynamicalSystem = std::variant<PeriodicSystem, RotationSystem, TableSystem>;

/// Throws std::invalid_argument when a system violates its invariants.
void validate(const DynamicalSystem& system);

struct OrbitTable {
    std::vector<double> values;  // k = 0..k_max
    double ground_truth_mean = 0.0;

    [[nodiscard]] std::size_t k_max() const { return values.empty() ? 0 : values.size() - 1; }
};

OrbitTable orbit_values(const DynamicalSystem& system, std::uint64_t k_max);

/// Mean of the first `k` orbit values.
double birkhoff_average(const OrbitTable& orbit, std::uint64_t k);

/// Parses "periodic:m[:s[:e1,e2,...]]", "rotation[:alpha[:x0[:a[:b]]]]" or
/// "table:v0,v1,...".
DynamicalSystem parse_system(const std::string& spec);

/// Parses key=value lines: system=periodic|rotation|table plus modulus, start,
/// target, alpha, x0, a, b, values.
DynamicalSystem parse_system_config(const std::string& text);

std::string describe(const DynamicalSystem& system);

}  // namespace omerg
