#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "omerg/dynamics.hpp"
#include "omerg/weights.hpp"

namespace omerg {

struct Cesaro {};
struct Logarithmic {};
struct DoubleLog {
    /// false: divide by ln ln N; true: divide by Σ_{2<=n<=N} 1/(n ln n).
    bool exact_mass = false;
};
/// Positive non-increasing weight; normalized by its own partial sum.
struct CustomWeight {
    std::function<double(std::uint64_t)> w;
    std::string name = "custom";
};

using AveragingScheme = std::variant<Cesaro, Logarithmic, DoubleLog, CustomWeight>;

/// "cesaro", "log", "loglog" or "loglog-exact".
AveragingScheme parse_scheme(const std::string& name);
std::string scheme_name(const AveragingScheme& scheme);

/// w(n); the double-log weight is 0 at n = 1.
double scheme_weight(const AveragingScheme& scheme, std::uint64_t n);
/// W(N). Throws DomainError for DoubleLog with N < 16 and Logarithmic with N < 2.
double scheme_normalizer(const AveragingScheme& scheme, std::uint64_t n);

/// Samples a custom weight on [1, n] and throws std::invalid_argument if it is
/// negative or increasing anywhere.
void validate_weight(const CustomWeight& weight, std::uint64_t n);

/// (1/W(N))·Σ w(n)·a(n) with a[0] = a(1).
double weighted_average(std::span<const double> a, const AveragingScheme& scheme);

/// w̃(n) = (n-s+1)(w(n) - w(n+1)) for s <= n < N and w̃(N) = (N-s+1)·w(N), where
/// w[i] = w(s+i). Σ w̃ = Σ w; throws std::invalid_argument if w increases.
std::vector<double> sbp_transform(std::span<const double> w, std::uint64_t start = 1);

struct SbpCheck {
    double mass = 0.0;              // Σ w
    double transformed_mass = 0.0;  // Σ w̃
    double relative_error = 0.0;
    bool non_negative = true;
};

SbpCheck sbp_check(std::span<const double> w, std::uint64_t start = 1);

struct ConvergenceReport {
    std::string scheme;
    std::vector<std::uint64_t> n;
    std::vector<double> value;
    /// max/min over the final half of the grid: estimates, not limits.
    double limsup_estimate = 0.0;
    double liminf_estimate = 0.0;
};

/// Cesàro and w-weighted trajectories of a(1..N) at each checkpoint.
struct DominationReport {
    ConvergenceReport cesaro;
    ConvergenceReport weighted;
    std::vector<double> gap;  // |cesaro - weighted| per checkpoint
};

DominationReport weight_domination_demo(std::span<const double> a, const AveragingScheme& w,
                                        std::span<const std::uint64_t> checkpoints);

ConvergenceReport convergence_report(std::string scheme, std::vector<std::uint64_t> n,
                                     std::vector<double> value);

/// (1/W(N))·Σ_k weight_N(k)·orbit[k], weight = π_N, ξ_N or η_N by scheme.
double omega_average_regrouped(const OrbitTable& orbit, const WeightTable& table,
                               const AveragingScheme& scheme);

/// (1/W(N))·Σ_{n<=N} w(n)·orbit[Ω(n)], omega[0] = Ω(1).
double omega_average_direct(const OrbitTable& orbit, std::span<const std::uint8_t> omega,
                            const AveragingScheme& scheme, std::uint64_t n);

struct LacunaryGrid {
    std::vector<std::uint64_t> n;  // N_i = floor(2^(2^(ρ^i))), i = 1, 2, ...
    unsigned first_overflow = 1;   // first i with N_i > cap
};

LacunaryGrid lacunary_checkpoints(double rho, std::uint64_t cap);

/// round(10^(2 + i/4)) for values <= n_max, followed by n_max itself.
std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t n_max);

}  // namespace omerg
