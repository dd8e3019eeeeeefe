#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "omerg/weights.hpp"

namespace omerg {

/// Non-negative signal φ on the integers, stored densely from `offset`.
struct FiniteSignal {
    std::int64_t offset = 0;
    std::vector<double> values;

    [[nodiscard]] double at(std::int64_t j) const;
    [[nodiscard]] double mass() const;
    [[nodiscard]] std::int64_t end() const { return offset + static_cast<std::int64_t>(values.size()); }
    [[nodiscard]] bool empty() const;

    /// Throws std::invalid_argument on negative or non-finite values.
    void validate() const;
    /// Builds from sparse (offset, value) points; duplicates are rejected.
    static FiniteSignal from_points(std::span<const std::pair<std::int64_t, double>> points);
    /// Two columns per line, "offset value", whitespace or comma separated; '#' starts a comment.
    static FiniteSignal read(const std::filesystem::path& path);
    static FiniteSignal parse(const std::string& text);
};

/// One N of the grid: window length floor(2 ln ln N) and η_N(1..window).
struct MaximalScale {
    std::uint64_t n = 0;
    double loglog = 0.0;
    unsigned window = 0;
    std::vector<double> eta;  // eta[k-1] = η_N(k), k = 1..window
};

struct MaximalGrid {
    std::vector<MaximalScale> scales;  // ascending N

    static MaximalGrid from_tables(std::span<const WeightTable> tables);
    [[nodiscard]] unsigned max_window() const;
};

/// (1/lnlnN)·Σ_{k=1}^{floor(L_N)} η_N(k)·φ(j+k) for one scale.
double window_average(const FiniteSignal& phi, std::int64_t j, const MaximalScale& scale);

/// max over the grid of window_average; throws std::invalid_argument on an empty grid.
double maximal_value(const FiniteSignal& phi, std::int64_t j, const MaximalGrid& grid);

/// { j : maximal_value(φ, j) > λ }, ascending.
std::vector<std::int64_t> exceedance_set(const FiniteSignal& phi, double lambda, const MaximalGrid& grid);

struct CoverInterval {
    std::int64_t lo = 0;  // j_k
    std::int64_t hi = 0;  // j_k + floor(L_{N_k}), inclusive
    std::uint64_t witness = 0;
};

struct CoverCertificate {
    double lambda = 1.0;
    std::vector<CoverInterval> intervals;
    std::vector<std::int64_t> exceedance;
    double d = 0.0;  // constant in #E <= D·‖φ‖₁/λ
};

/// Greedy construction: repeatedly take the least uncovered j in E and the
/// smallest witness N, and cover [j, j + floor(L_N)].
CoverCertificate greedy_cover(const FiniteSignal& phi, double lambda, const MaximalGrid& grid,
                              double eta1_upper);

struct Weak11Report {
    bool disjoint = true;
    bool covers = true;
    bool bound = true;
    std::size_t exceedance_size = 0;
    double bound_value = 0.0;  // D·‖φ‖₁/λ
    double mass = 0.0;

    [[nodiscard]] bool pass() const { return disjoint && covers && bound; }
};

Weak11Report weak11_verify(const FiniteSignal& phi, const CoverCertificate& certificate);

}  // namespace omerg
