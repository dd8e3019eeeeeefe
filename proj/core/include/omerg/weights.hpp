#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "omerg/exact_sum.hpp"
#include "omerg/sieve.hpp"

namespace omerg {

/// Thrown when a double-logarithmic quantity is requested for N < 16, or an
/// estimate is evaluated outside its domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// ln ln N, rejecting N < 16.
double loglog(std::uint64_t n);
/// floor(log2 n) for n >= 1.
unsigned floor_log2(std::uint64_t n);

/// Standard normal CDF.
double normal_cdf(double x);

/// Fixed-width histogram of standardized values over [-6, 6] in steps of 0.1,
/// with underflow and overflow bins.
struct StandardHistogram {
    static constexpr int kBins = 120;
    static constexpr double kLo = -6.0;
    static constexpr double kWidth = 0.1;

    std::array<std::uint64_t, kBins> bins{};
    std::uint64_t underflow = 0;
    std::uint64_t overflow = 0;

    void add(double z, std::uint64_t count = 1);
    [[nodiscard]] std::uint64_t total() const;
    /// Left edge of bin i; i == kBins gives the right end of the range.
    static double edge(int i) { return static_cast<double>(-60 + i) / 10.0; }
};

/// sup over bin edges of |F_empirical - Φ|; 0 for an empty histogram.
double cdf_distance(const StandardHistogram& hist);

/// Weight functions at one checkpoint N. Index k runs over 0..k_max with
/// k_max = floor(log2 N).
struct WeightTable {
    std::uint64_t n = 0;
    unsigned k_max = 0;
    std::vector<std::uint64_t> pi;  // #{n <= N : Ω(n) = k}
    std::vector<double> xi;         // Σ 1/n over the same class
    std::vector<double> eta;        // Σ 1/(n ln n), n >= 2
    StandardHistogram ek_hist;      // (Ω - lnlnN)/sqrt(lnlnN); empty for N < 16

    /// Rebuilds ek_hist from pi.
    void rebuild_histogram();
};

/// Distribution of ω(n) and d(n) over n <= N, for the divisor/ω central limit
/// checks.
struct ArithmeticDistribution {
    std::uint64_t n = 0;
    std::vector<std::uint64_t> omega_big;    // count by Ω value
    std::vector<std::uint64_t> omega_small;  // count by ω value
    std::map<std::uint64_t, std::uint64_t> divisors;  // count by d value
};

/// Streams factor-count blocks into per-class counts and exact sums.
///
/// Blocks must arrive contiguous and ascending from `start`. Per-block sums are
/// computed in `digest` (on sieve workers) and merged exactly, so the
/// resulting tables do not depend on block size or worker count.
class WeightAccumulator final : public BlockConsumer {
public:
    static constexpr unsigned kClasses = 64;

    struct Sums {
        std::array<std::uint64_t, kClasses> pi{};
        std::array<ExactSum, kClasses> xi{};
        std::array<ExactSum, kClasses> eta{};

        Sums& operator+=(const Sums& other);
        friend bool operator==(const Sums&, const Sums&) = default;
    };

    explicit WeightAccumulator(std::uint64_t start = 1) : next_(start), start_(start) {}

    static Sums summarize(const FactorCountBlock& block);

    [[nodiscard]] std::any digest(const FactorCountBlock& block) const override;
    void consume(const FactorCountBlock& block, std::any& digest) override;
    void at_checkpoint(std::uint64_t n) override;

    void accumulate(const FactorCountBlock& block);
    /// Appends the state of an accumulator that started where this one ends.
    void merge(const WeightAccumulator& later);

    /// Table over [start, n]; requires n == next() - 1.
    [[nodiscard]] WeightTable snapshot(std::uint64_t n) const;
    [[nodiscard]] std::uint64_t next() const { return next_; }
    [[nodiscard]] const Sums& sums() const { return sums_; }
    [[nodiscard]] const std::vector<WeightTable>& tables() const { return tables_; }

private:
    void absorb(const FactorCountBlock& block, const Sums& sums);

    std::uint64_t next_;
    std::uint64_t start_;
    Sums sums_;
    std::vector<WeightTable> tables_;
};

/// Tracks Ω, ω and d value counts and snapshots them at checkpoints.
class DistributionAccumulator final : public BlockConsumer {
public:
    void consume(const FactorCountBlock& block, std::any& digest) override;
    void at_checkpoint(std::uint64_t n) override;

    [[nodiscard]] ArithmeticDistribution snapshot() const { return current_; }
    [[nodiscard]] const std::vector<ArithmeticDistribution>& snapshots() const { return snapshots_; }

private:
    ArithmeticDistribution current_;
    std::vector<ArithmeticDistribution> snapshots_;
};

// ---- asymptotic estimates --------------------------------------------------

/// π_N(k)·(k-1)!·ln N / (N·(ln ln N)^(k-1)).
double landau_ratio(const WeightTable& table, unsigned k);
/// ξ_N(k)·k! / (ln ln N)^k.
double erdos_log_ratio(const WeightTable& table, unsigned k);
/// Gaussian surrogate for π_N(k)/N with mean and variance ln ln N.
double gaussian_weight(std::uint64_t n, double k);

/// Fraction of n <= N with |Ω(n) - ln ln N| > C·sqrt(ln ln N).
double hr_fraction(const WeightTable& table, double c);

/// Kolmogorov-type distance of the standardized Ω distribution to Φ.
double ek_cdf_distance(const WeightTable& table);

enum class EtaWindow {
    HardyRamanujan,  // L_N = lnlnN + C·sqrt(lnlnN)
    Double,          // L_N = 2·lnlnN
};

struct EtaMass {
    double head = 0.0;   // Σ_{k <= L_N} η_N(k) / lnlnN
    double tail = 0.0;   // Σ_{k > L_N} η_N(k) / lnlnN
    double total = 0.0;  // Σ_k η_N(k) / lnlnN
    double window_end = 0.0;
};

EtaMass eta_head_mass(const WeightTable& table, EtaWindow window, double c = 3.0);

/// (1/ln N)·Σ_{k in I_N} ξ_N(k), I_N = [lnlnN - C√lnlnN, lnlnN + C√lnlnN].
double xi_window_mass(const WeightTable& table, double c = 3.0);

struct GlwFit {
    double d = 0.0;
    std::vector<unsigned> k;
    std::vector<double> observed;
    std::vector<double> model;
    std::vector<double> residual;
};

/// 1 - (ln 2 / 4)·2^(-k)·d·k^2.
double glw_model(double d, unsigned k);

/// Least-squares fit of d over [k_lo, k_hi] using the largest table's η as a
/// stand-in for η(k). Throws DomainError("unsaturated k") if 2^k > N/1000.
GlwFit glw_fit(std::span<const WeightTable> tables, unsigned k_lo, unsigned k_hi);
/// Fit against explicit (k, η) samples.
GlwFit glw_fit_values(std::span<const unsigned> k, std::span<const double> eta);

struct EtaBracket {
    std::uint64_t n = 0;
    double lower = 0.0;  // η_N(1)
    double upper = 0.0;  // η_N(1) + 2/ln N
};

/// η_N(1) = Σ_{p <= N} 1/(p ln p) and its bracket for η(1).
EtaBracket eta_of_primes(std::uint64_t n);
/// Bracket taken from a table's η_N(1).
EtaBracket eta_bracket(const WeightTable& table);

struct AsymptoticReport {
    std::uint64_t n = 0;
    double c = 3.0;
    std::vector<double> landau;       // k = 1..k_max (index k-1)
    std::vector<double> erdos_log;    // k = 0..k_max
    std::vector<double> gaussian;     // (π_N(k)/N) / gaussian_weight, k = 0..k_max
    double hr = 0.0;
    double ek_distance = 0.0;
    EtaMass head_hr;
    EtaMass head_double;
    double xi_window = 0.0;
    EtaBracket eta1;
};

AsymptoticReport asymptotic_report(const WeightTable& table, double c = 3.0);

}  // namespace omerg
