#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "omerg/weights.hpp"

namespace omerg {

using BigInt = boost::multiprecision::cpp_int;

/// Non-negative integer sequence a_1, a_2, ...
///
/// Closed forms are defined for arbitrarily large n and are non-decreasing;
/// table-backed sequences (sieve or file) stop at `limit()`.
class IntegerSequence {
public:
    enum class Kind {
        FloorLog2,     // ⌊log₂ n⌋
        FloorLogLog,   // ⌊ln ln n⌋, 0 for n < 16
        FloorLogPow,   // ⌊(ln n)^c⌋
        Lacunary,      // base^n
        Linear,        // n
        Omega,         // Ω(n)
        LittleOmega,   // ω(n)
        Log2Divisors,  // ⌊log₂ d(n)⌋
        Table,         // explicit values
    };

    static IntegerSequence floor_log2();
    static IntegerSequence floor_loglog();
    static IntegerSequence floor_log_pow(double c);
    static IntegerSequence lacunary(std::uint64_t base);
    static IntegerSequence linear();
    /// Sieves [1, n_max] for Omega, LittleOmega or Log2Divisors.
    static IntegerSequence sieve_backed(Kind kind, std::uint64_t n_max, unsigned workers = 1);
    /// values[0] = a_1.
    static IntegerSequence from_values(std::vector<std::int64_t> values, std::string name = "table");
    /// Two columns "n a_n" with n = 1..M contiguous.
    static IntegerSequence read(const std::filesystem::path& path);
    /// floor_log2, floor_loglog, floor_log_pow:c, lacunary:base, linear, omega,
    /// little_omega, log2_divisors (sieved up to n_max) or file:path.
    static IntegerSequence parse(const std::string& spec, std::uint64_t n_max = 0, unsigned workers = 1);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] bool closed_form() const;
    [[nodiscard]] bool monotone() const { return monotone_; }
    /// Largest n with a defined value, or nullopt for closed forms.
    [[nodiscard]] std::optional<std::uint64_t> limit() const;

    [[nodiscard]] BigInt value(const BigInt& n) const;
    /// Fast path for machine-size n; throws std::overflow_error if a_n does not fit.
    [[nodiscard]] std::int64_t at(std::uint64_t n) const;

    /// min(cap, least n >= 1 with a_n >= v). Closed forms only; uses the
    /// analytic inverse of the defining function.
    [[nodiscard]] BigInt first_at_least(const BigInt& v, const BigInt& cap) const;

    /// #{1 <= n <= N : lo <= a_n <= hi}.
    [[nodiscard]] BigInt count_in(const BigInt& n, const BigInt& lo, const BigInt& hi) const;

private:
    IntegerSequence(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

    Kind kind_;
    std::string name_;
    double c_ = 1.0;
    std::uint64_t base_ = 2;
    bool monotone_ = true;
    std::shared_ptr<const std::vector<std::uint8_t>> small_;
    std::shared_ptr<const std::vector<std::int64_t>> wide_;
};

// ---- Jones-Wierdl criterion -------------------------------------------------

/// max_{p<=n<=q} (a_n - a_⌊εn⌋). Throws std::invalid_argument if ⌊εp⌋ = 0,
/// p > q, ε outside (0,1), or a decreases on [⌊εp⌋, q].
BigInt jw_phi(const IntegerSequence& a, double eps, std::uint64_t p, std::uint64_t q);

struct JwResult {
    bool found = false;
    std::uint64_t p = 0;
    std::uint64_t q = 0;
    BigInt gap = 0;  // a_q - a_p
    BigInt phi = 0;
    double ratio = 0.0;
    std::uint64_t scanned = 0;  // largest q examined
};

/// Scans q = u+1..budget with p on the dyadic grid {u, 2u, 4u, ...} for
/// (a_q - a_p)/φ_ε(p,q) > C.
JwResult jw_search(const IntegerSequence& a, double eps, std::uint64_t u, double c, std::uint64_t budget);

// ---- interval condition and its periodic witness -----------------------------

/// p_{N,E}: bound on |a_j - b_j| over admissible j <= N.
using PerturbationBound = std::function<BigInt(const BigInt& n)>;

struct SweepParams {
    double eps = 0.1;
    double c = 5.0;
    /// R; 0 picks the least power of two exceeding 1/ε.
    std::uint64_t r_base = 0;
    /// Every N_i must be at least this.
    BigInt n_floor = 1;
    /// N_r <= 2^budget_bits.
    unsigned budget_bits = 1024;
};

std::uint64_t default_r_base(double eps);

struct SweepInterval {
    BigInt n;   // N_i
    BigInt lo;  // J_i = [lo, hi]
    BigInt hi;
    BigInt hits;  // #{n <= N_i : a_n in J_i}
    double hit_fraction = 0.0;
};

struct PeriodicWitness {
    BigInt m;            // max |J_i|
    BigInt l;            // [-L, L] contains ±J_i
    BigInt e_size;       // |E| = 2M + 1
    BigInt exceedance;   // X
    double d = 0.0;      // C / 2
    bool holds = false;  // X > D·|E|
    std::optional<BigInt> failing_k;
};

struct SweepOutCertificate {
    std::string a_name;
    std::string b_name;
    double eps = 0.0;
    double c = 0.0;
    std::uint64_t r_base = 0;
    unsigned k0 = 0;
    unsigned r = 0;
    BigInt p_margin = 0;  // p_{N_r,E}
    std::vector<SweepInterval> intervals;
    BigInt union_size = 0;
    BigInt max_length = 0;
    double cover_ratio = 0.0;
    std::optional<PeriodicWitness> witness;

    bool built = false;
    /// growth, perturbation, spread, cover_ratio, hit_fraction or budget.
    std::string failed_gate;
    std::string detail;

    [[nodiscard]] bool verdict() const { return built && witness && witness->holds; }
};

/// Searches K₀ upward, then r, for N_i = R^(K₀+i) and
/// J_i = [b_{N_{i-1}} - p, b_{N_i} + p] meeting the hit-fraction and cover
/// conditions for `a` (default: a = b). A failure names the gate that stopped
/// the last K₀ tried.
SweepOutCertificate interval_condition_build(const IntegerSequence& b, const SweepParams& params,
                                             const PerturbationBound& p = {},
                                             const IntegerSequence* a = nullptr);

/// Fills the witness on Z/(2L) with E = [-M, M]: X counts k in [-L, L] whose
/// best hit fraction over the N_i exceeds 1 - ε.
void periodic_witness(SweepOutCertificate& certificate, const IntegerSequence& a);

struct SweepVerification {
    bool hits = false;
    bool cover = false;
    bool exceedance = false;
    std::vector<double> hit_fractions;
    double cover_ratio = 0.0;
    BigInt exceedance_count = 0;
    std::string detail;

    [[nodiscard]] bool pass() const { return hits && cover && exceedance; }
};

/// Recounts everything without the analytic inverses: closed forms by bisection
/// on a_n, tables by direct scan.
SweepVerification verify_certificate(const SweepOutCertificate& certificate, const IntegerSequence& a);

// ---- perturbations -----------------------------------------------------------

enum class ExceptionalFilter {
    None,
    /// Drop j <= N with |a_j - ln ln N| > C·sqrt(ln ln N).
    HardyRamanujan,
};

struct PerturbationProfile {
    std::vector<std::uint64_t> n;
    std::vector<std::int64_t> p;
    std::vector<std::int64_t> b;
    std::vector<double> ratio;  // p_N / b_N
    std::vector<double> excluded_density;
};

PerturbationProfile perturbation_profile(const IntegerSequence& a, const IntegerSequence& b,
                                         ExceptionalFilter filter,
                                         std::span<const std::uint64_t> checkpoints, double c = 3.0);

/// p_{N,E} evaluated on demand from two table-limited sequences.
PerturbationBound exact_perturbation(const IntegerSequence& a, const IntegerSequence& b,
                                     ExceptionalFilter filter = ExceptionalFilter::None, double c = 3.0);

// ---- central limit checks ----------------------------------------------------

enum class CltStatistic { Omega, LittleOmega, Log2Divisors };

struct CltResult {
    std::uint64_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
    StandardHistogram hist;
    double distance = 0.0;
};

/// Ω, ω standardized by ln ln N; ln d(n) by ln2·ln ln N and ln2·sqrt(ln ln N).
CltResult clt_standardize(CltStatistic statistic, const ArithmeticDistribution& dist);

}  // namespace omerg
