#include "omerg/weights.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

namespace omerg {

double loglog(std::uint64_t n) {
    if (n < SieveConfig::kMinCheckpoint) {
        std::ostringstream os;
        os << "double-log quantity requires N >= 16, got N = " << n;
        throw DomainError(os.str());
    }
    return std::log(std::log(static_cast<double>(n)));
}

unsigned floor_log2(std::uint64_t n) {
    return n == 0 ? 0 : 63u - static_cast<unsigned>(std::countl_zero(n));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

void StandardHistogram::add(double z, std::uint64_t count) {
    if (z < kLo) {
        underflow += count;
        return;
    }
    const auto index = static_cast<long>(std::floor((z - kLo) * 10.0));
    if (index >= kBins)
        overflow += count;
    else
        bins[static_cast<std::size_t>(index)] += count;
}

std::uint64_t StandardHistogram::total() const {
    std::uint64_t t = underflow + overflow;
    for (auto b : bins)
        t += b;
    return t;
}

double cdf_distance(const StandardHistogram& hist) {
    const std::uint64_t total = hist.total();
    if (total == 0)
        return 0.0;
    const double inv = 1.0 / static_cast<double>(total);
    std::uint64_t below = hist.underflow;
    double worst = 0.0;
    for (int i = 0; i <= StandardHistogram::kBins; ++i) {
        const double e = StandardHistogram::edge(i);
        worst = std::max(worst, std::abs(static_cast<double>(below) * inv - normal_cdf(e)));
        if (i < StandardHistogram::kBins)
            below += hist.bins[static_cast<std::size_t>(i)];
    }
    return worst;
}

void WeightTable::rebuild_histogram() {
    ek_hist = {};
    if (n < SieveConfig::kMinCheckpoint)
        return;
    const double mu = loglog(n);
    const double sd = std::sqrt(mu);
    for (std::size_t k = 0; k < pi.size(); ++k)
        if (pi[k] != 0)
            ek_hist.add((static_cast<double>(k) - mu) / sd, pi[k]);
}

// ---- accumulation ----------------------------------------------------------

WeightAccumulator::Sums& WeightAccumulator::Sums::operator+=(const Sums& other) {
    for (unsigned k = 0; k < kClasses; ++k) {
        pi[k] += other.pi[k];
        xi[k] += other.xi[k];
        eta[k] += other.eta[k];
    }
    return *this;
}

WeightAccumulator::Sums WeightAccumulator::summarize(const FactorCountBlock& block) {
    Sums s;
    for (std::uint64_t n = block.lo; n < block.hi; ++n) {
        const unsigned k = block.omega_big[n - block.lo];
        const auto x = static_cast<double>(n);
        s.pi[k] += 1;
        s.xi[k].add(1.0 / x);
        if (n >= 2)
            s.eta[k].add(1.0 / (x * std::log(x)));
    }
    return s;
}

std::any WeightAccumulator::digest(const FactorCountBlock& block) const {
    return summarize(block);
}

void WeightAccumulator::absorb(const FactorCountBlock& block, const Sums& sums) {
    if (block.lo != next_) {
        std::ostringstream os;
        os << "out-of-order block: expected lo = " << next_ << ", got " << block.lo;
        throw std::logic_error(os.str());
    }
    sums_ += sums;
    next_ = block.hi;
}

void WeightAccumulator::consume(const FactorCountBlock& block, std::any& digest) {
    if (const auto* s = std::any_cast<Sums>(&digest))
        absorb(block, *s);
    else
        absorb(block, summarize(block));
}

void WeightAccumulator::accumulate(const FactorCountBlock& block) { absorb(block, summarize(block)); }

void WeightAccumulator::merge(const WeightAccumulator& later) {
    if (later.start_ != next_)
        throw std::logic_error("merge: ranges are not adjacent");
    sums_ += later.sums_;
    next_ = later.next_;
}

void WeightAccumulator::at_checkpoint(std::uint64_t n) { tables_.push_back(snapshot(n)); }

WeightTable WeightAccumulator::snapshot(std::uint64_t n) const {
    if (n + 1 != next_)
        throw std::logic_error("snapshot: accumulator has not reached N exactly");
    WeightTable t;
    t.n = n;
    t.k_max = floor_log2(n);
    t.pi.resize(t.k_max + 1);
    t.xi.resize(t.k_max + 1);
    t.eta.resize(t.k_max + 1);
    for (unsigned k = 0; k <= t.k_max; ++k) {
        t.pi[k] = sums_.pi[k];
        t.xi[k] = sums_.xi[k].value();
        t.eta[k] = sums_.eta[k].value();
    }
    t.rebuild_histogram();
    return t;
}

void DistributionAccumulator::consume(const FactorCountBlock& block, std::any&) {
    if (block.lo != current_.n + 1)
        throw std::logic_error("out-of-order block");
    auto bump = [](std::vector<std::uint64_t>& v, unsigned k) {
        if (v.size() <= k)
            v.resize(k + 1, 0);
        ++v[k];
    };
    for (std::size_t i = 0; i < block.size(); ++i) {
        bump(current_.omega_big, block.omega_big[i]);
        bump(current_.omega_small, block.omega_small[i]);
        ++current_.divisors[block.divisors[i]];
    }
    current_.n = block.hi - 1;
}

void DistributionAccumulator::at_checkpoint(std::uint64_t n) {
    if (n != current_.n)
        throw std::logic_error("checkpoint does not match stream position");
    snapshots_.push_back(current_);
}

// ---- estimates -------------------------------------------------------------

namespace {

void require_k(const WeightTable& t, unsigned k) {
    if (k > t.k_max) {
        std::ostringstream os;
        os << "k = " << k << " exceeds k_max = " << t.k_max;
        throw DomainError(os.str());
    }
}

}  // namespace

double landau_ratio(const WeightTable& table, unsigned k) {
    if (k == 0)
        throw DomainError("undefined for k=0");
    require_k(table, k);
    const double ll = loglog(table.n);
    if (table.pi[k] == 0)
        return 0.0;
    const double n = static_cast<double>(table.n);
    // log of the prediction N (lnlnN)^(k-1) / ((k-1)! ln N)
    const double log_pred = std::log(n) + (k - 1) * std::log(ll) - std::lgamma(static_cast<double>(k)) -
                            std::log(std::log(n));
    return std::exp(std::log(static_cast<double>(table.pi[k])) - log_pred);
}

double erdos_log_ratio(const WeightTable& table, unsigned k) {
    require_k(table, k);
    const double ll = loglog(table.n);
    if (table.xi[k] == 0.0)
        return 0.0;
    const double log_pred = k * std::log(ll) - std::lgamma(static_cast<double>(k) + 1.0);
    return std::exp(std::log(table.xi[k]) - log_pred);
}

double gaussian_weight(std::uint64_t n, double k) {
    const double ll = loglog(n);
    const double t = (k - ll);
    return std::exp(-t * t / (2.0 * ll)) / std::sqrt(2.0 * std::numbers::pi * ll);
}

double hr_fraction(const WeightTable& table, double c) {
    if (!(c > 0.0))
        throw DomainError("hr_fraction: C must be positive");
    const double ll = loglog(table.n);
    const double half = c * std::sqrt(ll);
    std::uint64_t outside = 0;
    for (std::size_t k = 0; k < table.pi.size(); ++k)
        if (std::abs(static_cast<double>(k) - ll) > half)
            outside += table.pi[k];
    return static_cast<double>(outside) / static_cast<double>(table.n);
}

double ek_cdf_distance(const WeightTable& table) {
    loglog(table.n);
    return cdf_distance(table.ek_hist);
}

EtaMass eta_head_mass(const WeightTable& table, EtaWindow window, double c) {
    const double ll = loglog(table.n);
    EtaMass m;
    m.window_end = window == EtaWindow::Double ? 2.0 * ll : ll + c * std::sqrt(ll);
    CompensatedSum head, tail, total;
    for (std::size_t k = 0; k < table.eta.size(); ++k) {
        total.add(table.eta[k]);
        if (static_cast<double>(k) <= m.window_end)
            head.add(table.eta[k]);
        else
            tail.add(table.eta[k]);
    }
    m.head = head.value() / ll;
    m.tail = tail.value() / ll;
    m.total = total.value() / ll;
    return m;
}

double xi_window_mass(const WeightTable& table, double c) {
    if (c < 1.0)
        throw DomainError("xi_window_mass: C must be >= 1");
    const double ll = loglog(table.n);
    const double half = c * std::sqrt(ll);
    CompensatedSum in;
    for (std::size_t k = 0; k < table.xi.size(); ++k)
        if (std::abs(static_cast<double>(k) - ll) <= half)
            in.add(table.xi[k]);
    return in.value() / std::log(static_cast<double>(table.n));
}

double glw_model(double d, unsigned k) {
    return 1.0 - std::numbers::ln2 / 4.0 * std::ldexp(1.0, -static_cast<int>(k)) * d * k * k;
}

GlwFit glw_fit_values(std::span<const unsigned> k, std::span<const double> eta) {
    if (k.empty() || k.size() != eta.size())
        throw DomainError("glw_fit: empty k range");
    // 1 - η = (ln2/4)·2^-k·k²·d  is linear in d
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        const double x = std::numbers::ln2 / 4.0 * std::ldexp(1.0, -static_cast<int>(k[i])) * k[i] * k[i];
        num += x * (1.0 - eta[i]);
        den += x * x;
    }
    GlwFit fit;
    fit.d = num / den;
    for (std::size_t i = 0; i < k.size(); ++i) {
        fit.k.push_back(k[i]);
        fit.observed.push_back(eta[i]);
        fit.model.push_back(glw_model(fit.d, k[i]));
        fit.residual.push_back(eta[i] - fit.model.back());
    }
    return fit;
}

GlwFit glw_fit(std::span<const WeightTable> tables, unsigned k_lo, unsigned k_hi) {
    if (tables.empty() || k_lo == 0 || k_hi < k_lo)
        throw DomainError("glw_fit: empty k range");
    const auto& largest =
        *std::max_element(tables.begin(), tables.end(), [](auto& a, auto& b) { return a.n < b.n; });
    if (k_hi > largest.k_max || std::ldexp(1.0, static_cast<int>(k_hi)) > largest.n / 1000.0)
        throw DomainError("unsaturated k");
    std::vector<unsigned> ks;
    std::vector<double> etas;
    for (unsigned k = k_lo; k <= k_hi; ++k) {
        ks.push_back(k);
        etas.push_back(largest.eta[k]);
    }
    return glw_fit_values(ks, etas);
}

EtaBracket eta_of_primes(std::uint64_t n) {
    if (n < 2)
        throw DomainError("eta_of_primes: N must be >= 2");
    const PrimeTable base = PrimeTable::covering(n + 1);
    ExactSum sum;
    constexpr std::uint64_t kSegment = std::uint64_t{1} << 20;
    std::vector<std::uint8_t> composite;
    for (std::uint64_t lo = 2; lo <= n; lo += kSegment) {
        const std::uint64_t hi = std::min(n + 1, lo + kSegment);
        composite.assign(hi - lo, 0);
        for (const auto p : base.primes) {
            if (p > (hi - 1) / p)
                break;
            std::uint64_t m = std::max(p * p, (lo + p - 1) / p * p);
            for (; m < hi; m += p)
                composite[m - lo] = 1;
        }
        for (std::uint64_t x = lo; x < hi; ++x) {
            if (composite[x - lo])
                continue;
            const auto p = static_cast<double>(x);
            sum.add(1.0 / (p * std::log(p)));
        }
    }
    EtaBracket b;
    b.n = n;
    b.lower = sum.value();
    b.upper = b.lower + 2.0 / std::log(static_cast<double>(n));
    return b;
}

EtaBracket eta_bracket(const WeightTable& table) {
    if (table.k_max < 1)
        throw DomainError("eta_bracket: table has no k = 1 class");
    EtaBracket b;
    b.n = table.n;
    b.lower = table.eta[1];
    b.upper = b.lower + 2.0 / std::log(static_cast<double>(table.n));
    return b;
}

AsymptoticReport asymptotic_report(const WeightTable& table, double c) {
    AsymptoticReport r;
    r.n = table.n;
    r.c = c;
    const double n = static_cast<double>(table.n);
    for (unsigned k = 1; k <= table.k_max; ++k)
        r.landau.push_back(landau_ratio(table, k));
    for (unsigned k = 0; k <= table.k_max; ++k) {
        r.erdos_log.push_back(erdos_log_ratio(table, k));
        r.gaussian.push_back(static_cast<double>(table.pi[k]) / n / gaussian_weight(table.n, k));
    }
    r.hr = hr_fraction(table, c);
    r.ek_distance = ek_cdf_distance(table);
    r.head_hr = eta_head_mass(table, EtaWindow::HardyRamanujan, c);
    r.head_double = eta_head_mass(table, EtaWindow::Double, c);
    r.xi_window = xi_window_mass(table, std::max(c, 1.0));
    r.eta1 = eta_bracket(table);
    return r;
}

}  // namespace omerg
