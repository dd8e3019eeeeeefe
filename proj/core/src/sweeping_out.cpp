#include "omerg/sweeping_out.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace omerg {

namespace mp = boost::multiprecision;

namespace {

// ~1100 bits of mantissa: enough to resolve ceil() of values near 2^1024
using Real = mp::number<mp::cpp_bin_float<330>, mp::et_off>;
// ~330 bits: enough for n < 2^280 and an order of magnitude cheaper
using NarrowReal = mp::number<mp::cpp_bin_float<100>, mp::et_off>;
constexpr unsigned kNarrowBits = 280;

constexpr double kEdgeGuard = 1e-9;

Real to_real(const BigInt& n) { return Real(n); }

template <class R>
BigInt ceil_big(const R& x) {
    return mp::ceil(x).template convert_to<BigInt>();
}
template <class R>
BigInt floor_big(const R& x) {
    return mp::floor(x).template convert_to<BigInt>();
}

template <class R>
BigInt exact_loglog(const BigInt& n) {
    return floor_big(mp::log(mp::log(R(n))));
}
template <class R>
BigInt exact_log_pow(const BigInt& n, double c) {
    return floor_big(mp::pow(mp::log(R(n)), R(c)));
}
// ceil(e^x) with x = e^v or v^(1/c)
template <class R>
BigInt exp_ceil(const BigInt& v, bool loglog, double c) {
    const R x = loglog ? mp::exp(R(v)) : mp::pow(R(v), R(1) / R(c));
    return ceil_big(mp::exp(x));
}

std::uint64_t to_u64(const BigInt& n) {
    if (n < 0 || n > std::numeric_limits<std::uint64_t>::max())
        throw std::overflow_error("integer does not fit in 64 bits");
    return n.convert_to<std::uint64_t>();
}

std::int64_t to_i64(const BigInt& n) {
    if (n < std::numeric_limits<std::int64_t>::min() || n > std::numeric_limits<std::int64_t>::max())
        throw std::overflow_error("integer does not fit in 64 bits");
    return n.convert_to<std::int64_t>();
}

/// floor(x) if x is safely away from an integer, otherwise nullopt.
std::optional<std::int64_t> guarded_floor(double x, double guard = kEdgeGuard) {
    const double f = std::floor(x);
    if (!std::isfinite(x) || x - f < guard || f + 1.0 - x < guard)
        return std::nullopt;
    return static_cast<std::int64_t>(f);
}

// guard for values computed from a double ln n: a few ulps of ln n, amplified by the outer map
double scaled_guard(double x) { return std::max(kEdgeGuard, 1e-12 * std::abs(x)); }

/// ln n to double precision for any n >= 1.
double approx_ln(const BigInt& n) {
    const unsigned m = mp::msb(n);
    if (m < 63)
        return std::log(n.convert_to<double>());
    const unsigned shift = m - 62;
    const BigInt top = n >> shift;
    return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::numbers::ln2;
}


class ByValueRecorder final : public BlockConsumer {
public:
    ByValueRecorder(IntegerSequence::Kind kind, std::uint64_t n) : kind_(kind) { values_.reserve(n); }
    void consume(const FactorCountBlock& block, std::any&) override {
        for (std::size_t i = 0; i < block.size(); ++i) {
            switch (kind_) {
            case IntegerSequence::Kind::Omega:
                values_.push_back(block.omega_big[i]);
                break;
            case IntegerSequence::Kind::LittleOmega:
                values_.push_back(block.omega_small[i]);
                break;
            default:
                values_.push_back(static_cast<std::uint8_t>(floor_log2(block.divisors[i])));
                break;
            }
        }
    }
    std::vector<std::uint8_t> take() { return std::move(values_); }

private:
    IntegerSequence::Kind kind_;
    std::vector<std::uint8_t> values_;
};

}  // namespace

// ---- IntegerSequence ----------------------------------------------------------

IntegerSequence IntegerSequence::floor_log2() { return {Kind::FloorLog2, "floor_log2"}; }
IntegerSequence IntegerSequence::floor_loglog() { return {Kind::FloorLogLog, "floor_loglog"}; }
IntegerSequence IntegerSequence::linear() { return {Kind::Linear, "linear"}; }

IntegerSequence IntegerSequence::floor_log_pow(double c) {
    if (!(c > 0.0) || !std::isfinite(c))
        throw std::invalid_argument("floor_log_pow exponent must be positive");
    std::ostringstream os;
    os << "floor_log_pow:" << c;
    IntegerSequence s{Kind::FloorLogPow, os.str()};
    s.c_ = c;
    return s;
}

IntegerSequence IntegerSequence::lacunary(std::uint64_t base) {
    if (base < 2)
        throw std::invalid_argument("lacunary base must be >= 2");
    IntegerSequence s{Kind::Lacunary, "lacunary:" + std::to_string(base)};
    s.base_ = base;
    return s;
}

IntegerSequence IntegerSequence::sieve_backed(Kind kind, std::uint64_t n_max, unsigned workers) {
    std::string name;
    switch (kind) {
    case Kind::Omega:
        name = "omega";
        break;
    case Kind::LittleOmega:
        name = "little_omega";
        break;
    case Kind::Log2Divisors:
        name = "log2_divisors";
        break;
    default:
        throw std::invalid_argument("sieve_backed needs omega, little_omega or log2_divisors");
    }
    if (n_max < 2)
        throw std::invalid_argument(name + " needs n_max >= 2");
    SieveConfig config;
    config.n_max = n_max;
    config.block_size = std::min<std::uint64_t>(n_max, std::uint64_t{1} << 20);
    ByValueRecorder rec(kind, n_max);
    BlockConsumer* consumers[] = {&rec};
    stream_stats(config, consumers, workers);
    IntegerSequence s{kind, name};
    s.small_ = std::make_shared<const std::vector<std::uint8_t>>(rec.take());
    s.monotone_ = false;
    return s;
}

IntegerSequence IntegerSequence::from_values(std::vector<std::int64_t> values, std::string name) {
    if (values.empty())
        throw std::invalid_argument("sequence table is empty");
    IntegerSequence s{Kind::Table, std::move(name)};
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < 0)
            throw std::invalid_argument("sequence values must be non-negative (n=" + std::to_string(i + 1) + ")");
        if (i > 0 && values[i] < values[i - 1])
            s.monotone_ = false;
    }
    s.wide_ = std::make_shared<const std::vector<std::int64_t>>(std::move(values));
    return s;
}

IntegerSequence IntegerSequence::read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open sequence file " + path.string());
    std::vector<std::int64_t> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::istringstream ls(line);
        std::uint64_t n;
        std::int64_t v;
        std::string rest;
        if (!(ls >> n >> v) || (ls >> rest))
            throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) + ": expected 'n value'");
        if (n != values.size() + 1)
            throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                        ": indices must run 1, 2, 3, ...");
        values.push_back(v);
    }
    return from_values(std::move(values), "file:" + path.string());
}

IntegerSequence IntegerSequence::parse(const std::string& spec, std::uint64_t n_max, unsigned workers) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? std::string{} : spec.substr(colon + 1);
    auto need_n_max = [&] {
        if (n_max < 2)
            throw std::invalid_argument("sequence '" + head + "' needs --n-max");
        return n_max;
    };
    if (head == "floor_log2")
        return floor_log2();
    if (head == "floor_loglog")
        return floor_loglog();
    if (head == "linear")
        return linear();
    if (head == "floor_log_pow")
        return floor_log_pow(arg.empty() ? 0.5 : std::stod(arg));
    if (head == "lacunary")
        return lacunary(arg.empty() ? 2 : std::stoull(arg));
    if (head == "omega")
        return sieve_backed(Kind::Omega, need_n_max(), workers);
    if (head == "little_omega")
        return sieve_backed(Kind::LittleOmega, need_n_max(), workers);
    if (head == "log2_divisors")
        return sieve_backed(Kind::Log2Divisors, need_n_max(), workers);
    if (head == "file")
        return read(arg);
    throw std::invalid_argument("unknown sequence '" + spec + "'");
}

bool IntegerSequence::closed_form() const { return !small_ && !wide_; }

std::optional<std::uint64_t> IntegerSequence::limit() const {
    if (small_)
        return small_->size();
    if (wide_)
        return wide_->size();
    return std::nullopt;
}

BigInt IntegerSequence::value(const BigInt& n) const {
    if (n < 1)
        throw std::out_of_range("sequence index must be >= 1");
    if (!closed_form()) {
        if (n > *limit())
            throw std::out_of_range(name_ + " is only tabulated up to n=" + std::to_string(*limit()));
        const auto i = n.convert_to<std::size_t>() - 1;
        return small_ ? BigInt((*small_)[i]) : BigInt((*wide_)[i]);
    }
    switch (kind_) {
    case Kind::FloorLog2:
        return BigInt(mp::msb(n));
    case Kind::Linear:
        return n;
    case Kind::Lacunary:
        if (n > (1u << 20))
            throw std::overflow_error("lacunary term too large");
        return mp::pow(BigInt(base_), n.convert_to<unsigned>());
    case Kind::FloorLogLog: {
        if (n < 16)
            return 0;
        if (n <= std::numeric_limits<std::uint64_t>::max()) {
            if (auto f = guarded_floor(std::log(std::log(n.convert_to<double>()))))
                return *f;
        } else if (auto f = guarded_floor(std::log(approx_ln(n)), scaled_guard(1.0))) {
            return *f;
        }
        return mp::msb(n) < kNarrowBits ? exact_loglog<NarrowReal>(n) : exact_loglog<Real>(n);
    }
    case Kind::FloorLogPow: {
        if (n == 1)
            return 0;
        if (n <= std::numeric_limits<std::uint64_t>::max()) {
            if (auto f = guarded_floor(std::pow(std::log(n.convert_to<double>()), c_)))
                return *f;
        } else {
            const double x = std::pow(approx_ln(n), c_);
            if (auto f = guarded_floor(x, scaled_guard(x * std::max(1.0, c_))))
                return *f;
        }
        return mp::msb(n) < kNarrowBits ? exact_log_pow<NarrowReal>(n, c_) : exact_log_pow<Real>(n, c_);
    }
    default:
        break;
    }
    throw std::logic_error("unhandled sequence kind");
}

std::int64_t IntegerSequence::at(std::uint64_t n) const {
    if (n == 0)
        throw std::out_of_range("sequence index must be >= 1");
    if (small_) {
        if (n > small_->size())
            throw std::out_of_range(name_ + " is only tabulated up to n=" + std::to_string(small_->size()));
        return (*small_)[n - 1];
    }
    if (wide_) {
        if (n > wide_->size())
            throw std::out_of_range(name_ + " is only tabulated up to n=" + std::to_string(wide_->size()));
        return (*wide_)[n - 1];
    }
    switch (kind_) {
    case Kind::FloorLog2:
        return omerg::floor_log2(n);
    case Kind::Linear:
        if (n > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
            throw std::overflow_error("linear term does not fit");
        return static_cast<std::int64_t>(n);
    case Kind::FloorLogLog:
        if (n < 16)
            return 0;
        if (auto f = guarded_floor(std::log(std::log(static_cast<double>(n)))))
            return *f;
        break;
    case Kind::FloorLogPow:
        if (n == 1)
            return 0;
        if (auto f = guarded_floor(std::pow(std::log(static_cast<double>(n)), c_)))
            return *f;
        break;
    default:
        break;
    }
    return to_i64(value(BigInt(n)));
}

BigInt IntegerSequence::first_at_least(const BigInt& v, const BigInt& cap) const {
    if (!closed_form())
        throw std::logic_error("first_at_least needs a closed-form sequence");
    if (cap < 1)
        throw std::invalid_argument("first_at_least: cap must be >= 1");
    BigInt guess;
    switch (kind_) {
    case Kind::FloorLog2:
        if (v <= 0)
            return 1;
        if (v > mp::msb(cap))
            return cap;
        guess = BigInt(1) << v.convert_to<unsigned>();
        break;
    case Kind::Linear:
        guess = v < 1 ? BigInt(1) : v;
        break;
    case Kind::Lacunary: {
        BigInt n = 1;
        BigInt pw = base_;
        while (pw < v && n < cap) {
            pw *= base_;
            ++n;
        }
        return std::min(n, cap);
    }
    case Kind::FloorLogLog:
    case Kind::FloorLogPow: {
        if (v <= 0)
            return 1;
        // ln of the answer, to double precision
        const double vd = v.convert_to<double>();
        const double x = kind_ == Kind::FloorLogLog ? std::exp(vd) : std::pow(vd, 1.0 / c_);
        if (x > approx_ln(cap) + 1)
            return cap;
        const bool ll = kind_ == Kind::FloorLogLog;
        guess = x < kNarrowBits * std::numbers::ln2 - 8 ? exp_ceil<NarrowReal>(v, ll, c_) : exp_ceil<Real>(v, ll, c_);
        break;
    }
    default:
        throw std::logic_error("unhandled sequence kind");
    }
    // the inverse is exact up to rounding at the boundary; settle it
    if (guess < 1)
        guess = 1;
    while (guess > 1 && value(guess - 1) >= v)
        --guess;
    while (guess < cap && value(guess) < v)
        ++guess;
    return std::min(guess, cap);
}

BigInt IntegerSequence::count_in(const BigInt& n, const BigInt& lo, const BigInt& hi) const {
    if (n < 1 || lo > hi)
        return 0;
    if (closed_form()) {
        const BigInt cap = n + 1;
        const BigInt from = first_at_least(lo, cap);
        const BigInt to = first_at_least(hi + 1, cap);
        return to > from ? BigInt(to - from) : BigInt(0);
    }
    if (n > *limit())
        throw std::out_of_range(name_ + " is only tabulated up to n=" + std::to_string(*limit()));
    const auto len = n.convert_to<std::uint64_t>();
    std::uint64_t count = 0;
    if (small_) {
        if (hi < 0 || lo > 255)
            return 0;
        const auto l = static_cast<int>(std::max<BigInt>(lo, 0).convert_to<long>());
        const auto h = static_cast<int>(std::min<BigInt>(hi, 255).convert_to<long>());
        for (std::uint64_t i = 0; i < len; ++i) {
            const int x = (*small_)[i];
            count += (x >= l && x <= h) ? 1 : 0;
        }
    } else {
        for (std::uint64_t i = 0; i < len; ++i) {
            const auto& x = (*wide_)[i];
            count += (x >= lo && x <= hi) ? 1 : 0;
        }
    }
    return count;
}

// ---- Jones-Wierdl -------------------------------------------------------------

namespace {

std::uint64_t lag_index(double eps, std::uint64_t n) {
    return static_cast<std::uint64_t>(std::floor(eps * static_cast<double>(n)));
}

BigInt term(const IntegerSequence& a, std::uint64_t n) {
    try {
        return a.at(n);
    } catch (const std::overflow_error&) {
        return a.value(BigInt(n));
    }
}

bool ratio_exceeds(const BigInt& gap, const BigInt& phi, double c) {
    if (phi == 0)
        return gap > 0;
    return to_real(gap) > Real(c) * to_real(phi);
}

double ratio_of(const BigInt& gap, const BigInt& phi) {
    if (phi == 0)
        return gap > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    return (to_real(gap) / to_real(phi)).convert_to<double>();
}

void check_eps(double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("eps must lie in (0, 1)");
}

}  // namespace

BigInt jw_phi(const IntegerSequence& a, double eps, std::uint64_t p, std::uint64_t q) {
    check_eps(eps);
    if (p > q)
        throw std::invalid_argument("jw_phi: p must not exceed q");
    const std::uint64_t start = lag_index(eps, p);
    if (start == 0)
        throw std::invalid_argument("jw_phi: floor(eps*p) = 0 is outside the sequence");
    std::vector<BigInt> vals;
    vals.reserve(q - start + 1);
    for (std::uint64_t n = start; n <= q; ++n) {
        vals.push_back(term(a, n));
        if (vals.size() > 1 && vals.back() < vals[vals.size() - 2])
            throw std::invalid_argument("sequence decreases at n=" + std::to_string(n));
    }
    BigInt best = 0;
    bool first = true;
    for (std::uint64_t n = p; n <= q; ++n) {
        BigInt g = vals[n - start] - vals[lag_index(eps, n) - start];
        if (first || g > best)
            best = g;
        first = false;
    }
    return best;
}

JwResult jw_search(const IntegerSequence& a, double eps, std::uint64_t u, double c, std::uint64_t budget) {
    check_eps(eps);
    if (u == 0 || lag_index(eps, u) == 0)
        throw std::invalid_argument("jw_search: floor(eps*u) must be >= 1");
    JwResult res;
    // cache a_n from the smallest lag index onward
    const std::uint64_t base = lag_index(eps, u);
    std::vector<BigInt> vals;
    auto val = [&](std::uint64_t n) -> BigInt {
        while (base + vals.size() <= n) {
            vals.push_back(term(a, base + vals.size()));
            if (vals.size() > 1 && vals.back() < vals[vals.size() - 2])
                throw std::invalid_argument("sequence decreases at n=" + std::to_string(base + vals.size() - 1));
        }
        return vals[n - base];
    };

    std::vector<std::uint64_t> ps;  // active dyadic p
    std::vector<BigInt> phi;        // running φ_ε(p, q)
    for (std::uint64_t q = u; q <= budget; ++q) {
        const BigInt g = val(q) - val(lag_index(eps, q));
        if (q == (ps.empty() ? u : 2 * ps.back()) && (ps.empty() || ps.back() <= budget / 2)) {
            ps.push_back(q);
            phi.push_back(g);
        }
        for (std::size_t m = 0; m < ps.size(); ++m) {
            if (g > phi[m])
                phi[m] = g;
            if (ps[m] == q)
                continue;
            const BigInt gap = val(q) - val(ps[m]);
            if (ratio_exceeds(gap, phi[m], c)) {
                res.found = true;
                res.p = ps[m];
                res.q = q;
                res.gap = gap;
                res.phi = phi[m];
                res.ratio = ratio_of(gap, phi[m]);
                res.scanned = q;
                return res;
            }
        }
        res.scanned = q;
    }
    return res;
}

// ---- interval condition ---------------------------------------------------------

std::uint64_t default_r_base(double eps) {
    check_eps(eps);
    std::uint64_t r = 2;
    while (static_cast<double>(r) * eps <= 1.0)
        r *= 2;
    return r;
}

namespace {

/// Counts #{n <= N_i : a_n in [lo, hi]} for each certificate scale.
class LevelCounts {
public:
    /// Monotone sequences: first[v - vmin] = least n with a_n >= v.
    static LevelCounts from_first(BigInt vmin, std::vector<BigInt> first, std::vector<BigInt> ns) {
        LevelCounts lc;
        lc.monotone_ = true;
        lc.vmin_ = std::move(vmin);
        lc.first_ = std::move(first);
        lc.ns_ = std::move(ns);
        return lc;
    }

    /// Table-backed: one pass over n <= N_r, snapshotting value counts at each N_i.
    static LevelCounts from_scan(const IntegerSequence& a, std::vector<BigInt> ns) {
        LevelCounts lc;
        lc.ns_ = std::move(ns);
        std::map<std::int64_t, std::uint64_t> hist;
        std::uint64_t n = 1;
        for (const auto& target : lc.ns_) {
            const auto stop = to_u64(target);
            for (; n <= stop; ++n)
                hist[a.at(n)] += 1;
            std::vector<std::pair<std::int64_t, std::uint64_t>> cum;
            std::uint64_t run = 0;
            for (const auto& [v, k] : hist) {
                run += k;
                cum.emplace_back(v, run);
            }
            lc.cum_.push_back(std::move(cum));
        }
        return lc;
    }

    [[nodiscard]] BigInt count(std::size_t i, const BigInt& lo, const BigInt& hi) const {
        if (lo > hi)
            return 0;
        if (monotone_) {
            const BigInt top = ns_[i] + 1;
            const BigInt to = std::min(first_of(hi + 1), top);
            const BigInt from = std::min(first_of(lo), top);
            return to > from ? BigInt(to - from) : BigInt(0);
        }
        return below(i, hi) - below(i, lo - 1);
    }

private:
    [[nodiscard]] BigInt first_of(const BigInt& v) const {
        if (v <= vmin_)
            return 1;
        const BigInt idx = v - vmin_;
        if (idx >= first_.size())
            return ns_.back() + 1;
        return first_[idx.convert_to<std::size_t>()];
    }

    // #{n <= N_i : a_n <= v}
    [[nodiscard]] BigInt below(std::size_t i, const BigInt& v) const {
        const auto& cum = cum_[i];
        if (cum.empty() || v < cum.front().first)
            return 0;
        if (v >= cum.back().first)
            return cum.back().second;
        const auto key = v.convert_to<std::int64_t>();
        auto it = std::upper_bound(cum.begin(), cum.end(), key,
                                   [](std::int64_t x, const auto& e) { return x < e.first; });
        return std::prev(it)->second;
    }

    bool monotone_ = false;
    BigInt vmin_;
    std::vector<BigInt> first_;
    std::vector<BigInt> ns_;
    std::vector<std::vector<std::pair<std::int64_t, std::uint64_t>>> cum_;
};

constexpr std::size_t kMaxLevels = 10'000'000;

std::vector<BigInt> certificate_scales(const SweepOutCertificate& cert) {
    std::vector<BigInt> ns;
    for (const auto& iv : cert.intervals)
        ns.push_back(iv.n);
    return ns;
}

int gate_depth(const std::string& gate) {
    static const std::array<const char*, 5> order{"growth", "perturbation", "spread", "cover_ratio", "hit_fraction"};
    for (std::size_t i = 0; i < order.size(); ++i)
        if (gate == order[i])
            return static_cast<int>(i);
    return -1;
}

/// #{n <= N : lo <= a_n <= hi} for a monotone closed form.
BigInt closed_count(const IntegerSequence& a, const BigInt& n, const BigInt& lo, const BigInt& hi) {
    if (lo > hi)
        return 0;
    const BigInt to = a.first_at_least(hi + 1, n + 1);
    const BigInt from = a.first_at_least(lo, n + 1);
    return to > from ? BigInt(to - from) : BigInt(0);
}

/// Level counts from the analytic inverse (build side).
LevelCounts analytic_levels(const IntegerSequence& a, const std::vector<BigInt>& ns) {
    if (!a.closed_form())
        return LevelCounts::from_scan(a, ns);
    const BigInt& top = ns.back();
    const BigInt vmin = a.value(BigInt(1));
    const BigInt vmax = a.value(top);
    if (vmax - vmin + 2 > kMaxLevels)
        throw std::length_error("sequence spans too many values for level counting");
    std::vector<BigInt> first;
    for (BigInt v = vmin; v <= vmax + 1; ++v)
        first.push_back(a.first_at_least(v, top + 1));
    return LevelCounts::from_first(vmin, std::move(first), ns);
}

/// Level counts by bisection on a_n (verification side).
LevelCounts bisection_levels(const IntegerSequence& a, const std::vector<BigInt>& ns) {
    if (!a.closed_form())
        return LevelCounts::from_scan(a, ns);
    const BigInt& top = ns.back();
    const BigInt vmin = a.value(BigInt(1));
    const BigInt vmax = a.value(top);
    if (vmax - vmin + 2 > kMaxLevels)
        throw std::length_error("sequence spans too many values for level counting");
    std::vector<BigInt> first;
    BigInt lo = 1;
    for (BigInt v = vmin; v <= vmax + 1; ++v) {
        // least n in [lo, top+1] with a_n >= v, top+1 meaning none
        BigInt l = lo;
        BigInt h = top + 1;
        // the inverse is a guess; accept it only if the boundary checks out, else bisect
        const BigInt g = std::max(lo, a.first_at_least(v, top + 1));
        if (g <= top && a.value(g) >= v && (g == lo || a.value(g - 1) < v)) {
            first.push_back(g);
            lo = g;
            continue;
        }
        while (l < h) {
            const BigInt mid = (l + h) / 2;
            if (a.value(mid) >= v)
                h = mid;
            else
                l = mid + 1;
        }
        first.push_back(l);
        lo = l;
    }
    return LevelCounts::from_first(vmin, std::move(first), ns);
}

BigInt interval_length(const BigInt& lo, const BigInt& hi) { return hi >= lo ? BigInt(hi - lo + 1) : BigInt(0); }

std::pair<BigInt, BigInt> union_and_max(std::vector<std::pair<BigInt, BigInt>> ivs) {
    std::sort(ivs.begin(), ivs.end());
    BigInt total = 0;
    BigInt longest = 0;
    bool open = false;
    BigInt cur_lo;
    BigInt cur_hi;
    for (const auto& [lo, hi] : ivs) {
        longest = std::max(longest, interval_length(lo, hi));
        if (hi < lo)
            continue;
        if (open && lo <= cur_hi + 1) {
            cur_hi = std::max(cur_hi, hi);
            continue;
        }
        if (open)
            total += cur_hi - cur_lo + 1;
        cur_lo = lo;
        cur_hi = hi;
        open = true;
    }
    if (open)
        total += cur_hi - cur_lo + 1;
    return {total, longest};
}

bool above_fraction(const BigInt& count, const BigInt& n, double eps) {
    return to_real(count) > (Real(1) - Real(eps)) * to_real(n);
}

double fraction(const BigInt& count, const BigInt& n) { return (to_real(count) / to_real(n)).convert_to<double>(); }

struct ExceedanceScan {
    BigInt count = 0;
    std::optional<BigInt> failing_k;
};

/// X over k in [-L, L]; failing_k is the first k in some -J_i without exceedance.
ExceedanceScan scan_exceedance(const SweepOutCertificate& cert, const LevelCounts& levels, const BigInt& m,
                               const BigInt& l) {
    if (2 * l + 1 > kMaxLevels)
        throw std::length_error("periodic witness is too wide to scan");
    const auto lim = l.convert_to<std::int64_t>();
    ExceedanceScan out;
    for (std::int64_t k = -lim; k <= lim; ++k) {
        bool hit = false;
        for (std::size_t i = 0; i < cert.intervals.size() && !hit; ++i)
            hit = above_fraction(levels.count(i, -m - k, m - k), cert.intervals[i].n, cert.eps);
        if (hit) {
            out.count += 1;
            continue;
        }
        if (!out.failing_k) {
            for (const auto& iv : cert.intervals)
                if (-iv.hi <= k && k <= -iv.lo)
                    out.failing_k = BigInt(k);
        }
    }
    return out;
}

bool exceedance_holds(const BigInt& x, double c, const BigInt& e_size) {
    return to_real(x) > Real(c / 2.0) * to_real(e_size);
}

std::string big_str(const BigInt& v) { return v.str(); }

}  // namespace

SweepOutCertificate interval_condition_build(const IntegerSequence& b, const SweepParams& params,
                                             const PerturbationBound& p, const IntegerSequence* a) {
    check_eps(params.eps);
    if (!(params.c > 0.0))
        throw std::invalid_argument("C must be positive");
    if (!b.monotone())
        throw std::invalid_argument("b must be non-decreasing");
    const IntegerSequence& seq_a = a ? *a : b;

    SweepOutCertificate cert;
    cert.a_name = seq_a.name();
    cert.b_name = b.name();
    cert.eps = params.eps;
    cert.c = params.c;
    cert.r_base = params.r_base == 0 ? default_r_base(params.eps) : params.r_base;
    if (static_cast<double>(cert.r_base) * params.eps <= 1.0)
        throw std::invalid_argument("R must exceed 1/eps");

    BigInt cap = BigInt(1) << params.budget_bits;
    for (const auto* s : {&b, &seq_a})
        if (auto lim = s->limit())
            cap = std::min(cap, BigInt(*lim));

    // b and p at every power R^k within the budget
    const BigInt r_base = cert.r_base;
    std::vector<BigInt> powers{1};
    while (powers.back() * r_base <= cap)
        powers.push_back(powers.back() * r_base);
    std::vector<BigInt> bk;
    std::vector<BigInt> pk;
    for (const auto& n : powers) {
        bk.push_back(b.value(n));
        pk.push_back(p ? p(n) : BigInt(0));
    }
    const unsigned k_top = static_cast<unsigned>(powers.size()) - 1;

    unsigned k0 = 0;
    while (k0 + 1 <= k_top && powers[k0 + 1] < params.n_floor)
        ++k0;
    if (k0 + 1 > k_top) {
        cert.failed_gate = "budget";
        cert.detail = "no N_1 = R^(K0+1) >= n_floor fits the budget";
        return cert;
    }

    const Real four_c = Real(4) * Real(params.c);
    const Real eight_c = Real(8) * Real(params.c);
    for (; k0 + 1 <= k_top; ++k0) {
        std::string gate = "spread";
        std::string detail = "choice of r exhausted the budget";
        for (unsigned r = 1; k0 + r <= k_top; ++r) {
            const unsigned ki = k0 + r;
            const BigInt delta = bk[ki] - bk[ki - 1];
            if (delta > 0 && to_real(bk[ki]) < four_c * to_real(delta)) {
                gate = "growth";
                detail = "b(N_i)/(b(N_i)-b(N_{i-1})) < 4C at i=" + std::to_string(r);
                break;
            }
            if (pk[ki] > 0 && to_real(bk[ki]) < eight_c * to_real(pk[ki])) {
                gate = "perturbation";
                detail = "b(N)/p(N) < 8C at i=" + std::to_string(r);
                break;
            }
            if (2 * (bk[ki] - bk[k0 + 1]) < bk[ki])
                continue;  // spread not yet reached

            const BigInt margin = pk[ki];
            std::vector<std::pair<BigInt, BigInt>> ivs;
            for (unsigned i = 1; i <= r; ++i)
                ivs.emplace_back(bk[k0 + i - 1] - margin, bk[k0 + i] + margin);
            const auto [total, longest] = union_and_max(ivs);
            if (!(to_real(total) > Real(params.c) * to_real(longest))) {
                gate = "cover_ratio";
                detail = "|union J| / max|J| <= C at r=" + std::to_string(r);
                continue;
            }

            std::vector<BigInt> ns(powers.begin() + k0 + 1, powers.begin() + ki + 1);
            // closed forms are counted at the interval ends only; a may span far more values than b
            std::optional<LevelCounts> levels;
            if (!seq_a.closed_form())
                levels = LevelCounts::from_scan(seq_a, ns);
            std::vector<SweepInterval> out;
            bool hits_ok = true;
            for (unsigned i = 0; i < r; ++i) {
                SweepInterval iv{ns[i], ivs[i].first, ivs[i].second, 0, 0.0};
                iv.hits = levels ? levels->count(i, iv.lo, iv.hi) : closed_count(seq_a, ns[i], iv.lo, iv.hi);
                iv.hit_fraction = fraction(iv.hits, iv.n);
                if (!(to_real(iv.hits) >= (Real(1) - Real(params.eps)) * to_real(iv.n))) {
                    hits_ok = false;
                    detail = "hit fraction below 1-eps at i=" + std::to_string(i + 1);
                }
                out.push_back(std::move(iv));
            }
            if (!hits_ok) {
                gate = "hit_fraction";
                break;
            }
            cert.k0 = k0;
            cert.r = r;
            cert.p_margin = margin;
            cert.intervals = std::move(out);
            cert.union_size = total;
            cert.max_length = longest;
            cert.cover_ratio = fraction(total, longest);
            cert.built = true;
            cert.failed_gate.clear();
            cert.detail.clear();
            return cert;
        }
        // report the attempt that got furthest through the gates
        if (cert.failed_gate.empty() || gate_depth(gate) > gate_depth(cert.failed_gate)) {
            cert.failed_gate = gate;
            cert.detail = "K0=" + std::to_string(k0) + ": " + detail;
        }
    }
    return cert;
}

void periodic_witness(SweepOutCertificate& cert, const IntegerSequence& a) {
    if (!cert.built || cert.intervals.empty())
        throw std::invalid_argument("periodic_witness needs a built certificate");
    PeriodicWitness w;
    w.m = cert.max_length;
    w.l = 0;
    for (const auto& iv : cert.intervals)
        w.l = std::max({w.l, BigInt(mp::abs(iv.lo)), BigInt(mp::abs(iv.hi))});
    w.e_size = 2 * w.m + 1;
    w.d = cert.c / 2.0;
    const auto levels = analytic_levels(a, certificate_scales(cert));
    const auto scan = scan_exceedance(cert, levels, w.m, w.l);
    w.exceedance = scan.count;
    w.failing_k = scan.failing_k;
    w.holds = exceedance_holds(w.exceedance, cert.c, w.e_size);
    cert.witness = std::move(w);
}

SweepVerification verify_certificate(const SweepOutCertificate& cert, const IntegerSequence& a) {
    SweepVerification v;
    if (!cert.built || cert.intervals.empty()) {
        v.detail = "certificate was not built";
        return v;
    }
    const auto ns = certificate_scales(cert);
    const auto levels = bisection_levels(a, ns);

    v.hits = true;
    for (std::size_t i = 0; i < cert.intervals.size(); ++i) {
        const auto& iv = cert.intervals[i];
        const BigInt hits = levels.count(i, iv.lo, iv.hi);
        v.hit_fractions.push_back(fraction(hits, iv.n));
        if (hits != iv.hits || !(to_real(hits) >= (Real(1) - Real(cert.eps)) * to_real(iv.n))) {
            v.hits = false;
            if (v.detail.empty())
                v.detail = "hit count mismatch or shortfall at i=" + std::to_string(i + 1);
        }
    }

    std::vector<std::pair<BigInt, BigInt>> ivs;
    for (const auto& iv : cert.intervals)
        ivs.emplace_back(iv.lo, iv.hi);
    const auto [total, longest] = union_and_max(ivs);
    v.cover_ratio = fraction(total, longest);
    v.cover = total == cert.union_size && longest == cert.max_length &&
              to_real(total) > Real(cert.c) * to_real(longest);
    if (!v.cover && v.detail.empty())
        v.detail = "cover ratio " + std::to_string(v.cover_ratio) + " does not exceed C";

    BigInt l = 0;
    for (const auto& iv : cert.intervals)
        l = std::max({l, BigInt(mp::abs(iv.lo)), BigInt(mp::abs(iv.hi))});
    const BigInt e_size = 2 * longest + 1;
    const auto scan = scan_exceedance(cert, levels, longest, l);
    v.exceedance_count = scan.count;
    v.exceedance = exceedance_holds(scan.count, cert.c, e_size);
    if (cert.witness)
        v.exceedance = v.exceedance && cert.witness->exceedance == scan.count;
    if (!v.exceedance && v.detail.empty())
        v.detail = "exceedance count " + big_str(scan.count) + " does not exceed D|E|";
    return v;
}

// ---- perturbations ----------------------------------------------------------------

PerturbationProfile perturbation_profile(const IntegerSequence& a, const IntegerSequence& b,
                                         ExceptionalFilter filter, std::span<const std::uint64_t> checkpoints,
                                         double c) {
    if (!std::is_sorted(checkpoints.begin(), checkpoints.end()))
        throw std::invalid_argument("checkpoints must be ascending");
    PerturbationProfile prof;
    std::int64_t running = 0;
    std::uint64_t done = 0;
    for (const auto n : checkpoints) {
        std::int64_t p = 0;
        std::uint64_t excluded = 0;
        if (filter == ExceptionalFilter::None) {
            for (; done < n; ++done) {
                const std::uint64_t j = done + 1;
                running = std::max(running, std::abs(a.at(j) - b.at(j)));
            }
            p = running;
        } else {
            const double ll = loglog(n);
            const double half = c * std::sqrt(ll);
            for (std::uint64_t j = 1; j <= n; ++j) {
                const auto aj = a.at(j);
                if (std::abs(static_cast<double>(aj) - ll) > half) {
                    ++excluded;
                    continue;
                }
                p = std::max(p, std::abs(aj - b.at(j)));
            }
        }
        const auto bn = b.at(n);
        prof.n.push_back(n);
        prof.p.push_back(p);
        prof.b.push_back(bn);
        prof.ratio.push_back(p == 0 ? 0.0
                             : bn == 0
                                 ? std::numeric_limits<double>::infinity()
                                 : static_cast<double>(p) / static_cast<double>(bn));
        prof.excluded_density.push_back(static_cast<double>(excluded) / static_cast<double>(n));
    }
    return prof;
}

PerturbationBound exact_perturbation(const IntegerSequence& a, const IntegerSequence& b, ExceptionalFilter filter,
                                     double c) {
    return [a, b, filter, c](const BigInt& n) -> BigInt {
        const std::uint64_t cp[] = {to_u64(n)};
        if (filter == ExceptionalFilter::HardyRamanujan && cp[0] < 16)
            return exact_perturbation(a, b, ExceptionalFilter::None, c)(n);
        return perturbation_profile(a, b, filter, cp, c).p.front();
    };
}

// ---- central limit checks ------------------------------------------------------

CltResult clt_standardize(CltStatistic statistic, const ArithmeticDistribution& dist) {
    CltResult r;
    r.n = dist.n;
    const double ll = loglog(dist.n);
    const double sd = std::sqrt(ll);
    if (statistic == CltStatistic::Log2Divisors) {
        r.mean = std::numbers::ln2 * ll;
        r.sd = std::numbers::ln2 * sd;
        // (ln d - ln2·ll)/(ln2·sd) = (log2 d - ll)/sd
        for (const auto& [d, count] : dist.divisors)
            r.hist.add((std::log2(static_cast<double>(d)) - ll) / sd, count);
    } else {
        r.mean = ll;
        r.sd = sd;
        const auto& counts = statistic == CltStatistic::Omega ? dist.omega_big : dist.omega_small;
        for (std::size_t v = 0; v < counts.size(); ++v)
            if (counts[v] != 0)
                r.hist.add((static_cast<double>(v) - ll) / sd, counts[v]);
    }
    r.distance = cdf_distance(r.hist);
    return r;
}

}  // namespace omerg
