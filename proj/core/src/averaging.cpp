#include "omerg/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "omerg/exact_sum.hpp"

namespace omerg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

double double_log_mass(std::uint64_t n) {
    ExactSum s;
    for (std::uint64_t m = 2; m <= n; ++m) {
        const auto x = static_cast<double>(m);
        s.add(1.0 / (x * std::log(x)));
    }
    return s.value();
}

}  // namespace

AveragingScheme parse_scheme(const std::string& name) {
    if (name == "cesaro")
        return Cesaro{};
    if (name == "log")
        return Logarithmic{};
    if (name == "loglog")
        return DoubleLog{false};
    if (name == "loglog-exact")
        return DoubleLog{true};
    throw std::invalid_argument("unknown scheme '" + name + "' (cesaro, log, loglog, loglog-exact)");
}

std::string scheme_name(const AveragingScheme& scheme) {
    return std::visit(overloaded{
                          [](const Cesaro&) { return std::string("cesaro"); },
                          [](const Logarithmic&) { return std::string("log"); },
                          [](const DoubleLog& d) {
                              return std::string(d.exact_mass ? "loglog-exact" : "loglog");
                          },
                          [](const CustomWeight& c) { return c.name; },
                      },
                      scheme);
}

double scheme_weight(const AveragingScheme& scheme, std::uint64_t n) {
    return std::visit(overloaded{
                          [](const Cesaro&) { return 1.0; },
                          [&](const Logarithmic&) { return 1.0 / static_cast<double>(n); },
                          [&](const DoubleLog&) {
                              if (n < 2)
                                  return 0.0;
                              const auto x = static_cast<double>(n);
                              return 1.0 / (x * std::log(x));
                          },
                          [&](const CustomWeight& c) { return c.w(n); },
                      },
                      scheme);
}

double scheme_normalizer(const AveragingScheme& scheme, std::uint64_t n) {
    return std::visit(overloaded{
                          [&](const Cesaro&) { return static_cast<double>(n); },
                          [&](const Logarithmic&) {
                              if (n < 2)
                                  throw DomainError("logarithmic average needs N >= 2");
                              return std::log(static_cast<double>(n));
                          },
                          [&](const DoubleLog& d) {
                              const double ll = loglog(n);
                              return d.exact_mass ? double_log_mass(n) : ll;
                          },
                          [&](const CustomWeight& c) {
                              ExactSum s;
                              for (std::uint64_t m = 1; m <= n; ++m)
                                  s.add(c.w(m));
                              return s.value();
                          },
                      },
                      scheme);
}

void validate_weight(const CustomWeight& weight, std::uint64_t n) {
    double prev = weight.w(1);
    if (!(prev >= 0.0))
        throw std::invalid_argument("weight is negative at n=1");
    for (std::uint64_t m = 2; m <= n; ++m) {
        const double cur = weight.w(m);
        if (!(cur >= 0.0) || cur > prev) {
            std::ostringstream os;
            os << "weight is " << (cur > prev ? "increasing" : "negative") << " at n=" << m;
            throw std::invalid_argument(os.str());
        }
        prev = cur;
    }
}

double weighted_average(std::span<const double> a, const AveragingScheme& scheme) {
    const std::uint64_t n = a.size();
    if (n == 0)
        throw std::invalid_argument("weighted_average: empty sequence");
    if (const auto* c = std::get_if<CustomWeight>(&scheme))
        validate_weight(*c, n);
    const double norm = scheme_normalizer(scheme, n);
    ExactSum s;
    for (std::uint64_t m = 1; m <= n; ++m) {
        if (!std::isfinite(a[m - 1]))
            throw std::invalid_argument("weighted_average: non-finite value");
        s.add(scheme_weight(scheme, m) * a[m - 1]);
    }
    return s.value() / norm;
}

std::vector<double> sbp_transform(std::span<const double> w, std::uint64_t start) {
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto len = static_cast<double>(i + 1);  // n - start + 1
        if (i + 1 < w.size()) {
            if (w[i + 1] > w[i]) {
                std::ostringstream os;
                os << "weight increases at n=" << start + i;
                throw std::invalid_argument(os.str());
            }
            out[i] = len * (w[i] - w[i + 1]);
        } else {
            out[i] = len * w[i];
        }
    }
    return out;
}

SbpCheck sbp_check(std::span<const double> w, std::uint64_t start) {
    const auto t = sbp_transform(w, start);
    ExactSum lhs;
    ExactSum rhs;
    SbpCheck c;
    for (std::size_t i = 0; i < w.size(); ++i) {
        lhs.add(w[i]);
        rhs.add(t[i]);
        c.non_negative = c.non_negative && t[i] >= 0.0;
    }
    c.mass = lhs.value();
    c.transformed_mass = rhs.value();
    ExactSum diff = lhs;
    for (double v : t)
        diff.add(-v);
    c.relative_error = c.mass == 0.0 ? std::abs(diff.value()) : std::abs(diff.value() / c.mass);
    return c;
}

ConvergenceReport convergence_report(std::string scheme, std::vector<std::uint64_t> n,
                                     std::vector<double> value) {
    ConvergenceReport r{std::move(scheme), std::move(n), std::move(value), 0.0, 0.0};
    if (!r.value.empty()) {
        const auto tail = r.value.begin() + static_cast<std::ptrdiff_t>(r.value.size() / 2);
        r.limsup_estimate = *std::max_element(tail, r.value.end());
        r.liminf_estimate = *std::min_element(tail, r.value.end());
    }
    return r;
}

DominationReport weight_domination_demo(std::span<const double> a, const AveragingScheme& w,
                                        std::span<const std::uint64_t> checkpoints) {
    if (!std::is_sorted(checkpoints.begin(), checkpoints.end()) ||
        (!checkpoints.empty() && (checkpoints.front() < 1 || checkpoints.back() > a.size())))
        throw std::invalid_argument("checkpoints must be ascending within [1, len(a)]");
    if (const auto* c = std::get_if<CustomWeight>(&w))
        validate_weight(*c, a.size());

    std::vector<std::uint64_t> ns(checkpoints.begin(), checkpoints.end());
    std::vector<double> ces;
    std::vector<double> wtd;
    ExactSum plain;
    ExactSum weighted;
    std::uint64_t m = 0;
    for (const auto cp : checkpoints) {
        for (; m < cp; ++m) {
            plain.add(a[m]);
            weighted.add(scheme_weight(w, m + 1) * a[m]);
        }
        ces.push_back(plain.value() / static_cast<double>(cp));
        wtd.push_back(weighted.value() / scheme_normalizer(w, cp));
    }
    DominationReport r;
    for (std::size_t i = 0; i < ces.size(); ++i)
        r.gap.push_back(std::abs(ces[i] - wtd[i]));
    r.cesaro = convergence_report("cesaro", ns, std::move(ces));
    r.weighted = convergence_report(scheme_name(w), std::move(ns), std::move(wtd));
    return r;
}

double omega_average_regrouped(const OrbitTable& orbit, const WeightTable& table,
                               const AveragingScheme& scheme) {
    if (orbit.values.size() <= table.k_max)
        throw std::invalid_argument("orbit too short for the table's k range");
    ExactSum s;
    double norm = 0.0;
    std::visit(overloaded{
                   [&](const Cesaro&) {
                       for (unsigned k = 0; k <= table.k_max; ++k)
                           s.add(static_cast<double>(table.pi[k]) * orbit.values[k]);
                       norm = static_cast<double>(table.n);
                   },
                   [&](const Logarithmic&) {
                       for (unsigned k = 0; k <= table.k_max; ++k)
                           s.add(table.xi[k] * orbit.values[k]);
                       norm = scheme_normalizer(scheme, table.n);
                   },
                   [&](const DoubleLog& d) {
                       ExactSum mass;
                       for (unsigned k = 0; k <= table.k_max; ++k) {
                           s.add(table.eta[k] * orbit.values[k]);
                           mass.add(table.eta[k]);
                       }
                       norm = d.exact_mass ? mass.value() : loglog(table.n);
                   },
                   [&](const CustomWeight&) {
                       throw std::invalid_argument("custom weights have no weight-table column");
                   },
               },
               scheme);
    return s.value() / norm;
}

double omega_average_direct(const OrbitTable& orbit, std::span<const std::uint8_t> omega,
                            const AveragingScheme& scheme, std::uint64_t n) {
    if (n == 0 || n > omega.size())
        throw std::invalid_argument("omega_average_direct: N outside the sieved range");
    ExactSum s;
    for (std::uint64_t m = 1; m <= n; ++m) {
        const auto k = omega[m - 1];
        if (k >= orbit.values.size())
            throw std::invalid_argument("orbit too short for Ω values");
        s.add(scheme_weight(scheme, m) * orbit.values[k]);
    }
    return s.value() / scheme_normalizer(scheme, n);
}

LacunaryGrid lacunary_checkpoints(double rho, std::uint64_t cap) {
    if (!(rho > 1.0))
        throw std::invalid_argument("lacunary ratio must exceed 1");
    LacunaryGrid g;
    for (unsigned i = 1;; ++i) {
        const long double e = std::pow(static_cast<long double>(rho), static_cast<long double>(i));
        const long double t = std::exp2(e);
        std::uint64_t value = 0;
        bool fits = t < 64.0L;
        if (fits) {
            const long double v = std::floor(t) == t ? std::ldexp(1.0L, static_cast<int>(t))
                                                     : std::floor(std::exp2(t));
            value = static_cast<std::uint64_t>(v);
            fits = value <= cap;
        }
        if (!fits) {
            g.first_overflow = i;
            return g;
        }
        g.n.push_back(value);
    }
}

std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t n_max) {
    std::vector<std::uint64_t> out;
    for (int i = 0;; ++i) {
        const auto v = static_cast<std::uint64_t>(std::llround(std::pow(10.0, 2.0 + i / 4.0)));
        if (v >= n_max)
            break;
        out.push_back(v);
    }
    out.push_back(n_max);
    return out;
}

}  // namespace omerg
