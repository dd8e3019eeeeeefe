#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "support.hpp"

#include "omerg/weights.hpp"

using namespace omerg;
using testing::stream_tables;
using testing::table_at;

namespace {

bool same_bits(const WeightTable& a, const WeightTable& b) {
    return a.n == b.n && a.k_max == b.k_max && a.pi == b.pi && a.xi == b.xi && a.eta == b.eta &&
           a.ek_hist.bins == b.ek_hist.bins && a.ek_hist.underflow == b.ek_hist.underflow &&
           a.ek_hist.overflow == b.ek_hist.overflow;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_SUITE("almost_prime_stats") {

TEST_CASE("N = 10 by hand") {
    const auto t = table_at(10);
    CHECK(t.k_max == 3);
    CHECK(t.pi == std::vector<std::uint64_t>{1, 4, 4, 1});
    CHECK(t.xi[0] == 1.0);
    CHECK(t.xi[1] == doctest::Approx(1.0 / 2 + 1.0 / 3 + 1.0 / 5 + 1.0 / 7).epsilon(1e-15));
    CHECK(t.xi[1] == doctest::Approx(1.17619047619047619).epsilon(1e-15));
    CHECK(t.eta[0] == 0.0);
    CHECK(t.eta[2] == doctest::Approx(0.3673536119837).epsilon(1e-12));

    const auto o = oracle::enumerate_weights(10);
    CHECK(t.pi == o.pi);
    for (unsigned k = 0; k <= 3; ++k) {
        CHECK(t.xi[k] == doctest::Approx(o.xi[k]).epsilon(1e-15));
        CHECK(t.eta[k] == doctest::Approx(o.eta[k]).epsilon(1e-15));
    }
}

TEST_CASE("tables match the enumeration oracle class by class") {
    const std::uint64_t n = 30000;
    const auto t = table_at(n);
    const auto o = oracle::enumerate_weights(n);
    REQUIRE(t.pi.size() == o.pi.size());
    CHECK(t.pi == o.pi);
    for (std::size_t k = 0; k < t.pi.size(); ++k) {
        CHECK(t.xi[k] == doctest::Approx(o.xi[k]).epsilon(1e-13));
        CHECK(t.eta[k] == doctest::Approx(o.eta[k]).epsilon(1e-13));
    }
}

TEST_CASE("partition identities at every checkpoint") {
    const std::vector<std::uint64_t> grid{16, 100, 1000, 10000, 100000, 500000};
    const auto tables = stream_tables(500000, grid, 2, 12345);
    REQUIRE(tables.size() == grid.size());
    oracle::Kahan harmonic, doublelog;
    std::uint64_t n = 0;
    for (const auto& t : tables) {
        while (n < t.n) {
            ++n;
            const auto x = static_cast<double>(n);
            harmonic.add(1.0 / x);
            if (n >= 2)
                doublelog.add(1.0 / (x * std::log(x)));
        }
        std::uint64_t count = 0;
        oracle::Kahan xi, eta;
        for (std::size_t k = 0; k < t.pi.size(); ++k) {
            count += t.pi[k];
            xi.add(t.xi[k]);
            eta.add(t.eta[k]);
        }
        CHECK(count == t.n);
        CHECK(rel(xi.value(), harmonic.value()) <= 1e-10);
        CHECK(rel(eta.value(), doublelog.value()) <= 1e-10);
        CHECK(t.k_max == floor_log2(t.n));
        CHECK(t.ek_hist.total() == t.n);
    }
}

TEST_CASE("block size and worker count do not change a single bit") {
    const std::vector<std::uint64_t> grid{100, 4321, 65536, 300000};
    const auto base = stream_tables(300000, grid, 1, 1 << 16);
    for (auto [workers, block] : {std::pair{1u, std::uint64_t{1000}}, std::pair{3u, std::uint64_t{77777}},
                                  std::pair{2u, std::uint64_t{300000}}, std::pair{4u, std::uint64_t{2}}}) {
        if (block == 2 && workers == 4) {
            const auto small = stream_tables(5000, {100, 4321}, workers, block);
            const auto ref = stream_tables(5000, {100, 4321}, 1, 5000);
            for (std::size_t i = 0; i < small.size(); ++i)
                CHECK(same_bits(small[i], ref[i]));
            continue;
        }
        const auto other = stream_tables(300000, grid, workers, block);
        REQUIRE(other.size() == base.size());
        for (std::size_t i = 0; i < base.size(); ++i)
            CHECK(same_bits(other[i], base[i]));
    }
}

TEST_CASE("merging disjoint ranges equals a single pass") {
    const auto primes = PrimeTable::covering(20001);
    WeightAccumulator whole;
    whole.accumulate(sieve_block(1, 20001, primes));

    WeightAccumulator head;
    head.accumulate(sieve_block(1, 7001, primes));
    WeightAccumulator tail(7001);
    tail.accumulate(sieve_block(7001, 12000, primes));
    tail.accumulate(sieve_block(12000, 20001, primes));
    head.merge(tail);
    CHECK(head.sums() == whole.sums());
    CHECK(same_bits(head.snapshot(20000), whole.snapshot(20000)));

    WeightAccumulator gap(9000);
    WeightAccumulator first;
    first.accumulate(sieve_block(1, 7001, primes));
    CHECK_THROWS_AS(first.merge(gap), std::logic_error);
}

TEST_CASE("out-of-order block aborts") {
    const auto primes = PrimeTable::covering(2000);
    WeightAccumulator acc;
    acc.accumulate(sieve_block(1, 100, primes));
    CHECK_THROWS_AS(acc.accumulate(sieve_block(200, 300, primes)), std::logic_error);
    CHECK_THROWS_AS((void)acc.snapshot(50), std::logic_error);
}

TEST_CASE("weights are non-decreasing in N and bounded by the eta(1) bracket") {
    const auto tables = stream_tables(1000000, {16, 1000, 100000, 1000000});
    const auto upper = eta_bracket(tables.back()).upper;
    for (std::size_t i = 1; i < tables.size(); ++i) {
        const auto& a = tables[i - 1];
        const auto& b = tables[i];
        for (std::size_t k = 0; k < a.pi.size(); ++k) {
            CHECK(b.pi[k] >= a.pi[k]);
            CHECK(b.xi[k] >= a.xi[k]);
            CHECK(b.eta[k] >= a.eta[k]);
        }
    }
    for (const auto& t : tables)
        for (double e : t.eta)
            CHECK(e <= upper);
}

TEST_CASE("landau ratio") {
    const auto t = table_at(1000000);
    CHECK(t.pi[1] == 78498);
    CHECK(landau_ratio(t, 1) == doctest::Approx(1.0844899477790795).epsilon(1e-12));

    const auto omega = oracle::omega_spf(1000000);
    const auto pi2 = std::count(omega.begin() + 1, omega.end(), 2u);
    const double n = 1e6;
    const double expected = static_cast<double>(pi2) * std::log(n) / (n * std::log(std::log(n)));
    CHECK(t.pi[2] == static_cast<std::uint64_t>(pi2));
    CHECK(landau_ratio(t, 2) == doctest::Approx(expected).epsilon(1e-12));

    CHECK_THROWS_WITH_AS(landau_ratio(t, 0), "undefined for k=0", DomainError);
    CHECK_THROWS_AS(landau_ratio(t, t.k_max + 1), DomainError);

    auto hollow = t;
    hollow.pi[7] = 0;
    CHECK(landau_ratio(hollow, 7) == 0.0);
}

TEST_CASE("erdos log ratio") {
    const auto t16 = table_at(16);
    const auto o = oracle::enumerate_weights(16);
    const double ll = std::log(std::log(16.0));
    CHECK(erdos_log_ratio(t16, 1) == doctest::Approx(o.xi[1] / ll).epsilon(1e-14));
    CHECK(erdos_log_ratio(t16, 2) == doctest::Approx(o.xi[2] * 2 / (ll * ll)).epsilon(1e-14));
    CHECK(erdos_log_ratio(t16, 0) == 1.0);
    CHECK(erdos_log_ratio(table_at(100000), 0) == 1.0);
    // below the double-log domain
    CHECK_THROWS_AS(erdos_log_ratio(table_at(10), 1), DomainError);
}

TEST_CASE("gaussian weight") {
    const double ll = std::log(std::log(1e9));
    CHECK(gaussian_weight(1000000000, ll) == doctest::Approx(0.2291388265993135).epsilon(1e-14));
    CHECK(gaussian_weight(1000000000, std::round(ll)) == doctest::Approx(0.2290).epsilon(1e-3));
    for (std::uint64_t n : {16ULL, 1000ULL, 1000000000ULL}) {
        const double l = std::log(std::log(static_cast<double>(n)));
        const double peak = gaussian_weight(n, l);
        CHECK(gaussian_weight(n, floor_log2(n)) < peak);
        for (double t : {0.3, 1.0, 2.5})
            CHECK(gaussian_weight(n, l + t) == doctest::Approx(gaussian_weight(n, l - t)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(gaussian_weight(15, 1.0), DomainError);
}

TEST_CASE("hardy-ramanujan fraction") {
    const auto t = table_at(1000000);
    CHECK(hr_fraction(t, 1000.0) == 0.0);
    const double tiny = hr_fraction(t, 1e-9);
    CHECK(tiny > 0.7);
    CHECK(tiny <= 1.0);
    double prev = 1.0;
    for (double c = 0.05; c < 6.0; c += 0.05) {
        const double f = hr_fraction(t, c);
        CHECK(f <= prev);
        CHECK(f >= 0.0);
        prev = f;
    }
    for (double c : {2.0, 3.0, 4.0})
        CHECK(hr_fraction(t, c) <= 2.0 / (c * c));
    CHECK_THROWS_AS(hr_fraction(t, 0.0), DomainError);
}

TEST_CASE("erdos-kac distance") {
    const auto t = table_at(100000);
    const double d = ek_cdf_distance(t);
    CHECK(d >= 0.0);
    CHECK(d <= 1.0);

    // all mass at one k: the empirical CDF jumps from 0 to 1 in a single bin
    WeightTable point;
    point.n = 1000;
    point.k_max = 9;
    point.pi.assign(10, 0);
    point.pi[2] = 1000;
    point.xi.assign(10, 0.0);
    point.eta.assign(10, 0.0);
    point.rebuild_histogram();
    const double z = (2.0 - std::log(std::log(1000.0))) / std::sqrt(std::log(std::log(1000.0)));
    const double step = normal_cdf(z + 0.1) - normal_cdf(z - 0.1);
    CHECK(ek_cdf_distance(point) >= 0.5 - step);
    CHECK(ek_cdf_distance(point) <= 1.0);

    CHECK(cdf_distance(StandardHistogram{}) == 0.0);
    CHECK_THROWS_AS(ek_cdf_distance(table_at(10)), DomainError);
}

TEST_CASE("normal cdf accuracy") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-7));
    CHECK(normal_cdf(-2.0) == doctest::Approx(0.022750131948179195).epsilon(1e-7));
    CHECK(normal_cdf(-6.0) == doctest::Approx(9.865876450376946e-10).epsilon(1e-7));
}

TEST_CASE("eta head mass") {
    const auto t = table_at(1000000);
    for (auto window : {EtaWindow::HardyRamanujan, EtaWindow::Double}) {
        const auto m = eta_head_mass(t, window);
        CHECK(m.head >= 0.0);
        CHECK(m.head <= m.total);
        CHECK(rel(m.head + m.tail, m.total) <= 1e-12);
    }
    const auto all = eta_head_mass(t, EtaWindow::HardyRamanujan, 100.0);
    CHECK(all.tail == 0.0);
    CHECK(rel(all.head, all.total) <= 1e-15);
    oracle::Kahan s;
    for (double e : t.eta)
        s.add(e);
    CHECK(rel(all.total, s.value() / std::log(std::log(1e6))) <= 1e-14);
}

TEST_CASE("xi window mass") {
    const auto t = table_at(1000000);
    CHECK(xi_window_mass(t, 100.0) == doctest::Approx(1.04178029921367617).epsilon(1e-12));
    const double c3 = xi_window_mass(t, 3.0);
    CHECK(c3 > 0.5);
    CHECK(c3 <= xi_window_mass(t, 100.0));

    auto empty = t;
    std::fill(empty.xi.begin(), empty.xi.end(), 0.0);
    CHECK(xi_window_mass(empty, 3.0) == 0.0);
    CHECK_THROWS_AS(xi_window_mass(t, 0.5), DomainError);
}

TEST_CASE("GLW fit") {
    std::vector<unsigned> ks;
    std::vector<double> eta;
    for (unsigned k = 4; k <= 14; ++k) {
        ks.push_back(k);
        eta.push_back(glw_model(1.0, k));
    }
    const auto fit = glw_fit_values(ks, eta);
    CHECK(fit.d == doctest::Approx(1.0).epsilon(1e-9));
    for (double r : fit.residual)
        CHECK(std::abs(r) < 1e-12);

    for (unsigned k = 3; k < 30; ++k)
        CHECK(glw_model(0.7, k + 1) > glw_model(0.7, k));

    const auto tables = stream_tables(1000000, {1000, 1000000});
    CHECK_THROWS_WITH_AS(glw_fit(tables, 8, 14), "unsaturated k", DomainError);
    CHECK_THROWS_AS(glw_fit(tables, 5, 4), DomainError);
    const auto ok = glw_fit(tables, 3, 9);
    CHECK(ok.k.size() == 7);
    CHECK(std::isfinite(ok.d));
}

TEST_CASE("eta of primes") {
    CHECK(eta_of_primes(2).lower == doctest::Approx(1.0 / (2.0 * std::numbers::ln2)).epsilon(1e-15));
    CHECK(eta_of_primes(15).lower == doctest::Approx(1.29034376318123).epsilon(1e-13));
    const auto b = eta_of_primes(1000000);
    CHECK(b.lower == doctest::Approx(oracle::prime_eta_segmented(1000000)).epsilon(1e-13));
    CHECK(b.upper == doctest::Approx(b.lower + 2.0 / std::log(1e6)).epsilon(1e-15));
    double prev = 0.0;
    for (std::uint64_t n : {2ULL, 3ULL, 100ULL, 1000ULL, 100000ULL}) {
        const double v = eta_of_primes(n).lower;
        CHECK(v > prev);
        prev = v;
    }
    CHECK_THROWS_AS(eta_of_primes(1), DomainError);

    const auto t = table_at(1000000);
    CHECK(eta_bracket(t).lower == doctest::Approx(b.lower).epsilon(1e-14));
}

TEST_CASE("asymptotic report is finite and positive") {
    const auto r = asymptotic_report(table_at(1000000));
    CHECK(r.landau.size() == 19);
    CHECK(r.erdos_log.size() == 20);
    for (double v : r.landau)
        CHECK((std::isfinite(v) && v > 0));
    for (double v : r.erdos_log)
        CHECK((std::isfinite(v) && v > 0));
    for (double v : r.gaussian)
        CHECK((std::isfinite(v) && v > 0));
    CHECK(r.hr >= 0.0);
    CHECK(r.ek_distance > 0.0);
    CHECK(r.eta1.lower > 1.5);
}

TEST_CASE("distribution accumulator") {
    SieveConfig config{20000, 999, {1000, 20000}};
    DistributionAccumulator dist;
    BlockConsumer* consumers[] = {&dist};
    stream_stats(config, consumers, 2);
    REQUIRE(dist.snapshots().size() == 2);
    const auto& d = dist.snapshots()[0];
    CHECK(d.n == 1000);
    std::vector<std::uint64_t> big(20, 0), small(20, 0);
    std::map<std::uint64_t, std::uint64_t> div;
    for (std::uint64_t n = 1; n <= 1000; ++n) {
        const auto o = oracle::trial_division(n);
        big[o.big]++;
        small[o.small]++;
        div[o.divisors]++;
    }
    for (std::size_t k = 0; k < d.omega_big.size(); ++k)
        CHECK(d.omega_big[k] == big[k]);
    for (std::size_t k = 0; k < d.omega_small.size(); ++k)
        CHECK(d.omega_small[k] == small[k]);
    CHECK(d.divisors == div);
}

}  // TEST_SUITE
