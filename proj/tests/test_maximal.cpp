#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "support.hpp"

#include "omerg/averaging.hpp"
#include "omerg/maximal.hpp"

using namespace omerg;

namespace {

struct Fixture {
    std::vector<WeightTable> tables;
    MaximalGrid grid;
    double eta1_upper = 0.0;

    Fixture() {
        auto cps = geometric_checkpoints(1000000);
        cps.insert(cps.begin(), {16, 20, 32, 50});
        tables = testing::stream_tables(1000000, cps);
        grid = MaximalGrid::from_tables(tables);
        eta1_upper = eta_bracket(tables.back()).upper;
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

/// Dyadic random signal of total mass `mass` (a multiple of 1/8) on [0, width).
FiniteSignal random_signal(std::mt19937_64& rng, int eighths, std::int64_t width) {
    std::uniform_int_distribution<std::int64_t> pos(0, width - 1);
    std::map<std::int64_t, double> pts;
    for (int i = 0; i < eighths; ++i)
        pts[pos(rng)] += 0.125;
    std::vector<std::pair<std::int64_t, double>> v(pts.begin(), pts.end());
    return FiniteSignal::from_points(v);
}

/// Brute-force maximal function straight from the tables.
double brute_maximal(const FiniteSignal& phi, std::int64_t j, const std::vector<WeightTable>& tables) {
    double best = 0.0;
    for (const auto& t : tables) {
        const double ll = std::log(std::log(static_cast<double>(t.n)));
        const auto window = static_cast<unsigned>(std::floor(2 * ll));
        double s = 0.0;
        for (unsigned k = 1; k <= window; ++k)
            s += t.eta[k] * phi.at(j + k);
        best = std::max(best, s / ll);
    }
    return best;
}

}  // namespace

TEST_SUITE("maximal") {

TEST_CASE("grid windows") {
    const auto& f = fixture();
    CHECK(f.grid.scales.front().n == 16);
    CHECK(f.grid.scales.front().window == 2);  // floor(2 lnln16) = floor(2.039)
    CHECK(f.grid.max_window() == static_cast<unsigned>(std::floor(2 * std::log(std::log(1e6)))));
    CHECK_THROWS_AS(maximal_value(FiniteSignal{}, 0, MaximalGrid{}), std::invalid_argument);
}

TEST_CASE("zero signal") {
    const auto& f = fixture();
    const FiniteSignal zero{0, std::vector<double>(10, 0.0)};
    for (std::int64_t j = -20; j < 20; ++j)
        CHECK(maximal_value(zero, j, f.grid) == 0.0);
    CHECK(exceedance_set(zero, 0.5, f.grid).empty());
    const auto cert = greedy_cover(zero, 0.5, f.grid, f.eta1_upper);
    CHECK(cert.intervals.empty());
    CHECK(weak11_verify(zero, cert).pass());
}

TEST_CASE("unit spike") {
    const auto& f = fixture();
    const std::vector<std::pair<std::int64_t, double>> pts{{100, 1.0}};
    const auto spike = FiniteSignal::from_points(pts);
    CHECK(maximal_value(spike, 99, f.grid) >= 1.265314028955268 - 1e-12);
    const auto o16 = oracle::enumerate_weights(16);
    CHECK(maximal_value(spike, 99, f.grid) >= o16.eta[1] / std::log(std::log(16.0)) - 1e-15);
    CHECK(maximal_value(spike, 100 - 1 - static_cast<std::int64_t>(f.grid.max_window()), f.grid) == 0.0);
    CHECK(maximal_value(spike, 100, f.grid) == 0.0);

    CHECK(exceedance_set(spike, 10.0 * f.eta1_upper, f.grid).empty());

    for (double lambda : {1.0, 0.5, 0.3}) {
        const auto cert = greedy_cover(spike, lambda, f.grid, f.eta1_upper);
        const auto report = weak11_verify(spike, cert);
        CHECK(report.pass());
        if (lambda == 1.0) {
            CHECK(cert.exceedance.size() <= 3);
            CHECK(cert.intervals.size() <= 1);
        }
    }
}

TEST_CASE("exceedance sets agree with brute force") {
    const auto& f = fixture();
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const auto phi = random_signal(rng, 64, 40);
        const auto e = exceedance_set(phi, 1.0, f.grid);
        std::vector<std::int64_t> brute;
        for (std::int64_t j = -200; j < 200; ++j)
            if (brute_maximal(phi, j, f.tables) > 1.0)
                brute.push_back(j);
        CHECK(e == brute);
        CHECK(static_cast<double>(e.size()) <= 2.0 * f.eta1_upper * 8.0);
        CHECK(e.size() <= 27);
    }
}

TEST_CASE("random certificates verify") {
    const auto& f = fixture();
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> mass(1, 512);
    std::uniform_int_distribution<std::int64_t> width(1, 200);
    for (int trial = 0; trial < 100; ++trial) {
        const auto phi = random_signal(rng, mass(rng), width(rng));
        for (double lambda : {0.25, 1.0, 4.0}) {
            const auto cert = greedy_cover(phi, lambda, f.grid, f.eta1_upper);
            const auto r = weak11_verify(phi, cert);
            CHECK(r.disjoint);
            CHECK(r.covers);
            CHECK(r.bound);
        }
    }
}

TEST_CASE("adversarial signal on one window") {
    const auto& f = fixture();
    const FiniteSignal block{0, std::vector<double>(f.grid.max_window(), 8.0)};
    for (double lambda : {0.5, 1.0, 2.0, 8.0}) {
        const auto cert = greedy_cover(block, lambda, f.grid, f.eta1_upper);
        CHECK(weak11_verify(block, cert).pass());
    }
}

TEST_CASE("monotone, translation-equivariant and homogeneous") {
    const auto& f = fixture();
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const auto phi = random_signal(rng, 40, 30);
        auto bigger = phi;
        for (auto& v : bigger.values)
            v += 0.125;
        FiniteSignal shifted = phi;
        shifted.offset += 13;
        FiniteSignal scaled = phi;
        for (auto& v : scaled.values)
            v *= 4.0;
        for (std::int64_t j = -30; j < 40; ++j) {
            const double m = maximal_value(phi, j, f.grid);
            CHECK(maximal_value(bigger, j, f.grid) >= m);
            CHECK(maximal_value(shifted, j + 13, f.grid) == m);
            CHECK(maximal_value(scaled, j, f.grid) == 4.0 * m);
        }
        CHECK(exceedance_set(scaled, 4.0, f.grid) == exceedance_set(phi, 1.0, f.grid));

        FiniteSignal odd = phi;
        for (auto& v : odd.values)
            v *= 3.0;
        for (std::int64_t j = -30; j < 40; ++j)
            CHECK(maximal_value(odd, j, f.grid) == doctest::Approx(3.0 * maximal_value(phi, j, f.grid)).epsilon(1e-14));
    }
}

TEST_CASE("a grid without the witness scale is detected") {
    const auto& f = fixture();
    const std::vector<std::pair<std::int64_t, double>> pts{{0, 4.0}};
    const auto spike = FiniteSignal::from_points(pts);
    auto cert = greedy_cover(spike, 1.0, f.grid, f.eta1_upper);
    REQUIRE_FALSE(cert.exceedance.empty());
    // drop an interval: the verifier must notice the uncovered points
    cert.intervals.pop_back();
    CHECK_FALSE(weak11_verify(spike, cert).covers);
    // overlapping intervals are not disjoint
    auto dup = greedy_cover(spike, 1.0, f.grid, f.eta1_upper);
    dup.intervals.push_back(dup.intervals.front());
    CHECK_FALSE(weak11_verify(spike, dup).disjoint);
}

TEST_CASE("signal parsing") {
    const auto s = FiniteSignal::parse("# spike\n3 1\n5, 0.5\n\n4 0\n");
    CHECK(s.offset == 3);
    CHECK(s.values == std::vector<double>{1.0, 0.0, 0.5});
    CHECK(s.mass() == 1.5);
    CHECK(s.at(2) == 0.0);
    CHECK(s.at(100) == 0.0);
    CHECK_THROWS_AS(FiniteSignal::parse("1 -1\n"), std::invalid_argument);
    CHECK_THROWS_AS(FiniteSignal::parse("1 1\n1 2\n"), std::invalid_argument);
    CHECK_THROWS_AS(FiniteSignal::parse("1\n"), std::invalid_argument);
    CHECK(FiniteSignal::parse("").empty());
}

}  // TEST_SUITE
