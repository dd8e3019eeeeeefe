#include <doctest.h>

#include <stdexcept>

#include <random>

#include "oracles.hpp"
#include "support.hpp"

#include "omerg/sieve.hpp"

using namespace omerg;

namespace {

class OmegaRecorder final : public BlockConsumer {
public:
    std::vector<std::uint8_t> omega;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges;
    std::vector<std::uint64_t> checkpoints;

    void consume(const FactorCountBlock& block, std::any&) override {
        ranges.emplace_back(block.lo, block.hi);
        omega.insert(omega.end(), block.omega_big.begin(), block.omega_big.end());
    }
    void at_checkpoint(std::uint64_t n) override { checkpoints.push_back(n); }
};

}  // namespace

TEST_SUITE("sieve") {

TEST_CASE("base primes") {
    CHECK(base_primes(10) == std::vector<std::uint64_t>{2, 3, 5, 7});
    CHECK(base_primes(2) == std::vector<std::uint64_t>{2});
    CHECK(base_primes(1).empty());
    CHECK(base_primes(0).empty());

    const auto primes = base_primes(100);
    CHECK(primes.size() == 25);
    for (auto p : primes)
        CHECK(oracle::trial_division(p).big == 1);
}

TEST_CASE("isqrt is exact near squares") {
    for (std::uint64_t r : {1ULL, 2ULL, 3ULL, 1000ULL, 4294967295ULL}) {
        CHECK(isqrt(r * r) == r);
        CHECK(isqrt(r * r - 1) == r - 1);
    }
    CHECK(isqrt(0) == 0);
    CHECK(isqrt(~0ULL) == 4294967295ULL);
}

TEST_CASE("hand-checked factor counts") {
    const auto block = sieve_block(1, 400, PrimeTable::covering(400));
    CHECK(block.omega_big[359] == 6);
    CHECK(block.omega_small[359] == 3);
    CHECK(block.divisors[359] == 24);
    CHECK(block.omega_big[0] == 0);
    CHECK(block.omega_small[0] == 0);
    CHECK(block.divisors[0] == 1);

    CHECK(factor_counts_naive(12) == FactorCounts{3, 2, 6});
    CHECK(factor_counts_naive(1 << 20) == FactorCounts{20, 1, 21});
    CHECK(factor_counts_naive(9699690) == FactorCounts{8, 8, 256});
    CHECK(factor_counts_naive(1) == FactorCounts{0, 0, 1});
}

TEST_CASE("block [10, 20)") {
    const auto block = sieve_block(10, 20, PrimeTable::covering(20));
    const std::vector<std::uint8_t> expected{2, 1, 3, 1, 2, 2, 4, 1, 3, 1};
    CHECK(block.omega_big == expected);
    for (std::uint64_t n = 10; n < 20; ++n) {
        const auto o = oracle::trial_division(n);
        CHECK(block.omega_big[n - 10] == o.big);
        CHECK(block.omega_small[n - 10] == o.small);
        CHECK(block.divisors[n - 10] == o.divisors);
    }
}

TEST_CASE("insufficient base primes is an error") {
    const PrimeTable small = PrimeTable::up_to(5);
    CHECK_NOTHROW(sieve_block(1, 36, small));
    CHECK_THROWS_AS(sieve_block(1, 37, small), SieveError);
    CHECK_THROWS_WITH_AS(sieve_block(1, 50, small), "insufficient base primes", SieveError);
    CHECK_THROWS_AS(sieve_block(5, 5, small), SieveError);
}

TEST_CASE("agrees with trial division for all n <= 1e5") {
    const std::uint64_t n_max = 100000;
    const auto block = sieve_block(1, n_max + 1, PrimeTable::covering(n_max + 1));
    std::uint64_t mismatches = 0;
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        const auto o = oracle::trial_division(n);
        const auto i = n - 1;
        if (block.omega_big[i] != o.big || block.omega_small[i] != o.small || block.divisors[i] != o.divisors)
            ++mismatches;
    }
    CHECK(mismatches == 0);
}

TEST_CASE("block invariants hold on a high block") {
    const std::uint64_t lo = 999'000'000'000ULL;
    const std::uint64_t hi = lo + 20000;
    const auto block = sieve_block(lo, hi, PrimeTable::covering(hi));
    for (std::uint64_t n = lo; n < hi; ++n) {
        const auto i = n - lo;
        const unsigned big = block.omega_big[i];
        const unsigned small = block.omega_small[i];
        CHECK((std::uint64_t{1} << small) <= block.divisors[i]);
        CHECK(block.divisors[i] <= (std::uint64_t{1} << big));
        CHECK(small <= big);
        CHECK(big >= 1);
        CHECK(((std::uint64_t{1} << big) <= n));
    }
    for (std::uint64_t n = lo; n < lo + 300; ++n) {
        const auto o = oracle::trial_division(n);
        CHECK(block.omega_big[n - lo] == o.big);
        CHECK(block.divisors[n - lo] == o.divisors);
    }
}

TEST_CASE("complete additivity on random pairs") {
    const std::uint64_t n_max = 1 << 20;
    const auto omega = omega_table(n_max);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 5000; ++trial) {
        std::uniform_int_distribution<std::uint64_t> pick_m(1, 1024);
        const auto m = pick_m(rng);
        std::uniform_int_distribution<std::uint64_t> pick_n(1, n_max / m);
        const auto n = pick_n(rng);
        CHECK(omega[m * n - 1] == omega[m - 1] + omega[n - 1]);
    }
}

TEST_CASE("prime counts from the stream match base_primes") {
    const std::uint64_t n_max = 1000000;
    SieveConfig config{n_max, 1 << 14, {1000, 10000, 100000, 1000000}};
    OmegaRecorder rec;
    BlockConsumer* consumers[] = {&rec};
    stream_stats(config, consumers, 2);
    REQUIRE(rec.omega.size() == n_max);
    for (std::uint64_t n : config.checkpoints) {
        const auto primes = std::count(rec.omega.begin(), rec.omega.begin() + static_cast<std::ptrdiff_t>(n), 1);
        CHECK(static_cast<std::size_t>(primes) == base_primes(n).size());
    }
    CHECK(base_primes(1000000).size() == 78498);
    CHECK(rec.checkpoints == config.checkpoints);
}

TEST_CASE("blocks are contiguous, ascending and never straddle a checkpoint") {
    SieveConfig config{100000, 777, {100, 1000, 5000, 100000}};
    OmegaRecorder rec;
    BlockConsumer* consumers[] = {&rec};
    const auto report = stream_stats(config, consumers, 3);
    CHECK(report.integers == 100000);
    CHECK(report.checkpoints == 4);
    std::uint64_t next = 1;
    for (auto [lo, hi] : rec.ranges) {
        CHECK(lo == next);
        next = hi;
        for (auto c : config.checkpoints)
            CHECK_FALSE((lo <= c && c + 1 < hi));
    }
    CHECK(next == 100001);
    CHECK(rec.checkpoints == config.checkpoints);
    CHECK(plan_blocks(config).size() == rec.ranges.size());
}

TEST_CASE("checkpoint emission order") {
    SieveConfig config{1000, 64, {100, 1000}};
    OmegaRecorder rec;
    BlockConsumer* consumers[] = {&rec};
    stream_stats(config, consumers, 1);
    CHECK(rec.checkpoints == std::vector<std::uint64_t>{100, 1000});
}

TEST_CASE("config validation") {
    SieveConfig ok{1000, 100, {16, 100, 1000}};
    CHECK_NOTHROW(ok.validate());
    CHECK_THROWS_AS((SieveConfig{1, 1, {}}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((SieveConfig{1000, 1, {}}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((SieveConfig{1000, 2000, {}}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((SieveConfig{1000, 100, {10}}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((SieveConfig{1000, 100, {100, 100}}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((SieveConfig{1000, 100, {2000}}).validate(), std::invalid_argument);
}

TEST_CASE("consumer failure names the block range") {
    struct Failing final : BlockConsumer {
        void consume(const FactorCountBlock& block, std::any&) override {
            if (block.lo > 500)
                throw std::runtime_error("boom");
        }
    } failing;
    SieveConfig config{2000, 256, {}};
    BlockConsumer* consumers[] = {&failing};
    try {
        stream_stats(config, consumers, 2);
        FAIL("expected failure");
    } catch (const std::exception& e) {
        const std::string what = e.what();
        CHECK(what.find("boom") != std::string::npos);
        CHECK(what.find("[") != std::string::npos);
    }
}

TEST_CASE("omega table is independent of worker count") {
    CHECK(omega_table(300000, 1) == omega_table(300000, 3));
}

}  // TEST_SUITE
