#pragma once

#include <any>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace omerg {

class SieveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ω(n), ω(n), d(n) for every n in the half-open range [lo, hi).
struct FactorCountBlock {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    std::vector<std::uint8_t> omega_big;    // Ω, with multiplicity
    std::vector<std::uint8_t> omega_small;  // ω, distinct primes
    std::vector<std::uint64_t> divisors;    // d

    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(hi - lo); }
};

struct FactorCounts {
    unsigned omega_big = 0;
    unsigned omega_small = 0;
    std::uint64_t divisors = 1;

    friend bool operator==(const FactorCounts&, const FactorCounts&) = default;
};

/// Primes up to `limit`, sorted. Empty for limit < 2.
std::vector<std::uint64_t> base_primes(std::uint64_t limit);

/// A prime list that is known to be complete up to `limit`.
struct PrimeTable {
    std::uint64_t limit = 0;
    std::vector<std::uint64_t> primes;

    static PrimeTable up_to(std::uint64_t limit) { return {limit, base_primes(limit)}; }
    /// Table sufficient for sieving any block ending at or below `hi`.
    static PrimeTable covering(std::uint64_t hi);
};

std::uint64_t isqrt(std::uint64_t n);

/// Sieves [lo, hi) by stripping every prime power p^e | n for p <= sqrt(hi-1).
/// Throws SieveError("insufficient base primes") if `primes` does not reach
/// sqrt(hi - 1).
FactorCountBlock sieve_block(std::uint64_t lo, std::uint64_t hi, const PrimeTable& primes);

/// Trial-division reference; test oracle only.
FactorCounts factor_counts_naive(std::uint64_t n);

struct SieveConfig {
    std::uint64_t n_max = 0;
    std::uint64_t block_size = std::uint64_t{1} << 20;
    std::vector<std::uint64_t> checkpoints;

    /// Smallest checkpoint admitted; ln ln N > 1 from here on.
    static constexpr std::uint64_t kMinCheckpoint = 16;

    /// Throws std::invalid_argument naming the violated constraint.
    void validate() const;
};

/// Receives blocks in ascending order from `stream_stats`.
///
/// `digest` runs on a sieve worker and must only read the block; whatever it
/// returns is handed back to `consume` on the delivering thread. Consumers
/// that need no per-block precomputation leave it empty.
class BlockConsumer {
public:
    virtual ~BlockConsumer() = default;

    [[nodiscard]] virtual std::any digest(const FactorCountBlock& /*block*/) const { return {}; }
    virtual void consume(const FactorCountBlock& block, std::any& digest) = 0;
    /// Called after the block ending at `n` (inclusive) has been consumed.
    virtual void at_checkpoint(std::uint64_t /*n*/) {}
};

struct StreamReport {
    std::uint64_t blocks = 0;
    std::uint64_t integers = 0;
    std::uint64_t checkpoints = 0;
    double seconds = 0.0;
};

/// Block boundaries used by `stream_stats`: fixed-size blocks over [1, n_max],
/// additionally cut after every checkpoint so no block straddles one.
std::vector<std::pair<std::uint64_t, std::uint64_t>> plan_blocks(const SieveConfig& config);

/// Sieves [1, n_max] with `workers` threads and delivers every block to every
/// consumer, in ascending block order, exactly once. Output is independent of
/// `workers` and of the block size.
StreamReport stream_stats(const SieveConfig& config, std::span<BlockConsumer* const> consumers,
                          unsigned workers = 1);

/// Ω(n) for n = 1..limit (index 0 holds n = 1).
std::vector<std::uint8_t> omega_table(std::uint64_t limit, unsigned workers = 1);

}  // namespace omerg
