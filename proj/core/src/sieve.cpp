#include "omerg/sieve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace omerg {

std::uint64_t isqrt(std::uint64_t n) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
    while (r > 0 && (r > n / r))
        --r;
    while ((r + 1) <= n / (r + 1))
        ++r;
    return r;
}

std::vector<std::uint64_t> base_primes(std::uint64_t limit) {
    std::vector<std::uint64_t> primes;
    if (limit < 2)
        return primes;
    primes.push_back(2);
    // composite[i] marks 2i+3
    const std::uint64_t count = (limit - 1) / 2;
    std::vector<bool> composite(count, false);
    for (std::uint64_t i = 0; i < count; ++i) {
        if (composite[i])
            continue;
        const std::uint64_t p = 2 * i + 3;
        primes.push_back(p);
        if (p > limit / p)
            continue;
        for (std::uint64_t m = (p * p - 3) / 2; m < count; m += p)
            composite[m] = true;
    }
    return primes;
}

PrimeTable PrimeTable::covering(std::uint64_t hi) {
    return up_to(hi > 1 ? isqrt(hi - 1) : 0);
}

FactorCountBlock sieve_block(std::uint64_t lo, std::uint64_t hi, const PrimeTable& primes) {
    if (lo < 1 || hi <= lo)
        throw SieveError("sieve_block: require 1 <= lo < hi");
    if (primes.limit < isqrt(hi - 1))
        throw SieveError("insufficient base primes");

    const std::size_t size = hi - lo;
    FactorCountBlock block;
    block.lo = lo;
    block.hi = hi;
    block.omega_big.assign(size, 0);
    block.omega_small.assign(size, 0);
    block.divisors.assign(size, 1);
    // product of the prime powers found so far; n / found is the unsieved cofactor
    std::vector<std::uint64_t> found(size, 1);

    auto* big = block.omega_big.data();
    auto* small = block.omega_small.data();
    auto* div = block.divisors.data();
    auto* prod = found.data();

    for (const std::uint64_t p : primes.primes) {
        if (p > (hi - 1) / p)
            break;
        // walk n = q * p, tracking q mod p so the common case needs no division
        std::uint64_t q = (lo + p - 1) / p;
        std::uint64_t r = q % p;
        for (std::uint64_t n = q * p; n < hi; n += p, ++q) {
            const std::size_t i = n - lo;
            if (r != 0) {
                big[i] += 1;
                div[i] *= 2;
                prod[i] *= p;
            } else {
                unsigned e = 1;
                std::uint64_t pw = p;
                for (std::uint64_t m = q; m % p == 0; m /= p) {
                    ++e;
                    pw *= p;
                }
                big[i] += static_cast<std::uint8_t>(e);
                div[i] *= e + 1;
                prod[i] *= pw;
            }
            small[i] += 1;
            if (++r == p)
                r = 0;
        }
    }

    for (std::size_t i = 0; i < size; ++i) {
        if (prod[i] != lo + i) {
            big[i] += 1;
            small[i] += 1;
            div[i] *= 2;
        }
    }
    return block;
}

FactorCounts factor_counts_naive(std::uint64_t n) {
    FactorCounts out;
    for (std::uint64_t p = 2; p <= n / p; ++p) {
        if (n % p != 0)
            continue;
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.omega_big += e;
        out.omega_small += 1;
        out.divisors *= e + 1;
    }
    if (n > 1) {
        out.omega_big += 1;
        out.omega_small += 1;
        out.divisors *= 2;
    }
    return out;
}

void SieveConfig::validate() const {
    if (n_max < 2)
        throw std::invalid_argument("n_max must be >= 2");
    if (block_size < 2 || block_size > n_max)
        throw std::invalid_argument("block_size must lie in [2, n_max]");
    std::uint64_t prev = 0;
    for (const auto c : checkpoints) {
        if (c < kMinCheckpoint || c > n_max) {
            std::ostringstream os;
            os << "checkpoint " << c << " outside [" << kMinCheckpoint << ", n_max=" << n_max << "]";
            throw std::invalid_argument(os.str());
        }
        if (c <= prev)
            throw std::invalid_argument("checkpoints must be strictly increasing");
        prev = c;
    }
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> plan_blocks(const SieveConfig& config) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> blocks;
    auto cp = config.checkpoints.begin();
    const std::uint64_t end = config.n_max + 1;
    std::uint64_t lo = 1;
    while (lo < end) {
        std::uint64_t hi = std::min(end, lo + config.block_size);
        while (cp != config.checkpoints.end() && *cp < lo)
            ++cp;
        if (cp != config.checkpoints.end() && *cp + 1 < hi)
            hi = *cp + 1;
        blocks.emplace_back(lo, hi);
        lo = hi;
    }
    return blocks;
}

namespace {

struct Delivery {
    FactorCountBlock block;
    std::vector<std::any> digests;
};

Delivery produce(std::uint64_t lo, std::uint64_t hi, const PrimeTable& primes,
                 std::span<BlockConsumer* const> consumers) {
    Delivery d{sieve_block(lo, hi, primes), {}};
    d.digests.reserve(consumers.size());
    for (const auto* c : consumers)
        d.digests.push_back(c->digest(d.block));
    return d;
}

}  // namespace

StreamReport stream_stats(const SieveConfig& config, std::span<BlockConsumer* const> consumers,
                          unsigned workers) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const auto blocks = plan_blocks(config);
    const PrimeTable primes = PrimeTable::covering(config.n_max + 1);

    StreamReport report;
    auto cp = config.checkpoints.begin();

    auto deliver = [&](std::size_t index, Delivery& d) {
        const auto [lo, hi] = blocks[index];
        try {
            for (std::size_t c = 0; c < consumers.size(); ++c)
                consumers[c]->consume(d.block, d.digests[c]);
            if (cp != config.checkpoints.end() && *cp == hi - 1) {
                for (auto* c : consumers)
                    c->at_checkpoint(hi - 1);
                ++cp;
                ++report.checkpoints;
            }
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "consumer failed on block [" << lo << ", " << hi << "): " << e.what();
            throw SieveError(os.str());
        }
        ++report.blocks;
        report.integers += hi - lo;
    };

    if (workers <= 1) {
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            auto d = produce(blocks[i].first, blocks[i].second, primes, consumers);
            deliver(i, d);
        }
    } else {
        // bounded reorder buffer: workers may run at most `window` blocks ahead
        const std::size_t window = 2 * static_cast<std::size_t>(workers);
        std::mutex mu;
        std::condition_variable ready;
        std::condition_variable space;
        std::map<std::size_t, Delivery> buffer;
        std::size_t next_task = 0;
        std::size_t delivered = 0;
        bool stop = false;
        std::exception_ptr worker_error;

        auto work = [&] {
            for (;;) {
                std::size_t index;
                {
                    std::unique_lock lock(mu);
                    space.wait(lock, [&] { return stop || next_task < delivered + window; });
                    if (stop || next_task >= blocks.size())
                        return;
                    index = next_task++;
                }
                try {
                    auto d = produce(blocks[index].first, blocks[index].second, primes, consumers);
                    std::lock_guard lock(mu);
                    buffer.emplace(index, std::move(d));
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!worker_error)
                        worker_error = std::current_exception();
                    stop = true;
                }
                ready.notify_all();
                space.notify_all();
            }
        };

        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work);

        auto halt = [&] {
            {
                std::lock_guard lock(mu);
                stop = true;
            }
            space.notify_all();
            pool.clear();
        };

        try {
            for (std::size_t i = 0; i < blocks.size(); ++i) {
                Delivery d;
                {
                    std::unique_lock lock(mu);
                    ready.wait(lock, [&] { return worker_error || buffer.contains(i); });
                    if (worker_error)
                        std::rethrow_exception(worker_error);
                    auto node = buffer.extract(i);
                    d = std::move(node.mapped());
                }
                deliver(i, d);
                {
                    std::lock_guard lock(mu);
                    delivered = i + 1;
                }
                space.notify_all();
            }
        } catch (...) {
            halt();
            throw;
        }
        halt();
    }

    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

namespace {

class OmegaRecorder final : public BlockConsumer {
public:
    explicit OmegaRecorder(std::uint64_t limit) { values_.reserve(limit); }
    void consume(const FactorCountBlock& block, std::any&) override {
        values_.insert(values_.end(), block.omega_big.begin(), block.omega_big.end());
    }
    std::vector<std::uint8_t> take() { return std::move(values_); }

private:
    std::vector<std::uint8_t> values_;
};

}  // namespace

std::vector<std::uint8_t> omega_table(std::uint64_t limit, unsigned workers) {
    if (limit < 2)
        return limit == 1 ? std::vector<std::uint8_t>{0} : std::vector<std::uint8_t>{};
    SieveConfig config;
    config.n_max = limit;
    config.block_size = std::min<std::uint64_t>(limit, std::uint64_t{1} << 20);
    OmegaRecorder rec(limit);
    BlockConsumer* consumers[] = {&rec};
    stream_stats(config, consumers, workers);
    return rec.take();
}

}  // namespace omerg
