#pragma once

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "omerg/sieve.hpp"
#include "omerg/weights.hpp"

namespace testing {

/// Weight table over [1, n] from a single block, for any n >= 2.
inline omerg::WeightTable table_at(std::uint64_t n) {
    omerg::WeightAccumulator acc;
    acc.accumulate(omerg::sieve_block(1, n + 1, omerg::PrimeTable::covering(n + 1)));
    return acc.snapshot(n);
}

/// Tables at each checkpoint through the streaming pipeline.
inline std::vector<omerg::WeightTable> stream_tables(std::uint64_t n_max, std::vector<std::uint64_t> checkpoints,
                                                     unsigned workers = 1,
                                                     std::uint64_t block = std::uint64_t{1} << 16) {
    omerg::SieveConfig config;
    config.n_max = n_max;
    config.block_size = std::min(block, n_max);
    config.checkpoints = std::move(checkpoints);
    omerg::WeightAccumulator acc;
    omerg::BlockConsumer* consumers[] = {&acc};
    omerg::stream_stats(config, consumers, workers);
    return acc.tables();
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("omerg_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace testing
