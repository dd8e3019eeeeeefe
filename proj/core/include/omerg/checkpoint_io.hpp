#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "omerg/weights.hpp"

namespace omerg {

/// FNV-1a 64 of "n_max;c1,c2,...", as 16 hex digits.
std::string config_hash(std::uint64_t n_max, std::span<const std::uint64_t> checkpoints);

/// <out>/run_n<n_max>_<hash>
std::filesystem::path run_directory(const std::filesystem::path& out, std::uint64_t n_max,
                                    std::span<const std::uint64_t> checkpoints);

/// Header `N,k,pi,xi,eta`; reals with 17 significant digits.
std::string checkpoint_csv(const WeightTable& table);
/// Header `N,bin_lo,bin_hi,count`; first and last rows are the -inf/inf tails.
std::string histogram_csv(const WeightTable& table);

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, std::uint64_t n);
std::filesystem::path histogram_path(const std::filesystem::path& dir, std::uint64_t n);

/// Writes both files for one checkpoint; errors name the offending path.
void write_checkpoint(const std::filesystem::path& dir, const WeightTable& table);

/// Parses a checkpoint CSV; the histogram is rebuilt from pi.
WeightTable read_checkpoint(const std::filesystem::path& csv);
StandardHistogram read_histogram(const std::filesystem::path& csv);

/// All checkpoint_<N>.csv files in `dir`, ascending N. Throws
/// std::runtime_error("no checkpoints found in ...") when there are none.
std::vector<WeightTable> read_run(const std::filesystem::path& dir);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace omerg
