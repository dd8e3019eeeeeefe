#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace omerg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "OMERG_OUT_DIR";

/// Accepts plain integers and integral scientific notation ("1e6").
std::uint64_t parse_count(const std::string& text);

/// "geometric", "lacunary:rho", "list:a,b,..." joined with '+'. The result is
/// restricted to [16, n_max], sorted, deduplicated, and always ends at n_max.
std::vector<std::uint64_t> parse_grid(const std::string& spec, std::uint64_t n_max);

/// Runs one command line (argv[0] is the program name) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace omerg::cli
