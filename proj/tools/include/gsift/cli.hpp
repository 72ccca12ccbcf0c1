#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gsift::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kFailure = 2;

/// Environment variable naming the on-disk feature cache directory.
inline constexpr const char* kCacheEnv = "GSIFT_CACHE_DIR";

/// Runs one command. `args` excludes the program name. Data goes to `out`,
/// diagnostics and usage text to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gsift::cli
