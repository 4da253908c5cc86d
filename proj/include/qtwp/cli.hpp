#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qtwp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

/// Runs one `qtwp` invocation; `args` excludes the program name.
/// Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count for batch/sweep: QTWP_THREADS if set and positive, else the
/// hardware concurrency.
unsigned worker_count();

}  // namespace qtwp::cli
