#pragma once

namespace evifuse::cli {

/// Runs the command-line pipeline (subcommands: index, rerank, eval).
/// Returns the process exit code: 0 success, 2 input-contract violation,
/// 3 missing dependency, 4 transport failure.
int run(int argc, const char* const* argv);

}  // namespace evifuse::cli
