#pragma once

namespace sdg {

/// Entry point of the `sdg` command-line tool.  Returns the process exit
/// code: 0 success, 2 configuration error (bad flags, config file, mesh spec,
/// or mesh file), 3 solver non-convergence (artifacts are still written),
/// 4 internal error.
int run_cli(int argc, const char* const* argv);

}  // namespace sdg
