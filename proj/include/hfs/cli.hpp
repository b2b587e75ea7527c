#pragma once

#include <iosfwd>

namespace hfs {

/// Entry point of the `hfs` command. Exit codes: 0 success, 1 run failure
/// (non-convergence, failed identity, I/O), 2 usage or configuration error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace hfs
