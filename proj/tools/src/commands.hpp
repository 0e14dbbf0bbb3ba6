#pragma once

#include <iosfwd>

namespace freqseg::cli {

enum ExitCode : int { kExitOk = 0, kExitIo = 1, kExitUsage = 2, kExitCompute = 3 };

/// Parses argv and runs one subcommand. Diagnostics go to `err`, stdout
/// payloads (CSV, JSON stats, help) to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace freqseg::cli
