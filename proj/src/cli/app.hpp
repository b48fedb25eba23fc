#pragma once

namespace ttsketch::cli {

/// Parses arguments and runs one subcommand. Returns the process exit
/// status: 0 success, 1 runtime or numeric failure, 2 usage error.
int run(int argc, const char* const* argv);

}  // namespace ttsketch::cli
