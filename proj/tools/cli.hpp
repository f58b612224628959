#pragma once

#include <ostream>

namespace cpack::cli {

// Exit codes of the command-line tool.
inline constexpr int kOk = 0;
inline constexpr int kUnexpected = 1;
inline constexpr int kFormat = 2;
inline constexpr int kMembership = 3;
inline constexpr int kSolver = 4;
inline constexpr int kDegeneracy = 5;

// Runs one subcommand. Regular output goes to `out` unless -o names a file;
// diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace cpack::cli
