#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cusplab::cli {

/// Exit statuses of dispatch.
inline constexpr int kOk = 0;
inline constexpr int kDomainFailure = 1;
inline constexpr int kNumericalFailure = 2;

/// Parses argv and runs one subcommand. Results go to `out` and the output
/// directory, diagnostics to `err`.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience for tests: args excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cusplab::cli
