#pragma once

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace bshadow::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kInvalidArgument = 2,
  kIoError = 3,
};

/// Environment variable naming the directory for outputs written without
/// an explicit --output.
inline constexpr const char* kOutputDirEnv = "BSHADOW_OUTPUT_DIR";

/// "start:end:count" with inclusive endpoints inside [0, 1].
struct EpsilonGrid {
  double start = 0.0;
  double end = 1.0;
  std::size_t count = 101;

  static EpsilonGrid parse(std::string_view text);
  std::vector<double> values() const;
};

/// Runs one subcommand. Informational output goes to `out`; errors are
/// written to `err` as a single JSON object.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bshadow::cli
