#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dirac::cli {

enum ExitCode : int { kSuccess = 0, kValidation = 1, kNumerical = 2, kIoFailure = 3 };

struct RunConfig {
  std::string command;  // scan, spectrum, asympt, weyl, pmatrix, reconstruct, validate
  std::string problem_path;
  std::string problem2_path;
  std::optional<std::pair<double, double>> window;
  int grid = 200;
  double tol = 0.0;  // 0 selects each command's default
  std::string out_path;  // empty writes to the output stream
  std::string format = "csv";
  std::uint64_t seed = 0;

  bool auxiliary = false;                  // spectrum of L1 instead of L
  std::string targets_path;                // reconstruct: spectrum output of L
  std::string aux_targets_path;            // reconstruct: spectrum output of L1
  std::vector<std::string> parameters;     // reconstruct: "name=slot[,slot]:lower:upper"
  std::vector<std::string> starts;         // reconstruct: comma-separated start vectors
};

/// Parses argv into a RunConfig; throws std::invalid_argument on bad usage.
/// Returns std::nullopt when help was requested (text written to `out`).
std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out);

/// Executes one command. Results go to config.out_path or `out`; diagnostics to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace dirac::cli
