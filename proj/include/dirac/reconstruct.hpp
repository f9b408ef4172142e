#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dirac/problem.hpp"
#include "dirac/spectrum.hpp"

namespace dirac {

/// A slot in the template that a fit parameter writes to. Potential slots
/// address constant pieces of the template's PotentialSpec by index;
/// kTheta addresses a transmission by index.
struct ParameterSlot {
  enum class Kind { kP, kQ, kR, kTheta };
  Kind kind = Kind::kP;
  int index = 0;
};

struct FitParameter {
  std::string name;
  std::vector<ParameterSlot> slots;  // one value may drive several slots, e.g. p and r
  double lower = -1.0;
  double upper = 1.0;
};

struct ReconstructionSpec {
  DiracProblem problem;  // template; its current slot values are ignored
  std::vector<FitParameter> parameters;
  std::vector<double> targets_main;  // eigenvalues of L
  std::vector<double> targets_aux;   // eigenvalues of L1 (y1(a) = 0)
  std::vector<double> weights_main;  // empty means all 1
  std::vector<double> weights_aux;
};

struct ReconstructionOptions {
  /// Root-mean-square eigenvalue mismatch below which a fit is accepted.
  double tol = 1e-7;
  int max_iterations = 60;
  /// Explicit start vectors; when empty, a grid of `grid_per_parameter` points
  /// per parameter inside the bounds is used.
  std::vector<std::vector<double>> starts;
  int grid_per_parameter = 3;
  /// Extra uniformly drawn starts, reproducible through `seed`.
  int random_starts = 0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  SpectrumOptions spectrum;
};

struct StartReport {
  std::vector<double> start;
  std::vector<double> parameters;
  double rms = 0.0;  // infinite when every evaluation was rejected
  int iterations = 0;
};

struct ReconstructionResult {
  std::vector<double> parameters;
  double rms = 0.0;
  std::vector<double> mismatch_main;  // model minus target, per target
  std::vector<double> mismatch_aux;
  std::vector<StartReport> starts;
};

/// Applies parameter values to the template.
DiracProblem apply_parameters(const ReconstructionSpec& spec, const std::vector<double>& values);

/// Model eigenvalues matched to the targets by sorted index inside the window
/// [min - d, max + d], d half the mean target spacing. Throws kMatchingFailure
/// if the counts differ.
std::vector<double> matched_eigenvalues(const DiracProblem& problem, const std::vector<double>& targets,
                                        bool auxiliary, const SpectrumOptions& opts = {});

/// Weighted least-squares fit of the two spectra by Levenberg-Marquardt with
/// central differences, from several starts. Throws kMatchingFailure when no
/// start yields matchable spectra and kNonConvergence when the best RMS
/// mismatch stays above opts.tol.
ReconstructionResult reconstruct(const ReconstructionSpec& spec, const ReconstructionOptions& opts = {});

}  // namespace dirac
