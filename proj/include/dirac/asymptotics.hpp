#pragma once

#include <vector>

#include "dirac/problem.hpp"

namespace dirac {

/// One trigonometric factor written uniformly as cos(omega * lambda + phase).
struct TrigFactor {
  double omega = 0.0;
  double phase = 0.0;
};

/// sign * amplitude * lambda^power * prod_k cos(omega_k lambda + phase_k).
/// The boundary contributions are folded into amplitude and phase: in the
/// equal-degree branch a2 cos t - a1 sin t = R cos(t + atan2(a1, a2)) with R = hypot(a1, a2).
struct LeadingTerm {
  int power = 0;
  double amplitude = 1.0;
  int sign = 1;
  std::vector<TrigFactor> factors;

  Complex operator()(Complex lambda) const;
  /// Product of the trigonometric factors only.
  Complex oscillator(Complex lambda) const;
};

/// Leading term of phi_{j,component}(x, lambda) for x in subinterval j.
LeadingTerm phi_leading_term(const DiracProblem& problem, int j, int component, double x);
/// Leading term of psi_{j,component}(x, lambda) for x in subinterval j.
LeadingTerm psi_leading_term(const DiracProblem& problem, int j, int component, double x);
/// Leading quasi-polynomial of Delta.
LeadingTerm delta_leading_term(const DiracProblem& problem);

/// Leading terms as (component 1, component 2).
std::pair<Complex, Complex> phi_leading(const DiracProblem& problem, int j, double x, Complex lambda);
std::pair<Complex, Complex> psi_leading(const DiracProblem& problem, int j, double x, Complex lambda);
Complex delta_leading(const DiracProblem& problem, Complex lambda);

/// Zeros of the leading quasi-polynomial in [lambda_min, lambda_max], sorted,
/// repeated by multiplicity; lambda = 0 carries the power of lambda on top of
/// any vanishing factor.
std::vector<double> asymptotic_eigenvalues(const DiracProblem& problem, double lambda_min,
                                           double lambda_max);
/// The `count` smallest nonnegative zeros of the leading quasi-polynomial.
std::vector<double> asymptotic_eigenvalues(const DiracProblem& problem, int count);

struct AsymptoticsReport {
  std::vector<double> lambda;
  std::vector<double> oscillator;  // |product of trigonometric factors|
  std::vector<double> deviation;   // |Delta / leading - 1|
  std::vector<bool> admissible;    // |oscillator| >= threshold
  std::vector<double> window_edges;
  std::vector<double> window_max;  // max admissible deviation per window, NaN if none
  bool nonincreasing = true;       // window_max does not increase
  double max_deviation = 0.0;      // over all admissible points
};

/// Compares Delta with its leading term on a real grid. With `window_edges`
/// empty, four equal windows over the grid range are used.
AsymptoticsReport compare_asymptotics(const DiracProblem& problem, const std::vector<double>& grid,
                                      const std::vector<double>& window_edges = {},
                                      double min_oscillator = 0.5);

}  // namespace dirac
