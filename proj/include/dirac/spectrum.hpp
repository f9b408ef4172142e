#pragma once

#include <cstddef>
#include <vector>

#include "dirac/problem.hpp"
#include "dirac/propagator.hpp"

namespace dirac {

/// Delta(lambda) = W(psi, phi) = b2 phi2(b) - b1 phi1(b).
Complex delta(const DiracProblem& problem, Complex lambda, const IntegratorOptions& opts = {});
/// The same characteristic function evaluated at the other end: a1 psi1(a) - a2 psi2(a).
Complex delta_from_a(const DiracProblem& problem, Complex lambda,
                     const IntegratorOptions& opts = {});
/// Delta as mantissa and natural-log exponent, for |Im lambda| large enough to overflow.
std::pair<Complex, double> delta_scaled(const DiracProblem& problem, Complex lambda,
                                        const IntegratorOptions& opts = {});

struct DeltaCheck {
  Complex from_b;
  Complex from_a;
  double deviation;  // |from_b - from_a| / (1 + |from_b|)
};

/// Evaluates both routes; throws kInconsistent if they differ by more than
/// `tolerance * (1 + |Delta|)`.
DeltaCheck delta_diagnostics(const DiracProblem& problem, Complex lambda, double tolerance = 1e-7,
                             const IntegratorOptions& opts = {});

/// Delta_1(lambda) = psi_1(a, lambda): characteristic function of the problem
/// with the left condition replaced by y1(a) = 0.
Complex delta1(const DiracProblem& problem, Complex lambda, const IntegratorOptions& opts = {});

/// The problem L1: same data with a1 = 1, a2 = 0 (so y1(a) = 0). Its Delta equals delta1.
DiracProblem auxiliary_problem(const DiracProblem& problem);

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

struct SpectrumOptions {
  /// Bracket width at which bisection stops; 0 selects 1e-10 * max(1, |lambda|).
  double tol = 0.0;
  /// Local minima of |Delta| (no sign change) below near_zero * max|Delta| on
  /// the scan are reported as suspected multiple zeros.
  double near_zero = 1e-6;
  /// Scan spacing; 0 selects pi / (4 S) with S the total length.
  double scan_step = 0.0;
  std::size_t max_samples = 4'000'000;
  bool with_norming = false;
  /// Worker threads for scanning and refinement; 0 uses the hardware count.
  unsigned threads = 0;
  IntegratorOptions integrator;
};

struct SpectrumResult {
  std::vector<double> eigenvalues;  // strictly increasing
  std::vector<double> residuals;    // |Delta(lambda_k)|
  std::vector<Bracket> brackets;
  std::vector<double> norming;      // mu_k, filled when requested
  std::vector<double> suspected;    // near-zero minima without sign change
};

/// Real eigenvalues of L in [lambda_min, lambda_max].
SpectrumResult find_eigenvalues(const DiracProblem& problem, double lambda_min,
                                double lambda_max, const SpectrumOptions& opts = {});

/// Real eigenvalues of L1 (zeros of delta1) in [lambda_min, lambda_max].
SpectrumResult find_auxiliary_eigenvalues(const DiracProblem& problem, double lambda_min,
                                          double lambda_max, const SpectrumOptions& opts = {});

/// A 2-vector function sampled on a per-subinterval uniform grid. Entry i holds
/// the samples of subinterval (xi_i, xi_{i+1}), ends included as one-sided limits.
struct SampledFunction {
  std::vector<std::vector<double>> x;
  std::vector<std::vector<Vector2c>> y;
};

struct Eigenfunction {
  SampledFunction samples;
  double boundary_residual = 0.0;         // |b2 phi2(b) - b1 phi1(b)|
  std::vector<double> jump_residuals;     // residual of the two jump conditions per xi_i
};

/// Grid rule used for eigenfunctions: at least 32 (1 + |lambda| rho_i width_i / pi)
/// points per subinterval, rounded so the panel count is a multiple of 4.
std::vector<int> default_points_per_interval(const DiracProblem& problem, double lambda);

/// phi(., lambda_k) on the grid. Throws kNotAnEigenvalue if |Delta(lambda_k)|
/// exceeds `tolerance` relative to the size of the boundary terms.
Eigenfunction eigenfunction(const DiracProblem& problem, double lambda_k,
                            const std::vector<int>& points_per_interval,
                            double tolerance = 1e-6, const IntegratorOptions& opts = {});

/// Element (y, Y1, Y2, Y3) of the extended space H.
struct HElement {
  SampledFunction function_part;
  std::vector<Complex> Y1;               // length m_a
  std::vector<Complex> Y2;               // length m_b
  std::vector<std::vector<Complex>> Y3;  // length r_i per transmission
};

struct ClosureResiduals {
  double a = 0.0;              // terminal equation of the Y1 chain
  double b = 0.0;              // terminal equation of the Y2 chain
  std::vector<double> jumps;   // terminal equation of each Y3 chain
  double max() const;
};

/// The Y-chains built from D(T) and the component equations of TY = lambda Y for
/// phi(., lambda), with the residuals of the terminal closure equations.
struct EigenElementResult {
  HElement element;
  ClosureResiduals residuals;
};

/// Builds chains and residuals at any lambda without checking closure.
EigenElementResult build_eigen_element(const DiracProblem& problem, double lambda,
                                       const std::vector<int>& points_per_interval,
                                       const IntegratorOptions& opts = {});

/// Eigen-element at an eigenvalue; throws kClosureViolated if a closure
/// residual exceeds `tolerance * (1 + scale)` of its chain.
HElement eigen_element(const DiracProblem& problem, double lambda_k, double tolerance = 1e-6,
                       const IntegratorOptions& opts = {});

/// ||Y||^2 in H: weighted integral of |y1|^2 + |y2|^2 (composite Simpson per
/// subinterval) plus the squared moduli of all finite blocks. Throws
/// kGridTooCoarse if the quadrature error estimate exceeds 1e-6 relative.
double h_norm_sq(const HElement& element, const DiracProblem& problem);

/// mu_k: squared H-norm of the eigen-element at lambda_k.
double norming_constant(const DiracProblem& problem, double lambda_k,
                        const IntegratorOptions& opts = {});

struct ZeroCount {
  double winding = 0.0;  // raw (1 / 2 pi i) contour integral of Delta'/Delta
  int count = 0;         // nearest integer
};

/// Number of zeros of Delta inside the rectangle with corners `lower_left` and
/// `upper_right`; a diagnostic only.
ZeroCount count_zeros_in_rectangle(const DiracProblem& problem, Complex lower_left,
                                   Complex upper_right, int samples_per_edge = 400,
                                   const IntegratorOptions& opts = {});

}  // namespace dirac
