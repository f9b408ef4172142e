#pragma once

#include <vector>

#include "dirac/problem.hpp"
#include "dirac/propagator.hpp"

namespace dirac {

/// |Delta| at or below `pole_threshold` times (|b1| + |b2|) |phi(b)| is
/// treated as an eigenvalue.
struct WeylOptions {
  double pole_threshold = 1e-10;
  IntegratorOptions integrator;
};

/// M(lambda) = Delta_1(lambda) / Delta(lambda) = Phi_1(a, lambda).
Complex weyl_m(const DiracProblem& problem, Complex lambda, const WeylOptions& opts = {});

/// Phi(x, lambda) = psi(x, lambda) / Delta(lambda); W(Phi, phi) = 1.
SolutionState big_phi(const DiracProblem& problem, double x, Complex lambda,
                      Limit side = Limit::kRight, const WeylOptions& opts = {});

struct PMatrixEvaluation {
  Matrix2c direct;       // [phi Phi] [phi~ Phi~]^{-1} from the Wronskian-type entries
  Matrix2c decomposed;   // same, with Phi = varphi + M phi and the (M~ - M) cross terms
  double discrepancy;    // max entry difference / (1 + max |entry|)
};

/// Both evaluations of P(x, lambda) for problems A (phi, Phi) and B (phi~, Phi~).
/// varphi is propagated independently from varphi(a) = Phi(a) - M phi(a).
PMatrixEvaluation p_matrix_evaluate(const DiracProblem& a, const DiracProblem& b, double x,
                                    Complex lambda, const WeylOptions& opts = {});

/// P(x, lambda); throws kInconsistent if the two evaluations differ by more
/// than `tolerance`.
Matrix2c p_matrix(const DiracProblem& a, const DiracProblem& b, double x, Complex lambda,
                  double tolerance = 1e-7, const WeylOptions& opts = {});

struct WeylDistance {
  double distance = 0.0;
  std::vector<Complex> dropped;  // grid points too close to either spectrum
};

/// max |M_A - M_B| / (1 + |M_A|) over grid points off both spectra.
/// Throws kEmptyGrid when every point is dropped.
WeylDistance weyl_distance(const DiracProblem& a, const DiracProblem& b,
                           const std::vector<Complex>& grid, const WeylOptions& opts = {});

/// Nonzero eigenvalues for a symmetric truncation plus the multiplicity of 0.
struct HadamardSlice {
  std::vector<double> eigenvalues;
  int zero_multiplicity = 0;
};

/// Keeps the `n` smallest positive and `n` largest negative eigenvalues; zeros
/// are counted separately.
HadamardSlice symmetric_slice(const std::vector<double>& eigenvalues, int n);

/// C * lambda^zero_multiplicity * prod (1 - lambda / lambda_k).
/// Throws kZeroEigenvalueInList if any lambda_k is 0.
double hadamard_delta(const std::vector<double>& eigenvalues, double c, double lambda,
                      int zero_multiplicity = 0);

}  // namespace dirac
