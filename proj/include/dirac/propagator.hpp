#pragma once

#include <Eigen/Core>
#include <vector>

#include "dirac/problem.hpp"

namespace dirac {

using Vector2c = Eigen::Vector2cd;
using Matrix2c = Eigen::Matrix2cd;
/// Maps the state at one point to the state at another (one segment, or one jump).
using TransferMatrix = Matrix2c;

/// Which one-sided limit a state represents at a transmission point.
/// Away from transmission points it is always kNone.
enum class Limit { kNone, kLeft, kRight };

/// (y1, y2) at position x. The represented value is `y * exp(log_scale)`; the
/// exponent absorbs growth for large |Im lambda|.
struct SolutionState {
  double x = 0.0;
  Limit limit = Limit::kNone;
  Vector2c y = Vector2c::Zero();
  double log_scale = 0.0;

  Complex y1() const { return y(0) * std::exp(log_scale); }
  Complex y2() const { return y(1) * std::exp(log_scale); }
  Vector2c value() const { return y * std::exp(log_scale); }
};

struct IntegratorOptions {
  /// Upper bound on lambda*rho*h per classical RK4 step (radians).
  double phase_per_step = 0.02;
  double h_max = 1e-2;
  /// Use RK4 even for constant potential pieces (testing the integrator).
  bool force_numerical = false;
};

/// M(x, lambda) with y' = M y, i.e. B^{-1}(lambda rho - Omega):
/// [[q, r - lambda rho], [lambda rho - p, -q]].
Matrix2c first_order_form(const DiracProblem& problem, double x, Complex lambda);

/// Exact propagator of the constant-coefficient system y' = M y over length t,
/// for trace-free M: cosh(kt) I + sinh(kt)/k M with k^2 = -det M.
Matrix2c constant_propagator(const Matrix2c& m, double t);

/// R(s) = [[cos s, -sin s], [sin s, cos s]].
Matrix2c rotation(Complex s);

/// Solves y' = M y inside weight subinterval `interval` from `from_x` to `to_x`
/// (either direction). Zero potential uses the exact rotation, constant
/// potential the exact exponential, anything else classical RK4.
SolutionState propagate_interval(const DiracProblem& problem, int interval, Complex lambda,
                                 double from_x, double to_x, const SolutionState& state,
                                 const IntegratorOptions& opts = {});

/// T_i(lambda) = [[theta, 0], [gamma(lambda), 1/theta]]; y(xi+0) = T y(xi-0).
TransferMatrix transmission_jump(const TransmissionData& td, Complex lambda);
/// T_i(lambda)^{-1} = [[1/theta, 0], [-gamma(lambda), theta]].
TransferMatrix transmission_jump_inverse(const TransmissionData& td, Complex lambda);

/// Solution with phi(a) = (a2(lambda), a1(lambda)). At a transmission point the
/// left limit is returned unless `side` is kRight.
SolutionState phi(const DiracProblem& problem, double x, Complex lambda,
                  Limit side = Limit::kLeft, const IntegratorOptions& opts = {});

/// Solution with psi(b) = (b2(lambda), b1(lambda)). At a transmission point the
/// right limit is returned unless `side` is kLeft.
SolutionState psi(const DiracProblem& problem, double x, Complex lambda,
                  Limit side = Limit::kRight, const IntegratorOptions& opts = {});

/// A sample position with the limit to report at a transmission point.
struct GridPoint {
  double x;
  Limit side = Limit::kNone;
};

/// Per-subinterval uniform grid: for each weight subinterval `points_per_interval(i)`
/// nodes including both ends; ends at transmission points carry one-sided limits.
std::vector<GridPoint> interval_grid(const DiracProblem& problem,
                                     const std::vector<int>& points_per_interval);

/// phi sampled along a grid sorted by (x, side), computed in one left-to-right sweep.
std::vector<SolutionState> phi_samples(const DiracProblem& problem, Complex lambda,
                                       const std::vector<GridPoint>& grid,
                                       const IntegratorOptions& opts = {});

/// Solution of the transmission problem with y(a) = `initial`, sampled like phi_samples.
std::vector<SolutionState> solve_from_left(const DiracProblem& problem, const Vector2c& initial,
                                           Complex lambda, const std::vector<GridPoint>& grid,
                                           const IntegratorOptions& opts = {});

/// u.y1 v.y2 - u.y2 v.y1. Throws kPositionMismatch unless x and limit agree.
Complex wronskian(const SolutionState& u, const SolutionState& v);

/// Same as wronskian, returned as mantissa and natural-log exponent.
std::pair<Complex, double> wronskian_scaled(const SolutionState& u, const SolutionState& v);

}  // namespace dirac
