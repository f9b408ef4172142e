#include "dirac/weyl.hpp"

#include <algorithm>
#include <cmath>

#include "dirac/errors.hpp"

namespace dirac {

namespace {

struct ScaledDelta {
  Complex mantissa;
  double log_scale;
};

ScaledDelta checked_delta(const DiracProblem& problem, Complex lambda, const WeylOptions& opts,
                          const char* op) {
  const SolutionState s = phi(problem, problem.b(), lambda, Limit::kLeft, opts.integrator);
  const auto& bc = problem.boundary();
  const Complex t2 = bc.b2(lambda) * s.y(1), t1 = bc.b1(lambda) * s.y(0);
  const Complex d = t2 - t1;
  const double scale = (std::abs(bc.b1(lambda)) + std::abs(bc.b2(lambda))) * s.y.norm();
  if (std::abs(d) <= opts.pole_threshold * scale)
    throw Error(ErrorCode::kPoleAtEigenvalue, op, "Delta vanishes at the requested lambda");
  return {d, s.log_scale};
}

Complex finite(Complex v, const char* op) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw Error(ErrorCode::kNonFinite, op, "value overflows double precision");
  return v;
}

double max_entry(const Matrix2c& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

Complex weyl_m(const DiracProblem& problem, Complex lambda, const WeylOptions& opts) {
  problem.require_valid("weyl_m");
  const ScaledDelta d = checked_delta(problem, lambda, opts, "weyl_m");
  const SolutionState p = psi(problem, problem.a(), lambda, Limit::kRight, opts.integrator);
  return finite(p.y(0) / d.mantissa * std::exp(p.log_scale - d.log_scale), "weyl_m");
}

SolutionState big_phi(const DiracProblem& problem, double x, Complex lambda, Limit side,
                      const WeylOptions& opts) {
  problem.require_valid("big_phi");
  const ScaledDelta d = checked_delta(problem, lambda, opts, "big_phi");
  SolutionState s = psi(problem, x, lambda, side, opts.integrator);
  s.y /= d.mantissa;
  s.log_scale -= d.log_scale;
  return s;
}

PMatrixEvaluation p_matrix_evaluate(const DiracProblem& a, const DiracProblem& b, double x,
                                    Complex lambda, const WeylOptions& opts) {
  struct Parts {
    Vector2c phi, big_phi, varphi;
    Complex m;
  };
  auto parts = [&](const DiracProblem& pr) {
    Parts out;
    out.phi = phi(pr, x, lambda, Limit::kLeft, opts.integrator).value();
    out.big_phi = big_phi(pr, x, lambda, Limit::kLeft, opts).value();
    out.m = weyl_m(pr, lambda, opts);
    const auto& bc = pr.boundary();
    const Vector2c phi_a(bc.a2(lambda), bc.a1(lambda));
    const Vector2c start = big_phi(pr, pr.a(), lambda, Limit::kRight, opts).value() - out.m * phi_a;
    out.varphi = solve_from_left(pr, start, lambda, {GridPoint{x, Limit::kLeft}}, opts.integrator)
                     .front()
                     .value();
    return out;
  };
  const Parts u = parts(a), v = parts(b);

  PMatrixEvaluation ev;
  const Complex d = v.phi(0) * v.big_phi(1) - v.big_phi(0) * v.phi(1);
  ev.direct << u.phi(0) * v.big_phi(1) - u.big_phi(0) * v.phi(1),
      u.big_phi(0) * v.phi(0) - u.phi(0) * v.big_phi(0),
      u.phi(1) * v.big_phi(1) - u.big_phi(1) * v.phi(1),
      u.big_phi(1) * v.phi(0) - u.phi(1) * v.big_phi(0);
  ev.direct /= d;

  const Complex dm = v.m - u.m;
  const Complex d2 = v.phi(0) * v.varphi(1) - v.varphi(0) * v.phi(1);
  ev.decomposed << u.phi(0) * v.varphi(1) - u.varphi(0) * v.phi(1) + dm * u.phi(0) * v.phi(1),
      u.varphi(0) * v.phi(0) - u.phi(0) * v.varphi(0) - dm * u.phi(0) * v.phi(0),
      u.phi(1) * v.varphi(1) - u.varphi(1) * v.phi(1) + dm * u.phi(1) * v.phi(1),
      u.varphi(1) * v.phi(0) - u.phi(1) * v.varphi(0) - dm * u.phi(1) * v.phi(0);
  ev.decomposed /= d2;

  ev.discrepancy = max_entry(ev.direct - ev.decomposed) / (1.0 + max_entry(ev.direct));
  return ev;
}

Matrix2c p_matrix(const DiracProblem& a, const DiracProblem& b, double x, Complex lambda,
                  double tolerance, const WeylOptions& opts) {
  const PMatrixEvaluation ev = p_matrix_evaluate(a, b, x, lambda, opts);
  if (!(ev.discrepancy <= tolerance))
    throw Error(ErrorCode::kInconsistent, "p_matrix",
                "direct and decomposed evaluations differ by " + std::to_string(ev.discrepancy));
  return ev.direct;
}

WeylDistance weyl_distance(const DiracProblem& a, const DiracProblem& b,
                           const std::vector<Complex>& grid, const WeylOptions& opts) {
  WeylDistance out;
  bool any = false;
  for (const Complex& lambda : grid) {
    Complex ma, mb;
    try {
      ma = weyl_m(a, lambda, opts);
      mb = weyl_m(b, lambda, opts);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kPoleAtEigenvalue) throw;
      out.dropped.push_back(lambda);
      continue;
    }
    any = true;
    out.distance = std::max(out.distance, std::abs(ma - mb) / (1.0 + std::abs(ma)));
  }
  if (!any) throw Error(ErrorCode::kEmptyGrid, "weyl_distance", "every grid point lies on a spectrum");
  return out;
}

HadamardSlice symmetric_slice(const std::vector<double>& eigenvalues, int n) {
  std::vector<double> pos, neg;
  HadamardSlice out;
  for (double v : eigenvalues) {
    if (v > 0.0) pos.push_back(v);
    else if (v < 0.0) neg.push_back(v);
    else ++out.zero_multiplicity;
  }
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end(), [](double u, double w) { return u > w; });
  const auto keep = static_cast<std::size_t>(std::max(0, n));
  pos.resize(std::min(pos.size(), keep));
  neg.resize(std::min(neg.size(), keep));
  out.eigenvalues = neg;
  std::reverse(out.eigenvalues.begin(), out.eigenvalues.end());
  out.eigenvalues.insert(out.eigenvalues.end(), pos.begin(), pos.end());
  return out;
}

double hadamard_delta(const std::vector<double>& eigenvalues, double c, double lambda,
                      int zero_multiplicity) {
  if (std::any_of(eigenvalues.begin(), eigenvalues.end(), [](double v) { return v == 0.0; }))
    throw Error(ErrorCode::kZeroEigenvalueInList, "hadamard_delta",
                "zero eigenvalues belong in the prefactor, not the product");
  double value = c;
  for (int k = 0; k < zero_multiplicity; ++k) value *= lambda;
  for (double v : eigenvalues) value *= 1.0 - lambda / v;
  return value;
}

}  // namespace dirac
