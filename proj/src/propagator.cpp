#include "dirac/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <Eigen/LU>

#include "dirac/errors.hpp"

namespace dirac {

namespace {

// Largest growth exponent allowed inside one closed-form chunk before splitting.
constexpr double kChunkGrowth = 200.0;

Matrix2c form_from(const PotentialValue& v, double rho, Complex lambda) {
  Matrix2c m;
  const Complex lr = lambda * rho;
  m << v.q, v.r - lr, lr - v.p, -v.q;
  return m;
}

void renormalize(SolutionState& s, const char* op) {
  const double n = s.y.cwiseAbs().maxCoeff();
  if (!std::isfinite(n) || !std::isfinite(s.log_scale))
    throw Error(ErrorCode::kNonFinite, op, "solution overflowed or became NaN");
  if (n > 1e100 || (n > 0.0 && n < 1e-100)) {
    s.y *= 1.0 / n;
    s.log_scale += std::log(n);
  }
}

void advance_segment(const Segment& seg, Complex lambda, double to, SolutionState& s,
                     const IntegratorOptions& opts) {
  const double t = to - s.x;
  if (t == 0.0) return;
  const char* op = "propagate_interval";

  if (seg.piece.is_zero() && !opts.force_numerical) {
    const Complex phase = lambda * seg.rho * t;
    const int chunks = std::max(1, static_cast<int>(std::ceil(std::abs(phase.imag()) / kChunkGrowth)));
    const Matrix2c r = rotation(phase / double(chunks));
    for (int k = 0; k < chunks; ++k) {
      s.y = r * s.y;
      renormalize(s, op);
    }
  } else if (seg.piece.is_constant() && !opts.force_numerical) {
    const Matrix2c m = form_from(seg.piece(seg.x0), seg.rho, lambda);
    const Complex k = std::sqrt(-m.determinant());
    const double growth = std::abs(k.real() * t);
    const int chunks = std::max(1, static_cast<int>(std::ceil(growth / kChunkGrowth)));
    const Matrix2c e = constant_propagator(m, t / chunks);
    for (int c = 0; c < chunks; ++c) {
      s.y = e * s.y;
      renormalize(s, op);
    }
  } else {
    const double h_target =
        std::min(opts.h_max, opts.phase_per_step / (1.0 + std::abs(lambda) * seg.rho));
    const double scale = std::max({1.0, std::abs(seg.x0), std::abs(seg.x1)});
    if (!(h_target > 64.0 * std::numeric_limits<double>::epsilon() * scale))
      throw Error(ErrorCode::kStepUnderflow, op, "required step below machine resolution");
    const double steps_real = std::ceil(std::abs(t) / h_target);
    if (steps_real > 5e8) throw Error(ErrorCode::kStepUnderflow, op, "step count exceeds budget");
    const long steps = std::max(1L, static_cast<long>(steps_real));
    const double h = t / double(steps);
    auto f = [&](double x, const Vector2c& y) -> Vector2c {
      return form_from(seg.piece(x), seg.rho, lambda) * y;
    };
    double x = s.x;
    for (long i = 0; i < steps; ++i) {
      const Vector2c k1 = f(x, s.y);
      const Vector2c k2 = f(x + 0.5 * h, s.y + 0.5 * h * k1);
      const Vector2c k3 = f(x + 0.5 * h, s.y + 0.5 * h * k2);
      const Vector2c k4 = f(x + h, s.y + h * k3);
      s.y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      x = s.x + double(i + 1) * h;
      if ((i & 63) == 63) renormalize(s, op);
    }
    renormalize(s, op);
  }
  s.x = to;
}

void apply_jump(const TransferMatrix& t, SolutionState& s) {
  s.y = t * s.y;
  renormalize(s, "transmission_jump");
}

Limit resolve(Limit side, Limit fallback) { return side == Limit::kNone ? fallback : side; }

}  // namespace

Matrix2c rotation(Complex s) {
  const Complex c = std::cos(s), sn = std::sin(s);
  Matrix2c r;
  r << c, -sn, sn, c;
  return r;
}

Matrix2c constant_propagator(const Matrix2c& m, double t) {
  const Complex k = std::sqrt(-m.determinant());
  const Complex kt = k * t;
  Complex ch, sh_over_k;
  if (std::abs(kt) < 1e-4) {
    const Complex z2 = kt * kt;
    ch = 1.0 + z2 / 2.0 + z2 * z2 / 24.0;
    sh_over_k = t * (1.0 + z2 / 6.0 + z2 * z2 / 120.0);
  } else {
    ch = std::cosh(kt);
    sh_over_k = std::sinh(kt) / k;
  }
  return ch * Matrix2c::Identity() + sh_over_k * m;
}

Matrix2c first_order_form(const DiracProblem& problem, double x, Complex lambda) {
  problem.require_valid("first_order_form");
  const auto& segs = problem.segments();
  auto it = std::find_if(segs.begin(), segs.end(), [x](const Segment& s) { return x < s.x1; });
  const Segment& seg = it == segs.end() ? segs.back() : *it;
  return form_from(seg.piece(x), seg.rho, lambda);
}

SolutionState propagate_interval(const DiracProblem& problem, int interval, Complex lambda,
                                 double from_x, double to_x, const SolutionState& state,
                                 const IntegratorOptions& opts) {
  problem.require_valid("propagate_interval");
  if (interval < 0 || interval > problem.n())
    throw std::out_of_range("propagate_interval: interval index out of range");
  const double lo = problem.breakpoint(interval), hi = problem.breakpoint(interval + 1);
  if (from_x < lo || from_x > hi || to_x < lo || to_x > hi)
    throw std::out_of_range("propagate_interval: positions outside the subinterval");

  SolutionState s = state;
  s.x = from_x;
  const auto& segs = problem.segments();
  if (to_x >= from_x) {
    for (const auto& seg : segs) {
      if (seg.interval != interval || seg.x1 <= s.x) continue;
      if (seg.x0 >= to_x) break;
      advance_segment(seg, lambda, std::min(seg.x1, to_x), s, opts);
    }
  } else {
    for (auto it = segs.rbegin(); it != segs.rend(); ++it) {
      if (it->interval != interval || it->x0 >= s.x) continue;
      if (it->x1 <= to_x) break;
      advance_segment(*it, lambda, std::max(it->x0, to_x), s, opts);
    }
  }
  s.x = to_x;
  s.limit = Limit::kNone;
  if (to_x == hi && interval < problem.n()) s.limit = Limit::kLeft;
  if (to_x == lo && interval > 0) s.limit = Limit::kRight;
  return s;
}

TransferMatrix transmission_jump(const TransmissionData& td, Complex lambda) {
  TransferMatrix t;
  t << td.theta, 0.0, td.gamma(lambda), 1.0 / td.theta;
  return t;
}

TransferMatrix transmission_jump_inverse(const TransmissionData& td, Complex lambda) {
  TransferMatrix t;
  t << 1.0 / td.theta, 0.0, -td.gamma(lambda), td.theta;
  return t;
}

std::vector<SolutionState> phi_samples(const DiracProblem& problem, Complex lambda,
                                       const std::vector<GridPoint>& grid,
                                       const IntegratorOptions& opts) {
  problem.require_valid("phi");
  const auto& bc = problem.boundary();
  return solve_from_left(problem, Vector2c(bc.a2(lambda), bc.a1(lambda)), lambda, grid, opts);
}

std::vector<SolutionState> solve_from_left(const DiracProblem& problem, const Vector2c& initial,
                                           Complex lambda, const std::vector<GridPoint>& grid,
                                           const IntegratorOptions& opts) {
  problem.require_valid("solve_from_left");
  const auto& segs = problem.segments();
  const auto& tr = problem.transmissions();

  SolutionState s;
  s.x = problem.a();
  s.y = initial;
  renormalize(s, "phi");

  std::vector<SolutionState> out;
  out.reserve(grid.size());
  std::size_t k = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i].x < grid[i - 1].x) throw std::invalid_argument("phi_samples: grid must be sorted");
  for (const auto& gp : grid) {
    if (gp.x < problem.a() || gp.x > problem.b())
      throw std::out_of_range("phi: position outside [a, b]");
    const Limit side = resolve(gp.side, Limit::kLeft);
    // Cross whole segments (and their jumps) lying before the requested point.
    while (k < segs.size()) {
      const Segment& seg = segs[k];
      const bool at_jump = seg.jump_at_end >= 0 && gp.x == seg.x1;
      if (gp.x < seg.x1 || (at_jump && side == Limit::kLeft) || (gp.x == seg.x1 && !at_jump)) break;
      if (s.x < seg.x1) advance_segment(seg, lambda, seg.x1, s, opts);
      s.limit = Limit::kNone;
      if (seg.jump_at_end >= 0) {
        apply_jump(transmission_jump(tr[static_cast<std::size_t>(seg.jump_at_end)], lambda), s);
        s.limit = Limit::kRight;
      }
      ++k;
      if (at_jump) break;
    }
    if (k < segs.size() && gp.x > s.x) {
      advance_segment(segs[k], lambda, gp.x, s, opts);
      s.limit = Limit::kNone;
    }
    SolutionState r = s;
    r.x = gp.x;
    const bool at_transmission =
        std::any_of(tr.begin(), tr.end(), [&](const TransmissionData& t) { return t.xi == gp.x; });
    r.limit = at_transmission ? (s.limit == Limit::kRight ? Limit::kRight : Limit::kLeft) : Limit::kNone;
    out.push_back(r);
  }
  return out;
}

SolutionState phi(const DiracProblem& problem, double x, Complex lambda, Limit side,
                  const IntegratorOptions& opts) {
  return phi_samples(problem, lambda, {GridPoint{x, side}}, opts).front();
}

SolutionState psi(const DiracProblem& problem, double x, Complex lambda, Limit side,
                  const IntegratorOptions& opts) {
  problem.require_valid("psi");
  if (x < problem.a() || x > problem.b()) throw std::out_of_range("psi: position outside [a, b]");
  side = resolve(side, Limit::kRight);
  const auto& bc = problem.boundary();
  const auto& segs = problem.segments();
  const auto& tr = problem.transmissions();

  SolutionState s;
  s.x = problem.b();
  s.y << bc.b2(lambda), bc.b1(lambda);
  renormalize(s, "psi");

  bool at_transmission = false;
  for (auto it = segs.rbegin(); it != segs.rend(); ++it) {
    const Segment& seg = *it;
    const int jump_at_start = (it + 1 != segs.rend()) ? (it + 1)->jump_at_end : -1;
    if (x >= seg.x0) {
      advance_segment(seg, lambda, x, s, opts);
      if (x == seg.x0 && jump_at_start >= 0) {
        at_transmission = true;
        if (side == Limit::kLeft) {
          apply_jump(transmission_jump_inverse(tr[static_cast<std::size_t>(jump_at_start)], lambda), s);
        }
      }
      break;
    }
    advance_segment(seg, lambda, seg.x0, s, opts);
    if (jump_at_start >= 0)
      apply_jump(transmission_jump_inverse(tr[static_cast<std::size_t>(jump_at_start)], lambda), s);
  }
  s.x = x;
  s.limit = at_transmission ? side : Limit::kNone;
  return s;
}

std::vector<GridPoint> interval_grid(const DiracProblem& problem,
                                     const std::vector<int>& points_per_interval) {
  if (static_cast<int>(points_per_interval.size()) != problem.n() + 1)
    throw std::invalid_argument("interval_grid: one point count per subinterval required");
  std::vector<GridPoint> grid;
  for (int i = 0; i <= problem.n(); ++i) {
    const int m = std::max(2, points_per_interval[static_cast<std::size_t>(i)]);
    const double lo = problem.breakpoint(i), hi = problem.breakpoint(i + 1);
    for (int k = 0; k < m; ++k) {
      GridPoint gp{k == m - 1 ? hi : lo + (hi - lo) * double(k) / double(m - 1), Limit::kNone};
      if (k == 0 && i > 0) gp.side = Limit::kRight;
      if (k == m - 1 && i < problem.n()) gp.side = Limit::kLeft;
      grid.push_back(gp);
    }
  }
  return grid;
}

std::pair<Complex, double> wronskian_scaled(const SolutionState& u, const SolutionState& v) {
  if (u.x != v.x || u.limit != v.limit)
    throw Error(ErrorCode::kPositionMismatch, "wronskian",
                "states are not at the same position and one-sided limit");
  return {u.y(0) * v.y(1) - u.y(1) * v.y(0), u.log_scale + v.log_scale};
}

Complex wronskian(const SolutionState& u, const SolutionState& v) {
  auto [m, e] = wronskian_scaled(u, v);
  const Complex w = m * std::exp(e);
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
    throw Error(ErrorCode::kNonFinite, "wronskian", "value overflows double precision");
  return w;
}

}  // namespace dirac
