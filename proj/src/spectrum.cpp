#include "dirac/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "dirac/errors.hpp"
#include "parallel.hpp"

namespace dirac {

namespace {

Complex finite_or_throw(Complex v, const char* op) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw Error(ErrorCode::kNonFinite, op, "value overflows double precision");
  return v;
}

double default_tol(double x) { return 1e-10 * std::max(1.0, std::abs(x)); }

struct Root {
  double x;
  double residual;
  Bracket bracket;
};

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

Root bisect(const std::function<double(double)>& f, double lo, double hi, double flo, double fhi,
            const SpectrumOptions& opts) {
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double tol = opts.tol > 0.0 ? opts.tol : default_tol(mid);
    if (hi - lo <= tol || mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return {mid, 0.0, {mid, mid}};
    if (sign_of(fm) == sign_of(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  double best = std::abs(flo) <= std::abs(fhi) ? lo : hi;
  double best_f = std::min(std::abs(flo), std::abs(fhi));
  if (fhi != flo) {
    const double x = std::clamp(lo - flo * (hi - lo) / (fhi - flo), lo, hi);
    const double fx = std::abs(f(x));
    if (fx < best_f) {
      best = x;
      best_f = fx;
    }
  }
  return {best, best_f, {lo, hi}};
}

struct JobResult {
  std::vector<Root> roots;
  std::vector<double> suspected;
};

// Minimizes s * f on [lo, hi] by golden section; a nonpositive value reveals a
// hidden pair of sign changes.
JobResult probe_minimum(const std::function<double(double)>& f, double lo, double hi, double flo,
                        double fhi, double threshold, const SpectrumOptions& opts) {
  const double s = sign_of(flo);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double l = lo, h = hi;
  double c = h - g * (h - l), d = l + g * (h - l);
  double fc = s * f(c), fd = s * f(d);
  JobResult out;
  auto split = [&](double x, double fx) {
    if (fx == 0.0) {
      out.roots.push_back({x, 0.0, {x, x}});
      return;
    }
    out.roots.push_back(bisect(f, lo, x, flo, s * fx, opts));
    out.roots.push_back(bisect(f, x, hi, s * fx, fhi, opts));
  };
  for (int it = 0; it < 200; ++it) {
    if (fc <= 0.0) {
      split(c, fc);
      return out;
    }
    if (fd <= 0.0) {
      split(d, fd);
      return out;
    }
    if (h - l <= 1e-13 * std::max(1.0, std::abs(l))) break;
    if (fc < fd) {
      h = d;
      d = c;
      fd = fc;
      c = h - g * (h - l);
      fc = s * f(c);
    } else {
      l = c;
      c = d;
      fc = fd;
      d = l + g * (h - l);
      fd = s * f(d);
    }
  }
  const double x = fc < fd ? c : d;
  if (std::min(fc, fd) <= threshold) out.suspected.push_back(x);
  return out;
}

SpectrumResult scan_real_zeros(const std::function<double(double)>& f, double lo, double hi,
                               double step, const SpectrumOptions& opts, const char* op) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument(std::string(op) + ": window must satisfy lambda_min < lambda_max");
  if (!(step > 0.0)) throw std::invalid_argument(std::string(op) + ": scan step must be positive");
  const double intervals_real = std::ceil((hi - lo) / step);
  if (intervals_real + 1.0 > static_cast<double>(opts.max_samples))
    throw Error(ErrorCode::kWindowTooWide, op, "scan requires more samples than max_samples");
  const auto intervals = static_cast<std::size_t>(std::max(1.0, intervals_real));
  const std::size_t count = intervals + 1;

  std::vector<double> xs(count), fs(count);
  for (std::size_t i = 0; i < count; ++i)
    xs[i] = i + 1 == count ? hi : lo + (hi - lo) * double(i) / double(intervals);
  detail::parallel_for(count, opts.threads, [&](std::size_t i) { fs[i] = f(xs[i]); });
  double fmax = 0.0;
  for (double v : fs) fmax = std::max(fmax, std::abs(v));
  const double threshold = opts.near_zero * fmax;

  std::vector<std::function<JobResult()>> jobs;
  std::vector<Root> exact;
  for (std::size_t i = 0; i < count; ++i) {
    if (fs[i] == 0.0) {
      exact.push_back({xs[i], 0.0, {xs[i], xs[i]}});
      continue;
    }
    if (i + 1 < count && fs[i] * fs[i + 1] < 0.0) {
      jobs.emplace_back([&, i] {
        return JobResult{{bisect(f, xs[i], xs[i + 1], fs[i], fs[i + 1], opts)}, {}};
      });
    }
    if (i > 0 && i + 1 < count && fs[i - 1] * fs[i] > 0.0 && fs[i] * fs[i + 1] > 0.0 &&
        std::abs(fs[i]) < std::abs(fs[i - 1]) && std::abs(fs[i]) <= std::abs(fs[i + 1])) {
      jobs.emplace_back([&, i] {
        return probe_minimum(f, xs[i - 1], xs[i + 1], fs[i - 1], fs[i + 1], threshold, opts);
      });
    }
  }
  std::vector<JobResult> results(jobs.size());
  detail::parallel_for(jobs.size(), opts.threads, [&](std::size_t j) { results[j] = jobs[j](); });

  std::vector<Root> roots = std::move(exact);
  std::vector<double> suspected;
  for (auto& r : results) {
    roots.insert(roots.end(), r.roots.begin(), r.roots.end());
    suspected.insert(suspected.end(), r.suspected.begin(), r.suspected.end());
  }
  std::sort(roots.begin(), roots.end(), [](const Root& u, const Root& v) { return u.x < v.x; });
  std::sort(suspected.begin(), suspected.end());

  SpectrumResult out;
  for (const auto& r : roots) {
    if (!out.eigenvalues.empty() && r.x <= out.eigenvalues.back()) continue;
    out.eigenvalues.push_back(r.x);
    out.residuals.push_back(r.residual);
    out.brackets.push_back(r.bracket);
  }
  out.suspected = std::move(suspected);
  return out;
}

double scan_step_for(const DiracProblem& problem, const SpectrumOptions& opts) {
  return opts.scan_step > 0.0 ? opts.scan_step : std::numbers::pi / (4.0 * total_length(problem));
}

SampledFunction split_by_interval(const DiracProblem& problem, const std::vector<int>& counts,
                                  const std::vector<SolutionState>& states) {
  SampledFunction out;
  std::size_t k = 0;
  for (int i = 0; i <= problem.n(); ++i) {
    const auto m = static_cast<std::size_t>(counts[static_cast<std::size_t>(i)]);
    std::vector<double> x;
    std::vector<Vector2c> y;
    for (std::size_t j = 0; j < m; ++j, ++k) {
      x.push_back(states[k].x);
      y.push_back(states[k].value());
    }
    out.x.push_back(std::move(x));
    out.y.push_back(std::move(y));
  }
  return out;
}

SampledFunction sample_phi(const DiracProblem& problem, double lambda,
                           const std::vector<int>& points_per_interval,
                           const IntegratorOptions& opts) {
  if (static_cast<int>(points_per_interval.size()) != problem.n() + 1)
    throw std::invalid_argument("eigenfunction: one point count per subinterval required");
  for (int m : points_per_interval)
    if (m < 2) throw std::invalid_argument("eigenfunction: at least two points per subinterval");
  const auto grid = interval_grid(problem, points_per_interval);
  return split_by_interval(problem, points_per_interval, phi_samples(problem, lambda, grid, opts));
}

struct Chain {
  std::vector<Complex> y;
  double residual = 0.0;
  double scale = 0.0;
};

// c[k] are the coefficient-weighted boundary terms; builds Y_1 = c_m,
// Y_{i+1} = lambda Y_i + c_{m-i}, and the terminal residual extra - c_0 - lambda Y_m.
Chain build_chain(const std::vector<Complex>& c, Complex extra, double lambda) {
  Chain ch;
  const int m = static_cast<int>(c.size()) - 1;
  for (int i = 1; i <= m; ++i)
    ch.y.push_back(i == 1 ? c[static_cast<std::size_t>(m)]
                          : lambda * ch.y.back() + c[static_cast<std::size_t>(m - i + 1)]);
  Complex res = extra - c[0];
  if (m > 0) res -= lambda * ch.y.back();
  ch.residual = std::abs(res);
  double power = 1.0;
  for (const auto& ck : c) {
    ch.scale += power * std::abs(ck);
    power *= std::abs(lambda);
  }
  ch.scale += std::abs(extra);
  return ch;
}

std::vector<Complex> boundary_terms(const RealPolynomial& p2, const RealPolynomial& p1, int m,
                                   const Vector2c& y) {
  std::vector<Complex> c(static_cast<std::size_t>(m) + 1);
  for (int k = 0; k <= m; ++k) c[static_cast<std::size_t>(k)] = p2.coeff(k) * y(1) - p1.coeff(k) * y(0);
  return c;
}

EigenElementResult assemble(const DiracProblem& problem, double lambda,
                            const std::vector<int>& points_per_interval,
                            const IntegratorOptions& opts, ClosureResiduals& scales) {
  const DegreeProfile prof = degree_profile(problem);
  const auto& bc = problem.boundary();
  const auto& tr = problem.transmissions();
  EigenElementResult out;
  out.element.function_part = sample_phi(problem, lambda, points_per_interval, opts);
  const auto& fp = out.element.function_part;
  const Vector2c ya = fp.y.front().front();
  const Vector2c yb = fp.y.back().back();

  Chain ca = build_chain(boundary_terms(bc.a2, bc.a1, prof.m_a, ya), 0.0, lambda);
  Chain cb = build_chain(boundary_terms(bc.b2, bc.b1, prof.m_b, yb), 0.0, lambda);
  out.element.Y1 = ca.y;
  out.element.Y2 = cb.y;
  out.residuals.a = ca.residual;
  out.residuals.b = cb.residual;
  scales.a = ca.scale;
  scales.b = cb.scale;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const Vector2c minus = fp.y[i].back();
    const Vector2c plus = fp.y[i + 1].front();
    std::vector<Complex> c(static_cast<std::size_t>(prof.r[i]) + 1);
    for (int k = 0; k <= prof.r[i]; ++k) c[static_cast<std::size_t>(k)] = tr[i].gamma.coeff(k) * minus(0);
    Chain cx = build_chain(c, plus(1) - minus(1) / tr[i].theta, lambda);
    out.element.Y3.push_back(cx.y);
    out.residuals.jumps.push_back(cx.residual);
    scales.jumps.push_back(cx.scale);
  }
  return out;
}

// Composite Simpson (3/8 rule on the last three panels for odd panel counts)
// on uniform samples; returns the integral and an error estimate.
std::pair<double, double> simpson(const std::vector<double>& f, double h) {
  const std::size_t panels = f.size() - 1;
  auto simpson_even = [](const std::vector<double>& v, std::size_t first, std::size_t last,
                         std::size_t stride, double hh) {
    double s = v[first] + v[last];
    for (std::size_t k = first + stride, j = 1; k < last; k += stride, ++j) s += (j % 2 ? 4.0 : 2.0) * v[k];
    return s * hh / 3.0;
  };
  double integral;
  if (panels % 2 == 0) {
    integral = simpson_even(f, 0, panels, 1, h);
  } else {
    const std::size_t head = panels - 3;
    integral = head ? simpson_even(f, 0, head, 1, h) : 0.0;
    integral += 3.0 * h / 8.0 * (f[head] + 3.0 * f[head + 1] + 3.0 * f[head + 2] + f[head + 3]);
  }
  double estimate;
  if (panels % 4 == 0) {
    estimate = std::abs(integral - simpson_even(f, 0, panels, 2, 2.0 * h)) / 15.0;
  } else {
    double trap = 0.5 * (f.front() + f.back());
    for (std::size_t k = 1; k < panels; ++k) trap += f[k];
    estimate = std::abs(integral - trap * h);
  }
  return {integral, estimate};
}

}  // namespace

std::pair<Complex, double> delta_scaled(const DiracProblem& problem, Complex lambda,
                                        const IntegratorOptions& opts) {
  const SolutionState s = phi(problem, problem.b(), lambda, Limit::kLeft, opts);
  const auto& bc = problem.boundary();
  return {bc.b2(lambda) * s.y(1) - bc.b1(lambda) * s.y(0), s.log_scale};
}

Complex delta(const DiracProblem& problem, Complex lambda, const IntegratorOptions& opts) {
  auto [m, e] = delta_scaled(problem, lambda, opts);
  return finite_or_throw(m * std::exp(e), "delta");
}

Complex delta_from_a(const DiracProblem& problem, Complex lambda, const IntegratorOptions& opts) {
  const SolutionState s = psi(problem, problem.a(), lambda, Limit::kRight, opts);
  const auto& bc = problem.boundary();
  return finite_or_throw((bc.a1(lambda) * s.y(0) - bc.a2(lambda) * s.y(1)) * std::exp(s.log_scale),
                         "delta");
}

DeltaCheck delta_diagnostics(const DiracProblem& problem, Complex lambda, double tolerance,
                             const IntegratorOptions& opts) {
  DeltaCheck check;
  check.from_b = delta(problem, lambda, opts);
  check.from_a = delta_from_a(problem, lambda, opts);
  check.deviation = std::abs(check.from_b - check.from_a) / (1.0 + std::abs(check.from_b));
  if (check.deviation > tolerance)
    throw Error(ErrorCode::kInconsistent, "delta",
                "evaluations from a and from b differ by " + std::to_string(check.deviation));
  return check;
}

Complex delta1(const DiracProblem& problem, Complex lambda, const IntegratorOptions& opts) {
  return finite_or_throw(psi(problem, problem.a(), lambda, Limit::kRight, opts).y1(), "delta1");
}

DiracProblem auxiliary_problem(const DiracProblem& problem) {
  BoundaryConditions bc = problem.boundary();
  bc.a1 = RealPolynomial::constant(1.0);
  bc.a2 = RealPolynomial();
  return problem.with_boundary(std::move(bc));
}

SpectrumResult find_eigenvalues(const DiracProblem& problem, double lambda_min, double lambda_max,
                                const SpectrumOptions& opts) {
  problem.require_valid("find_eigenvalues");
  auto f = [&](double x) { return delta(problem, x, opts.integrator).real(); };
  SpectrumResult out =
      scan_real_zeros(f, lambda_min, lambda_max, scan_step_for(problem, opts), opts, "find_eigenvalues");
  if (opts.with_norming) {
    out.norming.resize(out.eigenvalues.size());
    detail::parallel_for(out.eigenvalues.size(), opts.threads, [&](std::size_t k) {
      out.norming[k] = norming_constant(problem, out.eigenvalues[k], opts.integrator);
    });
  }
  return out;
}

SpectrumResult find_auxiliary_eigenvalues(const DiracProblem& problem, double lambda_min,
                                          double lambda_max, const SpectrumOptions& opts) {
  problem.require_valid("find_auxiliary_eigenvalues");
  auto f = [&](double x) { return delta1(problem, x, opts.integrator).real(); };
  SpectrumResult out = scan_real_zeros(f, lambda_min, lambda_max, scan_step_for(problem, opts), opts,
                                       "find_auxiliary_eigenvalues");
  if (opts.with_norming) {
    const DiracProblem aux = auxiliary_problem(problem);
    out.norming.resize(out.eigenvalues.size());
    detail::parallel_for(out.eigenvalues.size(), opts.threads, [&](std::size_t k) {
      out.norming[k] = norming_constant(aux, out.eigenvalues[k], opts.integrator);
    });
  }
  return out;
}

std::vector<int> default_points_per_interval(const DiracProblem& problem, double lambda) {
  std::vector<int> out;
  for (int i = 0; i <= problem.n(); ++i) {
    const double width = problem.breakpoint(i + 1) - problem.breakpoint(i);
    const double rho = problem.weights()[static_cast<std::size_t>(i)];
    const double points = std::ceil(32.0 * (1.0 + std::abs(lambda) * rho * width / std::numbers::pi));
    const int panels = static_cast<int>(std::ceil((points - 1.0) / 4.0)) * 4;
    out.push_back(panels + 1);
  }
  return out;
}

Eigenfunction eigenfunction(const DiracProblem& problem, double lambda_k,
                            const std::vector<int>& points_per_interval, double tolerance,
                            const IntegratorOptions& opts) {
  problem.require_valid("eigenfunction");
  Eigenfunction out;
  out.samples = sample_phi(problem, lambda_k, points_per_interval, opts);
  const auto& bc = problem.boundary();
  const Vector2c yb = out.samples.y.back().back();
  const Complex b2 = bc.b2(Complex(lambda_k)), b1 = bc.b1(Complex(lambda_k));
  out.boundary_residual = std::abs(b2 * yb(1) - b1 * yb(0));
  const double scale = (std::abs(b1) + std::abs(b2)) * yb.norm();
  if (out.boundary_residual > tolerance * scale)
    throw Error(ErrorCode::kNotAnEigenvalue, "eigenfunction",
                "boundary residual " + std::to_string(out.boundary_residual) + " exceeds tolerance");
  const auto& tr = problem.transmissions();
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const Vector2c minus = out.samples.y[i].back();
    const Vector2c plus = out.samples.y[i + 1].front();
    const double r1 = std::abs(plus(0) - tr[i].theta * minus(0));
    const double r2 =
        std::abs(plus(1) - minus(1) / tr[i].theta - tr[i].gamma(Complex(lambda_k)) * minus(0));
    out.jump_residuals.push_back(std::max(r1, r2));
  }
  return out;
}

double ClosureResiduals::max() const {
  double m = std::max(a, b);
  for (double j : jumps) m = std::max(m, j);
  return m;
}

EigenElementResult build_eigen_element(const DiracProblem& problem, double lambda,
                                       const std::vector<int>& points_per_interval,
                                       const IntegratorOptions& opts) {
  problem.require_valid("eigen_element");
  ClosureResiduals scales;
  return assemble(problem, lambda, points_per_interval, opts, scales);
}

HElement eigen_element(const DiracProblem& problem, double lambda_k, double tolerance,
                       const IntegratorOptions& opts) {
  problem.require_valid("eigen_element");
  ClosureResiduals scales;
  EigenElementResult r =
      assemble(problem, lambda_k, default_points_per_interval(problem, lambda_k), opts, scales);
  auto check = [&](double residual, double scale, const std::string& where) {
    if (residual > tolerance * (1.0 + scale))
      throw Error(ErrorCode::kClosureViolated, "eigen_element",
                  where + " closure residual " + std::to_string(residual) + " exceeds tolerance");
  };
  check(r.residuals.a, scales.a, "left boundary");
  check(r.residuals.b, scales.b, "right boundary");
  for (std::size_t i = 0; i < r.residuals.jumps.size(); ++i)
    check(r.residuals.jumps[i], scales.jumps[i], "transmission " + std::to_string(i + 1));
  return std::move(r.element);
}

double h_norm_sq(const HElement& element, const DiracProblem& problem) {
  const auto& fp = element.function_part;
  if (fp.x.size() != fp.y.size())
    throw std::invalid_argument("h_norm_sq: function part has mismatched positions and values");
  if (!fp.x.empty() && static_cast<int>(fp.x.size()) != problem.n() + 1)
    throw std::invalid_argument("h_norm_sq: function part must have one block per subinterval");
  double integral = 0.0, error = 0.0;
  for (std::size_t i = 0; i < fp.x.size(); ++i) {
    const auto& xs = fp.x[i];
    const auto& ys = fp.y[i];
    if (xs.size() != ys.size()) throw std::invalid_argument("h_norm_sq: block size mismatch");
    if (xs.size() < 4)
      throw Error(ErrorCode::kGridTooCoarse, "h_norm_sq", "fewer than four samples in a subinterval");
    const double rho = problem.weights()[i];
    std::vector<double> f(ys.size());
    for (std::size_t k = 0; k < ys.size(); ++k) f[k] = rho * ys[k].squaredNorm();
    const double h = (xs.back() - xs.front()) / double(xs.size() - 1);
    auto [value, estimate] = simpson(f, h);
    integral += value;
    error += estimate;
  }
  if (error > 1e-6 * std::abs(integral) && error > 0.0)
    throw Error(ErrorCode::kGridTooCoarse, "h_norm_sq",
                "quadrature error estimate " + std::to_string(error) + " exceeds 1e-6 relative");
  double blocks = 0.0;
  for (const auto& v : element.Y1) blocks += std::norm(v);
  for (const auto& v : element.Y2) blocks += std::norm(v);
  for (const auto& chain : element.Y3)
    for (const auto& v : chain) blocks += std::norm(v);
  return integral + blocks;
}

double norming_constant(const DiracProblem& problem, double lambda_k, const IntegratorOptions& opts) {
  problem.require_valid("norming_constant");
  std::vector<int> points = default_points_per_interval(problem, lambda_k);
  for (int attempt = 0;; ++attempt) {
    ClosureResiduals scales;
    const auto r = assemble(problem, lambda_k, points, opts, scales);
    try {
      return h_norm_sq(r.element, problem);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kGridTooCoarse || attempt >= 6) throw;
    }
    for (int& m : points) m = 2 * (m - 1) + 1;
  }
}

ZeroCount count_zeros_in_rectangle(const DiracProblem& problem, Complex lower_left,
                                   Complex upper_right, int samples_per_edge,
                                   const IntegratorOptions& opts) {
  problem.require_valid("count_zeros_in_rectangle");
  if (!(lower_left.real() < upper_right.real() && lower_left.imag() < upper_right.imag()))
    throw std::invalid_argument("count_zeros_in_rectangle: corners must span a rectangle");
  const int panels = std::max(2, samples_per_edge + (samples_per_edge % 2));
  auto log_derivative = [&](Complex z) {
    const double h = 1e-6 * (1.0 + std::abs(z));
    auto [m0, e0] = delta_scaled(problem, z, opts);
    auto [mp, ep] = delta_scaled(problem, z + h, opts);
    auto [mm, em] = delta_scaled(problem, z - h, opts);
    return (mp * std::exp(ep - e0) - mm * std::exp(em - e0)) / (2.0 * h * m0);
  };
  const Complex corners[5] = {lower_left, {upper_right.real(), lower_left.imag()}, upper_right,
                              {lower_left.real(), upper_right.imag()}, lower_left};
  Complex total = 0.0;
  for (int e = 0; e < 4; ++e) {
    const Complex dz = (corners[e + 1] - corners[e]) / double(panels);
    Complex edge = 0.0;
    for (int k = 0; k <= panels; ++k) {
      const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      edge += w * log_derivative(corners[e] + double(k) * dz);
    }
    total += edge * dz / 3.0;
  }
  ZeroCount out;
  out.winding = (total / Complex(0.0, 2.0 * std::numbers::pi)).real();
  out.count = static_cast<int>(std::lround(out.winding));
  return out;
}

}  // namespace dirac
