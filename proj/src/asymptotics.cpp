#include "dirac/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "dirac/errors.hpp"
#include "dirac/spectrum.hpp"
#include "parallel.hpp"

namespace dirac {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

// Dominant part of a boundary pair (first, second) folded to R cos(t + delta),
// which represents second * cos t - first * sin t.
struct Fold {
  int power = 0;
  double radius = 1.0;
  double delta = 0.0;
};

Fold fold(const RealPolynomial& first, const RealPolynomial& second, Dominance d) {
  const double c1 = d == Dominance::kSecond ? 0.0 : first.leading();
  const double c2 = d == Dominance::kFirst ? 0.0 : second.leading();
  return {std::max(first.degree().value_or(0), second.degree().value_or(0)), std::hypot(c1, c2),
          std::atan2(c1, c2)};
}

double gamma_leading(const DiracProblem& problem, int i, const char* op) {
  const auto& g = problem.transmissions()[static_cast<std::size_t>(i - 1)].gamma;
  if (g.is_zero())
    throw Error(ErrorCode::kDegenerateLeadingCoefficient, op,
                "gamma_" + std::to_string(i) + " is identically zero");
  return g.leading();
}

int gamma_degree(const DiracProblem& problem, int i) {
  return problem.transmissions()[static_cast<std::size_t>(i - 1)].gamma.degree().value_or(0);
}

double rho(const DiracProblem& problem, int i) { return problem.weights()[static_cast<std::size_t>(i)]; }

// sin(lambda rho_{i-1} (xi_i - xi_{i-1})) written as a cosine factor.
TrigFactor interior(const DiracProblem& problem, int i) {
  return {rho(problem, i - 1) * (problem.breakpoint(i) - problem.breakpoint(i - 1)), -kHalfPi};
}

void check_indices(const DiracProblem& problem, int j, int component, const char* op) {
  problem.require_valid(op);
  if (j < 0 || j > problem.n()) throw std::out_of_range(std::string(op) + ": interval index out of range");
  if (component != 1 && component != 2)
    throw std::out_of_range(std::string(op) + ": component must be 1 or 2");
}

}  // namespace

Complex LeadingTerm::oscillator(Complex lambda) const {
  Complex v = 1.0;
  for (const auto& f : factors) v *= std::cos(f.omega * lambda + f.phase);
  return v;
}

Complex LeadingTerm::operator()(Complex lambda) const {
  Complex v = double(sign) * amplitude;
  for (int k = 0; k < power; ++k) v *= lambda;
  return v * oscillator(lambda);
}

LeadingTerm phi_leading_term(const DiracProblem& problem, int j, int component, double x) {
  const char* op = "phi_leading";
  check_indices(problem, j, component, op);
  const DegreeProfile prof = degree_profile(problem);
  const auto& bc = problem.boundary();
  const Fold fa = fold(bc.a1, bc.a2, prof.case_a);
  LeadingTerm t;
  t.power = fa.power;
  t.amplitude = fa.radius;
  const double terminal_shift = component == 1 ? -kHalfPi : 0.0;
  if (j == 0) {
    t.factors.push_back({rho(problem, 0) * (x - problem.a()), fa.delta + (component == 2 ? -kHalfPi : 0.0)});
    return t;
  }
  t.factors.push_back({rho(problem, 0) * (problem.breakpoint(1) - problem.a()), fa.delta});
  for (int i = 1; i <= j; ++i) {
    t.amplitude *= gamma_leading(problem, i, op);
    t.power += gamma_degree(problem, i);
  }
  for (int i = 2; i <= j; ++i) t.factors.push_back(interior(problem, i));
  t.factors.push_back({rho(problem, j) * (x - problem.breakpoint(j)), terminal_shift});
  t.sign = ((j + (component == 2 ? 1 : 0)) % 2) ? -1 : 1;
  return t;
}

LeadingTerm psi_leading_term(const DiracProblem& problem, int j, int component, double x) {
  const char* op = "psi_leading";
  check_indices(problem, j, component, op);
  const DegreeProfile prof = degree_profile(problem);
  const auto& bc = problem.boundary();
  const int n = problem.n();
  const Fold fb = fold(bc.b1, bc.b2, prof.case_b);
  LeadingTerm t;
  t.power = fb.power;
  t.amplitude = fb.radius;
  if (j == n) {
    t.factors.push_back({rho(problem, n) * (x - problem.b()), fb.delta + (component == 2 ? -kHalfPi : 0.0)});
    return t;
  }
  t.factors.push_back({rho(problem, n) * (problem.breakpoint(n) - problem.b()), fb.delta});
  for (int i = j + 1; i <= n; ++i) {
    t.amplitude *= gamma_leading(problem, i, op);
    t.power += gamma_degree(problem, i);
  }
  for (int i = j + 2; i <= n; ++i) t.factors.push_back(interior(problem, i));
  t.factors.push_back({rho(problem, j) * (x - problem.breakpoint(j + 1)), component == 1 ? -kHalfPi : 0.0});
  t.sign = ((n - j - 1 + (component == 2 ? 1 : 0)) % 2) ? -1 : 1;
  return t;
}

LeadingTerm delta_leading_term(const DiracProblem& problem) {
  const char* op = "delta_leading";
  problem.require_valid(op);
  const DegreeProfile prof = degree_profile(problem);
  const auto& bc = problem.boundary();
  const int n = problem.n();
  const Fold fa = fold(bc.a1, bc.a2, prof.case_a);
  const Fold fb = fold(bc.b1, bc.b2, prof.case_b);
  LeadingTerm t;
  t.power = fa.power + fb.power;
  t.amplitude = fa.radius * fb.radius;
  if (n == 0) {
    t.factors.push_back({rho(problem, 0) * (problem.b() - problem.a()), fa.delta - fb.delta - kHalfPi});
    return t;
  }
  for (int i = 1; i <= n; ++i) {
    t.amplitude *= gamma_leading(problem, i, op);
    t.power += gamma_degree(problem, i);
  }
  t.factors.push_back({rho(problem, 0) * (problem.breakpoint(1) - problem.a()), fa.delta});
  for (int i = 2; i <= n; ++i) t.factors.push_back(interior(problem, i));
  t.factors.push_back({rho(problem, n) * (problem.b() - problem.breakpoint(n)), -fb.delta});
  t.sign = (n + 1) % 2 ? -1 : 1;
  return t;
}

std::pair<Complex, Complex> phi_leading(const DiracProblem& problem, int j, double x, Complex lambda) {
  return {phi_leading_term(problem, j, 1, x)(lambda), phi_leading_term(problem, j, 2, x)(lambda)};
}

std::pair<Complex, Complex> psi_leading(const DiracProblem& problem, int j, double x, Complex lambda) {
  return {psi_leading_term(problem, j, 1, x)(lambda), psi_leading_term(problem, j, 2, x)(lambda)};
}

Complex delta_leading(const DiracProblem& problem, Complex lambda) {
  return delta_leading_term(problem)(lambda);
}

std::vector<double> asymptotic_eigenvalues(const DiracProblem& problem, double lambda_min,
                                           double lambda_max) {
  if (!(lambda_min <= lambda_max))
    throw std::invalid_argument("asymptotic_eigenvalues: empty window");
  const LeadingTerm t = delta_leading_term(problem);
  const double snap = 1e-12 * std::max({1.0, std::abs(lambda_min), std::abs(lambda_max)});
  std::vector<double> zeros;
  for (const auto& f : t.factors) {
    if (f.omega == 0.0) continue;
    // omega * lambda + phase = pi/2 + k pi
    double k0 = (f.omega * lambda_min + f.phase - kHalfPi) / std::numbers::pi;
    double k1 = (f.omega * lambda_max + f.phase - kHalfPi) / std::numbers::pi;
    if (k0 > k1) std::swap(k0, k1);
    for (double k = std::ceil(k0 - 1e-9); k <= std::floor(k1 + 1e-9); k += 1.0) {
      double z = (kHalfPi + k * std::numbers::pi - f.phase) / f.omega;
      if (std::abs(z) < snap) z = 0.0;
      if (z >= lambda_min && z <= lambda_max) zeros.push_back(z);
    }
  }
  if (lambda_min <= 0.0 && 0.0 <= lambda_max) zeros.insert(zeros.end(), static_cast<std::size_t>(t.power), 0.0);
  std::sort(zeros.begin(), zeros.end());
  return zeros;
}

std::vector<double> asymptotic_eigenvalues(const DiracProblem& problem, int count) {
  if (count <= 0) return {};
  double upper = std::max(1.0, 2.0 * count * std::numbers::pi / total_length(problem));
  for (;;) {
    auto zeros = asymptotic_eigenvalues(problem, 0.0, upper);
    if (static_cast<int>(zeros.size()) >= count) {
      zeros.resize(static_cast<std::size_t>(count));
      return zeros;
    }
    upper *= 2.0;
  }
}

AsymptoticsReport compare_asymptotics(const DiracProblem& problem, const std::vector<double>& grid,
                                      const std::vector<double>& window_edges, double min_oscillator) {
  const LeadingTerm t = delta_leading_term(problem);
  AsymptoticsReport rep;
  rep.lambda = grid;
  rep.oscillator.resize(grid.size());
  rep.deviation.resize(grid.size());
  rep.admissible.resize(grid.size());
  detail::parallel_for(grid.size(), 0, [&](std::size_t i) {
    const Complex lead = t(grid[i]);
    rep.oscillator[i] = std::abs(t.oscillator(grid[i]));
    rep.deviation[i] = lead == 0.0 ? std::numeric_limits<double>::infinity()
                                   : std::abs(delta(problem, grid[i]) / lead - 1.0);
  });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    rep.admissible[i] = rep.oscillator[i] >= min_oscillator;
    if (rep.admissible[i]) rep.max_deviation = std::max(rep.max_deviation, rep.deviation[i]);
  }

  rep.window_edges = window_edges;
  if (rep.window_edges.empty() && !grid.empty()) {
    const auto [lo, hi] = std::minmax_element(grid.begin(), grid.end());
    for (int k = 0; k <= 4; ++k) rep.window_edges.push_back(*lo + (*hi - *lo) * k / 4.0);
  }
  for (std::size_t w = 0; w + 1 < rep.window_edges.size(); ++w) {
    double m = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!rep.admissible[i] || grid[i] < rep.window_edges[w] || grid[i] > rep.window_edges[w + 1]) continue;
      m = std::isnan(m) ? rep.deviation[i] : std::max(m, rep.deviation[i]);
    }
    rep.window_max.push_back(m);
  }
  double last = std::numeric_limits<double>::quiet_NaN();
  for (double m : rep.window_max) {
    if (std::isnan(m)) continue;
    if (!std::isnan(last) && m > last) rep.nonincreasing = false;
    last = m;
  }
  return rep;
}

}  // namespace dirac
