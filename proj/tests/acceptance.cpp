// Acceptance suite: one line per criterion. Usage: dirac_acceptance [n ...]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dirac/asymptotics.hpp"
#include "dirac/propagator.hpp"
#include "dirac/reconstruct.hpp"
#include "dirac/spectrum.hpp"
#include "dirac/weyl.hpp"
#include "test_support.hpp"

using namespace dirac;
using dirac::testing::kPi;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return out;
}

Verdict free_spectrum() {
  const auto s = find_eigenvalues(dirac::testing::free_problem(), -5.5, 5.5).eigenvalues;
  Verdict v;
  double worst = 0.0;
  if (s.size() != 11) {
    v.pass = false;
  } else {
    for (int k = 0; k < 11; ++k) worst = std::max(worst, std::abs(s[static_cast<std::size_t>(k)] - (k - 5)));
  }
  v.pass = v.pass && worst <= 1e-8;
  v.detail = "count " + std::to_string(s.size()) + ", max |lambda_k - k| " + fmt("%.3e", worst) + " (tol 1e-8)";
  return v;
}

Verdict transmission_oracle() {
  const auto p = dirac::testing::transmission_problem();
  double worst = 0.0;
  for (double lam : linspace(-20.0, 20.0, 400)) {
    const double c = std::cos(lam * kPi / 2);
    const double exact = std::sin(lam * kPi) + lam * c * c;
    worst = std::max(worst, std::abs(delta(p, lam) - exact));
  }
  return {worst <= 1e-8, "400 points, max |Delta - closed form| " + fmt("%.3e", worst) + " (tol 1e-8)"};
}

Verdict leading_asymptotics() {
  const auto p = dirac::testing::transmission_problem();
  const std::vector<double> edges{100.0, 200.0, 350.0, 500.0};
  std::vector<double> window_max(3, 0.0);
  double worst = 0.0;
  int admissible = 0;
  for (double lam : linspace(100.0, 500.0, 8001)) {
    const double c = std::cos(lam * kPi / 2);
    if (c * c < 0.5) continue;
    ++admissible;
    const double dev = std::abs(delta(p, lam) / delta_leading(p, lam) - 1.0);
    worst = std::max(worst, dev);
    for (std::size_t w = 0; w < 3; ++w)
      if (lam >= edges[w] && lam <= edges[w + 1]) window_max[w] = std::max(window_max[w], dev);
  }
  const bool monotone = window_max[1] <= window_max[0] && window_max[2] <= window_max[1];
  return {worst <= 0.05 && monotone && admissible > 0,
          std::to_string(admissible) + " admissible points, max deviation " + fmt("%.3e", worst) +
              " (tol 0.05), window maxima " + fmt("%.3e", window_max[0]) + " " + fmt("%.3e", window_max[1]) +
              " " + fmt("%.3e", window_max[2]) + (monotone ? " nonincreasing" : " INCREASING")};
}

Verdict wronskian_chain() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_delta = 0.0, worst_w = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto p = dirac::testing::random_problem(rng);
    for (int i = 0; i < 20; ++i) {
      const double lam = 40.0 * u(rng) - 20.0;
      const Complex db = delta(p, lam);
      const double scale = 1.0 + std::abs(db);
      worst_delta = std::max(worst_delta, std::abs(delta_from_a(p, lam) - db) / scale);
      const Complex w0 = wronskian(psi(p, p.a(), lam), phi(p, p.a(), lam));
      std::vector<double> xs;
      for (int j = 1; j <= 6; ++j) xs.push_back(std::min(p.b(), p.a() + (p.b() - p.a()) * j / 6.0));
      for (double x : xs) worst_w = std::max(worst_w, std::abs(wronskian(psi(p, x, lam), phi(p, x, lam)) - w0) / scale);
      for (const auto& td : p.transmissions())
        for (Limit side : {Limit::kLeft, Limit::kRight})
          worst_w = std::max(worst_w, std::abs(wronskian(psi(p, td.xi, lam, side), phi(p, td.xi, lam, side)) - w0) / scale);
    }
  }
  return {worst_delta <= 1e-7 && worst_w <= 1e-7,
          "50 problems x 20 lambda, max |Delta_a - Delta_b|/(1+|Delta|) " + fmt("%.3e", worst_delta) +
              ", max Wronskian drift " + fmt("%.3e", worst_w) + " (tol 1e-7)"};
}

Verdict p_matrix_identity() {
  std::vector<DiracProblem> fixtures{dirac::testing::free_problem(), dirac::testing::transmission_problem(),
                                     dirac::testing::single_jump_problem(2.0, {}),
                                     dirac::testing::constant_potential_problem(0.3)};
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  while (fixtures.size() < 10) fixtures.push_back(dirac::testing::random_problem(rng));
  double worst_dev = 0.0, worst_disc = 0.0;
  int evaluated = 0;
  for (const auto& p : fixtures) {
    int done = 0;
    while (done < 10) {
      const double x = p.a() + (p.b() - p.a()) * u(rng);
      const double lam = 20.0 * u(rng) - 10.0;
      PMatrixEvaluation ev;
      try {
        ev = p_matrix_evaluate(p, p, x, lam);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kPoleAtEigenvalue) throw;
        continue;
      }
      worst_dev = std::max(worst_dev, (ev.direct - Matrix2c::Identity()).cwiseAbs().maxCoeff());
      worst_disc = std::max(worst_disc, ev.discrepancy);
      ++done;
      ++evaluated;
    }
  }
  return {worst_dev <= 1e-7 && worst_disc <= 1e-7,
          std::to_string(evaluated) + " evaluations, max |P - I| " + fmt("%.3e", worst_dev) +
              ", max direct/decomposed discrepancy " + fmt("%.3e", worst_disc) + " (tol 1e-7)"};
}

Verdict eigen_element_closure() {
  BoundaryConditions bc = dirac::testing::dirichlet_like();
  bc.a1 = RealPolynomial{1.0};
  bc.a2 = RealPolynomial{0.0, 1.0};
  const DiracProblem p(0.0, kPi, {1.0}, {}, bc);
  SpectrumOptions opts;
  opts.with_norming = true;
  const auto s = find_eigenvalues(p, -8.0, 8.0, opts);
  const auto points = default_points_per_interval(p, 8.0);
  double worst_at = 0.0, least_mid = INFINITY, least_mu = INFINITY;
  for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
    worst_at = std::max(worst_at, build_eigen_element(p, s.eigenvalues[k], points).residuals.max());
    least_mu = std::min(least_mu, s.norming[k]);
    if (k + 1 < s.eigenvalues.size()) {
      const double mid = 0.5 * (s.eigenvalues[k] + s.eigenvalues[k + 1]);
      least_mid = std::min(least_mid, build_eigen_element(p, mid, points).residuals.max());
    }
  }
  const bool pass = s.eigenvalues.size() >= 2 && worst_at <= 1e-7 && least_mid >= 1e-2 && least_mu > 0.0;
  return {pass, std::to_string(s.eigenvalues.size()) + " eigenvalues, max residual at eigenvalues " +
                    fmt("%.3e", worst_at) + " (tol 1e-7), min residual at midpoints " + fmt("%.3e", least_mid) +
                    " (floor 1e-2), min mu " + fmt("%.3e", least_mu)};
}

std::vector<double> first_n(std::vector<double> v, std::size_t n) {
  if (v.size() > n) v.resize(n);
  return v;
}

DiracProblem two_sided(double vl, double vr) {
  return DiracProblem(0.0, kPi, {1.0, 1.0}, {{kPi / 2, 2.0, {}}}, dirac::testing::dirichlet_like(),
                      PotentialSpec::per_interval({PotentialPiece::constant(vl, 0.0, vl),
                                                   PotentialPiece::constant(vr, 0.0, vr)}));
}

Verdict two_spectra_reconstruction() {
  const auto truth = dirac::testing::constant_potential_problem(0.3);
  ReconstructionSpec one{dirac::testing::constant_potential_problem(0.0), {}, {}, {}, {}, {}};
  one.parameters.push_back({"v", {{ParameterSlot::Kind::kP, 0}, {ParameterSlot::Kind::kR, 0}}, -0.6, 0.6});
  one.targets_main = first_n(find_eigenvalues(truth, 0.0, 12.0).eigenvalues, 10);
  one.targets_aux = first_n(find_auxiliary_eigenvalues(truth, 0.0, 12.0).eigenvalues, 10);
  // v and v + 1 share both spectra; the bounds admit exactly one of them.
  ReconstructionOptions o1;
  o1.starts = {{-0.5}, {0.0}, {0.5}};
  const auto r1 = reconstruct(one, o1);
  const double err1 = std::abs(r1.parameters[0] - 0.3);

  const auto truth2 = two_sided(0.3, -0.2);
  ReconstructionSpec two{two_sided(0.0, 0.0), {}, {}, {}, {}, {}};
  two.parameters.push_back({"v_left", {{ParameterSlot::Kind::kP, 0}, {ParameterSlot::Kind::kR, 0}}, -1.0, 1.0});
  two.parameters.push_back({"v_right", {{ParameterSlot::Kind::kP, 1}, {ParameterSlot::Kind::kR, 1}}, -1.0, 1.0});
  two.targets_main = first_n(find_eigenvalues(truth2, 0.0, 20.0).eigenvalues, 15);
  two.targets_aux = first_n(find_auxiliary_eigenvalues(truth2, 0.0, 20.0).eigenvalues, 15);
  ReconstructionOptions o2;
  for (double a : {-0.5, 0.0, 0.5})
    for (double b : {-0.5, 0.0, 0.5}) o2.starts.push_back({a, b});
  const auto r2 = reconstruct(two, o2);
  const double err2 = std::max(std::abs(r2.parameters[0] - 0.3), std::abs(r2.parameters[1] + 0.2));
  return {err1 <= 1e-6 && err2 <= 1e-3,
          "one parameter: v = " + fmt("%.10f", r1.parameters[0]) + ", error " + fmt("%.3e", err1) +
              " (tol 1e-6); two parameters: (" + fmt("%.6f", r2.parameters[0]) + ", " +
              fmt("%.6f", r2.parameters[1]) + "), error " + fmt("%.3e", err2) + " (tol 1e-3)"};
}

Verdict hadamard_truncation() {
  const auto spectrum = find_eigenvalues(dirac::testing::free_problem(), -200.5, 200.5).eigenvalues;
  const auto slice = symmetric_slice(spectrum, 200);
  const double c = std::sin(0.5 * kPi) / hadamard_delta(slice.eigenvalues, 1.0, 0.5, slice.zero_multiplicity);
  double worst = 0.0, at = 0.0;
  for (double lam : linspace(-3.0, 3.0, 601)) {
    const double exact = std::sin(lam * kPi);
    if (std::abs(exact) < 1e-6) continue;
    const double rel = std::abs(hadamard_delta(slice.eigenvalues, c, lam, slice.zero_multiplicity) / exact - 1.0);
    if (rel > worst) {
      worst = rel;
      at = lam;
    }
  }
  return {worst <= 0.02, std::to_string(slice.eigenvalues.size()) + " nonzero eigenvalues, max relative error " +
                             fmt("%.4f", worst) + " at lambda " + fmt("%.2f", at) + " (tol 0.02)"};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // 0: no runtime requirement
  std::function<Verdict()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "free-problem spectrum", 5.0, free_spectrum},
      {2, "transmission closed form", 10.0, transmission_oracle},
      {3, "leading-term asymptotics", 10.0, leading_asymptotics},
      {4, "Delta from both ends and Wronskian", 60.0, wronskian_chain},
      {5, "P matrix identity", 0.0, p_matrix_identity},
      {6, "eigen-element closure", 0.0, eigen_element_closure},
      {7, "two-spectra reconstruction", 300.0, two_spectra_reconstruction},
      {8, "Hadamard truncation", 0.0, hadamard_truncation},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty())
    for (const auto& c : all) selected.push_back(c.id);

  int failures = 0;
  for (int id : selected) {
    if (id < 1 || id > static_cast<int>(all.size())) {
      std::printf("criterion %d: FAIL unknown criterion\n", id);
      ++failures;
      continue;
    }
    const auto& c = all[static_cast<std::size_t>(id - 1)];
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt("%.2f s", secs);
    if (c.budget_seconds > 0.0) {
      timing += fmt(" (budget %.0f s)", c.budget_seconds);
      if (secs >= c.budget_seconds) v.pass = false;
    }
    std::printf("criterion %d: %s %s: %s; %s\n", c.id, v.pass ? "PASS" : "FAIL", c.name, v.detail.c_str(),
                timing.c_str());
    if (!v.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
