#include "dirac/reconstruct.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dirac/errors.hpp"
#include "parallel.hpp"

namespace dirac {

namespace {

struct Targets {
  std::vector<double> values;
  std::vector<double> sqrt_weights;
};

Targets sorted_targets(const std::vector<double>& values, const std::vector<double>& weights) {
  if (!weights.empty() && weights.size() != values.size())
    throw std::invalid_argument("reconstruct: one weight per target required");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return values[i] < values[j]; });
  Targets t;
  for (auto i : order) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (!(w > 0.0)) throw std::invalid_argument("reconstruct: weights must be positive");
    t.values.push_back(values[i]);
    t.sqrt_weights.push_back(std::sqrt(w));
  }
  return t;
}

class Objective {
 public:
  Objective(const ReconstructionSpec& spec, const SpectrumOptions& opts)
      : spec_(spec),
        opts_(opts),
        main_(sorted_targets(spec.targets_main, spec.weights_main)),
        aux_(sorted_targets(spec.targets_aux, spec.weights_aux)) {}

  std::size_t size() const { return main_.values.size() + aux_.values.size(); }

  // Weighted residual vector; throws kMatchingFailure for unmatched spectra.
  Eigen::VectorXd operator()(const std::vector<double>& theta) const {
    const DiracProblem p = apply_parameters(spec_, theta);
    Eigen::VectorXd r(static_cast<Eigen::Index>(size()));
    Eigen::Index k = 0;
    auto fill = [&](const Targets& t, bool aux) {
      if (t.values.empty()) return;
      const auto model = matched_eigenvalues(p, t.values, aux, opts_);
      for (std::size_t i = 0; i < model.size(); ++i) r(k++) = t.sqrt_weights[i] * (model[i] - t.values[i]);
    };
    fill(main_, false);
    fill(aux_, true);
    return r;
  }

  std::pair<std::vector<double>, std::vector<double>> mismatches(const std::vector<double>& theta) const {
    const DiracProblem p = apply_parameters(spec_, theta);
    auto diff = [&](const Targets& t, bool aux) {
      std::vector<double> d;
      if (t.values.empty()) return d;
      const auto model = matched_eigenvalues(p, t.values, aux, opts_);
      for (std::size_t i = 0; i < model.size(); ++i) d.push_back(model[i] - t.values[i]);
      return d;
    };
    return {diff(main_, false), diff(aux_, true)};
  }

 private:
  const ReconstructionSpec& spec_;
  SpectrumOptions opts_;
  Targets main_, aux_;
};

bool is_matching_failure(const Error& e) { return e.code() == ErrorCode::kMatchingFailure; }

StartReport levenberg_marquardt(const Objective& f, const std::vector<FitParameter>& params,
                                std::vector<double> theta, const ReconstructionOptions& opts) {
  const auto np = static_cast<Eigen::Index>(params.size());
  const double m = static_cast<double>(f.size());
  StartReport rep;
  rep.start = theta;
  rep.rms = std::numeric_limits<double>::infinity();
  auto clamp = [&](std::vector<double>& t) {
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = std::clamp(t[j], params[j].lower, params[j].upper);
  };
  auto eval = [&](const std::vector<double>& t, Eigen::VectorXd& out) {
    try {
      out = f(t);
      return true;
    } catch (const Error& e) {
      if (!is_matching_failure(e)) throw;
      return false;
    }
  };

  clamp(theta);
  Eigen::VectorXd r;
  if (!eval(theta, r)) {
    rep.parameters = theta;
    return rep;
  }
  double cost = r.squaredNorm();
  double mu = 1e-3;
  for (rep.iterations = 0; rep.iterations < opts.max_iterations; ++rep.iterations) {
    if (std::sqrt(cost / m) <= 1e-3 * opts.tol) break;
    Eigen::MatrixXd jac(r.size(), np);
    for (Eigen::Index j = 0; j < np; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const double h = 1e-5 * (1.0 + std::abs(theta[ju]));
      std::vector<double> tp = theta, tm = theta;
      tp[ju] = std::min(theta[ju] + h, params[ju].upper);
      tm[ju] = std::max(theta[ju] - h, params[ju].lower);
      Eigen::VectorXd rp, rm;
      const bool okp = eval(tp, rp), okm = eval(tm, rm);
      if (okp && okm) {
        jac.col(j) = (rp - rm) / (tp[ju] - tm[ju]);
      } else if (okp && tp[ju] != theta[ju]) {
        jac.col(j) = (rp - r) / (tp[ju] - theta[ju]);
      } else if (okm && tm[ju] != theta[ju]) {
        jac.col(j) = (r - rm) / (theta[ju] - tm[ju]);
      } else {
        jac.col(j).setZero();
      }
    }
    const Eigen::MatrixXd a = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;
    bool accepted = false;
    Eigen::VectorXd step;
    for (int inner = 0; inner < 12 && !accepted; ++inner) {
      Eigen::MatrixXd damped = a;
      for (Eigen::Index j = 0; j < np; ++j) damped(j, j) += mu * std::max(a(j, j), 1e-12);
      step = damped.ldlt().solve(-g);
      std::vector<double> trial = theta;
      for (Eigen::Index j = 0; j < np; ++j) trial[static_cast<std::size_t>(j)] += step(j);
      clamp(trial);
      Eigen::VectorXd rt;
      if (eval(trial, rt) && rt.squaredNorm() < cost) {
        for (Eigen::Index j = 0; j < np; ++j)
          step(j) = trial[static_cast<std::size_t>(j)] - theta[static_cast<std::size_t>(j)];
        theta = trial;
        r = rt;
        cost = rt.squaredNorm();
        mu = std::max(mu / 3.0, 1e-12);
        accepted = true;
      } else {
        mu *= 4.0;
      }
    }
    if (!accepted) break;
    double norm_theta = 0.0;
    for (double t : theta) norm_theta = std::max(norm_theta, std::abs(t));
    if (step.lpNorm<Eigen::Infinity>() <= 1e-13 * (1.0 + norm_theta)) break;
  }
  rep.parameters = theta;
  rep.rms = std::sqrt(cost / m);
  return rep;
}

std::vector<std::vector<double>> start_points(const std::vector<FitParameter>& params,
                                              const ReconstructionOptions& opts) {
  std::vector<std::vector<double>> starts = opts.starts;
  for (const auto& s : starts) {
    if (s.size() != params.size())
      throw std::invalid_argument("reconstruct: start vector has the wrong dimension");
    for (std::size_t j = 0; j < s.size(); ++j)
      if (s[j] < params[j].lower || s[j] > params[j].upper)
        throw std::invalid_argument("reconstruct: start value outside its bounds");
  }
  if (starts.empty()) {
    const int g = std::max(1, opts.grid_per_parameter);
    std::size_t total = 1;
    for (std::size_t j = 0; j < params.size(); ++j) total *= static_cast<std::size_t>(g);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::vector<double> s;
      std::size_t rest = idx;
      for (const auto& p : params) {
        const auto k = static_cast<double>(rest % static_cast<std::size_t>(g));
        rest /= static_cast<std::size_t>(g);
        s.push_back(p.lower + (k + 0.5) * (p.upper - p.lower) / g);
      }
      starts.push_back(std::move(s));
    }
  }
  std::mt19937_64 rng(opts.seed);
  for (int k = 0; k < opts.random_starts; ++k) {
    std::vector<double> s;
    for (const auto& p : params) s.push_back(std::uniform_real_distribution<double>(p.lower, p.upper)(rng));
    starts.push_back(std::move(s));
  }
  return starts;
}

}  // namespace

DiracProblem apply_parameters(const ReconstructionSpec& spec, const std::vector<double>& values) {
  if (values.size() != spec.parameters.size())
    throw std::invalid_argument("apply_parameters: one value per parameter required");
  const DiracProblem& t = spec.problem;
  PotentialSpec pot = t.potential();
  std::vector<TransmissionData> tr = t.transmissions();
  if (pot.pieces.empty() && pot.breaks.empty())
    pot.pieces.assign(static_cast<std::size_t>(t.n()) + 1, PotentialPiece::zero());

  for (std::size_t j = 0; j < values.size(); ++j) {
    for (const auto& slot : spec.parameters[j].slots) {
      if (slot.kind == ParameterSlot::Kind::kTheta) {
        if (slot.index < 0 || slot.index >= t.n())
          throw std::invalid_argument("apply_parameters: transmission index out of range");
        tr[static_cast<std::size_t>(slot.index)].theta = values[j];
        continue;
      }
      if (slot.index < 0 || static_cast<std::size_t>(slot.index) >= pot.pieces.size())
        throw std::invalid_argument("apply_parameters: potential piece index out of range");
      PotentialPiece& piece = pot.pieces[static_cast<std::size_t>(slot.index)];
      if (!piece.is_constant() || piece.kind() == PotentialPiece::Kind::kFunction)
        throw std::invalid_argument("apply_parameters: fit slots require constant potential pieces");
      double p = piece.p().coeff(0), q = piece.q().coeff(0), r = piece.r().coeff(0);
      if (slot.kind == ParameterSlot::Kind::kP) p = values[j];
      if (slot.kind == ParameterSlot::Kind::kQ) q = values[j];
      if (slot.kind == ParameterSlot::Kind::kR) r = values[j];
      piece = PotentialPiece::constant(p, q, r);
    }
  }
  return DiracProblem(t.a(), t.b(), t.weights(), std::move(tr), t.boundary(), std::move(pot));
}

std::vector<double> matched_eigenvalues(const DiracProblem& problem, const std::vector<double>& targets,
                                        bool auxiliary, const SpectrumOptions& opts) {
  if (targets.empty())
    throw Error(ErrorCode::kMatchingFailure, "reconstruct", "no targets to match");
  if (!problem.valid())
    throw Error(ErrorCode::kMatchingFailure, "reconstruct",
                "parameter vector gives an invalid problem: " + problem.report().summary());
  const auto [lo_it, hi_it] = std::minmax_element(targets.begin(), targets.end());
  const double span = *hi_it - *lo_it;
  const double half = targets.size() > 1 ? 0.5 * span / double(targets.size() - 1)
                                         : 0.5 * std::numbers::pi / total_length(problem);
  const SpectrumResult r = auxiliary ? find_auxiliary_eigenvalues(problem, *lo_it - half, *hi_it + half, opts)
                                     : find_eigenvalues(problem, *lo_it - half, *hi_it + half, opts);
  if (r.eigenvalues.size() != targets.size()) {
    std::ostringstream msg;
    msg << (auxiliary ? "auxiliary" : "main") << " spectrum has " << r.eigenvalues.size()
        << " eigenvalues in the window, expected " << targets.size();
    throw Error(ErrorCode::kMatchingFailure, "reconstruct", msg.str());
  }
  return r.eigenvalues;
}

ReconstructionResult reconstruct(const ReconstructionSpec& spec, const ReconstructionOptions& opts) {
  const std::size_t n_targets = spec.targets_main.size() + spec.targets_aux.size();
  if (n_targets == 0) throw Error(ErrorCode::kMatchingFailure, "reconstruct", "no targets given");
  if (n_targets < spec.parameters.size())
    throw Error(ErrorCode::kMatchingFailure, "reconstruct", "fewer targets than unknown parameters");
  for (const auto& p : spec.parameters)
    if (!(p.lower <= p.upper)) throw std::invalid_argument("reconstruct: empty parameter bounds");

  SpectrumOptions sopts = opts.spectrum;
  sopts.threads = 1;
  sopts.with_norming = false;
  const Objective objective(spec, sopts);
  const auto starts = start_points(spec.parameters, opts);

  ReconstructionResult out;
  out.starts.resize(starts.size());
  detail::parallel_for(starts.size(), opts.threads, [&](std::size_t k) {
    out.starts[k] = levenberg_marquardt(objective, spec.parameters, starts[k], opts);
  });

  std::size_t best = 0;
  for (std::size_t k = 1; k < out.starts.size(); ++k)
    if (out.starts[k].rms < out.starts[best].rms) best = k;
  const StartReport& b = out.starts[best];
  if (!std::isfinite(b.rms))
    throw Error(ErrorCode::kMatchingFailure, "reconstruct", "no start produced matchable spectra");
  out.parameters = b.parameters;
  out.rms = b.rms;
  std::tie(out.mismatch_main, out.mismatch_aux) = objective.mismatches(b.parameters);
  if (out.rms > opts.tol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "best RMS mismatch " << out.rms << " above tolerance " << opts.tol << " at (";
    for (std::size_t j = 0; j < out.parameters.size(); ++j) msg << (j ? ", " : "") << out.parameters[j];
    msg << ")";
    throw Error(ErrorCode::kNonConvergence, "reconstruct", msg.str());
  }
  return out;
}

}  // namespace dirac
