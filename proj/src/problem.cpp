#include "dirac/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dirac/errors.hpp"

namespace dirac {

PotentialPiece PotentialPiece::constant(double p, double q, double r) {
  PotentialPiece piece;
  piece.kind_ = Kind::kConstant;
  piece.p_ = RealPolynomial::constant(p);
  piece.q_ = RealPolynomial::constant(q);
  piece.r_ = RealPolynomial::constant(r);
  if (piece.is_zero()) piece.kind_ = Kind::kZero;
  return piece;
}

PotentialPiece PotentialPiece::poly(RealPolynomial p, RealPolynomial q, RealPolynomial r) {
  PotentialPiece piece;
  piece.kind_ = Kind::kPoly;
  piece.p_ = std::move(p);
  piece.q_ = std::move(q);
  piece.r_ = std::move(r);
  return piece;
}

PotentialPiece PotentialPiece::function(std::function<PotentialValue(double)> f) {
  PotentialPiece piece;
  piece.kind_ = Kind::kFunction;
  piece.f_ = std::move(f);
  return piece;
}

bool PotentialPiece::is_zero() const noexcept {
  switch (kind_) {
    case Kind::kZero: return true;
    case Kind::kConstant:
    case Kind::kPoly: return p_.is_zero() && q_.is_zero() && r_.is_zero();
    case Kind::kFunction: return false;
  }
  return false;
}

bool PotentialPiece::is_constant() const noexcept {
  auto deg0 = [](const RealPolynomial& c) { return c.degree().value_or(0) == 0; };
  switch (kind_) {
    case Kind::kZero:
    case Kind::kConstant: return true;
    case Kind::kPoly: return deg0(p_) && deg0(q_) && deg0(r_);
    case Kind::kFunction: return false;
  }
  return false;
}

PotentialValue PotentialPiece::operator()(double x) const {
  switch (kind_) {
    case Kind::kZero: return {};
    case Kind::kConstant:
    case Kind::kPoly: return {p_(x), q_(x), r_(x)};
    case Kind::kFunction: return f_(x);
  }
  return {};
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < failures.size(); ++i) out << (i ? "; " : "") << failures[i];
  return out.str();
}

DiracProblem::DiracProblem(double a, double b, std::vector<double> weights,
                           std::vector<TransmissionData> transmissions,
                           BoundaryConditions boundary, PotentialSpec potential)
    : a_(a),
      b_(b),
      weights_(std::move(weights)),
      transmissions_(std::move(transmissions)),
      boundary_(std::move(boundary)),
      potential_(std::move(potential)) {
  report_ = validate(*this);
  if (report_.ok()) build_segments();
}

double DiracProblem::breakpoint(int i) const {
  if (i <= 0) return a_;
  if (i > n()) return b_;
  return transmissions_[static_cast<std::size_t>(i - 1)].xi;
}

int DiracProblem::interval_of(double x) const {
  int i = 0;
  while (i < n() && x >= transmissions_[static_cast<std::size_t>(i)].xi) ++i;
  return i;
}

void DiracProblem::require_valid(const char* operation) const {
  if (!valid()) throw Error(ErrorCode::kInvalidProblem, operation, report_.summary());
}

DiracProblem DiracProblem::with_potential(PotentialSpec potential) const {
  return {a_, b_, weights_, transmissions_, boundary_, std::move(potential)};
}

DiracProblem DiracProblem::with_transmissions(std::vector<TransmissionData> transmissions) const {
  return {a_, b_, weights_, std::move(transmissions), boundary_, potential_};
}

DiracProblem DiracProblem::with_boundary(BoundaryConditions boundary) const {
  return {a_, b_, weights_, transmissions_, std::move(boundary), potential_};
}

void DiracProblem::build_segments() {
  // Partition points tagged with the transmission index located there (-1: potential break only).
  std::vector<std::pair<double, int>> points;
  for (int i = 0; i < n(); ++i) points.emplace_back(transmissions_[static_cast<std::size_t>(i)].xi, i);
  for (double x : potential_.breaks) {
    auto hit = std::find_if(points.begin(), points.end(),
                            [x](const auto& pt) { return pt.first == x; });
    if (hit == points.end()) points.emplace_back(x, -1);
  }
  std::sort(points.begin(), points.end());
  points.emplace_back(b_, -1);

  const auto& pieces = potential_.pieces;
  auto piece_for = [&](double mid, int interval) -> PotentialPiece {
    if (!potential_.breaks.empty()) {
      auto k = std::upper_bound(potential_.breaks.begin(), potential_.breaks.end(), mid) -
               potential_.breaks.begin();
      return pieces[static_cast<std::size_t>(k)];
    }
    if (pieces.empty()) return PotentialPiece::zero();
    if (pieces.size() == 1) return pieces.front();
    return pieces[static_cast<std::size_t>(interval)];
  };

  double x0 = a_;
  int interval = 0;
  for (const auto& [x1, jump] : points) {
    Segment seg;
    seg.x0 = x0;
    seg.x1 = x1;
    seg.interval = interval;
    seg.rho = weights_[static_cast<std::size_t>(interval)];
    seg.jump_at_end = jump;
    seg.piece = piece_for(0.5 * (x0 + x1), interval);
    segments_.push_back(std::move(seg));
    if (jump >= 0) ++interval;
    x0 = x1;
  }
}

ValidationReport validate(const DiracProblem& problem) {
  ValidationReport report;
  auto fail = [&](std::string msg) { report.failures.push_back(std::move(msg)); };
  const double a = problem.a(), b = problem.b();

  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) fail("interval must satisfy a < b");

  const auto& weights = problem.weights();
  if (weights.size() != problem.transmissions().size() + 1) {
    std::ostringstream msg;
    msg << "weight count " << weights.size() << " must equal transmission count + 1 ("
        << problem.transmissions().size() + 1 << ")";
    fail(msg.str());
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      std::ostringstream msg;
      msg << "nonpositive weight: rho_" << i << " = " << weights[i];
      fail(msg.str());
    }
  }

  const auto& tr = problem.transmissions();
  for (std::size_t i = 0; i < tr.size(); ++i) {
    if (!(tr[i].xi > a && tr[i].xi < b)) {
      std::ostringstream msg;
      msg << "breakpoint xi_" << i + 1 << " = " << tr[i].xi << " outside (a, b)";
      fail(msg.str());
    }
    if (i > 0 && !(tr[i - 1].xi < tr[i].xi)) {
      std::ostringstream msg;
      msg << "unordered breakpoints: xi_" << i << " = " << tr[i - 1].xi << " >= xi_" << i + 1
          << " = " << tr[i].xi;
      fail(msg.str());
    }
    if (tr[i].theta == 0.0 || !std::isfinite(tr[i].theta)) {
      std::ostringstream msg;
      msg << "theta must be nonzero (transmission " << i + 1 << ")";
      fail(msg.str());
    }
  }

  const auto& bc = problem.boundary();
  if (bc.a1.is_zero() && bc.a2.is_zero()) fail("degenerate boundary polynomials: a1 and a2 both zero");
  if (bc.b1.is_zero() && bc.b2.is_zero()) fail("degenerate boundary polynomials: b1 and b2 both zero");

  const auto& pot = problem.potential();
  if (!pot.breaks.empty()) {
    if (pot.pieces.size() != pot.breaks.size() + 1)
      fail("potential piece count must equal potential break count + 1");
    for (std::size_t i = 0; i < pot.breaks.size(); ++i) {
      if (!(pot.breaks[i] > a && pot.breaks[i] < b)) fail("potential break outside (a, b)");
      if (i > 0 && !(pot.breaks[i - 1] < pot.breaks[i])) fail("unordered potential breaks");
    }
  } else if (pot.pieces.size() > 1 && pot.pieces.size() != weights.size()) {
    fail("potential piece count must be 0, 1, or one per subinterval");
  }
  return report;
}

const char* to_string(Dominance d) {
  switch (d) {
    case Dominance::kFirst: return "first";
    case Dominance::kSecond: return "second";
    case Dominance::kEqual: return "equal";
  }
  return "?";
}

namespace {

Dominance classify(const std::optional<int>& first, const std::optional<int>& second,
                   const char* which) {
  if (!first && !second)
    throw Error(ErrorCode::kZeroLeadingCoefficient, "degree_profile",
                std::string("both ") + which + " boundary polynomials are zero");
  if (!first) return Dominance::kSecond;
  if (!second) return Dominance::kFirst;
  if (*first > *second) return Dominance::kFirst;
  if (*second > *first) return Dominance::kSecond;
  return Dominance::kEqual;
}

}  // namespace

DegreeProfile degree_profile(const DiracProblem& problem) {
  const auto& bc = problem.boundary();
  DegreeProfile prof;
  prof.m1 = bc.a1.degree();
  prof.m2 = bc.a2.degree();
  prof.m3 = bc.b1.degree();
  prof.m4 = bc.b2.degree();
  prof.m_a = std::max(prof.m1.value_or(0), prof.m2.value_or(0));
  prof.m_b = std::max(prof.m3.value_or(0), prof.m4.value_or(0));
  prof.case_a = classify(prof.m1, prof.m2, "a");
  prof.case_b = classify(prof.m3, prof.m4, "b");
  for (const auto& t : problem.transmissions()) {
    auto d = t.gamma.degree();
    if (!d) prof.gamma_all_nonzero = false;
    prof.r.push_back(d.value_or(0));
    prof.A += d.value_or(0);
  }
  return prof;
}

double total_length(const DiracProblem& problem) {
  double s = 0.0;
  for (int i = 0; i <= problem.n(); ++i)
    s += problem.weights()[static_cast<std::size_t>(i)] *
         (problem.breakpoint(i + 1) - problem.breakpoint(i));
  return s;
}

}  // namespace dirac
