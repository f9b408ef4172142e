#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dirac/polynomial.hpp"

namespace dirac {

/// Entries of the symmetric potential matrix [[p, q], [q, r]] at one point.
struct PotentialValue {
  double p = 0.0;
  double q = 0.0;
  double r = 0.0;
};

/// Potential on one piece of the partition. Polynomial pieces are polynomials
/// in the absolute coordinate x.
class PotentialPiece {
 public:
  enum class Kind { kZero, kConstant, kPoly, kFunction };

  PotentialPiece() = default;
  static PotentialPiece zero() { return {}; }
  static PotentialPiece constant(double p, double q, double r);
  static PotentialPiece poly(RealPolynomial p, RealPolynomial q, RealPolynomial r);
  static PotentialPiece function(std::function<PotentialValue(double)> f);

  Kind kind() const noexcept { return kind_; }
  /// True when the piece evaluates to zero everywhere.
  bool is_zero() const noexcept;
  /// True when the piece does not depend on x.
  bool is_constant() const noexcept;

  PotentialValue operator()(double x) const;

  // Coefficients for kConstant and kPoly pieces; empty otherwise.
  const RealPolynomial& p() const noexcept { return p_; }
  const RealPolynomial& q() const noexcept { return q_; }
  const RealPolynomial& r() const noexcept { return r_; }

 private:
  Kind kind_ = Kind::kZero;
  RealPolynomial p_, q_, r_;
  std::function<PotentialValue(double)> f_;
};

/// Potential over [a, b]. With `breaks` empty the pieces follow the weight
/// partition (one per subinterval), or a single piece covers [a, b], or no
/// piece at all means zero potential. With `breaks` given, pieces.size() must
/// be breaks.size() + 1 and the two partitions are merged.
struct PotentialSpec {
  std::vector<PotentialPiece> pieces;
  std::vector<double> breaks;

  static PotentialSpec zero() { return {}; }
  static PotentialSpec uniform(PotentialPiece piece) { return {{std::move(piece)}, {}}; }
  static PotentialSpec per_interval(std::vector<PotentialPiece> pieces) {
    return {std::move(pieces), {}};
  }
};

struct TransmissionData {
  double xi = 0.0;
  double theta = 1.0;
  RealPolynomial gamma;
};

struct BoundaryConditions {
  RealPolynomial a1, a2, b1, b2;
};

/// One piece of the common refinement of the weight and potential partitions.
struct Segment {
  double x0 = 0.0;
  double x1 = 0.0;
  double rho = 1.0;
  int interval = 0;      // index i of the weight subinterval (xi_i, xi_{i+1})
  int jump_at_end = -1;  // transmission index located at x1, or -1
  PotentialPiece piece;
};

struct ValidationReport {
  std::vector<std::string> failures;
  bool ok() const noexcept { return failures.empty(); }
  std::string summary() const;
};

class DiracProblem {
 public:
  DiracProblem(double a, double b, std::vector<double> weights,
               std::vector<TransmissionData> transmissions, BoundaryConditions boundary,
               PotentialSpec potential = {});

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  int n() const noexcept { return static_cast<int>(transmissions_.size()); }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<TransmissionData>& transmissions() const noexcept { return transmissions_; }
  const BoundaryConditions& boundary() const noexcept { return boundary_; }
  const PotentialSpec& potential() const noexcept { return potential_; }

  /// xi_0 = a, xi_1..xi_n, xi_{n+1} = b.
  double breakpoint(int i) const;
  /// Index of the weight subinterval containing x (left-closed except the last).
  int interval_of(double x) const;

  /// Common refinement used by the propagator; empty when the problem is invalid.
  const std::vector<Segment>& segments() const noexcept { return segments_; }
  const ValidationReport& report() const noexcept { return report_; }
  bool valid() const noexcept { return report_.ok(); }
  /// Throws Error(kInvalidProblem) naming `operation` if the problem is invalid.
  void require_valid(const char* operation) const;

  DiracProblem with_potential(PotentialSpec potential) const;
  DiracProblem with_transmissions(std::vector<TransmissionData> transmissions) const;
  DiracProblem with_boundary(BoundaryConditions boundary) const;

 private:
  void build_segments();

  double a_, b_;
  std::vector<double> weights_;
  std::vector<TransmissionData> transmissions_;
  BoundaryConditions boundary_;
  PotentialSpec potential_;
  ValidationReport report_;
  std::vector<Segment> segments_;
};

ValidationReport validate(const DiracProblem& problem);

enum class Dominance {
  kFirst,   // deg a1 > deg a2 (resp. b1 over b2), or the second is zero
  kSecond,  // deg a2 > deg a1, or the first is zero
  kEqual,
};

const char* to_string(Dominance d);

struct DegreeProfile {
  std::optional<int> m1, m2, m3, m4;  // degrees of a1, a2, b1, b2
  int m_a = 0;                        // max(m1, m2)
  int m_b = 0;                        // max(m3, m4)
  std::vector<int> r;                 // deg gamma_i, 0 for a zero gamma
  bool gamma_all_nonzero = true;
  int A = 0;                          // r_1 + ... + r_n
  Dominance case_a = Dominance::kSecond;
  Dominance case_b = Dominance::kSecond;
};

DegreeProfile degree_profile(const DiracProblem& problem);

/// rho_n (b - xi_n) + sum rho_{i-1} (xi_i - xi_{i-1}); the oscillation scale of Delta.
double total_length(const DiracProblem& problem);

}  // namespace dirac
