#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <vector>

namespace dirac {

using Complex = std::complex<double>;

/// Polynomial in the spectral parameter with real coefficients; index k holds
/// the coefficient of lambda^k. Trailing zeros are stripped on construction,
/// so the zero polynomial has an empty coefficient list and no degree.
class RealPolynomial {
 public:
  RealPolynomial() = default;
  RealPolynomial(std::initializer_list<double> coeffs);
  explicit RealPolynomial(std::vector<double> coeffs);

  static RealPolynomial constant(double c) { return RealPolynomial({c}); }
  static RealPolynomial monomial(int power, double c = 1.0);

  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  std::optional<int> degree() const noexcept;

  /// Coefficient of lambda^k; zero for k beyond the degree or negative k.
  double coeff(int k) const noexcept;
  /// Leading coefficient, 0 for the zero polynomial.
  double leading() const noexcept;

  /// Horner evaluation.
  template <typename Scalar>
  Scalar operator()(const Scalar& lambda) const {
    Scalar acc(0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
      acc = acc * lambda + Scalar(*it);
    return acc;
  }

  friend bool operator==(const RealPolynomial&, const RealPolynomial&) = default;

 private:
  void canonicalize();
  std::vector<double> coeffs_;
};

inline Complex eval_poly(const RealPolynomial& p, Complex lambda) { return p(lambda); }

}  // namespace dirac
