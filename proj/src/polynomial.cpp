#include "dirac/polynomial.hpp"

#include <cmath>
#include <stdexcept>

namespace dirac {

RealPolynomial::RealPolynomial(std::initializer_list<double> coeffs) : coeffs_(coeffs) {
  canonicalize();
}

RealPolynomial::RealPolynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  canonicalize();
}

RealPolynomial RealPolynomial::monomial(int power, double c) {
  if (power < 0) throw std::invalid_argument("monomial power must be nonnegative");
  std::vector<double> coeffs(static_cast<std::size_t>(power) + 1, 0.0);
  coeffs.back() = c;
  return RealPolynomial(std::move(coeffs));
}

void RealPolynomial::canonicalize() {
  for (double c : coeffs_)
    if (!std::isfinite(c)) throw std::invalid_argument("polynomial coefficient is not finite");
  while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

std::optional<int> RealPolynomial::degree() const noexcept {
  if (coeffs_.empty()) return std::nullopt;
  return static_cast<int>(coeffs_.size()) - 1;
}

double RealPolynomial::coeff(int k) const noexcept {
  if (k < 0 || k >= static_cast<int>(coeffs_.size())) return 0.0;
  return coeffs_[static_cast<std::size_t>(k)];
}

double RealPolynomial::leading() const noexcept { return coeffs_.empty() ? 0.0 : coeffs_.back(); }

}  // namespace dirac
