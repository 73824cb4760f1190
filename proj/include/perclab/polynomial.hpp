#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "perclab/pmf.hpp"

namespace perclab {

/// Polynomial in the edge probability p with exact integer coefficients,
/// stored in the power basis: coeffs[i] multiplies p^i.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<BigInt> coeffs);

  static Polynomial constant(long long c);
  /// p^k (1 - p)^j expanded.
  static Polynomial monomial_pair(std::size_t k, std::size_t j);

  const std::vector<BigInt>& coefficients() const noexcept { return coeffs_; }
  std::size_t degree() const noexcept { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }
  bool is_zero() const noexcept { return coeffs_.empty(); }

  Rational evaluate(const Rational& p) const;
  double evaluate(double p) const;

  Polynomial& operator+=(const Polynomial& other);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const BigInt& c, const Polynomial& a);
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  std::string to_string() const;

 private:
  void trim();
  std::vector<BigInt> coeffs_;
};

}  // namespace perclab
