#include "perclab/polynomial.hpp"

#include <sstream>

namespace perclab {

Polynomial::Polynomial(std::vector<BigInt> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

void Polynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Polynomial Polynomial::constant(long long c) { return Polynomial({BigInt(c)}); }

Polynomial Polynomial::monomial_pair(std::size_t k, std::size_t j) {
  // p^k (1-p)^j = sum_i C(j, i) (-1)^i p^(k+i)
  std::vector<BigInt> coeffs(k + j + 1, 0);
  BigInt binom = 1;
  for (std::size_t i = 0; i <= j; ++i) {
    coeffs[k + i] = (i % 2 == 0) ? binom : BigInt(-binom);
    binom = binom * (j - i) / (i + 1);
  }
  return Polynomial(std::move(coeffs));
}

Rational Polynomial::evaluate(const Rational& p) const {
  Rational acc = 0;
  for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * p + Rational(coeffs_[i]);
  return acc;
}

double Polynomial::evaluate(double p) const {
  return static_cast<double>(evaluate(to_rational(p)));
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size(), 0);
  for (std::size_t i = 0; i < other.coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  trim();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<BigInt> out(a.coeffs_.size() + b.coeffs_.size() - 1, 0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return Polynomial(std::move(out));
}

Polynomial operator*(const BigInt& c, const Polynomial& a) {
  std::vector<BigInt> out = a.coeffs_;
  for (auto& x : out) x *= c;
  return Polynomial(std::move(out));
}

std::string Polynomial::to_string() const {
  if (coeffs_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const auto& c = coeffs_[i];
    if (c == 0) continue;
    BigInt mag = c < 0 ? BigInt(-c) : c;
    if (first) {
      if (c < 0) out << '-';
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    first = false;
    if (mag != 1 || i == 0) out << mag;
    if (i >= 1) out << (mag != 1 ? "*p" : "p");
    if (i >= 2) out << '^' << i;
  }
  return out.str();
}

}  // namespace perclab
