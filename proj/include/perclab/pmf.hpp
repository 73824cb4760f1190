#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace perclab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Exact value of a double (every finite double is a dyadic rational).
Rational to_rational(double x);

Rational rational_pow(const Rational& base, std::size_t exponent);

/// Parses "3/10", "1/3", "0.25" or "1e-3" exactly.
Rational parse_rational(const std::string& text);

enum class PmfFlag { exact, truncated };

/// Law of a positive integer variable on {1..n_max} plus residual mass.
///
/// `residual` is 1 - sum(values): the mass beyond n_max, part of which
/// (`infinite_mass`) may be known to sit at infinity. `flag` is `exact` when
/// the values were produced in exact rational arithmetic, in which case
/// `exact_values` holds them.
struct Pmf {
  std::vector<double> values;  // values[n - 1] = P(X = n)
  double residual = 0.0;
  double infinite_mass = 0.0;
  PmfFlag flag = PmfFlag::truncated;
  std::vector<Rational> exact_values;

  std::size_t n_max() const noexcept { return values.size(); }
  double at(std::size_t n) const noexcept {
    return n >= 1 && n <= values.size() ? values[n - 1] : 0.0;
  }

  /// Finite mass beyond n_max, with values indistinguishable from rounding
  /// noise snapped to zero.
  double finite_remainder() const noexcept;

  /// Recomputes `residual` from `values` (Neumaier summation).
  void finalize();
};

Pmf pmf_from_exact(std::vector<Rational> values);

/// Divides by the finite mass 1 - infinite_mass.
Pmf condition_on_finite(const Pmf& pmf);

/// CSV with header "n,probability,a_n"; a_n = -(1/n) log P(X = n), empty
/// when undefined.
void write_pmf_csv(std::ostream& out, const Pmf& pmf);
Pmf read_pmf_csv(std::istream& in);

double neumaier_sum(const std::vector<double>& xs) noexcept;

}  // namespace perclab
