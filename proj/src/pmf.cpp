#include "perclab/pmf.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "perclab/error.hpp"

namespace perclab {

Rational to_rational(double x) {
  require(std::isfinite(x), "cannot convert a non-finite value to a rational");
  if (x == 0.0) return Rational(0);
  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);  // x = mantissa * 2^exponent
  const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exponent -= 53;
  BigInt num(scaled);
  BigInt den(1);
  if (exponent >= 0) {
    num <<= exponent;
  } else {
    den <<= -exponent;
  }
  return Rational(num, den);
}

Rational rational_pow(const Rational& base, std::size_t exponent) {
  BigInt num = pow(boost::multiprecision::numerator(base), static_cast<unsigned>(exponent));
  BigInt den = pow(boost::multiprecision::denominator(base), static_cast<unsigned>(exponent));
  return Rational(num, den);
}

Rational parse_rational(const std::string& text) {
  require(!text.empty(), "empty number");
  if (auto slash = text.find('/'); slash != std::string::npos) {
    BigInt num(text.substr(0, slash));
    BigInt den(text.substr(slash + 1));
    require(den != 0, "zero denominator in '" + text + "'");
    return Rational(num, den);
  }
  // Decimal with optional exponent, parsed digit by digit.
  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') negative = text[i++] == '-';
  BigInt digits = 0;
  long scale = 0;
  bool seen_digit = false, seen_point = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c >= '0' && c <= '9') {
      digits = digits * 10 + (c - '0');
      if (seen_point) ++scale;
      seen_digit = true;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  require(seen_digit, "malformed number '" + text + "'");
  long exp10 = 0;
  if (i < text.size()) {
    require(text[i] == 'e' || text[i] == 'E', "malformed number '" + text + "'");
    try {
      std::size_t used = 0;
      exp10 = std::stol(text.substr(i + 1), &used);
      require(i + 1 + used == text.size(), "malformed number '" + text + "'");
    } catch (const std::logic_error&) {
      fail(ErrorKind::invalid_argument, "malformed number '" + text + "'");
    }
  }
  exp10 -= scale;
  BigInt pow10 = 1;
  for (long k = 0; k < std::labs(exp10); ++k) pow10 *= 10;
  Rational value = exp10 >= 0 ? Rational(digits * pow10) : Rational(digits, pow10);
  return negative ? Rational(-value) : value;
}

double neumaier_sum(const std::vector<double>& xs) noexcept {
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

void Pmf::finalize() { residual = 1.0 - neumaier_sum(values); }

double Pmf::finite_remainder() const noexcept {
  const double rem = residual - infinite_mass;
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                       static_cast<double>(values.size() + 1);
  return rem > noise ? rem : 0.0;
}

Pmf pmf_from_exact(std::vector<Rational> values) {
  Pmf pmf;
  Rational total = 0;
  pmf.values.reserve(values.size());
  for (const auto& v : values) {
    pmf.values.push_back(static_cast<double>(v));
    total += v;
  }
  pmf.residual = static_cast<double>(Rational(1) - total);
  pmf.flag = PmfFlag::exact;
  pmf.exact_values = std::move(values);
  return pmf;
}

Pmf condition_on_finite(const Pmf& pmf) {
  const double finite = 1.0 - pmf.infinite_mass;
  require(finite > 0.0, "cannot condition on an event of probability zero");
  Pmf out;
  out.values.reserve(pmf.values.size());
  for (double v : pmf.values) out.values.push_back(v / finite);
  out.finalize();
  return out;
}

void write_pmf_csv(std::ostream& out, const Pmf& pmf) {
  out << "n,probability,a_n\n";
  out.precision(17);
  for (std::size_t n = 1; n <= pmf.n_max(); ++n) {
    const double v = pmf.at(n);
    out << n << ',' << v << ',';
    if (v > 0.0) out << -std::log(v) / static_cast<double>(n);
    out << '\n';
  }
}

Pmf read_pmf_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "empty pmf csv");
  require(line.rfind("n,probability", 0) == 0, "pmf csv must start with an 'n,probability' header");
  Pmf pmf;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string n_text, v_text;
    std::getline(row, n_text, ',');
    std::getline(row, v_text, ',');
    const auto n = std::stoul(n_text);
    require(n == pmf.values.size() + 1, "pmf csv rows must be consecutive from n = 1");
    pmf.values.push_back(std::stod(v_text));
  }
  pmf.finalize();
  return pmf;
}

}  // namespace perclab
