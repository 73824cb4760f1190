#include "perclab/branching.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include "perclab/error.hpp"

namespace perclab {

namespace {

constexpr std::size_t kDirectBinomialLimit = 300;

// Truncated convolution of two coefficient vectors.
std::vector<double> convolve(const std::vector<double>& a, std::span<const double> b,
                             std::size_t len) {
  std::vector<double> out(len, 0.0);
  for (std::size_t i = 0; i < a.size() && i < len; ++i) {
    if (a[i] == 0.0) continue;
    const std::size_t jmax = std::min(b.size(), len - i);
    for (std::size_t j = 0; j < jmax; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

void check_probability(double p) {
  require(p >= 0.0 && p <= 1.0 && !std::isnan(p), "probability must lie in [0, 1]");
}

}  // namespace

// ---------------------------------------------------------------------------
// OffspringDist

OffspringDist OffspringDist::binomial(int r, double p) {
  require(r >= 1, "binomial offspring needs r >= 1");
  check_probability(p);
  OffspringDist d;
  d.binomial_ = true;
  d.r_ = r;
  d.p_ = p;
  d.pmf_.assign(r + 1, 0.0);
  for (int k = 0; k <= r; ++k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (r - k + i) / i;
    d.pmf_[k] = c * std::pow(p, k) * std::pow(1.0 - p, r - k);
  }
  return d;
}

OffspringDist OffspringDist::generic(std::vector<double> pmf) {
  require(!pmf.empty(), "offspring pmf must be nonempty");
  double total = 0.0;
  for (double x : pmf) {
    require(x >= 0.0 && std::isfinite(x), "offspring pmf entries must be nonnegative");
    total += x;
  }
  require(std::fabs(total - 1.0) <= 1e-12, "offspring pmf must sum to 1 (within 1e-12)");
  while (pmf.size() > 1 && pmf.back() == 0.0) pmf.pop_back();
  OffspringDist d;
  d.pmf_ = std::move(pmf);
  d.r_ = static_cast<int>(d.pmf_.size() - 1);
  return d;
}

double OffspringDist::mean() const noexcept {
  if (binomial_) return r_ * p_;
  double m = 0.0;
  for (std::size_t k = 0; k < pmf_.size(); ++k) m += static_cast<double>(k) * pmf_[k];
  return m;
}

double OffspringDist::variance() const noexcept {
  if (binomial_) return r_ * p_ * (1.0 - p_);
  const double m = mean();
  double v = 0.0;
  for (std::size_t k = 0; k < pmf_.size(); ++k) {
    const double dk = static_cast<double>(k) - m;
    v += dk * dk * pmf_[k];
  }
  return v;
}

double OffspringDist::pgf(double s) const noexcept {
  if (binomial_) return std::pow(1.0 - p_ + p_ * s, r_);
  double acc = 0.0;
  for (std::size_t k = pmf_.size(); k-- > 0;) acc = acc * s + pmf_[k];
  return acc;
}

double OffspringDist::pgf_derivative(double s) const noexcept {
  if (binomial_) return r_ * p_ * std::pow(1.0 - p_ + p_ * s, r_ - 1);
  double acc = 0.0;
  for (std::size_t k = pmf_.size(); k-- > 1;) acc = acc * s + static_cast<double>(k) * pmf_[k];
  return acc;
}

double OffspringDist::extinction_probability() const {
  if (mean() <= 1.0) return 1.0;
  if (pmf_[0] == 0.0) return 0.0;
  // Newton from the left on the convex f(s) = pgf(s) - s converges
  // monotonically to the smallest root.
  double s = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double f = pgf(s) - s;
    const double df = pgf_derivative(s) - 1.0;
    const double next = s - f / df;
    if (!(next > s)) break;
    s = next;
    if (std::fabs(f) < 1e-300) break;
  }
  return std::min(s, 1.0);
}

int OffspringDist::draw(CounterRng& rng) const noexcept {
  if (binomial_) {
    int k = 0;
    for (int i = 0; i < r_; ++i) k += rng.uniform() < p_ ? 1 : 0;
    return k;
  }
  double u = rng.uniform();
  for (std::size_t k = 0; k + 1 < pmf_.size(); ++k) {
    if (u < pmf_[k]) return static_cast<int>(k);
    u -= pmf_[k];
  }
  return static_cast<int>(pmf_.size() - 1);
}

std::string OffspringDist::describe() const {
  std::ostringstream out;
  out.precision(17);
  if (binomial_) {
    out << "binomial:" << r_ << ',' << p_;
  } else {
    out << "generic:";
    for (std::size_t k = 0; k < pmf_.size(); ++k) out << (k ? "," : "") << pmf_[k];
  }
  return out.str();
}

OffspringDist parse_offspring(const std::string& text) {
  const auto colon = text.find(':');
  require(colon != std::string::npos, "offspring must look like binomial:R,P or generic:P0,P1,...");
  const auto kind = text.substr(0, colon);
  std::vector<std::string> parts;
  std::istringstream body(text.substr(colon + 1));
  for (std::string item; std::getline(body, item, ',');) parts.push_back(item);
  if (kind == "binomial") {
    require(parts.size() == 2, "binomial offspring takes R,P");
    return OffspringDist::binomial(std::stoi(parts[0]),
                                   static_cast<double>(parse_rational(parts[1])));
  }
  require(kind == "generic", "unknown offspring kind '" + kind + "'");
  std::vector<double> pmf;
  for (const auto& s : parts) pmf.push_back(static_cast<double>(parse_rational(s)));
  return OffspringDist::generic(std::move(pmf));
}

// ---------------------------------------------------------------------------
// Total progeny

namespace {

// (1/n) C(rn, n-1) p^(n-1) (1-p)^(rn-n+1)
double binomial_dwass_term(int r, double p, std::size_t n) {
  if (p == 0.0) return n == 1 ? 1.0 : 0.0;
  if (p == 1.0) return 0.0;
  const auto N = static_cast<long double>(r) * n;
  const auto k = static_cast<long double>(n - 1);
  if (n <= kDirectBinomialLimit) {
    long double c = 1.0L;
    for (std::size_t i = 1; i <= n - 1; ++i) c = c * (N - k + i) / i;
    return static_cast<double>(c * std::pow(static_cast<long double>(p), k) *
                               std::pow(1.0L - p, N - k) / n);
  }
  const long double log_term = std::lgamma(N + 1) - std::lgamma(k + 1) - std::lgamma(N - k + 1) +
                               k * std::log(static_cast<long double>(p)) +
                               (N - k) * std::log1p(-static_cast<long double>(p)) -
                               std::log(static_cast<long double>(n));
  return static_cast<double>(std::exp(log_term));
}

}  // namespace

Pmf total_progeny_pmf_dwass(const OffspringDist& offspring, std::size_t n_max) {
  require(n_max >= 1, "n_max must be >= 1");
  Pmf pmf;
  pmf.values.resize(n_max);
  if (offspring.is_binomial()) {
    for (std::size_t n = 1; n <= n_max; ++n)
      pmf.values[n - 1] = binomial_dwass_term(offspring.r(), offspring.p(), n);
  } else {
    // power = pmf^{*n}, truncated to degrees < n_max.
    const auto law = offspring.pmf();
    std::vector<double> power(law.begin(), law.begin() + std::min(law.size(), n_max));
    power.resize(n_max, 0.0);
    for (std::size_t n = 1; n <= n_max; ++n) {
      if (n > 1) power = convolve(power, law, n_max);
      pmf.values[n - 1] = power[n - 1] / static_cast<double>(n);
    }
  }
  pmf.infinite_mass = 1.0 - offspring.extinction_probability();
  pmf.finalize();
  return pmf;
}

Pmf total_progeny_pmf_dwass_exact(int r, const Rational& p, std::size_t n_max) {
  require(r >= 1 && n_max >= 1, "need r >= 1 and n_max >= 1");
  require(p >= 0 && p <= 1, "probability must lie in [0, 1]");
  std::vector<Rational> values;
  values.reserve(n_max);
  const Rational q = 1 - p;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const std::size_t N = static_cast<std::size_t>(r) * n, k = n - 1;
    BigInt c = 1;
    for (std::size_t i = 1; i <= k; ++i) c = c * (N - k + i) / i;
    values.push_back(Rational(c) * rational_pow(p, static_cast<unsigned>(k)) *
                     rational_pow(q, static_cast<unsigned>(N - k)) / Rational(n));
  }
  auto pmf = pmf_from_exact(std::move(values));
  pmf.infinite_mass = 1.0 - OffspringDist::binomial(r, static_cast<double>(p)).extinction_probability();
  return pmf;
}

Pmf total_progeny_pmf_recursive(const OffspringDist& offspring, std::size_t n_max) {
  require(n_max >= 1, "n_max must be >= 1");
  const auto law = offspring.pmf();
  const std::size_t K = law.size() - 1;
  // powers[k][m] = [s^m] Q(s)^k
  std::vector<std::vector<double>> powers(K + 1, std::vector<double>(n_max + 1, 0.0));
  powers[0][0] = 1.0;
  std::vector<double> q(n_max + 1, 0.0);
  for (std::size_t n = 1; n <= n_max; ++n) {
    double qn = 0.0;
    for (std::size_t k = 0; k <= K; ++k) qn += law[k] * powers[k][n - 1];
    q[n] = qn;
    if (K >= 1) powers[1][n] = qn;
    for (std::size_t k = 2; k <= K; ++k) {
      double acc = 0.0;
      for (std::size_t j = 1; j <= n; ++j) acc += q[j] * powers[k - 1][n - j];
      powers[k][n] = acc;
    }
  }
  Pmf pmf;
  pmf.values.assign(q.begin() + 1, q.end());
  pmf.infinite_mass = 1.0 - offspring.extinction_probability();
  pmf.finalize();
  return pmf;
}

OffspringDist dual_offspring(const OffspringDist& offspring) {
  require(offspring.mean() > 1.0, "dual law needs a strictly supercritical offspring law");
  const double q = offspring.extinction_probability();
  require(q > 0.0 && q < 1.0, "dual law needs extinction probability in (0, 1)");
  const auto law = offspring.pmf();
  std::vector<double> dual(law.size());
  for (std::size_t k = 0; k < law.size(); ++k)
    dual[k] = std::pow(q, static_cast<double>(k) - 1.0) * law[k];
  // Sums to pgf(q)/q = 1 up to rounding of q; renormalize the last ulp.
  const double total = std::accumulate(dual.begin(), dual.end(), 0.0);
  for (auto& x : dual) x /= total;
  return OffspringDist::generic(std::move(dual));
}

Pmf ray_tree_cluster_pmf(double p, std::size_t n_max) {
  require(p > 0.0 && p < 1.0, "ray+tree pmf needs 0 < p < 1");
  require(n_max >= 1, "n_max must be >= 1");
  const auto tree = OffspringDist::binomial(2, p);
  std::vector<double> y(n_max + 1, 0.0);
  double infinite = 0.0;
  if (tree.mean() > 1.0) {
    const double q = tree.extinction_probability();
    const auto finite = total_progeny_pmf_dwass(dual_offspring(tree), n_max);
    for (std::size_t n = 1; n <= n_max; ++n) y[n] = q * finite.at(n);
    infinite = 1.0 - q;
  } else {
    const auto finite = total_progeny_pmf_dwass(tree, n_max);
    for (std::size_t n = 1; n <= n_max; ++n) y[n] = finite.at(n);
  }
  std::vector<double> x(n_max, 0.0);  // x[k] = P(X = k)
  double pk = 1.0;
  for (std::size_t k = 0; k < n_max; ++k) {
    x[k] = pk * (1.0 - p);
    pk *= p;
  }
  Pmf pmf;
  pmf.values.assign(n_max, 0.0);
  for (std::size_t n = 1; n <= n_max; ++n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += x[k] * y[n - k];
    pmf.values[n - 1] = acc;
  }
  pmf.infinite_mass = infinite;
  pmf.finalize();
  return pmf;
}

Pmf random_index_sum_pmf(const Pmf& index, const Pmf& summand, std::size_t n_max) {
  require(n_max >= 1, "n_max must be >= 1");
  std::vector<double> s(n_max + 1, 0.0);
  for (std::size_t n = 1; n <= std::min(n_max, summand.n_max()); ++n) s[n] = summand.at(n);
  std::vector<double> power = s;  // law of S_1 + ... + S_k, degrees <= n_max
  std::vector<double> z(n_max + 1, 0.0);
  const std::size_t kmax = std::min(index.n_max(), n_max);
  for (std::size_t k = 1; k <= kmax; ++k) {
    if (k > 1) power = convolve(power, s, n_max + 1);
    const double w = index.at(k);
    if (w == 0.0) continue;
    for (std::size_t n = k; n <= n_max; ++n) z[n] += w * power[n];
  }
  Pmf pmf;
  pmf.values.assign(z.begin() + 1, z.end());
  pmf.finalize();
  return pmf;
}

// ---------------------------------------------------------------------------
// Tail rates

double binomial_tail_rate(int r, double p) {
  require(r >= 2 && p > 0.0 && p < 1.0, "tail rate needs r >= 2 and 0 < p < 1");
  const double rr = r;
  const double log_base = std::log(p) + (rr - 1) * std::log1p(-p) + rr * std::log(rr) -
                          (rr - 1) * std::log(rr - 1);
  return std::max(0.0, -log_base);
}

double tail_rate(const OffspringDist& offspring) {
  const double m = offspring.mean();
  if (std::fabs(m - 1.0) < 1e-12) return 0.0;
  if (offspring.is_binomial() && offspring.r() >= 2 && offspring.p() > 0.0 && offspring.p() < 1.0)
    return binomial_tail_rate(offspring.r(), offspring.p());
  if (m > 1.0) return tail_rate(dual_offspring(offspring));
  // Regress -log P(S = n) on (1, n, log n) over the tail of the exact pmf.
  constexpr std::size_t kMax = 400;
  const auto pmf = total_progeny_pmf_dwass(offspring, kMax);
  std::vector<std::array<double, 3>> rows;
  std::vector<double> ys;
  for (std::size_t n = kMax / 2; n <= kMax; ++n) {
    const double v = pmf.at(n);
    if (v <= 1e-290) continue;
    rows.push_back({1.0, static_cast<double>(n), std::log(static_cast<double>(n))});
    ys.push_back(-std::log(v));
  }
  if (rows.size() < 3) {
    // Deep subcritical: fall back to the early part of the pmf.
    rows.clear();
    ys.clear();
    for (std::size_t n = 2; n <= kMax; ++n) {
      const double v = pmf.at(n);
      if (v <= 1e-290) continue;
      rows.push_back({1.0, static_cast<double>(n), std::log(static_cast<double>(n))});
      ys.push_back(-std::log(v));
    }
  }
  require(rows.size() >= 3, "offspring law has too little tail mass for rate extraction");
  // Normal equations, 3x3.
  double a[3][4] = {};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) a[r][c] += rows[i][r] * rows[i][c];
      a[r][3] += rows[i][r] * ys[i];
    }
  }
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    for (int k = 0; k < 4; ++k) std::swap(a[c][k], a[piv][k]);
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (int k = c; k < 4; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return std::max(0.0, a[1][3] / a[1][1]);
}

}  // namespace perclab
