#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "perclab/branching.hpp"
#include "perclab/error.hpp"

using namespace perclab;

namespace {

// q_n = sum_k p_k * (k-fold convolution of q)(n - 1): progeny law by
// splitting on the root's offspring count.
std::vector<double> progeny_by_root_split(const std::vector<double>& pk, std::size_t n_max) {
  std::vector<double> q(n_max + 1, 0.0);
  for (std::size_t n = 1; n <= n_max; ++n) {
    // conv[m] = P(sum of k subtree sizes = m), built for k = 0, 1, ...
    std::vector<double> conv(n, 0.0);
    conv[0] = 1.0;
    double total = pk[0] * (n == 1 ? 1.0 : 0.0);
    for (std::size_t k = 1; k < pk.size(); ++k) {
      std::vector<double> next(n, 0.0);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 1; a + b < n; ++b) next[a + b] += conv[a] * q[b];
      conv = std::move(next);
      total += pk[k] * conv[n - 1];
    }
    q[n] = total;
  }
  return q;
}

double binom(int n, int k) { return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)); }

std::vector<double> random_law(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(2, 5);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> p(static_cast<std::size_t>(len(rng)));
  double s = 0;
  for (auto& x : p) s += (x = u(rng));
  for (auto& x : p) x /= s;
  double fix = 1.0;
  for (std::size_t i = 1; i < p.size(); ++i) fix -= p[i];
  p[0] = fix;
  return p;
}

}  // namespace

TEST_CASE("small progeny values for Binomial(2, 0.3)") {
  const auto law = OffspringDist::binomial(2, 0.3);
  const auto pmf = total_progeny_pmf_dwass(law, 5);
  const double p0 = 0.49, p1 = 0.42, p2 = 0.09;
  CHECK(pmf.at(1) == doctest::Approx(0.49).epsilon(1e-15));
  CHECK(pmf.at(2) == doctest::Approx(p1 * p0).epsilon(1e-14));
  CHECK(pmf.at(2) == doctest::Approx(0.2058).epsilon(1e-14));
  CHECK(pmf.at(3) == doctest::Approx(p2 * p0 * p0 + p1 * p1 * p0).epsilon(1e-14));
  CHECK(pmf.at(3) == doctest::Approx(0.108045).epsilon(1e-13));
}

TEST_CASE("Binomial closed form against Dwass") {
  for (double p : {0.2, 0.3, 0.5}) {
    const auto pmf = total_progeny_pmf_dwass(OffspringDist::binomial(2, p), 400);
    for (int n : {1, 7, 50, 299, 301, 400}) {
      const double closed = binom(2 * n, n - 1) / n * std::pow(p, n - 1) * std::pow(1 - p, n + 1);
      CHECK(pmf.at(n) == doctest::Approx(closed).epsilon(1e-9));
    }
  }
}

TEST_CASE("exact Dwass matches the rational closed form") {
  const Rational p = parse_rational("3/10");
  const auto pmf = total_progeny_pmf_dwass_exact(2, p, 30);
  REQUIRE(pmf.flag == PmfFlag::exact);
  for (std::size_t n = 1; n <= 30; ++n) {
    BigInt c = 1;  // C(2n, n-1)
    for (std::size_t i = 0; i < n - 1; ++i) c = c * (2 * n - i) / (i + 1);
    const Rational closed = Rational(c) / n * rational_pow(p, n - 1) * rational_pow(1 - p, n + 1);
    CHECK(pmf.exact_values[n - 1] == closed);
  }
}

TEST_CASE("Dwass and recursive agree with the root-split oracle") {
  std::vector<OffspringDist> laws = {OffspringDist::binomial(2, 0.3), OffspringDist::binomial(3, 0.2),
                                     OffspringDist::binomial(2, 0.7), OffspringDist::generic({0.3, 0.2, 0.4, 0.1})};
  std::mt19937_64 rng(99);
  for (int i = 0; i < 20; ++i) laws.push_back(OffspringDist::generic(random_law(rng)));
  for (const auto& law : laws) {
    const std::vector<double> pk(law.pmf().begin(), law.pmf().end());
    const auto oracle = progeny_by_root_split(pk, 40);
    const auto dwass = total_progeny_pmf_dwass(law, 40);
    const auto rec = total_progeny_pmf_recursive(law, 40);
    for (std::size_t n = 1; n <= 40; ++n) {
      CHECK(std::abs(dwass.at(n) - oracle[n]) <= 1e-12);
      CHECK(std::abs(rec.at(n) - oracle[n]) <= 1e-12);
    }
  }
}

TEST_CASE("degenerate and trivial laws") {
  const auto dead = total_progeny_pmf_recursive(OffspringDist::generic({1.0}), 5);
  CHECK(dead.at(1) == 1.0);
  CHECK(dead.at(2) == 0.0);
  CHECK(total_progeny_pmf_dwass(OffspringDist::binomial(3, 0.2), 3).at(1) == doctest::Approx(0.512).epsilon(1e-15));
}

TEST_CASE("extinction probability and mass identity") {
  const auto law = OffspringDist::binomial(2, 0.7);
  const double q = 9.0 / 49.0;
  CHECK(law.extinction_probability() == doctest::Approx(q).epsilon(1e-12));
  CHECK(OffspringDist::binomial(2, 0.3).extinction_probability() == 1.0);
  CHECK(OffspringDist::binomial(2, 0.5).extinction_probability() == 1.0);
  const auto pmf = total_progeny_pmf_dwass(law, 500);
  CHECK(std::abs(neumaier_sum(pmf.values) - q) < 1e-6);
  CHECK(pmf.infinite_mass == doctest::Approx(1 - q).epsilon(1e-12));
  CHECK(pmf.n_max() == 500);
  // values + residual = 1
  CHECK(std::abs(neumaier_sum(pmf.values) + pmf.residual - 1.0) < 1e-12);
}

TEST_CASE("supercritical dual is Binomial(2, 1 - p)") {
  for (double p : {0.6, 0.7, 0.9}) {
    const auto law = OffspringDist::binomial(2, p);
    const auto dual = dual_offspring(law);
    const auto flip = OffspringDist::binomial(2, 1 - p);
    REQUIRE(dual.pmf().size() == 3);
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(dual.pmf()[k] - flip.pmf()[k]) < 1e-12);
    const double q = law.extinction_probability();
    const auto orig = total_progeny_pmf_dwass(law, 40);
    const auto dpmf = total_progeny_pmf_dwass(dual, 40);
    for (std::size_t n = 1; n <= 40; ++n) CHECK(std::abs(q * dpmf.at(n) - orig.at(n)) < 1e-12);
  }
  CHECK_THROWS_AS(dual_offspring(OffspringDist::binomial(2, 0.4)), Error);
}

TEST_CASE("ray plus tree law") {
  const auto pmf = ray_tree_cluster_pmf(0.3, 400);
  CHECK(pmf.at(1) == doctest::Approx(0.343).epsilon(1e-14));
  CHECK(pmf.at(2) == doctest::Approx(0.3 * 0.7 * 0.49 + 0.7 * 0.2058).epsilon(1e-13));
  CHECK(pmf.at(2) == doctest::Approx(0.24696).epsilon(1e-13));
  CHECK(pmf.finite_remainder() < 1e-12);
  CHECK(std::abs(pmf.residual) < 1e-12);

  const auto sup = ray_tree_cluster_pmf(0.7, 600);
  CHECK(sup.infinite_mass == doctest::Approx(1 - 9.0 / 49.0).epsilon(1e-12));
  CHECK(std::abs(neumaier_sum(sup.values) - 9.0 / 49.0) < 1e-9);
}

TEST_CASE("random index sums") {
  const auto s = total_progeny_pmf_dwass(OffspringDist::binomial(2, 0.3), 60);
  Pmf one;
  one.values = {1.0};
  one.finalize();
  const auto z1 = random_index_sum_pmf(one, s, 60);
  for (std::size_t n = 1; n <= 60; ++n) CHECK(std::abs(z1.at(n) - s.at(n)) < 1e-15);

  Pmf two;
  two.values = {0.0, 1.0};
  two.finalize();
  const auto z2 = random_index_sum_pmf(two, s, 60);
  CHECK(z2.at(1) == 0.0);
  CHECK(z2.at(2) == doctest::Approx(0.2401).epsilon(1e-14));
  CHECK(z2.at(3) == doctest::Approx(2 * 0.49 * 0.2058).epsilon(1e-14));

  // N uniform on {1, 2}: mixture of the two laws above.
  Pmf mix;
  mix.values = {0.5, 0.5};
  mix.finalize();
  const auto zm = random_index_sum_pmf(mix, s, 60);
  for (std::size_t n = 1; n <= 60; ++n) CHECK(std::abs(zm.at(n) - 0.5 * (z1.at(n) + z2.at(n))) < 1e-15);
}

TEST_CASE("tail rates") {
  CHECK(binomial_tail_rate(2, 0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(tail_rate(OffspringDist::binomial(2, 0.5)) == 0.0);
  CHECK(binomial_tail_rate(2, 0.3) == doctest::Approx(-std::log(4 * 0.3 * 0.7)).epsilon(1e-14));
  CHECK(binomial_tail_rate(2, 0.3) == doctest::Approx(0.174353).epsilon(1e-6));
  for (double p : {0.1, 0.3, 0.45}) CHECK(binomial_tail_rate(2, p) == doctest::Approx(binomial_tail_rate(2, 1 - p)));
  // Regression oracle: slope of -log P(S = n) + 1.5 log n over n in [100, 400].
  const auto pmf = total_progeny_pmf_dwass(OffspringDist::binomial(2, 0.3), 400);
  const double a = -std::log(pmf.at(100)) - 1.5 * std::log(100.0);
  const double b = -std::log(pmf.at(400)) - 1.5 * std::log(400.0);
  CHECK((b - a) / 300.0 == doctest::Approx(0.174353).epsilon(1e-3));
  CHECK(tail_rate(OffspringDist::binomial(2, 0.3)) == doctest::Approx(0.174353).epsilon(1e-5));
  CHECK(tail_rate(OffspringDist::generic({0.5, 0.25, 0.25})) > 0.0);
}

TEST_CASE("critical progeny approaches c n^{-3/2}") {
  const double c = 1.0 / std::sqrt(2 * M_PI * 0.5);
  const auto pmf = total_progeny_pmf_dwass(OffspringDist::binomial(2, 0.5), 4000);
  double prev_err = 1.0;
  for (int n : {250, 1000, 4000}) {
    const double err = std::abs(std::pow(n, 1.5) * pmf.at(n) / c - 1.0);
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 0.01);
}

TEST_CASE("offspring parsing and validation") {
  const auto b = parse_offspring("binomial:3,1/4");
  CHECK(b.is_binomial());
  CHECK(b.r() == 3);
  CHECK(b.p() == 0.25);
  CHECK(b.mean() == doctest::Approx(0.75));
  CHECK(b.variance() == doctest::Approx(3 * 0.25 * 0.75));
  const auto g = parse_offspring("generic:0.5,0,0.5");
  CHECK(g.mean() == doctest::Approx(1.0));
  CHECK(g.pgf(0.5) == doctest::Approx(0.5 + 0.125));
  CHECK_THROWS_AS(parse_offspring("generic:0.5,0.6"), Error);
  CHECK_THROWS_AS(parse_offspring("poisson:1"), Error);
  CHECK_THROWS_AS(OffspringDist::binomial(2, 1.5), Error);
}

TEST_CASE("offspring draws follow the law") {
  const auto law = OffspringDist::generic({0.2, 0.5, 0.3});
  CounterRng rng(SampleStream(5, 0));
  std::vector<int> counts(3, 0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) ++counts.at(static_cast<std::size_t>(law.draw(rng)));
  for (std::size_t k = 0; k < 3; ++k) {
    const double pk = law.pmf()[k];
    CHECK(std::abs(counts[k] / double(n) - pk) < 4 * std::sqrt(pk * (1 - pk) / n));
  }
}

TEST_CASE("pmf CSV round trip") {
  const auto pmf = total_progeny_pmf_dwass(OffspringDist::binomial(2, 0.3), 20);
  std::stringstream ss;
  write_pmf_csv(ss, pmf);
  const auto back = read_pmf_csv(ss);
  REQUIRE(back.n_max() == 20);
  for (std::size_t n = 1; n <= 20; ++n) CHECK(back.at(n) == pmf.at(n));
}
