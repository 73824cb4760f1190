#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "perclab/analysis.hpp"
#include "perclab/error.hpp"

using namespace perclab;

namespace {

TailCurve synthetic(double (*f)(double), std::size_t n_max = 300) {
  std::vector<std::size_t> ns;
  std::vector<double> vs;
  for (std::size_t n = 1; n <= n_max; ++n) {
    ns.push_back(n);
    vs.push_back(f(static_cast<double>(n)));
  }
  return tail_from_values(ns, vs, "synthetic");
}

double exp_tail(double n) { return 0.7 * std::exp(-0.5 * n); }
double power_tail(double n) { return 2.0 * std::pow(n, -0.5); }
double stretched_tail(double n) { return std::exp(-2.0 * std::pow(n, 2.0 / 3.0)); }

SizeHistogram histogram(std::map<std::size_t, std::uint64_t> counts, std::uint64_t censored) {
  SizeHistogram h;
  for (const auto& [n, c] : counts)
    for (std::uint64_t i = 0; i < c; ++i) h.add({n, ClusterStatus::finite});
  for (std::uint64_t i = 0; i < censored; ++i) h.add({11, ClusterStatus::censored_cap});
  return h;
}

}  // namespace

TEST_CASE("synthetic tails are recovered") {
  const auto e = fit_exponential(synthetic(exp_tail));
  CHECK(e.slope == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(e.intercept == doctest::Approx(-std::log(0.7)).epsilon(1e-6));
  CHECK(e.r2 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(e.n_lo == 10);

  const auto p = fit_power(synthetic(power_tail));
  CHECK(p.slope == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(p.intercept == doctest::Approx(-std::log(2.0)).epsilon(1e-6));

  const auto s = fit_stretched(synthetic(stretched_tail), 2.0 / 3.0);
  CHECK(s.slope == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(std::abs(s.intercept) < 1e-6);

  const auto free = fit_stretched_free(synthetic(stretched_tail));
  CHECK(std::abs(free.theta - 2.0 / 3.0) < 1e-3);
  CHECK(free.slope == doctest::Approx(2.0).epsilon(1e-2));
}

TEST_CASE("default window drops the top percent") {
  const auto fit = fit_exponential(synthetic(exp_tail, 300));
  // 291 positive points at n >= 10; index floor(0.99 * 290) = 287.
  CHECK(fit.n_hi == 297);
  CHECK(fit.points == 288);
  const auto narrow = fit_exponential(synthetic(exp_tail), parse_window("20:40"));
  CHECK(narrow.points == 21);
  CHECK(narrow.n_lo == 20);
  CHECK(narrow.n_hi == 40);
}

TEST_CASE("weighted fit matches the normal equations") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> noise(0.0, 1.0);
  TailCurve c;
  for (std::size_t n = 1; n <= 80; ++n) {
    const double truth = std::exp(-0.1 * static_cast<double>(n));
    const double se = 0.05 * truth * (1.0 + static_cast<double>(n % 7));
    c.points.push_back({n, truth * std::exp(0.02 * noise(rng)), se});
  }
  const auto fit = fit_exponential(c, FitWindow{5, 70});
  // Cramer's rule on [sw swx; swx swxx] [a b] = [swy swxy].
  double sw = 0, swx = 0, swxx = 0, swy = 0, swxy = 0;
  for (const auto& pt : c.points) {
    if (pt.n < 5 || pt.n > 70) continue;
    const double w = (pt.estimate / pt.se) * (pt.estimate / pt.se);
    const double x = static_cast<double>(pt.n), y = -std::log(pt.estimate);
    sw += w, swx += w * x, swxx += w * x * x, swy += w * y, swxy += w * x * y;
  }
  const double det = sw * swxx - swx * swx;
  const double a = (swy * swxx - swx * swxy) / det;
  const double b = (sw * swxy - swx * swy) / det;
  CHECK(fit.slope == doctest::Approx(b).epsilon(1e-9));
  CHECK(fit.intercept == doctest::Approx(a).epsilon(1e-9));
  CHECK(fit.slope_se > 0.0);
  CHECK(fit.r2 < 1.0);
}

TEST_CASE("fits are equivariant under scaling the tail") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const double c = std::exp(std::uniform_real_distribution<double>(-3, 3)(rng));
    TailCurve a, b;
    for (std::size_t n = 1; n <= 60; ++n) {
      const double v = std::exp(-0.2 * static_cast<double>(n) + 0.05 * std::sin(static_cast<double>(n)));
      a.points.push_back({n, v, 0.1 * v});
      b.points.push_back({n, c * v, 0.1 * c * v});
    }
    for (const auto& spec : {ModelSpec::exponential(), ModelSpec::power(), ModelSpec::stretched(0.5)}) {
      const auto fa = fit_model(a, spec), fb = fit_model(b, spec);
      CHECK(fb.slope == doctest::Approx(fa.slope).epsilon(1e-9));
      CHECK(fb.intercept == doctest::Approx(fa.intercept - std::log(c)).epsilon(1e-9));
      CHECK(fb.r2 == doctest::Approx(fa.r2).epsilon(1e-9));
    }
  }
}

TEST_CASE("tail from a histogram") {
  const auto h = histogram({{1, 50}, {2, 30}}, 20);
  const auto tail = tail_from_histogram(h, "h");
  REQUIRE(tail.points.size() == 3);
  CHECK(tail.points[0].estimate == doctest::Approx(0.80));
  CHECK(tail.points[1].estimate == doctest::Approx(0.30));
  CHECK(tail.points[2].estimate == 0.0);
  CHECK(tail.points[1].se == doctest::Approx(std::sqrt(0.3 * 0.7 / 100)));
  CHECK(tail.n_samples == 100);
  CHECK(tail.censored_cap == 20);
  std::ostringstream csv;
  write_tail_csv(csv, tail);
  CHECK(csv.str().rfind("n,tail,se\n", 0) == 0);
}

TEST_CASE("tail from a pmf") {
  Pmf pmf;
  pmf.values = {0.5, 0.25, 0.125};
  pmf.infinite_mass = 0.0625;
  pmf.finalize();
  const auto tail = tail_from_pmf(pmf);
  REQUIRE(tail.points.size() >= 3);
  // Finite mass beyond n_max is 0.0625 of the 0.125 residual.
  CHECK(tail.points[0].estimate == doctest::Approx(0.9375));
  CHECK(tail.points[1].estimate == doctest::Approx(0.4375));
  CHECK(tail.points[2].estimate == doctest::Approx(0.1875));
  for (const auto& p : tail.points) CHECK(p.se == 0.0);
}

TEST_CASE("model comparison") {
  const auto models = std::vector<ModelSpec>{ModelSpec::exponential(), ModelSpec::power()};
  const auto e = model_compare(synthetic(exp_tail), models);
  CHECK(e.ranked.front().model == Model::exponential);
  CHECK(e.delta_r2 >= 0.01);
  CHECK_FALSE(e.inconclusive);
  const auto p = model_compare(synthetic(power_tail), models);
  CHECK(p.ranked.front().model == Model::power);
  CHECK_FALSE(p.inconclusive);
  const auto same = model_compare(synthetic(exp_tail), {ModelSpec::exponential(), ModelSpec::exponential()});
  CHECK(same.delta_r2 == doctest::Approx(0.0));
  CHECK(same.inconclusive);
  CHECK_FALSE(same.verdict.empty());
  for (const auto& f : e.ranked) CHECK(f.n_hi == e.ranked.front().n_hi);
}

TEST_CASE("two-sample KS") {
  const auto a = histogram({{1, 60}, {2, 20}, {3, 20}}, 0);
  const auto b = histogram({{1, 40}, {2, 40}, {3, 10}}, 10);
  // CDFs: a 0.6 0.8 1.0, b 0.4 0.8 0.9.
  const auto r = ks_two_sample(a, b, 3, 0.05);
  CHECK(r.statistic == doctest::Approx(0.2));
  CHECK(r.critical == doctest::Approx(1.3581 * std::sqrt(2.0 / 100.0)).epsilon(1e-4));
  CHECK(r.reject);
  const auto strict = ks_two_sample(a, b, 3, 0.01);
  CHECK(strict.critical == doctest::Approx(1.6276 * std::sqrt(2.0 / 100.0)).epsilon(1e-4));
  CHECK_FALSE(strict.reject);
  const auto self = ks_two_sample(a, a, 3);
  CHECK(self.statistic == 0.0);
  CHECK_FALSE(self.reject);
  const auto far = ks_two_sample(histogram({{1, 1000}}, 0), histogram({{2, 1000}}, 0), 2);
  CHECK(far.statistic == doctest::Approx(1.0));
  CHECK(far.reject);
  CHECK_THROWS_AS(ks_two_sample(a, SizeHistogram{}, 3), Error);
}

TEST_CASE("parsing") {
  CHECK(parse_model("exp").model == Model::exponential);
  CHECK(parse_model("power").model == Model::power);
  CHECK(parse_model("stretched:1/2").theta == doctest::Approx(0.5));
  CHECK(parse_model("stretched").free_theta);
  CHECK_THROWS_AS(parse_model("cubic"), Error);
  CHECK_THROWS_AS(parse_model("stretched:2"), Error);
  CHECK(parse_window("10:100").hi == 100);
  CHECK_THROWS_AS(parse_window("10"), Error);
  CHECK_THROWS_AS(parse_window("50:10"), Error);
  CHECK_THROWS_AS(parse_window("0:10"), Error);
  TailCurve tiny;
  for (std::size_t n = 10; n < 13; ++n) tiny.points.push_back({n, 0.5, 0.1});
  CHECK_THROWS_AS(fit_exponential(tiny), Error);
}
