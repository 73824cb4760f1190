#include "perclab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "perclab/error.hpp"

namespace perclab {

TailCurve tail_from_histogram(const SizeHistogram& h, std::string id) {
  TailCurve c;
  c.id = std::move(id);
  c.n_samples = h.n_samples;
  c.censored_frontier = h.censored_frontier;
  c.censored_cap = h.censored_cap;
  if (h.n_samples == 0) return c;
  const double total = static_cast<double>(h.n_samples);
  const std::size_t top = h.counts.empty() ? 1 : h.counts.rbegin()->first + 1;
  std::uint64_t at_least = h.finite_count();
  auto it = h.counts.begin();
  for (std::size_t n = 1; n <= top; ++n) {
    while (it != h.counts.end() && it->first < n) {
      at_least -= it->second;
      ++it;
    }
    const double est = static_cast<double>(at_least) / total;
    c.points.push_back({n, est, std::sqrt(est * (1.0 - est) / total)});
  }
  return c;
}

TailCurve tail_from_pmf(const Pmf& pmf, std::string id) {
  TailCurve c;
  c.id = std::move(id);
  const auto m = pmf.n_max();
  std::vector<double> tail(m + 1, 0.0);
  double acc = pmf.finite_remainder(), comp = 0.0;
  tail[m] = acc;
  for (std::size_t n = m; n >= 1; --n) {
    // Kahan-compensated suffix sum.
    const double y = pmf.at(n) - comp;
    const double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
    tail[n - 1] = acc;
  }
  for (std::size_t n = 1; n <= m; ++n) c.points.push_back({n, std::max(0.0, tail[n - 1]), 0.0});
  return c;
}

TailCurve tail_from_values(std::vector<std::size_t> ns, std::vector<double> values, std::string id) {
  require(ns.size() == values.size(), "curve abscissae and values differ in length");
  TailCurve c;
  c.id = std::move(id);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    require(i == 0 || ns[i] > ns[i - 1], "curve abscissae must increase");
    c.points.push_back({ns[i], values[i], 0.0});
  }
  return c;
}

void write_tail_csv(std::ostream& out, const TailCurve& curve) {
  out << "n,tail,se\n" << std::setprecision(17);
  for (const auto& p : curve.points) out << p.n << ',' << p.estimate << ',' << p.se << '\n';
}

std::string to_string(Model model) {
  switch (model) {
    case Model::exponential: return "exponential";
    case Model::stretched: return "stretched";
    case Model::power: return "power";
  }
  return "?";
}

ModelSpec parse_model(const std::string& text) {
  if (text == "exp" || text == "exponential") return ModelSpec::exponential();
  if (text == "power") return ModelSpec::power();
  if (text == "stretched") return ModelSpec::stretched_free();
  if (text.rfind("stretched:", 0) == 0) {
    const auto theta = parse_rational(text.substr(10));
    const auto value = static_cast<double>(theta);
    require(value > 0.0 && value < 1.0 + 1e-15, "stretched exponent must lie in (0, 1]");
    return ModelSpec::stretched(value);
  }
  fail(ErrorKind::invalid_argument, "unknown model '" + text + "' (expected exp, power or stretched:THETA)");
}

FitWindow parse_window(const std::string& text) {
  const auto colon = text.find(':');
  require(colon != std::string::npos, "window must look like LO:HI");
  FitWindow w;
  try {
    w.lo = std::stoul(text.substr(0, colon));
    w.hi = std::stoul(text.substr(colon + 1));
  } catch (const std::logic_error&) {
    fail(ErrorKind::invalid_argument, "window must look like LO:HI with integers");
  }
  require(w.lo >= 1 && w.hi >= w.lo, "window needs 1 <= LO <= HI");
  return w;
}

namespace {

struct Prepared {
  std::vector<double> n, y, w;
  std::size_t lo = 0, hi = 0, dropped_zero = 0;
};

Prepared prepare(const TailCurve& curve, const FitWindow& window) {
  std::size_t hi = window.hi;
  if (hi == 0) {
    std::vector<std::size_t> positive;
    for (const auto& p : curve.points)
      if (p.estimate > 0.0 && p.n >= window.lo) positive.push_back(p.n);
    require(!positive.empty(), "no positive tail estimates at n >= " + std::to_string(window.lo));
    hi = positive[static_cast<std::size_t>(std::floor(0.99 * static_cast<double>(positive.size() - 1)))];
  }
  Prepared out;
  out.lo = window.lo;
  out.hi = hi;
  bool any_zero_se = false;
  std::vector<const TailPoint*> kept;
  for (const auto& p : curve.points) {
    if (p.n < window.lo || p.n > hi) continue;
    if (!(p.estimate > 0.0)) {
      ++out.dropped_zero;
      continue;
    }
    kept.push_back(&p);
    if (!(p.se > 0.0)) any_zero_se = true;
  }
  require(kept.size() >= 5, "fit window [" + std::to_string(window.lo) + ", " + std::to_string(hi) +
                                 "] has " + std::to_string(kept.size()) + " positive points; need 5");
  for (const auto* p : kept) {
    out.n.push_back(static_cast<double>(p->n));
    out.y.push_back(-std::log(p->estimate));
    const double rel = any_zero_se ? 1.0 : p->estimate / p->se;
    out.w.push_back(rel * rel);
  }
  return out;
}

FitResult regress(const Prepared& d, const std::vector<double>& x, Model model, double theta,
                  const std::string& id) {
  const std::size_t m = x.size();
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sw += d.w[i];
    sx += d.w[i] * x[i];
    sy += d.w[i] * d.y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = x[i] - mx, dy = d.y[i] - my;
    sxx += d.w[i] * dx * dx;
    sxy += d.w[i] * dx * dy;
    syy += d.w[i] * dy * dy;
  }
  require(sxx > 0.0, "fit window has no spread in the regressor");
  FitResult f;
  f.model = model;
  f.curve_id = id;
  f.theta = theta;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0, ss_plain = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = d.y[i] - f.intercept - f.slope * x[i];
    ss_res += d.w[i] * r * r;
    ss_plain += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  const double sigma2 = m > 2 ? ss_res / static_cast<double>(m - 2) : 0.0;
  f.slope_se = std::sqrt(sigma2 / sxx);
  f.intercept_se = std::sqrt(sigma2 * (1.0 / sw + mx * mx / sxx));
  f.rms_residual = std::sqrt(ss_plain / static_cast<double>(m));
  f.n_lo = d.lo;
  f.n_hi = d.hi;
  f.points = m;
  f.dropped_zero = d.dropped_zero;
  return f;
}

std::vector<double> abscissa(const Prepared& d, Model model, double theta) {
  std::vector<double> x(d.n.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    switch (model) {
      case Model::exponential: x[i] = d.n[i]; break;
      case Model::stretched: x[i] = std::pow(d.n[i], theta); break;
      case Model::power: x[i] = std::log(d.n[i]); break;
    }
  }
  return x;
}

}  // namespace

FitResult fit_exponential(const TailCurve& curve, const FitWindow& window) {
  const auto d = prepare(curve, window);
  return regress(d, abscissa(d, Model::exponential, 1.0), Model::exponential, 1.0, curve.id);
}

FitResult fit_power(const TailCurve& curve, const FitWindow& window) {
  const auto d = prepare(curve, window);
  return regress(d, abscissa(d, Model::power, 0.0), Model::power, 0.0, curve.id);
}

FitResult fit_stretched(const TailCurve& curve, double theta, const FitWindow& window) {
  require(theta > 0.0 && theta <= 1.0, "stretched exponent must lie in (0, 1]");
  const auto d = prepare(curve, window);
  return regress(d, abscissa(d, Model::stretched, theta), Model::stretched, theta, curve.id);
}

FitResult fit_stretched_free(const TailCurve& curve, const FitWindow& window) {
  const auto d = prepare(curve, window);
  auto residual = [&](double theta) {
    const auto f = regress(d, abscissa(d, Model::stretched, theta), Model::stretched, theta, curve.id);
    return 1.0 - f.r2;
  };
  // Coarse scan, then golden-section refinement around the best grid point.
  double best = 1.0, best_val = residual(1.0);
  for (int i = 1; i < 100; ++i) {
    const double t = i / 100.0;
    const double v = residual(t);
    if (v < best_val) {
      best_val = v;
      best = t;
    }
  }
  double a = std::max(1e-3, best - 0.01), b = std::min(1.0, best + 0.01);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), e = a + g * (b - a);
  double fc = residual(c), fe = residual(e);
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    if (fc < fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - g * (b - a);
      fc = residual(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + g * (b - a);
      fe = residual(e);
    }
  }
  const double theta = (a + b) / 2.0;
  return regress(d, abscissa(d, Model::stretched, theta), Model::stretched, theta, curve.id);
}

FitResult fit_model(const TailCurve& curve, const ModelSpec& spec, const FitWindow& window) {
  switch (spec.model) {
    case Model::exponential: return fit_exponential(curve, window);
    case Model::power: return fit_power(curve, window);
    case Model::stretched:
      return spec.free_theta ? fit_stretched_free(curve, window) : fit_stretched(curve, spec.theta, window);
  }
  fail(ErrorKind::invalid_argument, "unknown model");
}

std::string FitResult::describe() const {
  std::ostringstream s;
  s << std::setprecision(6) << to_string(model);
  switch (model) {
    case Model::exponential: s << " rate=" << slope; break;
    case Model::stretched: s << " psi=" << slope << " theta=" << theta; break;
    case Model::power: s << " beta=" << slope; break;
  }
  s << " (+/- " << slope_se << ") R2=" << r2 << " window=[" << n_lo << "," << n_hi << "]";
  return s.str();
}

ModelComparison model_compare(const TailCurve& curve, const std::vector<ModelSpec>& candidates,
                              const FitWindow& window) {
  require(candidates.size() >= 2, "model comparison needs at least two candidates");
  ModelComparison out;
  // Resolve the shared window once so every model sees the same points.
  FitWindow shared = window;
  shared.hi = prepare(curve, window).hi;
  for (const auto& c : candidates) out.ranked.push_back(fit_model(curve, c, shared));
  std::stable_sort(out.ranked.begin(), out.ranked.end(),
                   [](const FitResult& a, const FitResult& b) { return a.r2 > b.r2; });
  out.delta_r2 = out.ranked[0].r2 - out.ranked[1].r2;
  out.inconclusive = out.delta_r2 < 0.01;
  std::ostringstream v;
  v << to_string(out.ranked[0].model) << " decay";
  if (out.inconclusive) v << " (inconclusive: R2 margin " << out.delta_r2 << " < 0.01)";
  out.verdict = v.str();
  return out;
}

void write_fits_csv_header(std::ostream& out) {
  out << "curve,model,slope,slope_se,intercept,intercept_se,theta,n_lo,n_hi,points,dropped_zero,r2\n";
}

void write_fit_csv_row(std::ostream& out, const FitResult& f) {
  out << std::setprecision(17) << f.curve_id << ',' << to_string(f.model) << ',' << f.slope << ','
      << f.slope_se << ',' << f.intercept << ',' << f.intercept_se << ',' << f.theta << ',' << f.n_lo
      << ',' << f.n_hi << ',' << f.points << ',' << f.dropped_zero << ',' << f.r2 << '\n';
}

KsResult ks_two_sample(const SizeHistogram& a, const SizeHistogram& b, std::size_t max_n, double alpha) {
  require(a.n_samples > 0 && b.n_samples > 0, "KS needs nonempty samples");
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  const double na = static_cast<double>(a.n_samples), nb = static_cast<double>(b.n_samples);
  std::uint64_t ca = 0, cb = 0;
  KsResult r;
  for (std::size_t n = 1; n <= max_n; ++n) {
    if (auto it = a.counts.find(n); it != a.counts.end()) ca += it->second;
    if (auto it = b.counts.find(n); it != b.counts.end()) cb += it->second;
    r.statistic = std::max(r.statistic, std::fabs(static_cast<double>(ca) / na - static_cast<double>(cb) / nb));
  }
  const double c_alpha = std::sqrt(-0.5 * std::log(alpha / 2.0));
  r.critical = c_alpha * std::sqrt((na + nb) / (na * nb));
  r.reject = r.statistic > r.critical;
  return r;
}

}  // namespace perclab
