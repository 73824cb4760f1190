#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "perclab/percolation.hpp"
#include "perclab/pmf.hpp"

namespace perclab {

struct TailPoint {
  std::size_t n = 0;
  double estimate = 0.0;  // P(n <= |C| < infinity)
  double se = 0.0;
};

struct TailCurve {
  std::string id;
  std::vector<TailPoint> points;  // increasing n
  std::uint64_t n_samples = 0;    // 0 for curves computed from a pmf
  std::uint64_t censored_frontier = 0;
  std::uint64_t censored_cap = 0;
};

/// (finite samples with size >= n) / n_samples with binomial standard
/// errors, for n = 1 .. max size + 1. Censored samples count as infinite.
TailCurve tail_from_histogram(const SizeHistogram& h, std::string id = {});

/// Suffix sums of the pmf plus its finite remainder; zero standard errors.
TailCurve tail_from_pmf(const Pmf& pmf, std::string id = {});

/// Curve from explicit values, e.g. synthetic input.
TailCurve tail_from_values(std::vector<std::size_t> ns, std::vector<double> values, std::string id = {});

void write_tail_csv(std::ostream& out, const TailCurve& curve);

enum class Model { exponential, stretched, power };

std::string to_string(Model model);

struct ModelSpec {
  Model model = Model::exponential;
  double theta = 1.0;  // stretched exponent; ignored otherwise
  bool free_theta = false;

  static ModelSpec exponential() { return {Model::exponential, 1.0, false}; }
  static ModelSpec power() { return {Model::power, 0.0, false}; }
  static ModelSpec stretched(double theta) { return {Model::stretched, theta, false}; }
  static ModelSpec stretched_free() { return {Model::stretched, 0.5, true}; }
};

/// "exp", "power", "stretched:THETA" or "stretched" (free exponent).
ModelSpec parse_model(const std::string& text);

struct FitWindow {
  std::size_t lo = 10;
  std::size_t hi = 0;  // 0: default upper end (drop the top 1% of points)
};

/// Parses "LO:HI".
FitWindow parse_window(const std::string& text);

/// -log P = intercept + slope * x(n) with x(n) = n, n^theta or log n.
/// slope is the rate gamma, the coefficient psi, or the exponent beta.
struct FitResult {
  Model model = Model::exponential;
  std::string curve_id;
  double slope = 0.0;
  double slope_se = 0.0;
  double intercept = 0.0;
  double intercept_se = 0.0;
  double theta = 1.0;
  std::size_t n_lo = 0, n_hi = 0;
  std::size_t points = 0;
  std::size_t dropped_zero = 0;  // points in the window with zero estimate
  double r2 = 0.0;               // weighted, on the common response -log P
  double rms_residual = 0.0;

  std::string describe() const;
};

/// Weighted least squares on the points of the window with positive
/// estimates; weights (P/SE)^2, or uniform if some SE is zero. Throws if
/// fewer than 5 points remain.
FitResult fit_exponential(const TailCurve& curve, const FitWindow& window = {});
FitResult fit_power(const TailCurve& curve, const FitWindow& window = {});
FitResult fit_stretched(const TailCurve& curve, double theta, const FitWindow& window = {});
/// Exponent chosen by maximizing R^2 over theta in (0, 1].
FitResult fit_stretched_free(const TailCurve& curve, const FitWindow& window = {});
FitResult fit_model(const TailCurve& curve, const ModelSpec& spec, const FitWindow& window = {});

struct ModelComparison {
  std::vector<FitResult> ranked;  // best R^2 first
  double delta_r2 = 0.0;          // best minus runner-up
  bool inconclusive = false;      // delta_r2 < 0.01
  std::string verdict;
};

ModelComparison model_compare(const TailCurve& curve, const std::vector<ModelSpec>& candidates,
                              const FitWindow& window = {});

void write_fits_csv_header(std::ostream& out);
void write_fit_csv_row(std::ostream& out, const FitResult& fit);

struct KsResult {
  double statistic = 0.0;
  double critical = 0.0;  // at level alpha
  bool reject = false;
};

/// Two-sample Kolmogorov-Smirnov on the cluster-size distributions restricted
/// to sizes <= max_n. Censored samples count as larger than every size.
KsResult ks_two_sample(const SizeHistogram& a, const SizeHistogram& b, std::size_t max_n, double alpha = 0.01);

}  // namespace perclab
