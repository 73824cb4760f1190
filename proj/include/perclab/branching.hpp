#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "perclab/pmf.hpp"
#include "perclab/rng.hpp"

namespace perclab {

/// Offspring law of a Galton-Watson process: Binomial(r, p) or a finite pmf.
class OffspringDist {
 public:
  static OffspringDist binomial(int r, double p);
  static OffspringDist generic(std::vector<double> pmf);

  bool is_binomial() const noexcept { return binomial_; }
  int r() const noexcept { return r_; }
  double p() const noexcept { return p_; }

  /// p_0..p_K; for Binomial(r, p) this is the binomial pmf.
  std::span<const double> pmf() const noexcept { return pmf_; }
  std::size_t max_offspring() const noexcept { return pmf_.size() - 1; }

  double mean() const noexcept;
  double variance() const noexcept;
  double pgf(double s) const noexcept;
  double pgf_derivative(double s) const noexcept;

  /// Smallest root of pgf(s) = s in [0, 1]; exactly 1 when mean <= 1.
  double extinction_probability() const;

  /// Offspring count drawn by inversion (binomial: r Bernoulli trials).
  int draw(CounterRng& rng) const noexcept;

  std::string describe() const;

 private:
  OffspringDist() = default;

  bool binomial_ = false;
  int r_ = 0;
  double p_ = 0.0;
  std::vector<double> pmf_;
};

/// OffspringDist from "binomial:R,P" or "generic:P0,P1,...".
OffspringDist parse_offspring(const std::string& text);

/// Total progeny law (root included) via the hitting-time identity
/// P(S = n) = (1/n) P(X_1 + ... + X_n = n - 1). Supercritical laws give the
/// finite-extinction part, with infinite_mass = 1 - q.
Pmf total_progeny_pmf_dwass(const OffspringDist& offspring, std::size_t n_max);

/// Same law, exact, for Binomial(r, p) with rational p.
Pmf total_progeny_pmf_dwass_exact(int r, const Rational& p, std::size_t n_max);

/// Same law via the power series fixed point Q(s) = s * pgf(Q(s)); shares no
/// code with the Dwass route.
Pmf total_progeny_pmf_recursive(const OffspringDist& offspring, std::size_t n_max);

/// Conjugate law of a supercritical process: p~_k = q^(k-1) p_k.
OffspringDist dual_offspring(const OffspringDist& offspring);

/// Cluster of the tree root when a one-sided ray is attached to the root of
/// the binary tree: |C| = X + Y, X ~ Geometric(p) on {0,1,..}, Y the
/// Binomial(2, p) total progeny. For p > 1/2, Y's finite part comes from the
/// dual law scaled by q, and infinite_mass = 1 - q.
Pmf ray_tree_cluster_pmf(double p, std::size_t n_max);

/// Law of Z = S_1 + ... + S_N, N independent of the i.i.d. S_j.
Pmf random_index_sum_pmf(const Pmf& index, const Pmf& summand, std::size_t n_max);

/// lim -(1/n) log P(S = n). Zero at criticality.
double tail_rate(const OffspringDist& offspring);

/// Closed form -log(p (1-p)^(r-1) r^r / (r-1)^(r-1)).
double binomial_tail_rate(int r, double p);

}  // namespace perclab
