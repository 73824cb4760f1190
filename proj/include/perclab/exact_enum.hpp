#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "perclab/graph.hpp"
#include "perclab/pmf.hpp"
#include "perclab/polynomial.hpp"

namespace perclab {

struct EnumOptions {
  std::size_t max_sets = 2'000'000;   // combinatorial-explosion cap
  std::size_t max_internal_edges = 24;  // subset enumeration cap
};

/// Visits every connected vertex set that contains `root`, has at most
/// `max_size` vertices, and uses only `allowed` vertices, exactly once
/// (Redelmeier's scheme). Returns the number of sets visited.
std::size_t for_each_connected_set(const Graph& g, std::uint32_t root, std::size_t max_size,
                                   const std::function<bool(std::uint32_t)>& allowed,
                                   const std::function<void(std::span<const std::uint32_t>)>& visit,
                                   const EnumOptions& opts = {});

/// Connected vertex set containing the origin, with its edge sets
/// (explicit-graph edge ids).
struct Animal {
  std::vector<std::uint32_t> vertices;  // sorted
  std::vector<std::uint32_t> internal_edges;
  std::vector<std::uint32_t> boundary_edges;
};

Animal make_animal(const Graph& g, std::span<const std::uint32_t> vertices);

std::vector<Animal> enumerate_animals(const Graph& g, std::size_t n_max, const EnumOptions& opts = {});

/// counts[k] = number of k-edge subsets of E(A) whose open subgraph
/// connects all of A.
std::vector<std::uint64_t> connected_spanning_counts(const Graph& g, const Animal& animal,
                                                     const EnumOptions& opts = {});

/// Sum over connecting subsets E' of p^|E'| (1-p)^(|E(A)| - |E'|).
Polynomial connectedness_polynomial(const Graph& g, const Animal& animal, const EnumOptions& opts = {});

/// pi_n(p) for n <= n_max as exact sums of count * p^k (1-p)^j.
class ClusterSizePolynomials {
 public:
  using Terms = std::map<std::pair<std::size_t, std::size_t>, std::uint64_t>;  // (k, j) -> count

  ClusterSizePolynomials(std::vector<Terms> by_size, std::vector<std::size_t> animals)
      : by_size_(std::move(by_size)), animals_(std::move(animals)) {}

  std::size_t n_max() const noexcept { return by_size_.size(); }
  const Terms& terms(std::size_t n) const { return by_size_.at(n - 1); }
  std::size_t animal_count(std::size_t n) const { return animals_.at(n - 1); }

  Polynomial polynomial(std::size_t n) const;
  Rational evaluate(std::size_t n, const Rational& p) const;

 private:
  std::vector<Terms> by_size_;
  std::vector<std::size_t> animals_;
};

/// Errors with ErrorKind::frontier if some animal of size <= n_max touches
/// the truncation frontier.
ClusterSizePolynomials cluster_size_polynomials(const Graph& g, std::size_t n_max,
                                                const EnumOptions& opts = {});

Pmf exact_cluster_pmf(const Graph& g, const Rational& p, std::size_t n_max, const EnumOptions& opts = {});
Pmf exact_cluster_pmf(const Graph& g, double p, std::size_t n_max, const EnumOptions& opts = {});

/// a_n = -(1/n) log pi_n; empty where pi_n = 0.
std::vector<std::optional<double>> decay_rate_probe(const Pmf& pmf);

struct SupermultiplicativityCheck {
  std::size_t m = 0, n = 0;
  double lhs = 0.0;  // pi_{m+n}
  double rhs = 0.0;  // pi_m pi_n beta^((m+n)^(3/4) log2(m+n))
  bool holds = true;
};

/// Probes pi_{m+n} >= pi_m pi_n beta^((m+n)^{3/4} log2(m+n)) with
/// beta = p (1-p)^(2d) for all m, n >= 1 with m + n <= n_max. Violations are
/// reported in the returned list, not thrown.
std::vector<SupermultiplicativityCheck> supermultiplicativity_probe(const Pmf& pmf, double p, int d);

}  // namespace perclab
