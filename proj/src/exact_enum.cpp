#include "perclab/exact_enum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "perclab/error.hpp"

namespace perclab {

namespace {

class ConnectedSetWalker {
 public:
  ConnectedSetWalker(const Graph& g, std::size_t max_size,
                     const std::function<bool(std::uint32_t)>& allowed,
                     const std::function<void(std::span<const std::uint32_t>)>& visit,
                     const EnumOptions& opts)
      : g_(g), max_size_(max_size), allowed_(allowed), visit_(visit), opts_(opts),
        marked_(g.num_vertices(), 0) {}

  std::size_t run(std::uint32_t root) {
    if (max_size_ == 0 || !allowed_(root)) return 0;
    marked_[root] = 1;
    extend({root});
    return visited_;
  }

 private:
  void extend(std::vector<std::uint32_t> untried) {
    while (!untried.empty()) {
      const auto v = untried.back();
      untried.pop_back();
      current_.push_back(v);
      if (++visited_ > opts_.max_sets) {
        fail(ErrorKind::size_cap, "connected-set enumeration exceeded the cap of " +
                                      std::to_string(opts_.max_sets) + " sets");
      }
      visit_(current_);
      if (current_.size() < max_size_) {
        auto next = untried;
        const auto before = next.size();
        for (auto u : g_.adjacent(v)) {
          if (!marked_[u] && allowed_(u)) {
            marked_[u] = 1;
            next.push_back(u);
          }
        }
        const std::vector<std::uint32_t> added(next.begin() + before, next.end());
        extend(std::move(next));
        for (auto u : added) marked_[u] = 0;
      }
      current_.pop_back();
    }
  }

  const Graph& g_;
  std::size_t max_size_;
  const std::function<bool(std::uint32_t)>& allowed_;
  const std::function<void(std::span<const std::uint32_t>)>& visit_;
  const EnumOptions& opts_;
  std::vector<std::uint8_t> marked_;
  std::vector<std::uint32_t> current_;
  std::size_t visited_ = 0;
};

}  // namespace

std::size_t for_each_connected_set(const Graph& g, std::uint32_t root, std::size_t max_size,
                                   const std::function<bool(std::uint32_t)>& allowed,
                                   const std::function<void(std::span<const std::uint32_t>)>& visit,
                                   const EnumOptions& opts) {
  require(g.is_explicit(), "connected-set enumeration needs an explicit graph");
  require(root < g.num_vertices(), "root out of range");
  ConnectedSetWalker walker(g, max_size, allowed, visit, opts);
  return walker.run(root);
}

Animal make_animal(const Graph& g, std::span<const std::uint32_t> vertices) {
  Animal a;
  a.vertices.assign(vertices.begin(), vertices.end());
  std::sort(a.vertices.begin(), a.vertices.end());
  auto member = [&](std::uint32_t u) {
    return std::binary_search(a.vertices.begin(), a.vertices.end(), u);
  };
  for (auto v : a.vertices) {
    const auto nb = g.adjacent(v);
    const auto inc = g.incident_edges(v);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (!member(nb[i])) {
        a.boundary_edges.push_back(inc[i]);
      } else if (v < nb[i]) {
        a.internal_edges.push_back(inc[i]);
      }
    }
  }
  std::sort(a.internal_edges.begin(), a.internal_edges.end());
  std::sort(a.boundary_edges.begin(), a.boundary_edges.end());
  return a;
}

std::vector<Animal> enumerate_animals(const Graph& g, std::size_t n_max, const EnumOptions& opts) {
  std::vector<Animal> out;
  for_each_connected_set(
      g, g.origin_index(), n_max, [](std::uint32_t) { return true; },
      [&](std::span<const std::uint32_t> set) { out.push_back(make_animal(g, set)); }, opts);
  return out;
}

std::vector<std::uint64_t> connected_spanning_counts(const Graph& g, const Animal& animal,
                                                     const EnumOptions& opts) {
  const std::size_t n = animal.vertices.size();
  const std::size_t m = animal.internal_edges.size();
  require(n >= 1, "empty animal");
  if (m > opts.max_internal_edges) {
    fail(ErrorKind::size_cap, "animal has " + std::to_string(m) +
                                  " internal edges, above the subset-enumeration cap of " +
                                  std::to_string(opts.max_internal_edges));
  }
  require(n <= 64, "animal too large for bitmask connectivity");
  std::vector<std::uint64_t> counts(m + 1, 0);
  if (n == 1) {
    counts[0] = 1;
    return counts;
  }
  auto local = [&](std::uint32_t v) {
    return static_cast<std::size_t>(
        std::lower_bound(animal.vertices.begin(), animal.vertices.end(), v) - animal.vertices.begin());
  };
  std::vector<std::uint64_t> end_a(m), end_b(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto e = g.edge(animal.internal_edges[i]);
    end_a[i] = std::uint64_t{1} << local(e.u);
    end_b[i] = std::uint64_t{1} << local(e.v);
  }
  const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  // A spanning connected subgraph needs at least n - 1 edges.
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    const auto k = static_cast<std::size_t>(std::popcount(mask));
    if (k + 1 < n) continue;
    std::uint64_t reach = 1;
    bool grew = true;
    while (grew) {
      grew = false;
      for (std::size_t i = 0; i < m; ++i) {
        if (!((mask >> i) & 1)) continue;
        const bool ina = reach & end_a[i], inb = reach & end_b[i];
        if (ina != inb) {
          reach |= end_a[i] | end_b[i];
          grew = true;
        }
      }
    }
    if (reach == all) ++counts[k];
  }
  return counts;
}

Polynomial connectedness_polynomial(const Graph& g, const Animal& animal, const EnumOptions& opts) {
  const auto counts = connected_spanning_counts(g, animal, opts);
  const std::size_t m = counts.size() - 1;
  Polynomial out;
  for (std::size_t k = 0; k <= m; ++k) {
    if (counts[k]) out += BigInt(counts[k]) * Polynomial::monomial_pair(k, m - k);
  }
  return out;
}

Polynomial ClusterSizePolynomials::polynomial(std::size_t n) const {
  Polynomial out;
  for (const auto& [kj, count] : terms(n))
    out += BigInt(count) * Polynomial::monomial_pair(kj.first, kj.second);
  return out;
}

Rational ClusterSizePolynomials::evaluate(std::size_t n, const Rational& p) const {
  const Rational q = 1 - p;
  Rational acc = 0;
  for (const auto& [kj, count] : terms(n)) {
    acc += Rational(BigInt(count)) * rational_pow(p, static_cast<unsigned>(kj.first)) *
           rational_pow(q, static_cast<unsigned>(kj.second));
  }
  return acc;
}

ClusterSizePolynomials cluster_size_polynomials(const Graph& g, std::size_t n_max,
                                                const EnumOptions& opts) {
  require(g.is_explicit(), "exact cluster probabilities need an explicit graph");
  require(n_max >= 1, "n_max must be >= 1");
  std::vector<ClusterSizePolynomials::Terms> terms(n_max);
  std::vector<std::size_t> animals(n_max, 0);
  for_each_connected_set(
      g, g.origin_index(), n_max, [](std::uint32_t) { return true; },
      [&](std::span<const std::uint32_t> set) {
        for (auto v : set) {
          if (g.is_frontier(v)) {
            fail(ErrorKind::frontier, "an animal of size " + std::to_string(set.size()) +
                                          " reaches frontier vertex " + to_string(g.key(v)) +
                                          "; enlarge the graph or lower n_max");
          }
        }
        const auto animal = make_animal(g, set);
        const auto counts = connected_spanning_counts(g, animal, opts);
        const std::size_t m = animal.internal_edges.size();
        const std::size_t b = animal.boundary_edges.size();
        ++animals[set.size() - 1];
        auto& bucket = terms[set.size() - 1];
        for (std::size_t k = 0; k <= m; ++k) {
          if (counts[k]) bucket[{k, m - k + b}] += counts[k];
        }
      },
      opts);
  return ClusterSizePolynomials(std::move(terms), std::move(animals));
}

Pmf exact_cluster_pmf(const Graph& g, const Rational& p, std::size_t n_max, const EnumOptions& opts) {
  require(p >= 0 && p <= 1, "probability must lie in [0, 1]");
  const auto polys = cluster_size_polynomials(g, n_max, opts);
  std::vector<Rational> values;
  values.reserve(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) values.push_back(polys.evaluate(n, p));
  return pmf_from_exact(std::move(values));
}

Pmf exact_cluster_pmf(const Graph& g, double p, std::size_t n_max, const EnumOptions& opts) {
  return exact_cluster_pmf(g, to_rational(p), n_max, opts);
}

std::vector<std::optional<double>> decay_rate_probe(const Pmf& pmf) {
  std::vector<std::optional<double>> out;
  out.reserve(pmf.n_max());
  for (std::size_t n = 1; n <= pmf.n_max(); ++n) {
    const double v = pmf.at(n);
    if (v > 0.0) {
      out.emplace_back(-std::log(v) / static_cast<double>(n));
    } else {
      out.emplace_back(std::nullopt);
    }
  }
  return out;
}

std::vector<SupermultiplicativityCheck> supermultiplicativity_probe(const Pmf& pmf, double p, int d) {
  require(p > 0.0 && p < 1.0 && d >= 1, "probe needs 0 < p < 1 and d >= 1");
  const double log_beta = std::log(p) + 2.0 * d * std::log1p(-p);
  std::vector<SupermultiplicativityCheck> out;
  for (std::size_t total = 2; total <= pmf.n_max(); ++total) {
    const double t = static_cast<double>(total);
    const double exponent = std::pow(t, 0.75) * std::log2(t);
    for (std::size_t m = 1; m < total; ++m) {
      SupermultiplicativityCheck c;
      c.m = m;
      c.n = total - m;
      c.lhs = pmf.at(total);
      c.rhs = pmf.at(c.m) * pmf.at(c.n) * std::exp(exponent * log_beta);
      c.holds = c.lhs >= c.rhs;
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace perclab
