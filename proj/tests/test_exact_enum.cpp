#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "perclab/branching.hpp"
#include "perclab/error.hpp"
#include "perclab/exact_enum.hpp"

using namespace perclab;

namespace {

std::uint32_t idx(const Graph& g, std::vector<std::int64_t> x) { return *g.index_of(VertexKey{std::move(x), {}}); }

// Grows every connected set containing the origin by single-vertex
// extensions and dedupes; counts by size.
std::vector<std::size_t> naive_animal_counts(const Graph& g, std::size_t n_max) {
  std::vector<std::size_t> counts(n_max + 1, 0);
  std::set<std::vector<std::uint32_t>> layer{{g.origin_index()}};
  for (std::size_t n = 1; n <= n_max; ++n) {
    counts[n] = layer.size();
    std::set<std::vector<std::uint32_t>> next;
    for (const auto& s : layer) {
      for (auto v : s) {
        for (auto u : g.adjacent(v)) {
          if (std::binary_search(s.begin(), s.end(), u)) continue;
          auto t = s;
          t.insert(std::upper_bound(t.begin(), t.end(), u), u);
          next.insert(std::move(t));
        }
      }
    }
    layer = std::move(next);
  }
  return counts;
}

// Origin cluster size law by running over all 2^|E| configurations.
std::vector<Rational> configuration_oracle(const Graph& g, const Rational& p) {
  const auto m = g.num_edges();
  const auto n = g.num_vertices();
  std::vector<Rational> law(n + 1, 0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    std::vector<std::uint32_t> parent(n);
    for (std::uint32_t v = 0; v < n; ++v) parent[v] = v;
    auto find = [&](std::uint32_t v) {
      while (parent[v] != v) v = parent[v] = parent[parent[v]];
      return v;
    };
    std::size_t open = 0;
    for (std::uint32_t e = 0; e < m; ++e) {
      if (!((mask >> e) & 1)) continue;
      ++open;
      parent[find(g.edge(e).u)] = find(g.edge(e).v);
    }
    std::size_t size = 0;
    const auto root = find(g.origin_index());
    for (std::uint32_t v = 0; v < n; ++v) size += find(v) == root;
    law[size] += rational_pow(p, open) * rational_pow(1 - p, m - open);
  }
  return law;
}

Graph random_connected_graph(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (std::uint32_t v = 1; v < n; ++v) {
    const auto u = static_cast<std::uint32_t>(rng() % v);
    edges.push_back({u, v});
    seen.insert({u, v});
  }
  while (edges.size() < m) {
    auto u = static_cast<std::uint32_t>(rng() % n), v = static_cast<std::uint32_t>(rng() % n);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (!seen.insert({u, v}).second) continue;
    edges.push_back({u, v});
  }
  return Graph::from_edges(n, edges, static_cast<std::uint32_t>(rng() % n));
}

}  // namespace

TEST_CASE("lattice animal counts match naive growth") {
  const auto g = build_grid(2, 8);
  const auto animals = enumerate_animals(g, 6);
  std::vector<std::size_t> by_size(7, 0);
  for (const auto& a : animals) ++by_size[a.vertices.size()];
  const auto oracle = naive_animal_counts(g, 6);
  for (std::size_t n = 1; n <= 6; ++n) CHECK(by_size[n] == oracle[n]);
  CHECK(by_size[1] == 1);
  CHECK(by_size[2] == 4);
}

TEST_CASE("binary tree animals") {
  const auto g = build_rooted_tree(2, 5);
  const auto animals = enumerate_animals(g, 3);
  std::vector<std::size_t> by_size(4, 0);
  for (const auto& a : animals) ++by_size[a.vertices.size()];
  CHECK(by_size[1] == 1);
  CHECK(by_size[2] == 2);
  CHECK(by_size[3] == 5);
}

TEST_CASE("animals have consistent edge sets") {
  const auto g = build_grid(2, 6);
  for (const auto& a : enumerate_animals(g, 5)) {
    std::size_t incident = 0;
    for (auto v : a.vertices) incident += g.adjacent(v).size();
    CHECK(2 * a.internal_edges.size() + a.boundary_edges.size() == incident);
    CHECK(std::binary_search(a.vertices.begin(), a.vertices.end(), g.origin_index()));
  }
}

TEST_CASE("connectedness polynomials") {
  const auto g = build_grid(2, 4);
  const auto single = make_animal(g, std::vector<std::uint32_t>{g.origin_index()});
  CHECK(connectedness_polynomial(g, single) == Polynomial::constant(1));

  std::vector<std::uint32_t> domino{idx(g, {0, 0}), idx(g, {1, 0})};
  std::sort(domino.begin(), domino.end());
  CHECK(connectedness_polynomial(g, make_animal(g, domino)) == Polynomial::monomial_pair(1, 0));

  std::vector<std::uint32_t> square{idx(g, {0, 0}), idx(g, {1, 0}), idx(g, {0, 1}), idx(g, {1, 1})};
  std::sort(square.begin(), square.end());
  const auto expected = Polynomial::monomial_pair(4, 0) + BigInt(4) * Polynomial::monomial_pair(3, 1);
  CHECK(connectedness_polynomial(g, make_animal(g, square)) == expected);
}

TEST_CASE("small pi_n on Z^2") {
  const auto g = build_grid(2, 6);
  const Rational p = parse_rational("1/5");
  const auto pmf = exact_cluster_pmf(g, p, 4);
  CHECK(pmf.exact_values[0] == rational_pow(1 - p, 4));
  CHECK(pmf.exact_values[1] == 4 * p * rational_pow(1 - p, 6));
  // Size 3: 6 fixed trominoes, 3 placements each; all are trees with 2
  // internal and 8 boundary edges.
  CHECK(pmf.exact_values[2] == 18 * p * p * rational_pow(1 - p, 8));
  const auto a = decay_rate_probe(pmf);
  CHECK(*a[0] == doctest::Approx(-4 * std::log(0.8)));
}

TEST_CASE("exact pmf equals full configuration enumeration on random graphs") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t n = 4 + rng() % 4;
    const std::size_t m = std::min<std::size_t>(n - 1 + rng() % 6, n * (n - 1) / 2);
    const auto g = random_connected_graph(rng, n, m);
    const Rational p = Rational(1 + rng() % 9, 10);
    const auto oracle = configuration_oracle(g, p);
    const auto pmf = exact_cluster_pmf(g, p, n);
    Rational total = 0;
    for (std::size_t k = 1; k <= n; ++k) {
      CHECK(pmf.exact_values[k - 1] == oracle[k]);
      total += pmf.exact_values[k - 1];
    }
    CHECK(total == 1);
  }
}

TEST_CASE("exact pmf on the binary tree equals Dwass exactly") {
  const auto g = build_rooted_tree(2, 7);
  const Rational p = parse_rational("3/10");
  const auto pmf = exact_cluster_pmf(g, p, 6);
  const auto dwass = total_progeny_pmf_dwass_exact(2, p, 6);
  for (std::size_t n = 1; n <= 6; ++n) CHECK(pmf.exact_values[n - 1] == dwass.exact_values[n - 1]);
}

TEST_CASE("sum plus residual is one") {
  const auto g = build_grid(2, 8);
  const auto pmf = exact_cluster_pmf(g, parse_rational("3/10"), 6);
  Rational s = 0;
  for (const auto& v : pmf.exact_values) s += v;
  CHECK(s < 1);
  CHECK(static_cast<double>(1 - s) == doctest::Approx(pmf.residual).epsilon(1e-12));
  for (std::size_t n = 1; n <= 6; ++n) CHECK(static_cast<double>(pmf.exact_values[n - 1]) == pmf.at(n));
}

TEST_CASE("frontier and cap errors") {
  const auto small = build_grid(2, 2);
  try {
    exact_cluster_pmf(small, 0.3, 4);
    FAIL("expected frontier error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::frontier);
  }
  const auto g = build_grid(2, 10);
  try {
    enumerate_animals(g, 9, EnumOptions{100, 24});
    FAIL("expected cap error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::size_cap);
  }
}

TEST_CASE("polynomial identities") {
  const auto g = build_grid(2, 8);
  const auto polys = cluster_size_polynomials(g, 5);
  CHECK(polys.animal_count(1) == 1);
  CHECK(polys.animal_count(2) == 4);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    const Rational p(rng() % 100, 100);
    for (std::size_t n = 1; n <= 5; ++n) {
      const auto value = polys.evaluate(n, p);
      CHECK(polys.polynomial(n).evaluate(p) == value);
      CHECK(value >= 0);
      CHECK(value <= 1);
    }
  }
}

TEST_CASE("supermultiplicativity probe reports every split") {
  const auto g = build_grid(2, 9);
  const auto pmf = exact_cluster_pmf(g, parse_rational("3/10"), 8);
  const auto checks = supermultiplicativity_probe(pmf, 0.3, 2);
  std::size_t expected = 0;
  for (std::size_t t = 2; t <= 8; ++t) expected += t - 1;
  CHECK(checks.size() == expected);
  for (const auto& c : checks) {
    CHECK(c.m + c.n <= 8);
    CHECK(c.holds == (c.lhs >= c.rhs));
  }
}
