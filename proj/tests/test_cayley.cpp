#include <deque>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "perclab/cayley.hpp"
#include "perclab/error.hpp"

using namespace perclab;

namespace {

// Lamplighter state moved by hand: shift the lighter or flip the lamp under it.
struct Lamp {
  std::int64_t pos = 0;
  std::set<std::int64_t> lit;
  auto operator<=>(const Lamp&) const = default;
};

GroupElement encode(const Lamp& s) {
  GroupElement e{{s.pos}};
  e.coords.insert(e.coords.end(), s.lit.begin(), s.lit.end());
  return e;
}

std::map<Lamp, int> lamplighter_bfs(int radius) {
  std::map<Lamp, int> dist{{Lamp{}, 0}};
  std::deque<Lamp> queue{Lamp{}};
  while (!queue.empty()) {
    const auto s = queue.front();
    queue.pop_front();
    const int d = dist[s];
    if (d == radius) continue;
    std::vector<Lamp> next(3, s);
    next[0].pos -= 1;
    next[1].pos += 1;
    if (!next[2].lit.erase(s.pos)) next[2].lit.insert(s.pos);
    for (const auto& t : next) {
      if (dist.emplace(t, d + 1).second) queue.push_back(t);
    }
  }
  return dist;
}

GroupElement random_lamplighter(std::mt19937_64& rng, int span) {
  std::uniform_int_distribution<std::int64_t> pos(-span, span);
  std::set<std::int64_t> lit;
  const int count = static_cast<int>(rng() % 5);
  for (int i = 0; i < count; ++i) lit.insert(pos(rng));
  return encode(Lamp{pos(rng), lit});
}

GroupElement random_zd(std::mt19937_64& rng, int d, int span) {
  std::uniform_int_distribution<std::int64_t> c(-span, span);
  GroupElement e;
  for (int i = 0; i < d; ++i) e.coords.push_back(c(rng));
  return e;
}

ElementSet random_connected(const Group& g, std::mt19937_64& rng, std::size_t size, const GroupElement& start) {
  ElementSet set{start};
  std::set<GroupElement> members{start};
  while (set.size() < size) {
    const auto& base = set[rng() % set.size()];
    const auto& s = g.generators()[rng() % g.generators().size()];
    auto next = g.multiply(s, base);
    if (members.insert(next).second) set.push_back(next);
  }
  normalize(set);
  return set;
}

std::int64_t brute_set_distance(const Group& g, const ElementSet& a, const ElementSet& b) {
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (const auto& x : a)
    for (const auto& y : b) best = std::min(best, g.distance(x, y));
  return best;
}

}  // namespace

TEST_CASE("ball sizes") {
  const auto z1 = cayley_ball(Group::zd(1), 2);
  CHECK(z1.graph.num_vertices() == 5);
  CHECK(z1.graph.num_edges() == 4);
  const auto z2 = cayley_ball(Group::zd(2), 1);
  CHECK(z2.graph.num_vertices() == 5);
  CHECK(z2.graph.num_edges() == 4);
  for (int r : {2, 4, 6}) {
    const auto ball = cayley_ball(Group::lamplighter(), r);
    CHECK(ball.graph.num_vertices() == lamplighter_bfs(r).size());
  }
}

TEST_CASE("lamplighter word length equals BFS distance") {
  const auto g = Group::lamplighter();
  for (const auto& [s, d] : lamplighter_bfs(9)) CHECK(g.word_length(encode(s)) == d);
}

TEST_CASE("Cayley edges are left multiplications by generators") {
  const auto g = Group::lamplighter();
  const auto ball = cayley_ball(g, 5);
  for (std::uint32_t v = 0; v < ball.graph.num_vertices(); ++v) {
    if (ball.graph.is_frontier(v)) continue;
    const auto x = ball.element(v);
    std::vector<GroupElement> expected;
    for (const auto& s : g.generators()) expected.push_back(g.multiply(s, x));
    std::sort(expected.begin(), expected.end());
    std::vector<GroupElement> got;
    for (auto u : ball.graph.adjacent(v)) got.push_back(ball.element(u));
    std::sort(got.begin(), got.end());
    CHECK(got == expected);
  }
}

TEST_CASE("group axioms on random elements") {
  std::mt19937_64 rng(7);
  for (const auto& g : {Group::lamplighter(), Group::zd(2), Group::zd(3)}) {
    for (int i = 0; i < 500; ++i) {
      auto draw = [&] { return g.family() == GroupFamily::lamplighter ? random_lamplighter(rng, 6) : random_zd(rng, g.dimension(), 6); };
      const auto a = draw(), b = draw(), c = draw();
      CHECK(g.multiply(g.multiply(a, b), c) == g.multiply(a, g.multiply(b, c)));
      CHECK(g.multiply(a, g.inverse(a)) == g.identity());
      CHECK(g.multiply(g.inverse(a), a) == g.identity());
      CHECK(g.multiply(a, g.identity()) == a);
      CHECK(g.word_length(a) == g.word_length(g.inverse(a)));
      CHECK(g.distance(a, b) == g.distance(b, a));
      CHECK(g.distance(a, c) <= g.distance(a, b) + g.distance(b, c));
    }
  }
}

TEST_CASE("right translation preserves distances and has no fixed points") {
  std::mt19937_64 rng(11);
  for (const auto& g : {Group::lamplighter(), Group::zd(2)}) {
    for (int i = 0; i < 300; ++i) {
      auto draw = [&] { return g.family() == GroupFamily::lamplighter ? random_lamplighter(rng, 5) : random_zd(rng, 2, 5); };
      const auto t = draw(), u = draw(), v = draw();
      const auto ut = g.multiply(u, t), vt = g.multiply(v, t);
      CHECK(g.distance(ut, vt) == g.distance(u, v));
      if (t != g.identity()) CHECK(ut != u);
    }
  }
}

TEST_CASE("right_translate examples") {
  const auto z2 = Group::zd(2);
  ElementSet a{{{0, 0}}, {{0, 1}}};
  CHECK(right_translate(z2, z2.identity(), a) == a);
  CHECK(right_translate(z2, GroupElement{{1, 0}}, a) == ElementSet{{{1, 0}}, {{1, 1}}});
  const auto ll = Group::lamplighter();
  const auto lit = right_translate(ll, GroupElement{{0, 0}}, ElementSet{ll.identity()});
  CHECK(lit == ElementSet{GroupElement{{0, 0}}});
  // s * u moves the lighter of u, or flips the lamp under it.
  CHECK(ll.multiply(GroupElement{{1}}, GroupElement{{0, 0}}) == GroupElement{{1, 0}});
  CHECK(ll.multiply(GroupElement{{0, 0}}, GroupElement{{1}}) == GroupElement{{1, 1}});
}

TEST_CASE("set distance and connectivity") {
  std::mt19937_64 rng(5);
  const auto g = Group::lamplighter();
  for (int i = 0; i < 50; ++i) {
    const auto a = random_connected(g, rng, 1 + rng() % 8, random_lamplighter(rng, 3));
    const auto b = random_connected(g, rng, 1 + rng() % 8, random_lamplighter(rng, 3));
    CHECK(is_connected(g, a));
    CHECK(set_distance(g, a, b) == brute_set_distance(g, a, b));
  }
  CHECK_FALSE(is_connected(Group::zd(2), ElementSet{{{0, 0}}, {{2, 0}}}));
}

TEST_CASE("translate bound") {
  CHECK(translate_bound(1, 1) == 2);
  CHECK(translate_bound(9, 9) == 9);
  CHECK(translate_bound(8, 8) == 8);
  CHECK(translate_bound(0, 1) == 1);
}

TEST_CASE("disjoint translate of singletons and boxes") {
  const auto z2 = Group::zd(2);
  const CayleyBall ball(z2, 40);
  const ElementSet origin{z2.identity()};
  const auto single = find_disjoint_translate(ball, origin, origin);
  CHECK(single.distance == 1);
  CHECK(single.bound == 2);
  CHECK(z2.word_length(single.gamma) == 1);

  ElementSet box;
  for (std::int64_t x = -1; x <= 1; ++x)
    for (std::int64_t y = -1; y <= 1; ++y) box.push_back(GroupElement{{x, y}});
  normalize(box);
  const auto res = find_disjoint_translate(ball, box, box);
  CHECK(res.bound == 9);
  const auto moved = right_translate(z2, res.gamma, box);
  CHECK(set_distance(z2, moved, box) == res.distance);
  CHECK(res.distance >= 1);
  CHECK(res.distance <= 9);
  // Exhaustive shift oracle for the minimum.
  std::int64_t best = 100;
  for (std::int64_t x = -12; x <= 12; ++x)
    for (std::int64_t y = -12; y <= 12; ++y) {
      const auto d = brute_set_distance(z2, right_translate(z2, GroupElement{{x, y}}, box), box);
      if (d > 0) best = std::min(best, d);
    }
  CHECK(min_translate_distance(ball, box, box).distance == best);
  CHECK(best == 1);
}

TEST_CASE("minimum translate distances") {
  const auto z2 = Group::zd(2);
  const CayleyBall ball(z2, 30);
  CHECK(min_translate_distance(ball, ElementSet{z2.identity()}, ElementSet{z2.identity()}).distance == 1);
  const ElementSet domino{{{0, 0}}, {{1, 0}}};
  CHECK(min_translate_distance(ball, domino, domino).distance == 1);
  const auto z1 = Group::zd(1);
  const ElementSet interval{{{0}}, {{1}}, {{2}}};
  CHECK(min_translate_distance(CayleyBall(z1, 30), interval, interval).distance == 1);
}

TEST_CASE("translate finder always meets its contract") {
  std::mt19937_64 rng(31);
  for (const auto& g : {Group::lamplighter(), Group::zd(2)}) {
    const CayleyBall ball(g, 60);
    for (int i = 0; i < 40; ++i) {
      const auto a = random_connected(g, rng, 1 + rng() % 10, g.identity());
      const auto b = random_connected(g, rng, 1 + rng() % 10, g.identity());
      const auto res = find_disjoint_translate(ball, a, b);
      const auto moved = right_translate(g, res.gamma, a);
      CHECK(set_distance(g, moved, b) == res.distance);
      CHECK(res.distance >= 1);
      CHECK(res.distance <= translate_bound(a.size(), b.size()));
      CHECK(min_translate_distance(ball, a, b).distance <= res.distance);
    }
  }
}

TEST_CASE("translate finder refuses truncated search regions") {
  const auto z2 = Group::zd(2);
  ElementSet line;
  for (std::int64_t x = 0; x < 20; ++x) line.push_back(GroupElement{{x, 0}});
  try {
    find_disjoint_translate(CayleyBall(z2, 10), line, line);
    FAIL("expected frontier error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::frontier);
  }
}

TEST_CASE("k-closure") {
  const auto path = Graph::from_edges(3, {{0, 1}, {1, 2}}, 0);
  const auto same = k_closure(path, 1);
  CHECK(same.num_edges() == 2);
  const auto tri = k_closure(path, 2);
  CHECK(tri.num_edges() == 3);

  const auto grid = build_grid(2, 2);
  const auto c2 = k_closure(grid, 2);
  CHECK(c2.adjacent(c2.origin_index()).size() == 12);

  const auto g1 = build_grid(2, 3);
  const auto k1 = k_closure(g1, 1);
  CHECK(k1.num_edges() == g1.num_edges());

  // Adjacency in the closure iff BFS distance <= k.
  const auto g = cayley_ball(Group::lamplighter(), 4).graph;
  const auto c = k_closure(g, 3);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 40; ++i) {
    const auto src = static_cast<std::uint32_t>(rng() % g.num_vertices());
    std::vector<int> dist(g.num_vertices(), -1);
    std::deque<std::uint32_t> q{src};
    dist[src] = 0;
    while (!q.empty()) {
      const auto v = q.front();
      q.pop_front();
      for (auto u : g.adjacent(v))
        if (dist[u] < 0) {
          dist[u] = dist[v] + 1;
          q.push_back(u);
        }
    }
    std::set<std::uint32_t> adj(c.adjacent(src).begin(), c.adjacent(src).end());
    for (std::uint32_t v = 0; v < g.num_vertices(); ++v) CHECK((adj.count(v) == 1) == (dist[v] > 0 && dist[v] <= 3));
  }
}

TEST_CASE("elements by length are ordered and complete") {
  const auto g = Group::lamplighter();
  const auto els = elements_by_length(g, 5);
  CHECK(els.size() == lamplighter_bfs(5).size());
  for (std::size_t i = 1; i < els.size(); ++i) {
    const auto a = g.word_length(els[i - 1]), b = g.word_length(els[i]);
    CHECK((a < b || (a == b && els[i - 1] < els[i])));
  }
}

TEST_CASE("group elements serialize as canonical keys") {
  const GroupElement e{{3, -1, 4}};
  nlohmann::json j = e;
  CHECK(j.get<GroupElement>() == e);
  const ElementSet set{{{0, 0}}, {{1, 2}}};
  nlohmann::json js = set;
  CHECK(js.get<ElementSet>() == set);
  CHECK_THROWS_AS(Group::lamplighter().validate(GroupElement{{0, 3, 1}}), Error);
}
