#include "perclab/cayley.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

#include "perclab/error.hpp"

namespace perclab {

namespace {

// Symmetric difference of two sorted lamp lists.
std::vector<std::int64_t> xor_lamps(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
  std::vector<std::int64_t> out;
  out.reserve(a.size() + b.size());
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::span<const std::int64_t> lamps_of(const GroupElement& e) {
  return std::span<const std::int64_t>(e.coords).subspan(1);
}

}  // namespace

Group Group::zd(int d) {
  require(d >= 1, "Z^d needs d >= 1");
  Group g;
  g.family_ = GroupFamily::zd;
  g.d_ = d;
  for (int i = 0; i < d; ++i) {
    for (std::int64_t s : {-1, 1}) {
      GroupElement e{std::vector<std::int64_t>(d, 0)};
      e.coords[i] = s;
      g.generators_.push_back(std::move(e));
    }
  }
  std::sort(g.generators_.begin(), g.generators_.end());
  return g;
}

Group Group::lamplighter() {
  Group g;
  g.family_ = GroupFamily::lamplighter;
  g.d_ = 1;
  g.generators_ = {GroupElement{{-1}}, GroupElement{{0, 0}}, GroupElement{{1}}};
  return g;
}

GroupElement Group::identity() const {
  if (family_ == GroupFamily::zd) return GroupElement{std::vector<std::int64_t>(d_, 0)};
  return GroupElement{{0}};
}

void Group::validate(const GroupElement& a) const {
  if (family_ == GroupFamily::zd) {
    require(a.coords.size() == static_cast<std::size_t>(d_),
            "Z^" + std::to_string(d_) + " element needs " + std::to_string(d_) + " coordinates");
    return;
  }
  require(!a.coords.empty(), "lamplighter element needs a position");
  for (std::size_t i = 2; i < a.coords.size(); ++i)
    require(a.coords[i - 1] < a.coords[i], "lamplighter lamps must be strictly increasing");
}

GroupElement Group::multiply(const GroupElement& a, const GroupElement& b) const {
  if (family_ == GroupFamily::zd) {
    GroupElement out = a;
    for (int i = 0; i < d_; ++i) out.coords[i] += b.coords[i];
    return out;
  }
  const auto y = b.coords[0];
  std::vector<std::int64_t> shifted(a.coords.begin() + 1, a.coords.end());
  for (auto& l : shifted) l += y;
  GroupElement out;
  out.coords.reserve(a.coords.size() + b.coords.size());
  out.coords.push_back(a.coords[0] + y);
  const auto lamps = xor_lamps(lamps_of(b), shifted);
  out.coords.insert(out.coords.end(), lamps.begin(), lamps.end());
  return out;
}

GroupElement Group::inverse(const GroupElement& a) const {
  GroupElement out = a;
  if (family_ == GroupFamily::zd) {
    for (auto& c : out.coords) c = -c;
    return out;
  }
  const auto x = a.coords[0];
  out.coords[0] = -x;
  for (std::size_t i = 1; i < out.coords.size(); ++i) out.coords[i] -= x;
  return out;
}

std::int64_t Group::word_length(const GroupElement& a) const {
  if (family_ == GroupFamily::zd) {
    std::int64_t s = 0;
    for (auto c : a.coords) s += c < 0 ? -c : c;
    return s;
  }
  const auto x = a.coords[0];
  const auto lamps = lamps_of(a);
  std::int64_t lo = std::min<std::int64_t>(0, x), hi = std::max<std::int64_t>(0, x);
  if (!lamps.empty()) {
    lo = std::min(lo, lamps.front());
    hi = std::max(hi, lamps.back());
  }
  // Visit [lo, hi] starting at 0 and ending at x; left end first or right end first.
  const auto left_first = (0 - lo) + (hi - lo) + (hi - x);
  const auto right_first = (hi - 0) + (hi - lo) + (x - lo);
  return static_cast<std::int64_t>(lamps.size()) + std::min(left_first, right_first);
}

std::int64_t Group::distance(const GroupElement& a, const GroupElement& b) const {
  return word_length(multiply(b, inverse(a)));
}

VertexKey Group::to_key(const GroupElement& a) const { return VertexKey{a.coords, {}}; }

GroupElement Group::from_key(const VertexKey& k) const {
  require(k.path.empty(), "group element keys carry no tree path");
  GroupElement e{k.coords};
  validate(e);
  return e;
}

FamilyDescriptor Group::descriptor(std::optional<std::int64_t> radius) const {
  FamilyDescriptor desc;
  desc.family = family_ == GroupFamily::zd ? Family::zd_ball : Family::lamplighter;
  desc.d = family_ == GroupFamily::zd ? d_ : 0;
  desc.radius = radius;
  return desc;
}

bool CayleyBall::contains(const GroupElement& a) const {
  return !radius_ || group_.word_length(a) <= *radius_;
}

bool CayleyBall::is_frontier(const GroupElement& a) const {
  return radius_ && group_.word_length(a) == *radius_;
}

GroupElement MaterializedBall::element(std::uint32_t v) const {
  return ball.group().from_key(graph.key(v));
}

std::optional<std::uint32_t> MaterializedBall::index_of(const GroupElement& a) const {
  return graph.index_of(ball.group().to_key(a));
}

MaterializedBall cayley_ball(const Group& group, std::int64_t radius, const BuildOptions& opts) {
  require(radius >= 0, "radius must be >= 0");
  return MaterializedBall{CayleyBall(group, radius), build_graph(group.descriptor(radius), opts)};
}

void normalize(ElementSet& set) {
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
}

ElementSet right_translate(const Group& group, const GroupElement& t, const ElementSet& a) {
  ElementSet out;
  out.reserve(a.size());
  for (const auto& x : a) out.push_back(group.multiply(x, t));
  normalize(out);
  return out;
}

std::int64_t set_distance(const Group& group, const ElementSet& a, const ElementSet& b) {
  require(!a.empty() && !b.empty(), "set distance needs nonempty sets");
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (const auto& x : a) {
    const auto xinv = group.inverse(x);
    for (const auto& y : b) {
      best = std::min(best, group.word_length(group.multiply(y, xinv)));
      if (best == 0) return 0;
    }
  }
  return best;
}

bool is_connected(const Group& group, const ElementSet& a) {
  if (a.empty()) return false;
  std::vector<std::uint8_t> seen(a.size(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    for (const auto& s : group.generators()) {
      const auto nb = group.multiply(s, a[i]);
      auto it = std::lower_bound(a.begin(), a.end(), nb);
      if (it != a.end() && *it == nb) {
        const auto j = static_cast<std::size_t>(it - a.begin());
        if (!seen[j]) {
          seen[j] = 1;
          ++reached;
          stack.push_back(j);
        }
      }
    }
  }
  return reached == a.size();
}

namespace {

/// Breadth-first layers of the Cayley graph around the identity.
class LayerWalker {
 public:
  explicit LayerWalker(const Group& group) : group_(group), current_{group.identity()} {}

  const std::vector<GroupElement>& layer() const noexcept { return current_; }
  std::int64_t length() const noexcept { return length_; }

  void advance() {
    std::set<GroupElement> next;
    for (const auto& e : current_) {
      for (const auto& s : group_.generators()) {
        auto nb = group_.multiply(s, e);
        if (!std::binary_search(previous_.begin(), previous_.end(), nb) &&
            !std::binary_search(current_.begin(), current_.end(), nb)) {
          next.insert(std::move(nb));
        }
      }
    }
    previous_ = std::move(current_);
    current_.assign(next.begin(), next.end());
    ++length_;
  }

 private:
  const Group& group_;
  std::vector<GroupElement> previous_;
  std::vector<GroupElement> current_;
  std::int64_t length_ = 0;
};

struct SetStats {
  std::int64_t max_length = 0;
  std::int64_t diameter = 0;
};

SetStats stats(const Group& group, const ElementSet& s) {
  SetStats out;
  for (const auto& x : s) out.max_length = std::max(out.max_length, group.word_length(x));
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      out.diameter = std::max(out.diameter, group.distance(s[i], s[j]));
  return out;
}

void check_inputs(const CayleyBall& ball, const ElementSet& a, const ElementSet& b) {
  const auto& group = ball.group();
  require(!a.empty() && !b.empty(), "translate search needs nonempty sets");
  for (const auto* s : {&a, &b}) {
    for (const auto& x : *s) {
      group.validate(x);
      if (!ball.contains(x)) {
        fail(ErrorKind::frontier, "element " + to_string(x) + " lies outside the ball");
      }
    }
    require(std::is_sorted(s->begin(), s->end()) &&
                std::adjacent_find(s->begin(), s->end()) == s->end(),
            "element sets must be sorted and duplicate-free");
    require(is_connected(group, *s), "translate search needs connected sets");
  }
}

bool disjoint(const ElementSet& a, const ElementSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      return false;
    }
  }
  return true;
}

std::optional<ElementSet> in_ball_translate(const CayleyBall& ball, const GroupElement& gamma,
                                            const ElementSet& a) {
  auto moved = right_translate(ball.group(), gamma, a);
  for (const auto& x : moved)
    if (!ball.contains(x)) return std::nullopt;
  return moved;
}

}  // namespace

std::vector<GroupElement> elements_by_length(const Group& group, std::int64_t max_length) {
  std::vector<GroupElement> out;
  LayerWalker walker(group);
  while (walker.length() <= max_length) {
    out.insert(out.end(), walker.layer().begin(), walker.layer().end());
    walker.advance();
  }
  return out;
}

std::int64_t translate_bound(std::size_t size_a, std::size_t size_b) {
  const double raw = std::pow(static_cast<double>(size_a + size_b), 0.75);
  // Guard against pow rounding just above an integer.
  auto bound = static_cast<std::int64_t>(std::ceil(raw - 1e-12));
  return std::max<std::int64_t>(1, bound);
}

TranslateResult find_disjoint_translate(const CayleyBall& ball, const ElementSet& a, const ElementSet& b) {
  check_inputs(ball, a, b);
  const auto& group = ball.group();
  const auto bound = translate_bound(a.size(), b.size());
  const auto sa = stats(group, a);
  const auto sb = stats(group, b);
  if (ball.radius()) {
    const auto needed = sb.max_length + bound + sa.diameter;
    if (needed >= *ball.radius()) {
      fail(ErrorKind::frontier, "search region truncated: it reaches word length " +
                                    std::to_string(needed) + " but the ball radius is " +
                                    std::to_string(*ball.radius()));
    }
  }
  // dist(A*gamma, B) >= |gamma| - max|a| - max|b|, so longer gammas cannot qualify.
  const auto max_gamma = bound + sa.max_length + sb.max_length;
  TranslateResult result;
  result.bound = bound;
  LayerWalker walker(group);
  while (walker.length() <= max_gamma) {
    for (const auto& gamma : walker.layer()) {
      ++result.candidates;
      const auto moved = in_ball_translate(ball, gamma, a);
      if (!moved || !disjoint(*moved, b)) continue;
      const auto dist = set_distance(group, *moved, b);
      if (dist <= bound) {
        result.gamma = gamma;
        result.distance = dist;
        return result;
      }
    }
    walker.advance();
  }
  fail(ErrorKind::exhausted, "no translate within distance " + std::to_string(bound) + " after " +
                                 std::to_string(result.candidates) + " candidates");
}

TranslateResult min_translate_distance(const CayleyBall& ball, const ElementSet& a, const ElementSet& b) {
  check_inputs(ball, a, b);
  const auto& group = ball.group();
  const auto sa = stats(group, a);
  const auto sb = stats(group, b);
  TranslateResult result;
  result.bound = translate_bound(a.size(), b.size());
  std::optional<std::int64_t> best;
  LayerWalker walker(group);
  while (true) {
    if (best && (*best == 1 || walker.length() - sa.max_length - sb.max_length >= *best)) break;
    if (ball.radius() && walker.length() > *ball.radius() + sa.max_length) break;
    for (const auto& gamma : walker.layer()) {
      ++result.candidates;
      const auto moved = in_ball_translate(ball, gamma, a);
      if (!moved || !disjoint(*moved, b)) continue;
      const auto dist = set_distance(group, *moved, b);
      if (!best || dist < *best) {
        best = dist;
        result.gamma = gamma;
        result.distance = dist;
        if (dist == 1) break;
      }
    }
    walker.advance();
  }
  if (!best) fail(ErrorKind::exhausted, "no disjoint in-ball translate exists");
  return result;
}

Graph k_closure(const Graph& g, int k, std::size_t max_edges) {
  require(g.is_explicit(), "k-closure needs an explicit graph");
  require(k >= 1, "k must be >= 1");
  const auto n = g.num_vertices();
  std::vector<std::vector<VertexKey>> nb(n);
  std::vector<std::int32_t> dist(n, -1);
  std::size_t edges = 0;
  for (std::uint32_t s = 0; s < n; ++s) {
    std::vector<std::uint32_t> touched{s};
    std::deque<std::uint32_t> queue{s};
    dist[s] = 0;
    while (!queue.empty()) {
      const auto v = queue.front();
      queue.pop_front();
      if (dist[v] == k) continue;
      for (auto u : g.adjacent(v)) {
        if (dist[u] >= 0) continue;
        dist[u] = dist[v] + 1;
        touched.push_back(u);
        queue.push_back(u);
      }
    }
    for (auto u : touched) {
      if (u != s) nb[s].push_back(g.key(u));
      dist[u] = -1;
    }
    edges += nb[s].size();
    if (edges / 2 > max_edges) {
      fail(ErrorKind::size_cap, "k-closure would exceed " + std::to_string(max_edges) + " edges");
    }
    std::sort(nb[s].begin(), nb[s].end());
  }
  KeySet keys;
  keys.reserve(n);
  for (std::uint32_t v = 0; v < n; ++v) keys.push_back(g.key(v));
  FamilyDescriptor desc;
  desc.family = Family::custom;
  return Graph::from_keys(
      desc, std::move(keys), g.origin(),
      [&](const VertexKey& key) { return nb[*g.index_of(key)]; },
      [&](const VertexKey& key) { return g.is_frontier(*g.index_of(key)); });
}

std::string to_string(const GroupElement& a) { return to_string(VertexKey{a.coords, {}}); }

void to_json(nlohmann::json& j, const GroupElement& a) { j = to_string(a); }

void from_json(const nlohmann::json& j, GroupElement& a) {
  if (j.is_array()) {
    a.coords = j.get<std::vector<std::int64_t>>();
    return;
  }
  const auto key = parse_vertex_key(j.get<std::string>());
  require(key.path.empty(), "group element keys carry no tree path");
  a.coords = key.coords;
}

}  // namespace perclab
