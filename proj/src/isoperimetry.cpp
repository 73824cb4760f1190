#include "perclab/isoperimetry.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "perclab/cayley.hpp"
#include "perclab/error.hpp"

namespace perclab {

namespace {

bool member(const KeySet& set, const VertexKey& k) { return std::binary_search(set.begin(), set.end(), k); }

void check_set(const Graph& g, const KeySet& w) {
  require(!w.empty(), "W must be nonempty");
  require(std::is_sorted(w.begin(), w.end()) && std::adjacent_find(w.begin(), w.end()) == w.end(),
          "W must be sorted and duplicate-free");
  if (!g.is_explicit()) return;
  for (const auto& v : w) {
    require(g.index_of(v).has_value(), "vertex " + to_string(v) + " is not in the graph");
    if (g.is_frontier(v)) {
      fail(ErrorKind::frontier, "W contains frontier vertex " + to_string(v) + "; its neighborhood is truncated");
    }
  }
}

}  // namespace

KeySet vertex_boundary(const Graph& g, const KeySet& w) {
  check_set(g, w);
  KeySet out;
  for (const auto& v : w)
    for (auto& u : g.neighbors(v))
      if (!member(w, u)) out.push_back(std::move(u));
  normalize(out);
  return out;
}

KeySet exterior_boundary(const Graph& g, const KeySet& w) {
  require(g.is_explicit(), "exterior boundary needs an explicit graph with a frontier");
  const auto boundary = vertex_boundary(g, w);
  const auto n = g.num_vertices();
  std::vector<std::uint8_t> blocked(n, 0), reached(n, 0);
  for (const auto& v : w) blocked[*g.index_of(v)] = 1;
  for (const auto& v : boundary) blocked[*g.index_of(v)] = 1;
  std::deque<std::uint32_t> queue;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (g.is_frontier(v) && !blocked[v]) {
      reached[v] = 1;
      queue.push_back(v);
    }
  }
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    for (auto u : g.adjacent(v)) {
      if (!reached[u] && !blocked[u]) {
        reached[u] = 1;
        queue.push_back(u);
      }
    }
  }
  KeySet out;
  for (const auto& b : boundary) {
    const auto v = *g.index_of(b);
    bool exterior = g.is_frontier(v);
    for (auto u : g.adjacent(v)) exterior = exterior || reached[u];
    if (exterior) out.push_back(b);
  }
  return out;
}

BoundaryReport boundary_report(const Graph& g, const KeySet& w, bool with_exterior) {
  BoundaryReport r;
  r.w = w;
  r.boundary = vertex_boundary(g, w);
  r.ratio = static_cast<double>(r.boundary.size()) / static_cast<double>(w.size());
  if (with_exterior) {
    r.exterior = exterior_boundary(g, w);
    r.exterior_ratio = static_cast<double>(r.exterior->size()) / static_cast<double>(w.size());
  }
  return r;
}

void to_json(nlohmann::json& j, const BoundaryReport& report) {
  auto keys = [](const KeySet& s) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& k : s) a.push_back(to_string(k));
    return a;
  };
  j = nlohmann::json{{"W", keys(report.w)},
                     {"boundary", keys(report.boundary)},
                     {"size", report.w.size()},
                     {"boundary_size", report.boundary.size()},
                     {"ratio", report.ratio}};
  if (report.exterior) {
    j["exterior_boundary"] = keys(*report.exterior);
    j["exterior_ratio"] = *report.exterior_ratio;
  }
}

CheegerResult cheeger_bruteforce(const Graph& g, std::size_t max_size, std::optional<VertexKey> anchor,
                                 const EnumOptions& opts) {
  require(g.is_explicit(), "Cheeger search needs an explicit graph");
  require(max_size >= 1, "max_size must be >= 1");
  const auto n = g.num_vertices();
  std::vector<std::uint32_t> in_set(n, 0), seen(n, 0);
  std::uint32_t stamp = 0;
  CheegerResult best;
  std::vector<std::uint32_t> best_set;
  std::size_t examined = 0;
  auto visit = [&](std::span<const std::uint32_t> set) {
    ++examined;
    ++stamp;
    for (auto v : set) in_set[v] = stamp;
    std::size_t boundary = 0;
    for (auto v : set) {
      for (auto u : g.adjacent(v)) {
        if (in_set[u] != stamp && seen[u] != stamp) {
          seen[u] = stamp;
          ++boundary;
        }
      }
    }
    if (best.size == 0 || boundary * best.size < best.boundary * set.size()) {
      best.boundary = boundary;
      best.size = set.size();
      best_set.assign(set.begin(), set.end());
    }
  };
  EnumOptions budget = opts;
  if (anchor) {
    const auto root = g.index_of(*anchor);
    require(root.has_value(), "anchor " + to_string(*anchor) + " is not in the graph");
    if (g.is_frontier(*root)) fail(ErrorKind::frontier, "anchor lies on the frontier");
    for_each_connected_set(
        g, *root, max_size, [&](std::uint32_t u) { return !g.is_frontier(u); }, visit, budget);
  } else {
    for (std::uint32_t root = 0; root < n; ++root) {
      if (g.is_frontier(root)) continue;
      budget.max_sets = opts.max_sets - std::min(opts.max_sets, examined);
      for_each_connected_set(
          g, root, max_size, [&](std::uint32_t u) { return u >= root && !g.is_frontier(u); }, visit,
          budget);
    }
  }
  require(best.size > 0, "no admissible set found");
  for (auto v : best_set) best.witness.push_back(g.key(v));
  normalize(best.witness);
  best.sets_examined = examined;
  return best;
}

bool check_kclosure_connected(const Graph& g, const KeySet& s, int k) {
  require(k >= 1, "k must be >= 1");
  if (s.empty()) return false;
  std::vector<std::uint8_t> joined(s.size(), 0);
  std::vector<std::size_t> stack{0};
  joined[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    // Ball of radius k around s[i].
    std::unordered_set<VertexKey, VertexKeyHash> seen{s[i]};
    std::vector<VertexKey> layer{s[i]};
    for (int step = 0; step < k && count < s.size(); ++step) {
      std::vector<VertexKey> next;
      for (const auto& v : layer) {
        for (auto& u : g.neighbors(v)) {
          if (!seen.insert(u).second) continue;
          auto it = std::lower_bound(s.begin(), s.end(), u);
          if (it != s.end() && *it == u) {
            const auto j = static_cast<std::size_t>(it - s.begin());
            if (!joined[j]) {
              joined[j] = 1;
              ++count;
              stack.push_back(j);
            }
          }
          next.push_back(std::move(u));
        }
      }
      layer = std::move(next);
    }
  }
  return count == s.size();
}

namespace {

/// Walks the lamplighter from `x` and records every element visited.
class LamplighterWalk {
 public:
  LamplighterWalk(const Group& group, GroupElement start, KeySet& sink)
      : group_(group), x_(std::move(start)), sink_(sink) {
    record();
  }

  void move_to(std::int64_t target) {
    const GroupElement step{{target > x_.coords[0] ? 1 : -1}};
    while (x_.coords[0] != target) {
      x_ = group_.multiply(step, x_);
      record();
    }
  }

  void toggle() {
    x_ = group_.multiply(GroupElement{{0, 0}}, x_);
    record();
  }

  const GroupElement& at() const noexcept { return x_; }

 private:
  void record() { sink_.push_back(group_.to_key(x_)); }

  const Group& group_;
  GroupElement x_;
  KeySet& sink_;
};

}  // namespace

FolnerSet lamplighter_folner(int n, std::optional<std::int64_t> ambient_radius, int max_n) {
  require(n >= 2 && n <= max_n, "lamplighter Folner sets need 2 <= n <= " + std::to_string(max_n));
  const auto group = Group::lamplighter();
  FolnerSet out;
  out.n = n;
  KeySet w;
  std::vector<GroupElement> inner;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<std::int64_t> lamps;
    for (int i = 0; i < n; ++i)
      if ((mask >> i) & 1) lamps.push_back(i + 1);
    for (std::int64_t pos = 1; pos <= n; ++pos) {
      GroupElement x{{pos}};
      x.coords.insert(x.coords.end(), lamps.begin(), lamps.end());
      w.push_back(group.to_key(x));
      if ((pos == 1 || pos == n) && !lamps.empty()) inner.push_back(std::move(x));
    }
  }
  out.box_size = w.size();
  for (const auto& x : inner) {
    const auto pos = x.coords[0];
    if (pos == n) {
      const auto k = n - x.coords.back();  // rightmost lit lamp at n - k
      LamplighterWalk walk(group, x, w);
      walk.move_to(n + k + 1);
      walk.toggle();
      walk.move_to(n - k);
      walk.toggle();
      walk.move_to(n + k + 1);
      walk.toggle();
      walk.move_to(n);
    }
    if (pos == 1) {
      const auto k = x.coords[1] - 1;  // leftmost lit lamp at 1 + k
      LamplighterWalk walk(group, x, w);
      walk.move_to(-k);
      walk.toggle();
      walk.move_to(1 + k);
      walk.toggle();
      walk.move_to(-k);
      walk.toggle();
      walk.move_to(1);
    }
  }
  {
    LamplighterWalk walk(group, GroupElement{{n}}, w);
    walk.move_to(2 * n);
    walk.toggle();
    walk.move_to(-n);
    walk.toggle();
    walk.move_to(2 * n);
    walk.toggle();
    walk.move_to(-n);
    walk.toggle();
    walk.move_to(1);
  }
  normalize(w);
  const auto g = Graph::implicit(group.descriptor(std::nullopt));
  out.boundary = vertex_boundary(g, w);
  out.w = std::move(w);
  out.ratio = static_cast<double>(out.boundary.size()) / static_cast<double>(out.w.size());
  std::int64_t reach = 0;
  for (const auto* s : {&out.w, &out.boundary})
    for (const auto& k : *s) reach = std::max(reach, group.word_length(group.from_key(k)));
  out.required_radius = reach + 1;
  if (ambient_radius && *ambient_radius < out.required_radius) {
    fail(ErrorKind::frontier, "ambient ball of radius " + std::to_string(*ambient_radius) +
                                  " is too small for W_" + std::to_string(n) + "; radius " +
                                  std::to_string(out.required_radius) + " is needed");
  }
  return out;
}

std::int64_t folner_required_radius(int n) { return lamplighter_folner(n, std::nullopt, n).required_radius; }

}  // namespace perclab
