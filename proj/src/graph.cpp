#include "perclab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <deque>
#include <sstream>
#include <unordered_set>

#include "perclab/error.hpp"
#include "perclab/rng.hpp"

namespace perclab {

// ---------------------------------------------------------------------------
// Keys

std::string to_string(const VertexKey& key) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < key.coords.size(); ++i) {
    if (i) out << ',';
    out << key.coords[i];
  }
  out << ')';
  if (!key.path.empty()) {
    out << '/';
    for (std::size_t i = 0; i < key.path.size(); ++i) {
      if (i) out << '.';
      out << static_cast<int>(key.path[i]);
    }
  }
  return out.str();
}

VertexKey parse_vertex_key(const std::string& text) {
  VertexKey key;
  const auto open = text.find('(');
  const auto close = text.find(')');
  require(open == 0 && close != std::string::npos, "malformed vertex key '" + text + "'");
  std::string body = text.substr(1, close - 1);
  std::istringstream coords(body);
  std::string item;
  while (std::getline(coords, item, ',')) {
    require(!item.empty(), "malformed vertex key '" + text + "'");
    key.coords.push_back(std::stoll(item));
  }
  if (close + 1 < text.size()) {
    require(text[close + 1] == '/', "malformed vertex key '" + text + "'");
    std::istringstream path(text.substr(close + 2));
    while (std::getline(path, item, '.')) {
      const int c = std::stoi(item);
      require(c >= 0 && c < 256, "malformed vertex key '" + text + "'");
      key.path.push_back(static_cast<std::uint8_t>(c));
    }
  }
  return key;
}

std::size_t VertexKeyHash::operator()(const VertexKey& key) const noexcept {
  return static_cast<std::size_t>(key_fingerprint(key));
}

void normalize(KeySet& set) {
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
}

std::uint64_t coords_fingerprint(std::span<const std::int64_t> coords) noexcept {
  std::uint64_t h = mix64(0x243f6a8885a308d3ULL + coords.size());
  for (auto c : coords) h = mix_pair(h, static_cast<std::uint64_t>(c));
  return h;
}

std::uint64_t key_fingerprint(const VertexKey& key) noexcept {
  std::uint64_t h = coords_fingerprint(key.coords);
  for (auto c : key.path) h = path_step(h, c);
  return h;
}

std::uint64_t plain_edge_fingerprint(std::uint64_t fp_lo, std::uint64_t fp_hi) noexcept {
  return mix_pair(fp_lo ^ 0x082efa98ec4e6c89ULL, fp_hi);
}

namespace {

bool is_tree_child(const VertexKey& parent, const VertexKey& child) {
  return parent.coords == child.coords && child.path.size() == parent.path.size() + 1 &&
         std::equal(parent.path.begin(), parent.path.end(), child.path.begin());
}

}  // namespace

std::uint64_t edge_fingerprint(const VertexKey& u, const VertexKey& v) noexcept {
  if (is_tree_child(u, v)) return tree_edge_fingerprint(key_fingerprint(v));
  if (is_tree_child(v, u)) return tree_edge_fingerprint(key_fingerprint(u));
  if (v < u) return plain_edge_fingerprint(key_fingerprint(v), key_fingerprint(u));
  return plain_edge_fingerprint(key_fingerprint(u), key_fingerprint(v));
}

// ---------------------------------------------------------------------------
// Descriptors

std::string to_string(Family family) {
  switch (family) {
    case Family::grid: return "grid";
    case Family::rooted_tree: return "rooted_tree";
    case Family::planted: return "planted";
    case Family::ray_tree: return "ray_tree";
    case Family::lamplighter: return "lamplighter_ball";
    case Family::zd_ball: return "zd_ball";
    case Family::custom: return "custom";
  }
  return "?";
}

Family parse_family(const std::string& name) {
  for (auto f : {Family::grid, Family::rooted_tree, Family::planted, Family::ray_tree,
                 Family::lamplighter, Family::zd_ball, Family::custom}) {
    if (to_string(f) == name) return f;
  }
  if (name == "lamplighter") return Family::lamplighter;
  fail(ErrorKind::invalid_argument, "unknown graph family '" + name + "'");
}

bool FamilyDescriptor::is_implicit() const {
  switch (family) {
    case Family::grid:
    case Family::zd_ball:
    case Family::lamplighter: return !radius.has_value();
    case Family::rooted_tree: return !depth.has_value();
    case Family::planted:
    case Family::ray_tree: return !radius.has_value() && !depth.has_value();
    case Family::custom: return false;
  }
  return false;
}

void FamilyDescriptor::validate() const {
  switch (family) {
    case Family::grid:
    case Family::zd_ball: require(d >= 1, "d must be >= 1"); break;
    case Family::rooted_tree: require(r >= 2, "r must be >= 2"); break;
    case Family::planted:
      require(d >= 1, "d must be >= 1");
      require(r >= 2, "r must be >= 2");
      require(radius.has_value() == depth.has_value(),
              "planted lattice needs both radius and depth, or neither");
      break;
    case Family::ray_tree:
      require(radius.has_value() == depth.has_value(),
              "ray_tree needs both radius (ray length) and depth, or neither");
      break;
    case Family::lamplighter:
    case Family::custom: break;
  }
  if (family == Family::grid && radius) require(*radius >= 1, "radius must be >= 1");
  if (radius) require(*radius >= 0, "radius must be >= 0");
  if (depth) require(*depth >= 0, "depth must be >= 0");
  require(r < 256, "r must be < 256");
}

void to_json(nlohmann::json& j, const FamilyDescriptor& desc) {
  j = nlohmann::json{{"family", to_string(desc.family)}};
  if (desc.d) j["d"] = desc.d;
  if (desc.r) j["r"] = desc.r;
  if (desc.radius) j["radius"] = *desc.radius;
  if (desc.depth) j["depth"] = *desc.depth;
}

void from_json(const nlohmann::json& j, FamilyDescriptor& desc) {
  require(j.is_object() && j.contains("family"), "graph descriptor needs a \"family\" field");
  desc = FamilyDescriptor{};
  desc.family = parse_family(j.at("family").get<std::string>());
  if (j.contains("d")) desc.d = j.at("d").get<int>();
  if (j.contains("r")) desc.r = j.at("r").get<int>();
  if (j.contains("radius")) desc.radius = j.at("radius").get<std::int64_t>();
  if (j.contains("depth")) desc.depth = j.at("depth").get<std::int64_t>();
  if (desc.family == Family::ray_tree) desc.r = 2;
  desc.validate();
}

// ---------------------------------------------------------------------------
// Implicit neighbor generators

namespace {

void lattice_neighbors(const std::vector<std::int64_t>& x, std::vector<VertexKey>& out) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::int64_t s : {-1, 1}) {
      VertexKey k;
      k.coords = x;
      k.coords[i] += s;
      out.push_back(std::move(k));
    }
  }
}

void tree_neighbors(const VertexKey& v, int r, std::vector<VertexKey>& out) {
  if (!v.path.empty()) {
    VertexKey parent{v.coords, {v.path.begin(), v.path.end() - 1}};
    out.push_back(std::move(parent));
  }
  for (int j = 0; j < r; ++j) {
    VertexKey child = v;
    child.path.push_back(static_cast<std::uint8_t>(j));
    out.push_back(std::move(child));
  }
}

void check_path(const VertexKey& v, int r) {
  for (auto c : v.path) require(c < r, "tree path entry out of range in " + to_string(v));
}

std::vector<VertexKey> generate(const FamilyDescriptor& desc, const VertexKey& v) {
  std::vector<VertexKey> out;
  switch (desc.family) {
    case Family::grid:
    case Family::zd_ball:
      require(v.coords.size() == static_cast<std::size_t>(desc.d) && v.path.empty(),
              "malformed lattice key " + to_string(v));
      lattice_neighbors(v.coords, out);
      break;
    case Family::rooted_tree:
      require(v.coords.empty(), "malformed tree key " + to_string(v));
      check_path(v, desc.r);
      tree_neighbors(v, desc.r, out);
      break;
    case Family::planted:
      require(v.coords.size() == static_cast<std::size_t>(desc.d),
              "malformed planted key " + to_string(v));
      check_path(v, desc.r);
      if (v.path.empty()) lattice_neighbors(v.coords, out);
      tree_neighbors(v, desc.r, out);
      break;
    case Family::ray_tree: {
      require(v.coords.size() == 1 && v.coords[0] >= 0, "malformed ray_tree key " + to_string(v));
      require(v.path.empty() || v.coords[0] == 0, "malformed ray_tree key " + to_string(v));
      check_path(v, 2);
      if (v.path.empty()) {
        const auto k = v.coords[0];
        if (k > 0) out.push_back(VertexKey{{k - 1}, {}});
        out.push_back(VertexKey{{k + 1}, {}});
        if (k == 0) tree_neighbors(v, 2, out);
      } else {
        tree_neighbors(v, 2, out);
      }
      break;
    }
    case Family::lamplighter: {
      require(!v.coords.empty() && v.path.empty(), "malformed lamplighter key " + to_string(v));
      for (std::size_t i = 2; i < v.coords.size(); ++i)
        require(v.coords[i - 1] < v.coords[i], "lamplighter lamps must be strictly increasing");
      const auto pos = v.coords[0];
      for (std::int64_t s : {-1, 1}) {
        VertexKey k = v;
        k.coords[0] = pos + s;
        out.push_back(std::move(k));
      }
      VertexKey toggled;
      toggled.coords.push_back(pos);
      bool found = false;
      for (std::size_t i = 1; i < v.coords.size(); ++i) {
        if (v.coords[i] == pos) {
          found = true;
          continue;
        }
        if (!found && v.coords[i] > pos) {
          toggled.coords.push_back(pos);
          found = true;
        }
        toggled.coords.push_back(v.coords[i]);
      }
      if (!found) toggled.coords.push_back(pos);
      out.push_back(std::move(toggled));
      break;
    }
    case Family::custom:
      fail(ErrorKind::invalid_argument, "custom graphs have no implicit backend");
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

NeighborFn Graph::family_neighbors(const FamilyDescriptor& desc) {
  return [desc](const VertexKey& v) { return generate(desc, v); };
}

// ---------------------------------------------------------------------------
// Graph

struct Graph::ExplicitStore {
  std::vector<VertexKey> keys;
  std::unordered_map<VertexKey, std::uint32_t, VertexKeyHash> index;
  std::vector<std::uint32_t> offsets;
  std::vector<std::uint32_t> adj;
  std::vector<std::uint32_t> adj_edge;
  std::vector<Edge> edges;
  std::vector<std::uint64_t> edge_fps;
  std::vector<std::uint8_t> frontier;
  std::vector<std::uint32_t> nominal_degree;
  std::uint32_t origin = 0;
};

void Graph::require_explicit() const {
  require(store_ != nullptr, "operation needs an explicit graph");
}

void Graph::validate_key(const VertexKey& v) const {
  if (store_) {
    require(store_->index.count(v) != 0, "vertex " + to_string(v) + " is not in the graph");
  } else {
    (void)generate(desc_, v);
  }
}

std::vector<VertexKey> Graph::neighbors(const VertexKey& v) const {
  if (!store_) return generate(desc_, v);
  const auto idx = index_of(v);
  require(idx.has_value(), "vertex " + to_string(v) + " is not in the graph");
  std::vector<VertexKey> out;
  for (auto u : adjacent(*idx)) out.push_back(store_->keys[u]);
  return out;
}

std::size_t Graph::nominal_degree(const VertexKey& v) const {
  if (store_) {
    const auto idx = index_of(v);
    require(idx.has_value(), "vertex " + to_string(v) + " is not in the graph");
    return store_->nominal_degree[*idx];
  }
  return generate(desc_, v).size();
}

bool Graph::is_frontier(const VertexKey& v) const {
  if (!store_) return false;
  const auto idx = index_of(v);
  require(idx.has_value(), "vertex " + to_string(v) + " is not in the graph");
  return store_->frontier[*idx] != 0;
}

std::size_t Graph::num_vertices() const {
  require_explicit();
  return store_->keys.size();
}

std::size_t Graph::num_edges() const {
  require_explicit();
  return store_->edges.size();
}

std::uint32_t Graph::origin_index() const {
  require_explicit();
  return store_->origin;
}

const VertexKey& Graph::key(std::uint32_t v) const { return store_->keys[v]; }

std::optional<std::uint32_t> Graph::index_of(const VertexKey& key) const {
  require_explicit();
  auto it = store_->index.find(key);
  if (it == store_->index.end()) return std::nullopt;
  return it->second;
}

std::span<const std::uint32_t> Graph::adjacent(std::uint32_t v) const {
  const auto b = store_->offsets[v], e = store_->offsets[v + 1];
  return {store_->adj.data() + b, e - b};
}

std::span<const std::uint32_t> Graph::incident_edges(std::uint32_t v) const {
  const auto b = store_->offsets[v], e = store_->offsets[v + 1];
  return {store_->adj_edge.data() + b, e - b};
}

bool Graph::is_frontier(std::uint32_t v) const { return store_->frontier[v] != 0; }

Graph::Edge Graph::edge(std::uint32_t e) const { return store_->edges[e]; }

std::uint64_t Graph::edge_fp(std::uint32_t e) const { return store_->edge_fps[e]; }

Graph Graph::implicit(FamilyDescriptor desc) {
  desc.validate();
  require(desc.family != Family::custom, "custom graphs have no implicit backend");
  Graph g;
  g.desc_ = desc;
  switch (desc.family) {
    case Family::grid:
    case Family::zd_ball:
    case Family::planted: g.origin_.coords.assign(desc.d, 0); break;
    case Family::ray_tree:
    case Family::lamplighter: g.origin_.coords = {0}; break;
    default: break;
  }
  return g;
}

Graph Graph::from_keys(FamilyDescriptor desc, KeySet keys, VertexKey origin,
                       const NeighborFn& generator,
                       const std::function<bool(const VertexKey&)>& extra_frontier) {
  normalize(keys);
  auto store = std::make_shared<ExplicitStore>();
  store->keys = std::move(keys);
  const auto n = store->keys.size();
  require(n < std::numeric_limits<std::uint32_t>::max(), "graph too large");
  store->index.reserve(n * 2);
  for (std::uint32_t i = 0; i < n; ++i) store->index.emplace(store->keys[i], i);
  auto oit = store->index.find(origin);
  require(oit != store->index.end(), "origin " + to_string(origin) + " is not in the vertex set");
  store->origin = oit->second;

  store->offsets.assign(n + 1, 0);
  store->frontier.assign(n, 0);
  store->nominal_degree.assign(n, 0);
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto nb = generator(store->keys[i]);
    store->nominal_degree[i] = static_cast<std::uint32_t>(nb.size());
    for (const auto& k : nb) {
      auto it = store->index.find(k);
      if (it == store->index.end()) {
        store->frontier[i] = 1;
      } else {
        require(it->second != i, "self-loop at " + to_string(k));
        adj[i].push_back(it->second);
      }
    }
    if (extra_frontier && extra_frontier(store->keys[i])) store->frontier[i] = 1;
  }
  // Neighbor indices inherit canonical key order because keys are sorted.
  for (std::uint32_t i = 0; i < n; ++i) {
    std::sort(adj[i].begin(), adj[i].end());
    require(std::adjacent_find(adj[i].begin(), adj[i].end()) == adj[i].end(), "parallel edge");
    store->offsets[i + 1] = store->offsets[i] + static_cast<std::uint32_t>(adj[i].size());
  }
  store->adj.resize(store->offsets[n]);
  store->adj_edge.resize(store->offsets[n]);
  for (std::uint32_t i = 0; i < n; ++i) {
    std::copy(adj[i].begin(), adj[i].end(), store->adj.begin() + store->offsets[i]);
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t s = store->offsets[i]; s < store->offsets[i + 1]; ++s) {
      const auto j = store->adj[s];
      if (i < j) {
        const auto e = static_cast<std::uint32_t>(store->edges.size());
        store->edges.push_back({i, j});
        store->edge_fps.push_back(edge_fingerprint(store->keys[i], store->keys[j]));
        store->adj_edge[s] = e;
        // Mirror slot in j's list.
        auto nb = std::span<const std::uint32_t>(store->adj.data() + store->offsets[j],
                                                 store->offsets[j + 1] - store->offsets[j]);
        auto pos = std::lower_bound(nb.begin(), nb.end(), i) - nb.begin();
        require(pos < static_cast<std::ptrdiff_t>(nb.size()) && nb[pos] == i,
                "asymmetric neighbor generator at " + to_string(store->keys[i]));
        store->adj_edge[store->offsets[j] + pos] = e;
      }
    }
  }
  Graph g;
  g.desc_ = std::move(desc);
  g.origin_ = std::move(origin);
  g.store_ = std::move(store);
  return g;
}

Graph Graph::from_edges(std::size_t n,
                        const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                        std::uint32_t origin, std::vector<std::uint8_t> frontier) {
  require(origin < n, "origin out of range");
  std::vector<std::vector<VertexKey>> nb(n);
  auto key_of = [](std::size_t i) { return VertexKey{{static_cast<std::int64_t>(i)}, {}}; };
  for (auto [u, v] : edges) {
    require(u < n && v < n, "edge endpoint out of range");
    require(u != v, "self-loops are not allowed");
    nb[u].push_back(key_of(v));
    nb[v].push_back(key_of(u));
  }
  KeySet keys;
  for (std::size_t i = 0; i < n; ++i) keys.push_back(key_of(i));
  if (frontier.empty()) frontier.assign(n, 0);
  require(frontier.size() == n, "frontier mask size mismatch");
  FamilyDescriptor desc;
  desc.family = Family::custom;
  return from_keys(
      desc, std::move(keys), key_of(origin),
      [&](const VertexKey& k) {
        auto out = nb[static_cast<std::size_t>(k.coords[0])];
        std::sort(out.begin(), out.end());
        return out;
      },
      [&](const VertexKey& k) { return frontier[static_cast<std::size_t>(k.coords[0])] != 0; });
}

// ---------------------------------------------------------------------------
// Builders

namespace {

void check_cap(long double count, const BuildOptions& opts, const std::string& what) {
  if (count > static_cast<long double>(opts.max_vertices)) {
    std::ostringstream msg;
    msg << what << " would have " << static_cast<double>(count) << " vertices, above the explicit cap of "
        << opts.max_vertices << "; use the implicit backend or a smaller extent";
    fail(ErrorKind::size_cap, msg.str());
  }
}

long double tree_count(int r, std::int64_t depth) {
  long double total = 0, level = 1;
  for (std::int64_t i = 0; i <= depth; ++i) {
    total += level;
    level *= r;
    if (total > 1e30L) break;
  }
  return total;
}

void box_points(int d, std::int64_t radius, std::vector<std::vector<std::int64_t>>& out) {
  std::vector<std::int64_t> x(d, -radius);
  while (true) {
    out.push_back(x);
    int i = 0;
    while (i < d && x[i] == radius) x[i++] = -radius;
    if (i == d) break;
    ++x[i];
  }
}

void tree_paths(int r, std::int64_t depth, const VertexKey& root, KeySet& out) {
  std::vector<VertexKey> level{root};
  out.push_back(root);
  for (std::int64_t dd = 0; dd < depth; ++dd) {
    std::vector<VertexKey> next;
    next.reserve(level.size() * r);
    for (const auto& v : level) {
      for (int j = 0; j < r; ++j) {
        VertexKey c = v;
        c.path.push_back(static_cast<std::uint8_t>(j));
        out.push_back(c);
        next.push_back(std::move(c));
      }
    }
    level = std::move(next);
  }
}

Graph build_ball(FamilyDescriptor desc, const BuildOptions& opts) {
  const auto origin = Graph::implicit(desc).origin();
  const auto radius = *desc.radius;
  auto gen = Graph::family_neighbors(desc);
  std::unordered_map<VertexKey, std::int64_t, VertexKeyHash> dist{{origin, 0}};
  std::deque<VertexKey> queue{origin};
  while (!queue.empty()) {
    auto v = std::move(queue.front());
    queue.pop_front();
    const auto dv = dist.at(v);
    if (dv == radius) continue;
    for (auto& u : gen(v)) {
      if (dist.count(u)) continue;
      dist.emplace(u, dv + 1);
      check_cap(static_cast<long double>(dist.size()), opts, to_string(desc.family) + " ball");
      queue.push_back(std::move(u));
    }
  }
  KeySet keys;
  keys.reserve(dist.size());
  for (const auto& [k, _] : dist) keys.push_back(k);
  return Graph::from_keys(desc, std::move(keys), origin, gen,
                          [&](const VertexKey& k) { return dist.at(k) == radius; });
}

}  // namespace

Graph build_lattice(int d) {
  FamilyDescriptor desc;
  desc.family = Family::grid;
  desc.d = d;
  return Graph::implicit(desc);
}

Graph build_grid(int d, std::int64_t radius, const BuildOptions& opts) {
  FamilyDescriptor desc;
  desc.family = Family::grid;
  desc.d = d;
  desc.radius = radius;
  desc.validate();
  check_cap(std::pow(static_cast<long double>(2 * radius + 1), d), opts, "grid box");
  std::vector<std::vector<std::int64_t>> pts;
  box_points(d, radius, pts);
  KeySet keys;
  keys.reserve(pts.size());
  for (auto& x : pts) keys.push_back(VertexKey{std::move(x), {}});
  return Graph::from_keys(desc, std::move(keys), VertexKey{std::vector<std::int64_t>(d, 0), {}},
                          Graph::family_neighbors(desc));
}

Graph build_rooted_tree(int r, std::optional<std::int64_t> depth, const BuildOptions& opts) {
  FamilyDescriptor desc;
  desc.family = Family::rooted_tree;
  desc.r = r;
  desc.depth = depth;
  desc.validate();
  if (!depth) return Graph::implicit(desc);
  check_cap(tree_count(r, *depth), opts, "rooted tree");
  KeySet keys;
  tree_paths(r, *depth, VertexKey{}, keys);
  return Graph::from_keys(desc, std::move(keys), VertexKey{}, Graph::family_neighbors(desc));
}

Graph build_planted_lattice(int d, int r, std::optional<PlantedExtent> extent,
                            const BuildOptions& opts) {
  FamilyDescriptor desc;
  desc.family = Family::planted;
  desc.d = d;
  desc.r = r;
  if (extent) {
    desc.radius = extent->radius;
    desc.depth = extent->depth;
  }
  desc.validate();
  if (!extent) return Graph::implicit(desc);
  check_cap(std::pow(static_cast<long double>(2 * extent->radius + 1), d) * tree_count(r, extent->depth),
            opts, "planted lattice");
  std::vector<std::vector<std::int64_t>> pts;
  box_points(d, extent->radius, pts);
  KeySet keys;
  for (auto& x : pts) tree_paths(r, extent->depth, VertexKey{std::move(x), {}}, keys);
  return Graph::from_keys(desc, std::move(keys), VertexKey{std::vector<std::int64_t>(d, 0), {}},
                          Graph::family_neighbors(desc));
}

Graph build_ray_plus_tree(std::optional<RayTreeExtent> extent, const BuildOptions& opts) {
  FamilyDescriptor desc;
  desc.family = Family::ray_tree;
  desc.r = 2;
  if (extent) {
    desc.radius = extent->ray_length;
    desc.depth = extent->depth;
  }
  desc.validate();
  if (!extent) return Graph::implicit(desc);
  check_cap(static_cast<long double>(extent->ray_length) + tree_count(2, extent->depth), opts,
            "ray+tree");
  KeySet keys;
  tree_paths(2, extent->depth, VertexKey{{0}, {}}, keys);
  for (std::int64_t k = 1; k <= extent->ray_length; ++k) keys.push_back(VertexKey{{k}, {}});
  return Graph::from_keys(desc, std::move(keys), VertexKey{{0}, {}}, Graph::family_neighbors(desc));
}

Graph build_graph(const FamilyDescriptor& desc, const BuildOptions& opts) {
  desc.validate();
  switch (desc.family) {
    case Family::grid:
      return desc.radius ? build_grid(desc.d, *desc.radius, opts) : build_lattice(desc.d);
    case Family::rooted_tree: return build_rooted_tree(desc.r, desc.depth, opts);
    case Family::planted:
      if (desc.is_implicit()) return build_planted_lattice(desc.d, desc.r, std::nullopt, opts);
      return build_planted_lattice(desc.d, desc.r, PlantedExtent{*desc.radius, *desc.depth}, opts);
    case Family::ray_tree:
      if (desc.is_implicit()) return build_ray_plus_tree(std::nullopt, opts);
      return build_ray_plus_tree(RayTreeExtent{*desc.radius, *desc.depth}, opts);
    case Family::zd_ball:
    case Family::lamplighter:
      if (desc.is_implicit()) return Graph::implicit(desc);
      return build_ball(desc, opts);
    case Family::custom: break;
  }
  fail(ErrorKind::invalid_argument, "custom graphs cannot be built from a descriptor");
}

std::vector<VertexKey> neighbors(const Graph& g, const VertexKey& v) { return g.neighbors(v); }

}  // namespace perclab
