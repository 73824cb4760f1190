#include "perclab/percolation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <deque>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "perclab/error.hpp"

namespace perclab {

std::string to_string(ClusterStatus status) {
  switch (status) {
    case ClusterStatus::finite: return "finite";
    case ClusterStatus::censored_frontier: return "censored_frontier";
    case ClusterStatus::censored_cap: return "censored_cap";
  }
  return "?";
}

namespace {

ClusterSample capped(std::size_t size_cap) { return {size_cap + 1, ClusterStatus::censored_cap}; }

// ---------------------------------------------------------------------------
// Generic engine: key-level BFS with an edge memo.

ClusterSample sample_generic(const Graph& g, double p, const SampleStream& stream, std::size_t size_cap,
                             EdgeAudit* audit) {
  EdgeAudit local;
  EdgeAudit& a = audit ? *audit : local;
  std::unordered_set<VertexKey, VertexKeyHash> members{g.origin()};
  std::unordered_map<std::uint64_t, bool> memo;
  std::deque<VertexKey> queue{g.origin()};
  std::size_t size = 1;
  if (g.is_frontier(g.origin())) return {size, ClusterStatus::censored_frontier};
  if (size > size_cap) return capped(size_cap);
  while (!queue.empty()) {
    const auto v = std::move(queue.front());
    queue.pop_front();
    for (auto& u : g.neighbors(v)) {
      const auto fp = edge_fingerprint(v, u);
      const bool fresh = stream.edge_uniform(fp) < p;
      bool open;
      if (auto it = memo.find(fp); it != memo.end()) {
        ++a.revisits;
        if (it->second != fresh) ++a.mismatches;
        open = it->second;
      } else {
        ++a.decisions;
        memo.emplace(fp, fresh);
        open = fresh;
      }
      if (!open || members.count(u)) continue;
      ++size;
      if (g.is_frontier(u)) return {size, ClusterStatus::censored_frontier};
      if (size > size_cap) return capped(size_cap);
      members.insert(u);
      queue.push_back(std::move(u));
    }
  }
  return {size, ClusterStatus::finite};
}

// ---------------------------------------------------------------------------
// Indexed engine over explicit graphs.

struct IndexedWorkspace {
  std::vector<std::uint32_t> stamp;
  std::uint32_t epoch = 0;
  std::vector<std::uint32_t> queue;
  const void* owner = nullptr;
};

ClusterSample sample_indexed(const Graph& g, double p, const SampleStream& stream, std::size_t size_cap) {
  thread_local IndexedWorkspace ws;
  const auto n = g.num_vertices();
  if (ws.stamp.size() != n || ws.owner != &g || ws.epoch == UINT32_MAX) {
    ws.stamp.assign(n, 0);
    ws.epoch = 0;
    ws.owner = &g;
  }
  const auto epoch = ++ws.epoch;
  ws.queue.clear();
  const auto origin = g.origin_index();
  ws.stamp[origin] = epoch;
  ws.queue.push_back(origin);
  std::size_t size = 1;
  if (g.is_frontier(origin)) return {size, ClusterStatus::censored_frontier};
  if (size > size_cap) return capped(size_cap);
  for (std::size_t head = 0; head < ws.queue.size(); ++head) {
    const auto v = ws.queue[head];
    const auto nb = g.adjacent(v);
    const auto inc = g.incident_edges(v);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      const auto u = nb[i];
      if (ws.stamp[u] == epoch) continue;
      if (!(stream.edge_uniform(g.edge_fp(inc[i])) < p)) continue;
      ws.stamp[u] = epoch;
      ++size;
      if (g.is_frontier(u)) return {size, ClusterStatus::censored_frontier};
      if (size > size_cap) return capped(size_cap);
      ws.queue.push_back(u);
    }
  }
  return {size, ClusterStatus::finite};
}

// ---------------------------------------------------------------------------
// Structured engine: a base graph (Z^d, the ray, or a single point) with
// rooted r-ary trees planted at some base vertices. Trees are acyclic, so
// tree growth needs no membership set.

enum class Base { lattice, ray, point };

struct StructuredShape {
  Base base = Base::lattice;
  int d = 0;
  int r = 0;               // 0: no trees
  bool tree_everywhere = true;  // false: only at the base origin
};

std::optional<StructuredShape> structured_shape(const FamilyDescriptor& desc) {
  if (!desc.is_implicit()) return std::nullopt;
  switch (desc.family) {
    case Family::grid:
    case Family::zd_ball: return StructuredShape{Base::lattice, desc.d, 0, true};
    case Family::planted: return StructuredShape{Base::lattice, desc.d, desc.r, true};
    case Family::rooted_tree: return StructuredShape{Base::point, 0, desc.r, false};
    case Family::ray_tree: return StructuredShape{Base::ray, 1, 2, false};
    default: return std::nullopt;
  }
}

/// Open-addressing set of coordinate vectors of a fixed dimension.
class CoordSet {
 public:
  void reset(int d) {
    if (d != d_) {
      d_ = d;
      slots_.assign(1024, 0);
    } else {
      for (auto s : used_) slots_[s] = 0;
    }
    used_.clear();
    coords_.clear();
    fps_.clear();
  }

  std::size_t size() const noexcept { return fps_.size(); }
  const std::int64_t* coords(std::size_t i) const noexcept { return coords_.data() + i * d_; }
  std::uint64_t fp(std::size_t i) const noexcept { return fps_[i]; }

  /// Inserts x; returns false if already present.
  bool insert(const std::int64_t* x, std::uint64_t fp) {
    if (2 * (fps_.size() + 1) > slots_.size()) grow();
    auto s = find_slot(x, fp);
    if (slots_[s] != 0) return false;
    slots_[s] = static_cast<std::uint32_t>(fps_.size() + 1);
    used_.push_back(s);
    coords_.insert(coords_.end(), x, x + d_);
    fps_.push_back(fp);
    return true;
  }

  bool contains(const std::int64_t* x, std::uint64_t fp) const { return slots_[find_slot(x, fp)] != 0; }

 private:
  std::size_t find_slot(const std::int64_t* x, std::uint64_t fp) const {
    const std::size_t mask = slots_.size() - 1;
    std::size_t s = static_cast<std::size_t>(fp) & mask;
    while (slots_[s] != 0) {
      const auto i = slots_[s] - 1;
      if (fps_[i] == fp && std::equal(x, x + d_, coords_.data() + i * d_)) return s;
      s = (s + 1) & mask;
    }
    return s;
  }

  void grow() {
    slots_.assign(slots_.size() * 2, 0);
    used_.clear();
    for (std::size_t i = 0; i < fps_.size(); ++i) {
      const auto s = find_slot(coords_.data() + i * d_, fps_[i]);
      slots_[s] = static_cast<std::uint32_t>(i + 1);
      used_.push_back(s);
    }
  }

  int d_ = -1;
  std::vector<std::uint32_t> slots_;
  std::vector<std::size_t> used_;
  std::vector<std::int64_t> coords_;
  std::vector<std::uint64_t> fps_;
};

struct StructuredWorkspace {
  CoordSet base;
  std::vector<std::uint64_t> tree_stack;
  std::vector<std::int64_t> scratch;
};

/// Adds the open part of the tree rooted at a vertex with fingerprint
/// `root_fp`; returns false if the running size exceeded the cap.
bool grow_tree(std::uint64_t root_fp, int r, double p, const SampleStream& stream, std::size_t size_cap,
               std::size_t& size, std::vector<std::uint64_t>& stack) {
  // Children are written unconditionally and kept by advancing the top, so
  // the open/closed decision costs no branch.
  if (stack.size() < 1024) stack.resize(1024);
  std::size_t top = 0;
  stack[top++] = root_fp;
  while (top > 0) {
    const auto fp = stack[--top];
    if (top + r > stack.size()) stack.resize(2 * stack.size());
    std::uint64_t* out = stack.data();
    for (int j = 0; j < r; ++j) {
      const auto child = path_step(fp, static_cast<std::uint8_t>(j));
      const bool open = stream.edge_uniform(tree_edge_fingerprint(child)) < p;
      out[top] = child;
      top += open;
      size += open;
    }
    if (size > size_cap) return false;
  }
  return true;
}

ClusterSample sample_structured(const StructuredShape& shape, double p, const SampleStream& stream,
                                std::size_t size_cap) {
  thread_local StructuredWorkspace ws;
  std::size_t size = 1;
  if (size > size_cap) return capped(size_cap);
  if (shape.base == Base::point) {
    const auto root_fp = coords_fingerprint({});
    if (!grow_tree(root_fp, shape.r, p, stream, size_cap, size, ws.tree_stack)) return capped(size_cap);
    return {size, ClusterStatus::finite};
  }
  const int d = shape.d;
  auto& set = ws.base;
  set.reset(d);
  ws.scratch.assign(static_cast<std::size_t>(d), 0);
  set.insert(ws.scratch.data(), coords_fingerprint(ws.scratch));
  std::vector<std::int64_t> x(d), y(d);
  for (std::size_t head = 0; head < set.size(); ++head) {
    std::copy(set.coords(head), set.coords(head) + d, x.begin());
    const auto fx = set.fp(head);
    if (shape.r > 0 && (shape.tree_everywhere || head == 0)) {
      if (!grow_tree(fx, shape.r, p, stream, size_cap, size, ws.tree_stack)) return capped(size_cap);
    }
    for (int i = 0; i < d; ++i) {
      for (int s : {-1, 1}) {
        if (shape.base == Base::ray && s < 0 && x[0] == 0) continue;
        y = x;
        y[i] += s;
        const auto fy = coords_fingerprint(y);
        if (set.contains(y.data(), fy)) continue;
        // x < y in key order iff s = +1.
        const auto efp = s > 0 ? plain_edge_fingerprint(fx, fy) : plain_edge_fingerprint(fy, fx);
        if (!(stream.edge_uniform(efp) < p)) continue;
        set.insert(y.data(), fy);
        if (++size > size_cap) return capped(size_cap);
      }
    }
  }
  return {size, ClusterStatus::finite};
}

}  // namespace

ClusterSample sample_origin_cluster(const Graph& g, double p, const SampleStream& stream,
                                    std::size_t size_cap, Engine engine, EdgeAudit* audit) {
  require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
  require(size_cap >= 1, "size_cap must be >= 1");
  if (engine == Engine::automatic) {
    if (g.is_explicit()) {
      engine = Engine::indexed;
    } else if (structured_shape(g.descriptor())) {
      engine = Engine::structured;
    } else {
      engine = Engine::generic;
    }
  }
  switch (engine) {
    case Engine::indexed:
      require(g.is_explicit(), "the indexed engine needs an explicit graph");
      return sample_indexed(g, p, stream, size_cap);
    case Engine::structured: {
      const auto shape = structured_shape(g.descriptor());
      require(shape.has_value(), "the structured engine supports implicit lattice, tree, planted and "
                                 "ray_tree graphs only");
      return sample_structured(*shape, p, stream, size_cap);
    }
    case Engine::generic:
    case Engine::automatic: break;
  }
  return sample_generic(g, p, stream, size_cap, audit);
}

ClusterSample sample_compositional(int d, double p, const OffspringDist& offspring,
                                   const SampleStream& stream, std::size_t size_cap) {
  require(d >= 1, "d must be >= 1");
  require(size_cap >= 1, "size_cap must be >= 1");
  const auto lattice = sample_structured(StructuredShape{Base::lattice, d, 0, true}, p, stream, size_cap);
  if (lattice.status != ClusterStatus::finite) return lattice;
  CounterRng rng(stream.substream(1));
  std::size_t total = 0;
  for (std::size_t j = 0; j < lattice.size; ++j) {
    std::size_t pending = 1;
    while (pending > 0) {
      --pending;
      if (++total > size_cap) return capped(size_cap);
      pending += static_cast<std::size_t>(offspring.draw(rng));
    }
  }
  return {total, ClusterStatus::finite};
}

// ---------------------------------------------------------------------------
// Specs and histograms

namespace {

std::string sampler_name(Sampler s) { return s == Sampler::direct ? "direct" : "compositional"; }

}  // namespace

void SampleSpec::validate() const {
  graph.validate();
  require(p >= 0.0 && p <= 1.0, "p: must lie in [0, 1]");
  require(n_samples >= 1, "n_samples: must be >= 1");
  require(size_cap >= 1, "size_cap: must be >= 1");
  if (sampler == Sampler::compositional) {
    require(graph.family == Family::planted && graph.is_implicit(),
            "sampler: compositional sampling needs an implicit planted graph");
  }
}

void to_json(nlohmann::json& j, const SampleSpec& spec) {
  j = nlohmann::json{{"graph", spec.graph},       {"p", spec.p},
                     {"seed", spec.seed},         {"n_samples", spec.n_samples},
                     {"size_cap", spec.size_cap}, {"sampler", sampler_name(spec.sampler)}};
}

void from_json(const nlohmann::json& j, SampleSpec& spec) {
  spec = SampleSpec{};
  spec.graph = j.at("graph").get<FamilyDescriptor>();
  spec.p = j.at("p").get<double>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.n_samples = j.at("n_samples").get<std::uint64_t>();
  if (j.contains("size_cap")) spec.size_cap = j.at("size_cap").get<std::size_t>();
  if (j.contains("sampler")) {
    const auto name = j.at("sampler").get<std::string>();
    require(name == "direct" || name == "compositional", "sampler: unknown sampler '" + name + "'");
    spec.sampler = name == "direct" ? Sampler::direct : Sampler::compositional;
  }
}

void SizeHistogram::add(const ClusterSample& s) {
  ++n_samples;
  switch (s.status) {
    case ClusterStatus::finite: ++counts[s.size]; break;
    case ClusterStatus::censored_frontier: ++censored_frontier; break;
    case ClusterStatus::censored_cap: ++censored_cap; break;
  }
}

void SizeHistogram::merge(const SizeHistogram& other) {
  for (const auto& [n, c] : other.counts) counts[n] += c;
  censored_frontier += other.censored_frontier;
  censored_cap += other.censored_cap;
  n_samples += other.n_samples;
}

std::uint64_t SizeHistogram::finite_count() const {
  std::uint64_t total = 0;
  for (const auto& [n, c] : counts) total += c;
  return total;
}

std::uint64_t SizeHistogram::finite_at_least(std::size_t n) const {
  std::uint64_t total = 0;
  for (auto it = counts.lower_bound(n); it != counts.end(); ++it) total += it->second;
  return total;
}

nlohmann::json SizeHistogram::content_json() const {
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [n, c] : counts) hist[std::to_string(n)] = c;
  return nlohmann::json{{"spec", spec},
                        {"histogram", hist},
                        {"censored_frontier", censored_frontier},
                        {"censored_cap", censored_cap},
                        {"n_samples", n_samples}};
}

nlohmann::json SizeHistogram::record_json() const {
  auto j = content_json();
  j["wall_time"] = wall_time;
  return j;
}

SizeHistogram SizeHistogram::from_json(const nlohmann::json& record) {
  SizeHistogram h;
  h.spec = record.at("spec").get<SampleSpec>();
  for (const auto& [n, c] : record.at("histogram").items()) {
    h.counts[std::stoul(n)] = c.get<std::uint64_t>();
  }
  h.censored_frontier = record.value("censored_frontier", std::uint64_t{0});
  h.censored_cap = record.value("censored_cap", std::uint64_t{0});
  h.n_samples = record.at("n_samples").get<std::uint64_t>();
  h.wall_time = record.value("wall_time", 0.0);
  require(h.finite_count() + h.censored() == h.n_samples,
          "histogram record violates counts + censored = n_samples");
  return h;
}

bool SizeHistogram::same_content(const SizeHistogram& other) const {
  return spec == other.spec && counts == other.counts && censored_frontier == other.censored_frontier &&
         censored_cap == other.censored_cap && n_samples == other.n_samples;
}

ClusterSample sample_one(const SampleSpec& spec, const Graph& g, std::uint64_t index) {
  const SampleStream stream(spec.seed, index);
  if (spec.sampler == Sampler::compositional) {
    return sample_compositional(spec.graph.d, spec.p, OffspringDist::binomial(spec.graph.r, spec.p), stream,
                                spec.size_cap);
  }
  return sample_origin_cluster(g, spec.p, stream, spec.size_cap);
}

SizeHistogram run_batch(const SampleSpec& spec, unsigned workers) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  const Graph g = build_graph(spec.graph);
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t chunks = (spec.n_samples + kChunk - 1) / kChunk;
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks));
  std::atomic<std::uint64_t> next{0};
  std::vector<SizeHistogram> partial(workers);
  auto work = [&](unsigned w) {
    for (std::uint64_t c = next++; c < chunks; c = next++) {
      const auto end = std::min(spec.n_samples, (c + 1) * kChunk);
      for (auto i = c * kChunk; i < end; ++i) partial[w].add(sample_one(spec, g, i));
    }
  };
  if (workers <= 1) {
    partial.resize(1);
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  SizeHistogram out;
  out.spec = spec;
  for (const auto& h : partial) out.merge(h);
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace perclab
