#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "perclab/rng.hpp"

namespace perclab {

/// Canonical vertex encoding shared by all graph families.
///
///   grid / Z^d ball:  coords = lattice point, path empty
///   rooted tree:      coords empty, path = child indices from the root
///   planted lattice:  coords = lattice point, path = child indices inside
///                     the tree planted there (empty path: the lattice vertex)
///   ray + tree:       coords = {k}; path empty is ray vertex k (k = 0 is the
///                     tree root), nonempty path lives in the tree, with k = 0
///   lamplighter:      coords = {position, lit lamps in increasing order}
///
/// Keys are ordered lexicographically by (coords, path).
struct VertexKey {
  std::vector<std::int64_t> coords;
  std::vector<std::uint8_t> path;

  friend auto operator<=>(const VertexKey&, const VertexKey&) = default;
  friend bool operator==(const VertexKey&, const VertexKey&) = default;
};

std::string to_string(const VertexKey& key);
VertexKey parse_vertex_key(const std::string& text);

struct VertexKeyHash {
  std::size_t operator()(const VertexKey& key) const noexcept;
};

using KeySet = std::vector<VertexKey>;  // kept sorted and unique

void normalize(KeySet& set);

// Fingerprints. The fold over `path` is incremental, so a tree child's
// fingerprint is path_step(parent fingerprint, child index).
std::uint64_t coords_fingerprint(std::span<const std::int64_t> coords) noexcept;
inline std::uint64_t path_step(std::uint64_t parent_fp, std::uint8_t child) noexcept {
  return mix64(parent_fp ^ (0x13198a2e03707344ULL * (std::uint64_t{child} + 1)));
}
std::uint64_t key_fingerprint(const VertexKey& key) noexcept;
inline std::uint64_t tree_edge_fingerprint(std::uint64_t child_fp) noexcept {
  return child_fp ^ 0xa4093822299f31d0ULL;
}
std::uint64_t plain_edge_fingerprint(std::uint64_t fp_lo, std::uint64_t fp_hi) noexcept;

/// Canonical fingerprint of the undirected edge {u, v}; symmetric.
std::uint64_t edge_fingerprint(const VertexKey& u, const VertexKey& v) noexcept;

enum class Family { grid, rooted_tree, planted, ray_tree, lamplighter, zd_ball, custom };

std::string to_string(Family family);
Family parse_family(const std::string& name);

/// Serializable graph descriptor. A descriptor without the truncation
/// parameters of its family describes the implicit (infinite) graph.
///
/// `radius` is the box radius for grid / planted, the ball radius for
/// zd_ball / lamplighter, and the ray length for ray_tree.
struct FamilyDescriptor {
  Family family = Family::grid;
  int d = 0;
  int r = 0;
  std::optional<std::int64_t> radius;
  std::optional<std::int64_t> depth;

  bool is_implicit() const;
  void validate() const;

  friend bool operator==(const FamilyDescriptor&, const FamilyDescriptor&) = default;
};

void to_json(nlohmann::json& j, const FamilyDescriptor& desc);
void from_json(const nlohmann::json& j, FamilyDescriptor& desc);

inline constexpr std::size_t kDefaultExplicitCap = 5'000'000;

struct BuildOptions {
  std::size_t max_vertices = kDefaultExplicitCap;
};

using NeighborFn = std::function<std::vector<VertexKey>(const VertexKey&)>;

/// Immutable graph, either materialized (explicit) or generated on demand
/// (implicit). Copies share storage.
class Graph {
 public:
  struct Edge {
    std::uint32_t u;
    std::uint32_t v;  // u < v
  };

  const FamilyDescriptor& descriptor() const noexcept { return desc_; }
  bool is_explicit() const noexcept { return store_ != nullptr; }
  const VertexKey& origin() const noexcept { return origin_; }

  /// Neighbors in canonical order. For explicit graphs the result is
  /// restricted to the materialized vertex set.
  std::vector<VertexKey> neighbors(const VertexKey& v) const;

  /// Nominal degree of `v` in the untruncated family graph.
  std::size_t nominal_degree(const VertexKey& v) const;

  /// Frontier flag; always false on implicit graphs.
  bool is_frontier(const VertexKey& v) const;

  // Index-based access, explicit backend only.
  std::size_t num_vertices() const;
  std::size_t num_edges() const;
  std::uint32_t origin_index() const;
  const VertexKey& key(std::uint32_t v) const;
  std::optional<std::uint32_t> index_of(const VertexKey& key) const;
  std::span<const std::uint32_t> adjacent(std::uint32_t v) const;
  std::span<const std::uint32_t> incident_edges(std::uint32_t v) const;
  bool is_frontier(std::uint32_t v) const;
  Edge edge(std::uint32_t e) const;
  std::uint64_t edge_fp(std::uint32_t e) const;

  /// Key-level neighbor generator of the implicit family underlying `desc`.
  static NeighborFn family_neighbors(const FamilyDescriptor& desc);

  /// Restricts `generator` to `keys`. A vertex is frontier when one of its
  /// generated neighbors is missing, or when `extra_frontier` says so.
  static Graph from_keys(FamilyDescriptor desc, KeySet keys, VertexKey origin,
                         const NeighborFn& generator,
                         const std::function<bool(const VertexKey&)>& extra_frontier = {});

  /// Arbitrary small graph on vertices {0..n-1} (keys coords = {i}); used for
  /// oracles and closures. Self-loops and duplicate edges are rejected.
  static Graph from_edges(std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                          std::uint32_t origin, std::vector<std::uint8_t> frontier = {});

  static Graph implicit(FamilyDescriptor desc);

 private:
  struct ExplicitStore;

  Graph() = default;
  void require_explicit() const;
  void validate_key(const VertexKey& v) const;

  FamilyDescriptor desc_;
  VertexKey origin_;
  std::shared_ptr<const ExplicitStore> store_;
};

/// Builds the graph a descriptor names (explicit or implicit).
Graph build_graph(const FamilyDescriptor& desc, const BuildOptions& opts = {});

Graph build_grid(int d, std::int64_t radius, const BuildOptions& opts = {});
Graph build_lattice(int d);  // implicit Z^d

/// `depth` empty: implicit unbounded tree.
Graph build_rooted_tree(int r, std::optional<std::int64_t> depth, const BuildOptions& opts = {});

struct PlantedExtent {
  std::int64_t radius;
  std::int64_t depth;
};
Graph build_planted_lattice(int d, int r, std::optional<PlantedExtent> extent,
                            const BuildOptions& opts = {});

struct RayTreeExtent {
  std::int64_t ray_length;
  std::int64_t depth;
};
Graph build_ray_plus_tree(std::optional<RayTreeExtent> extent, const BuildOptions& opts = {});

std::vector<VertexKey> neighbors(const Graph& g, const VertexKey& v);

}  // namespace perclab
