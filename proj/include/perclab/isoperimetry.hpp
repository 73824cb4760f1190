#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "perclab/exact_enum.hpp"
#include "perclab/graph.hpp"

namespace perclab {

/// Vertices outside W adjacent to W. Works on explicit graphs (W must avoid
/// the frontier, where neighborhoods are cut) and on implicit graphs.
KeySet vertex_boundary(const Graph& g, const KeySet& w);

/// Boundary vertices joined to the frontier by a path that avoids W and its
/// boundary except at its start. Explicit graphs only; the frontier stands in
/// for infinity, so W and its boundary must avoid it.
KeySet exterior_boundary(const Graph& g, const KeySet& w);

struct BoundaryReport {
  KeySet w;
  KeySet boundary;
  std::optional<KeySet> exterior;
  double ratio = 0.0;
  std::optional<double> exterior_ratio;
};

BoundaryReport boundary_report(const Graph& g, const KeySet& w, bool with_exterior);
void to_json(nlohmann::json& j, const BoundaryReport& report);

struct CheegerResult {
  std::size_t boundary = 0;  // ratio = boundary / size, kept exact
  std::size_t size = 0;
  KeySet witness;
  std::size_t sets_examined = 0;

  double ratio() const noexcept { return static_cast<double>(boundary) / static_cast<double>(size); }
};

/// Exact minimum of |dW| / |W| over connected W with |W| <= max_size that
/// avoid frontier vertices. Anchored: W contains `anchor`. Unanchored: every
/// connected W (each enumerated once, rooted at its smallest vertex). Ties
/// keep the first set in enumeration order.
CheegerResult cheeger_bruteforce(const Graph& g, std::size_t max_size, std::optional<VertexKey> anchor,
                                 const EnumOptions& opts = {});

/// True iff S induces a connected subgraph of the k-closure of g, i.e. the
/// members of S can be chained with hops of graph distance <= k. Works on
/// implicit graphs too (distances are measured in the whole graph).
bool check_kclosure_connected(const Graph& g, const KeySet& s, int k);

struct FolnerSet {
  int n = 0;
  std::size_t box_size = 0;  // |B_n|
  KeySet w;                  // W_n
  KeySet boundary;
  double ratio = 0.0;
  std::int64_t required_radius = 0;  // ambient ball radius that contains W_n and its boundary
};

/// W_n for the lamplighter group: the box B_n of elements with position and
/// lit lamps in [1, n], plus the excursion paths from the positions 1 and n
/// and the all-off connector from position n to 1. Computed in the implicit
/// Cayley graph. If `ambient_radius` is given, it must contain W_n and its
/// boundary strictly inside (ErrorKind::frontier otherwise, with the needed
/// radius in the message). 2 <= n <= max_n.
FolnerSet lamplighter_folner(int n, std::optional<std::int64_t> ambient_radius = std::nullopt, int max_n = 10);

std::int64_t folner_required_radius(int n);

}  // namespace perclab
