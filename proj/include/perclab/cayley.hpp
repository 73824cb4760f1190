#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "perclab/graph.hpp"

namespace perclab {

enum class GroupFamily { zd, lamplighter };

/// Z^d: coords = the vector. Lamplighter over Z: coords = {position, lit
/// lamps in increasing order}. Same encoding as the graph's VertexKey coords.
struct GroupElement {
  std::vector<std::int64_t> coords;

  friend auto operator<=>(const GroupElement&, const GroupElement&) = default;
  friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

/// Group with its standard symmetric generating set: ±unit vectors for Z^d;
/// move +1, move -1 and switch for the lamplighter group.
///
/// The Cayley graph has edges {u, s*u}. For the lamplighter group the product
/// is chosen so that s*u moves the lamplighter of u or toggles the lamp under
/// it:  (f, x) * (g, y) = (g xor (f shifted by y), x + y).
/// Right multiplication u -> u*t is then a graph automorphism.
class Group {
 public:
  static Group zd(int d);
  static Group lamplighter();

  GroupFamily family() const noexcept { return family_; }
  int dimension() const noexcept { return d_; }

  GroupElement identity() const;
  GroupElement multiply(const GroupElement& a, const GroupElement& b) const;
  GroupElement inverse(const GroupElement& a) const;
  const std::vector<GroupElement>& generators() const noexcept { return generators_; }

  /// Length of a shortest word in the generators (closed form).
  std::int64_t word_length(const GroupElement& a) const;
  /// Graph distance in the Cayley graph: |b * a^-1|.
  std::int64_t distance(const GroupElement& a, const GroupElement& b) const;

  void validate(const GroupElement& a) const;
  VertexKey to_key(const GroupElement& a) const;
  GroupElement from_key(const VertexKey& k) const;
  FamilyDescriptor descriptor(std::optional<std::int64_t> radius) const;

 private:
  GroupFamily family_ = GroupFamily::zd;
  int d_ = 1;
  std::vector<GroupElement> generators_;
};

/// Word-distance ball around the identity. Membership and distances use the
/// closed-form word length, so arbitrarily large radii cost nothing; `graph`
/// is materialized only when requested. radius = nullopt is the whole group.
class CayleyBall {
 public:
  CayleyBall(Group group, std::optional<std::int64_t> radius) : group_(std::move(group)), radius_(radius) {}

  const Group& group() const noexcept { return group_; }
  std::optional<std::int64_t> radius() const noexcept { return radius_; }
  bool contains(const GroupElement& a) const;
  /// Elements on the radius sphere.
  bool is_frontier(const GroupElement& a) const;

 private:
  Group group_;
  std::optional<std::int64_t> radius_;
};

struct MaterializedBall {
  CayleyBall ball;
  Graph graph;  // explicit, frontier = radius sphere

  GroupElement element(std::uint32_t v) const;
  std::optional<std::uint32_t> index_of(const GroupElement& a) const;
};

MaterializedBall cayley_ball(const Group& group, std::int64_t radius, const BuildOptions& opts = {});

using ElementSet = std::vector<GroupElement>;  // kept sorted and unique

void normalize(ElementSet& set);

/// {a * t : a in A}.
ElementSet right_translate(const Group& group, const GroupElement& t, const ElementSet& a);

/// Minimum pairwise Cayley distance; 0 when the sets intersect.
std::int64_t set_distance(const Group& group, const ElementSet& a, const ElementSet& b);

bool is_connected(const Group& group, const ElementSet& a);

/// Elements in order of increasing word length, ties in canonical order,
/// up to `max_length`; the candidate translations of the translate finder.
std::vector<GroupElement> elements_by_length(const Group& group, std::int64_t max_length);

/// max(1, ceil((|A| + |B|)^(3/4))).
std::int64_t translate_bound(std::size_t size_a, std::size_t size_b);

struct TranslateResult {
  GroupElement gamma;
  std::int64_t distance = 0;  // dist(A*gamma, B)
  std::int64_t bound = 0;
  std::size_t candidates = 0;  // translations examined
};

/// First translation gamma (by word length, then canonical order) with
/// A*gamma disjoint from B and dist(A*gamma, B) <= translate_bound.
/// Errors: ErrorKind::frontier when the ball is too small for the search
/// region, ErrorKind::exhausted when no candidate qualifies.
TranslateResult find_disjoint_translate(const CayleyBall& ball, const ElementSet& a, const ElementSet& b);

/// Exact minimum of dist(A*gamma, B) over in-ball gamma with A*gamma
/// disjoint from B.
TranslateResult min_translate_distance(const CayleyBall& ball, const ElementSet& a, const ElementSet& b);

/// Same vertex set; {u, v} is an edge iff 0 < dist_g(u, v) <= k.
Graph k_closure(const Graph& g, int k, std::size_t max_edges = 50'000'000);

std::string to_string(const GroupElement& a);
void to_json(nlohmann::json& j, const GroupElement& a);
void from_json(const nlohmann::json& j, GroupElement& a);

}  // namespace perclab
