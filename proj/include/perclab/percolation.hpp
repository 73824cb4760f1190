#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"
#include "perclab/branching.hpp"
#include "perclab/graph.hpp"
#include "perclab/rng.hpp"

namespace perclab {

enum class ClusterStatus { finite, censored_frontier, censored_cap };

std::string to_string(ClusterStatus status);

struct ClusterSample {
  std::size_t size = 0;
  ClusterStatus status = ClusterStatus::finite;

  friend bool operator==(const ClusterSample&, const ClusterSample&) = default;
};

/// Edge-decision bookkeeping of the generic engine: every decision is
/// memoized, and a revisit recomputes the uniform and compares.
struct EdgeAudit {
  std::uint64_t decisions = 0;
  std::uint64_t revisits = 0;
  std::uint64_t mismatches = 0;
};

enum class Engine {
  automatic,   // explicit graphs: indexed; implicit families: structured
  indexed,     // explicit graphs only
  generic,     // any graph, key-level BFS with memo and audit
  structured,  // implicit lattice / tree / planted / ray_tree only
};

inline constexpr std::size_t kDefaultSizeCap = 1'000'000;

/// Grows the open cluster of the origin breadth-first. Edge e is open iff
/// stream.edge_uniform(fingerprint(e)) < p, so results at different p are
/// coupled through the same stream. A cluster is censored_frontier when a
/// frontier vertex joins it and censored_cap when it exceeds size_cap
/// vertices (reported size is then size_cap + 1).
ClusterSample sample_origin_cluster(const Graph& g, double p, const SampleStream& stream,
                                    std::size_t size_cap = kDefaultSizeCap,
                                    Engine engine = Engine::automatic, EdgeAudit* audit = nullptr);

/// |C| = sum over the Z^d cluster of i.i.d. total progenies: lattice-only
/// percolation on Z^d gives N, then N Galton-Watson total progenies (root
/// included) are drawn from a substream.
ClusterSample sample_compositional(int d, double p, const OffspringDist& offspring,
                                   const SampleStream& stream, std::size_t size_cap = kDefaultSizeCap);

enum class Sampler { direct, compositional };

struct SampleSpec {
  FamilyDescriptor graph;
  double p = 0.5;
  std::uint64_t seed = 0;
  std::uint64_t n_samples = 1;
  std::size_t size_cap = kDefaultSizeCap;
  Sampler sampler = Sampler::direct;  // compositional needs an implicit planted graph

  void validate() const;
  friend bool operator==(const SampleSpec&, const SampleSpec&) = default;
};

void to_json(nlohmann::json& j, const SampleSpec& spec);
void from_json(const nlohmann::json& j, SampleSpec& spec);

/// Counts of finite cluster sizes plus censoring tallies.
struct SizeHistogram {
  SampleSpec spec;
  std::map<std::size_t, std::uint64_t> counts;
  std::uint64_t censored_frontier = 0;
  std::uint64_t censored_cap = 0;
  std::uint64_t n_samples = 0;
  double wall_time = 0.0;  // seconds; not part of the content

  void add(const ClusterSample& s);
  void merge(const SizeHistogram& other);
  std::uint64_t finite_count() const;
  std::uint64_t censored() const noexcept { return censored_frontier + censored_cap; }
  /// Number of finite samples with size >= n.
  std::uint64_t finite_at_least(std::size_t n) const;

  /// Record without wall time; hashing this gives a replay-stable identity.
  nlohmann::json content_json() const;
  nlohmann::json record_json() const;
  static SizeHistogram from_json(const nlohmann::json& record);

  bool same_content(const SizeHistogram& other) const;
};

/// Sample i uses SampleStream(seed, i). The result does not depend on
/// `workers` (0 = hardware concurrency).
SizeHistogram run_batch(const SampleSpec& spec, unsigned workers = 0);

/// Draws one sample of a spec against a prebuilt graph.
ClusterSample sample_one(const SampleSpec& spec, const Graph& g, std::uint64_t index);

}  // namespace perclab
