#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "usf/forest.hpp"
#include "usf/graph.hpp"
#include "usf/random.hpp"
#include "usf/sampler.hpp"

namespace usf {

struct ComponentStats {
  std::size_t component_count = 0;
  std::map<std::size_t, std::size_t> size_histogram;  // size -> number of components
  std::size_t boundary_touch_count = 0;                // components with a host-boundary vertex
};

ComponentStats component_stats(const Forest& f);

/// Boundary-to-boundary forest paths, the finite stand-in for bi-infinite trunks.
///
/// One trunk per component with at least two host-boundary vertices: the
/// forest path between the pair of boundary vertices at maximal forest distance,
/// ties broken by the lexicographically smallest (low id, high id) pair. The
/// path is stored from its lower-id endpoint unless `reversed` is set.
struct TrunkSet {
  std::vector<WalkPath> trunks;
  std::vector<bool> reversed;
  std::vector<VertexId> c_b;      // first vertex of each oriented trunk
  std::vector<VertexId> c_f;      // last vertex of each oriented trunk
  std::vector<VertexId> c_f_bar;  // c_f plus one boundary vertex per trunkless boundary tree
};

TrunkSet detect_trunks(const Forest& f);
/// Same trunks, each reversed on a fair coin from `orientation`.
TrunkSet detect_trunks(const Forest& f, RandomStream& orientation);

/// Counting parameters. A vertex is eligible when its graph distance from the
/// host boundary is at least `margin` and, if set, its orbit label equals
/// `orbit_filter`.
struct NearIntersectionConfig {
  unsigned k = 1;
  std::optional<int> orbit_filter;
  unsigned margin = 0;
};

/// Number of (ordered trunk pair (i, j), i != j, eligible vertex v on trunk i)
/// with graph distance from v to trunk j at most k.
std::uint64_t count_near_intersections(const Graph& g, std::span<const WalkPath> trunks,
                                       const NearIntersectionConfig& cfg);

/// Fresh near collision points of each path against all earlier paths. Path 0
/// always has 0. A vertex of path r qualifies if it is eligible and within
/// distance k of some earlier path; after the first, a qualifying vertex only
/// counts if it is at distance at least k from the previously counted one.
std::vector<std::uint64_t> count_fncp(const Graph& g, std::span<const WalkPath> paths,
                                      const NearIntersectionConfig& cfg);

struct ProportionEstimate {
  std::uint64_t successes = 0;
  std::uint64_t samples = 0;
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Wilson score interval.
ProportionEstimate wilson_score(std::uint64_t successes, std::uint64_t samples, double z = 1.959963984540054);

/// Loop-erased paths from each c_b point in order, each stopping at c_f_bar or
/// at an earlier path, as in the first phase of Wilson's algorithm rooted at
/// c_f_bar. `disjoint` is true when every path ended in c_f_bar.
struct WilsonPaths {
  std::vector<WalkPath> paths;
  bool disjoint = true;
};
WilsonPaths wilson_paths(const Graph& g, std::span<const VertexId> c_b,
                         std::span<const VertexId> c_f_bar, RandomStream& rng);

/// Monte Carlo frequency of the event that the c_b paths are disjoint, end in
/// c_f_bar and carry at least m near intersections. Sample i uses
/// rng.substream(i). Empty c_b or c_f_bar gives 0 without sampling.
ProportionEstimate estimate_nu_a(const Graph& g, std::span<const VertexId> c_b,
                                 std::span<const VertexId> c_f_bar, std::uint64_t m,
                                 const NearIntersectionConfig& cfg, const RandomStream& rng,
                                 std::uint64_t samples);

/// Independent batches per m, and a weighted least-squares fit of
/// log(estimate) against m with delta-method weights.
struct DecayFit {
  std::vector<std::uint64_t> ms;
  std::vector<ProportionEstimate> estimates;
  double slope = 0.0;
  double slope_se = 0.0;
  double slope_upper95 = 0.0;
  bool fit_valid = false;  // false when some batch had no successes
};
DecayFit nu_a_decay(const Graph& g, std::span<const VertexId> c_b,
                    std::span<const VertexId> c_f_bar, std::span<const std::uint64_t> ms,
                    const NearIntersectionConfig& cfg, const RandomStream& rng,
                    std::uint64_t samples_per_m);

/// Probability that a simple random walk from each vertex hits `target` before
/// `absorbing`: 1 on target, 0 on absorbing, harmonic elsewhere.
std::vector<double> hitting_probability_exact(const Graph& g, std::span<const VertexId> target,
                                              std::span<const VertexId> absorbing);

struct HarmonicityReport {
  /// max |value(v) - mean of neighbours| over v outside target and absorbing
  double harmonic_defect = 0.0;
  std::optional<VertexId> worst_vertex;
  /// min (mean of neighbours - value(v)) over target vertices; >= 0 means subharmonic there
  double subharmonic_margin = 0.0;
  std::optional<VertexId> worst_target;
};

HarmonicityReport check_harmonicity(const Graph& g, std::span<const double> values,
                                    std::span<const VertexId> target,
                                    std::span<const VertexId> absorbing = {});

/// For a free uniform spanning tree of build_box(2, side): minimum over the
/// central (side/2)^2 block of the probability of hitting the detected trunk
/// before the rest of the boundary, averaged over samples.
struct HitTrendRow {
  int side = 0;
  double mean_min_hit = 0.0;
  double min_min_hit = 0.0;
};
std::vector<HitTrendRow> central_hit_trend(std::span<const int> sides, std::size_t samples,
                                           const RandomStream& rng);

/// Multi-source BFS distances, capped: vertices farther than `limit` get limit + 1.
std::vector<unsigned> bfs_distances(const Graph& g, std::span<const VertexId> sources,
                                    unsigned limit);

}  // namespace usf
