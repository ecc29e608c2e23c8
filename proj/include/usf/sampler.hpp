#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "usf/forest.hpp"
#include "usf/graph.hpp"
#include "usf/random.hpp"

namespace usf {

/// Ordered vertex sequence of a walk; consecutive entries are adjacent.
using WalkPath = std::vector<VertexId>;

struct WalkLimits {
  /// A single walk that takes more steps than this throws SamplingError.
  std::uint64_t max_steps = 1'000'000'000;
};

/// Chronological loop erasure: whenever a vertex repeats, the cycle since its
/// first occurrence is cut out. Endpoints are preserved.
WalkPath loop_erase(std::span<const VertexId> path);

/// Loop-erased random walk from `start` until it first enters a vertex with
/// `stop[v] != 0`. Each step picks uniformly among incident edge slots. The
/// returned path runs from start to the stopping vertex inclusive.
WalkPath loop_erased_walk(const Graph& g, VertexId start, std::span<const char> stop,
                          RandomStream& rng, WalkLimits limits = {});

/// Uniform spanning tree by Wilson's algorithm. Walks start from unvisited
/// vertices in ascending id order.
Forest wilson_tree(const GraphPtr& g, VertexId root, RandomStream& rng, WalkLimits limits = {});

/// Uniform spanning forest with exactly one root per component, i.e. the pull
/// back of a uniform spanning tree of g with the roots identified.
Forest wilson_rooted_forest(const GraphPtr& g, std::span<const VertexId> roots, RandomStream& rng,
                            WalkLimits limits = {});

enum class BoundaryMode { free, wired };

/// free: wilson_tree rooted at vertex 0. wired: the boundary acts as one merged root.
Forest sample_boundary_mode(const GraphPtr& g, BoundaryMode mode, RandomStream& rng);

}  // namespace usf
