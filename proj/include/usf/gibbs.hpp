#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "usf/forest.hpp"
#include "usf/graph.hpp"
#include "usf/random.hpp"

namespace usf {

/// Partition of a window's boundary vertices. Blocks are sorted internally and
/// ordered by their smallest member, so equal partitions compare equal.
struct BoundaryPartition {
  std::vector<std::vector<VertexId>> blocks;

  static BoundaryPartition canonical(std::vector<std::vector<VertexId>> blocks);
  std::size_t block_count() const { return blocks.size(); }
  friend bool operator==(const BoundaryPartition&, const BoundaryPartition&) = default;
};

/// Edges of f with both endpoints in the window.
Forest restrict_inside(const Forest& f, const Window& w);
/// Every other edge of f. Edges that straddle the window boundary land here.
Forest restrict_outside(const Forest& f, const Window& w);

/// a ~O b: joined by a path of f_outside edges. f_outside must not contain an
/// edge with both endpoints in the window.
BoundaryPartition outside_relation(const Window& w, const Forest& f_outside);

/// a ~I b: joined by a path of window-internal edges. Throws on cycles and on
/// edges that are not internal to the window.
BoundaryPartition inside_relation(const Window& w, std::span<const EdgeId> inside_edges);
/// Uses only the edges of f that are internal to the window.
BoundaryPartition inside_relation(const Window& w, const Forest& f);

/// Replaces the window part of a spanning tree by a uniform spanning tree of
/// the window graph with ~O classes identified.
Forest strong_gibbs_resample(const Forest& f, const Window& w, RandomStream& rng);

/// Acyclic subsets of the window's internal (non-loop) edges whose components
/// each meet the window boundary and whose ~I partition equals `partition`.
/// Bit i of a mask refers to edges[i].
struct CompatibleSet {
  std::vector<EdgeId> edges;
  std::vector<std::uint32_t> masks;
};
CompatibleSet compatible_window_forests(const Window& w, const BoundaryPartition& partition);

struct WeakGibbsOptions {
  /// Enumerate the compatible set when the window has at most this many
  /// internal edges; otherwise use rejection sampling.
  std::size_t enumeration_edge_limit = 20;
  std::uint64_t max_rejections = 1'000'000;
};

/// Replaces the window part of f by a uniform member of the compatible set of
/// its current ~I partition. Edges outside the window are untouched.
Forest weak_gibbs_resample(const Forest& f, const Window& w, RandomStream& rng,
                           WeakGibbsOptions options = {});

/// Finite-volume escape closure. "Reaching infinity" is read as reaching the
/// host boundary.
///   c_f:     vertices c of C with an f-path to the host boundary that meets C
///            only at c;
///   c_tilde: c_f plus every vertex whose component in f minus c_f holds no
///            host-boundary vertex.
struct EscapeClosure {
  std::vector<VertexId> window;
  std::vector<VertexId> c_f;
  std::vector<VertexId> c_tilde;
};
EscapeClosure escape_closure(const Forest& f, std::span<const VertexId> c);

/// c1, c2: first and last trunk vertices in C. region: {c1, c2} plus the
/// component of f minus {c1, c2} that holds the trunk between them, unless that
/// component touches the host boundary (then only {c1, c2}, flagged).
struct TrunkClosure {
  VertexId c1 = 0;
  VertexId c2 = 0;
  std::vector<VertexId> region;
  bool segment_reaches_boundary = false;
};
TrunkClosure trunk_closure(const Forest& f, std::span<const VertexId> trunk,
                           std::span<const VertexId> c);

}  // namespace usf
