#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "usf/graph.hpp"

namespace usf {

/// Acyclic edge subset of a host graph, spanning all host vertices.
///
/// Construction rejects cycles, self-loops, repeated edge ids and unknown ids.
/// Component ids are dense, numbered by first appearance in vertex order.
class Forest {
 public:
  Forest(GraphPtr host, std::span<const EdgeId> edges);
  Forest(GraphPtr host, std::span<const EdgeId> edges, std::vector<VertexId> roots);

  static Forest empty(GraphPtr host) { return Forest(std::move(host), {}); }

  const GraphPtr& host() const { return host_; }
  /// Ascending edge ids.
  std::span<const EdgeId> edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  bool contains(EdgeId e) const { return e < mask_.size() && mask_[e]; }
  const std::vector<bool>& edge_mask() const { return mask_; }

  std::size_t component(VertexId v) const { return component_[v]; }
  std::size_t component_count() const { return component_count_; }
  bool is_spanning_tree() const { return component_count_ == 1; }

  bool has_roots() const { return roots_.has_value(); }
  /// Sorted; empty span when no roots were recorded.
  std::span<const VertexId> roots() const {
    return roots_ ? std::span<const VertexId>(*roots_) : std::span<const VertexId>();
  }

  /// Forest neighbours of every vertex.
  std::vector<std::vector<VertexId>> adjacency() const;

  /// Same host and same edge set; roots are not compared.
  friend bool operator==(const Forest& a, const Forest& b) {
    return a.host_ == b.host_ && a.edges_ == b.edges_;
  }

 private:
  GraphPtr host_;
  std::vector<EdgeId> edges_;
  std::vector<bool> mask_;
  std::vector<std::size_t> component_;
  std::size_t component_count_ = 0;
  std::optional<std::vector<VertexId>> roots_;
};

}  // namespace usf
