#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace usf {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr std::size_t kDefaultVertexLimit = std::size_t{1} << 24;

struct Edge {
  VertexId u;
  VertexId v;
  bool is_loop() const { return u == v; }
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Incidence {
  EdgeId edge;
  VertexId neighbor;
};

/// Integer coordinates of every vertex in a Z^dim embedding, row-major by vertex.
struct LatticeEmbedding {
  int dim = 0;
  std::vector<std::int32_t> coords;
};

class Graph;
using GraphPtr = std::shared_ptr<const Graph>;

/// Immutable finite multigraph with a designated boundary set.
///
/// Parallel edges and self-loops are allowed. Self-loops keep their edge id but
/// are left out of the incidence lists, so random walks and Laplacians never
/// see them.
class Graph {
 public:
  static GraphPtr create(std::size_t vertex_count, std::vector<Edge> edges,
                         std::vector<VertexId> boundary = {},
                         std::optional<LatticeEmbedding> embedding = std::nullopt,
                         std::vector<int> orbit_labels = {});

  std::size_t vertex_count() const { return vertex_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  bool is_self_loop(EdgeId e) const { return edges_.at(e).is_loop(); }
  std::size_t self_loop_count() const { return self_loops_; }

  /// Non-loop incidences of v; a parallel edge appears once per copy.
  std::span<const Incidence> incident(VertexId v) const {
    return {incidence_.data() + offsets_[v], incidence_.data() + offsets_[v + 1]};
  }
  std::size_t degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }

  /// Sorted, duplicate-free.
  std::span<const VertexId> boundary() const { return boundary_; }
  bool is_boundary(VertexId v) const { return on_boundary_[v] != 0; }

  bool is_connected() const { return connected_; }

  bool has_embedding() const { return embedding_.has_value(); }
  int dim() const { return embedding_ ? embedding_->dim : 0; }
  std::span<const std::int32_t> coord(VertexId v) const;
  /// Linear scan; returns nullopt if no vertex has these coordinates.
  std::optional<VertexId> vertex_at(std::span<const std::int32_t> coords) const;

  int orbit_label(VertexId v) const { return orbit_.empty() ? 0 : orbit_[v]; }

  bool contains_vertex(std::size_t v) const { return v < vertex_count_; }

  /// FNV-1a over the text serialization; identifies a host in forest files.
  std::uint64_t content_hash() const;

 private:
  Graph() = default;

  std::size_t vertex_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<VertexId> boundary_;
  std::vector<char> on_boundary_;
  std::vector<std::size_t> offsets_;
  std::vector<Incidence> incidence_;
  std::size_t self_loops_ = 0;
  bool connected_ = false;
  std::optional<LatticeEmbedding> embedding_;
  std::vector<int> orbit_;
};

/// Induced subgraph of Z^dim on {0..side-1}^dim. Vertex id is the mixed-radix
/// number with coordinate 0 least significant. Boundary is every vertex with
/// some coordinate equal to 0 or side-1.
GraphPtr build_box(int dim, int side, std::size_t vertex_limit = kDefaultVertexLimit);

/// Nearest-neighbour Cayley graph of (Z/side)^dim; empty boundary.
GraphPtr build_torus(int dim, int side, std::size_t vertex_limit = kDefaultVertexLimit);

/// Quotient by vertex identification.
struct Quotient {
  GraphPtr graph;
  /// Quotient edge id -> original edge id. Edge ids are preserved one-to-one,
  /// so this is the identity, but callers should go through it.
  std::vector<EdgeId> edge_to_original;
  /// Original vertex -> quotient vertex.
  std::vector<VertexId> vertex_map;
};

/// Identifies each class to a single vertex. Quotient vertices are numbered in
/// ascending order of the smallest original id they contain. The boundary of the
/// quotient is the image of the original boundary; the embedding is dropped.
Quotient contract(const Graph& g, std::span<const std::vector<VertexId>> classes);

/// A vertex subset of a host graph together with the edges it sees.
class Window {
 public:
  const GraphPtr& host() const { return host_; }
  std::span<const VertexId> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  bool contains(VertexId v) const { return local_[v] != kNone; }
  /// Position of v in vertices(); v must be in the window.
  std::size_t local_index(VertexId v) const { return local_[v]; }
  /// Window vertices with a host neighbour outside the window.
  std::span<const VertexId> boundary() const { return boundary_; }
  bool is_boundary(VertexId v) const;
  /// Host edges with both endpoints inside (self-loops included), ascending id.
  std::span<const EdgeId> internal_edges() const { return internal_; }
  /// Host edges with exactly one endpoint inside, ascending id.
  std::span<const EdgeId> crossing_edges() const { return crossing_; }
  bool is_internal_edge(EdgeId e) const;
  bool covers_host() const { return vertices_.size() == host_->vertex_count(); }

 private:
  friend Window induced_window(GraphPtr g, std::vector<VertexId> vertices);
  static constexpr std::size_t kNone = ~std::size_t{0};

  GraphPtr host_;
  std::vector<VertexId> vertices_;
  std::vector<std::size_t> local_;
  std::vector<VertexId> boundary_;
  std::vector<EdgeId> internal_;
  std::vector<EdgeId> crossing_;
};

Window induced_window(GraphPtr g, std::vector<VertexId> vertices);

/// Axis-aligned block of a lattice graph: vertices whose coordinates satisfy
/// corner[i] <= x[i] < corner[i] + extent[i].
Window box_window(GraphPtr g, std::span<const std::int32_t> corner,
                  std::span<const std::int32_t> extent);

}  // namespace usf
