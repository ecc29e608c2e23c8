#include "usf/graph.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "usf/error.hpp"
#include "usf/io.hpp"
#include "usf/union_find.hpp"

namespace usf {
namespace {

std::size_t checked_power(int side, int dim, std::size_t limit) {
  std::size_t n = 1;
  for (int i = 0; i < dim; ++i) {
    if (n > limit / static_cast<std::size_t>(side)) {
      throw CapacityError("lattice with side " + std::to_string(side) + " and dim " +
                          std::to_string(dim) + " exceeds the vertex limit of " +
                          std::to_string(limit));
    }
    n *= static_cast<std::size_t>(side);
  }
  if (n > limit) throw CapacityError("lattice exceeds the vertex limit");
  return n;
}

std::vector<std::int32_t> lattice_coords(std::size_t n, int dim, int side) {
  std::vector<std::int32_t> coords(n * static_cast<std::size_t>(dim));
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t rest = v;
    for (int d = 0; d < dim; ++d) {
      coords[v * dim + d] = static_cast<std::int32_t>(rest % side);
      rest /= side;
    }
  }
  return coords;
}

}  // namespace

GraphPtr Graph::create(std::size_t vertex_count, std::vector<Edge> edges,
                       std::vector<VertexId> boundary,
                       std::optional<LatticeEmbedding> embedding,
                       std::vector<int> orbit_labels) {
  if (vertex_count == 0) throw ValidationError("graph must have at least one vertex");
  if (vertex_count > std::numeric_limits<VertexId>::max()) {
    throw CapacityError("vertex count does not fit in a vertex id");
  }
  if (edges.size() > std::numeric_limits<EdgeId>::max()) {
    throw CapacityError("edge count does not fit in an edge id");
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].u >= vertex_count || edges[i].v >= vertex_count) {
      throw ValidationError("edge " + std::to_string(i) + " has an endpoint outside 0.." +
                            std::to_string(vertex_count - 1));
    }
  }
  std::sort(boundary.begin(), boundary.end());
  boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
  if (!boundary.empty() && boundary.back() >= vertex_count) {
    throw ValidationError("boundary vertex " + std::to_string(boundary.back()) +
                          " is not a vertex");
  }
  if (embedding) {
    if (embedding->dim < 1 ||
        embedding->coords.size() != vertex_count * static_cast<std::size_t>(embedding->dim)) {
      throw ValidationError("embedding must give dim coordinates for every vertex");
    }
  }
  if (!orbit_labels.empty() && orbit_labels.size() != vertex_count) {
    throw ValidationError("orbit labels must cover every vertex");
  }

  GraphPtr result(new Graph());
  auto& g = const_cast<Graph&>(*result);
  g.vertex_count_ = vertex_count;
  g.edges_ = std::move(edges);
  g.boundary_ = std::move(boundary);
  g.on_boundary_.assign(vertex_count, 0);
  for (VertexId b : g.boundary_) g.on_boundary_[b] = 1;
  g.embedding_ = std::move(embedding);
  g.orbit_ = std::move(orbit_labels);

  g.offsets_.assign(vertex_count + 1, 0);
  for (const Edge& e : g.edges_) {
    if (e.is_loop()) {
      ++g.self_loops_;
      continue;
    }
    ++g.offsets_[e.u + 1];
    ++g.offsets_[e.v + 1];
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  g.incidence_.resize(g.offsets_.back());
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (EdgeId id = 0; id < g.edges_.size(); ++id) {
    const Edge& e = g.edges_[id];
    if (e.is_loop()) continue;
    g.incidence_[fill[e.u]++] = {id, e.v};
    g.incidence_[fill[e.v]++] = {id, e.u};
  }

  DisjointSets sets(vertex_count);
  std::size_t components = vertex_count;
  for (const Edge& e : g.edges_) {
    if (sets.unite(e.u, e.v)) --components;
  }
  g.connected_ = components == 1;
  return result;
}

std::span<const std::int32_t> Graph::coord(VertexId v) const {
  if (!embedding_) throw ValidationError("graph has no lattice embedding");
  const auto d = static_cast<std::size_t>(embedding_->dim);
  return {embedding_->coords.data() + v * d, d};
}

std::optional<VertexId> Graph::vertex_at(std::span<const std::int32_t> coords) const {
  if (!embedding_ || coords.size() != static_cast<std::size_t>(embedding_->dim)) {
    return std::nullopt;
  }
  for (VertexId v = 0; v < vertex_count_; ++v) {
    auto c = coord(v);
    if (std::equal(c.begin(), c.end(), coords.begin())) return v;
  }
  return std::nullopt;
}

std::uint64_t Graph::content_hash() const {
  std::ostringstream text;
  write_graph(text, *this);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text.str()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

GraphPtr build_box(int dim, int side, std::size_t vertex_limit) {
  if (dim < 1) throw ValidationError("dim must be at least 1");
  if (side < 1) throw ValidationError("side must be at least 1");
  const std::size_t n = checked_power(side, dim, vertex_limit);
  auto coords = lattice_coords(n, dim, side);

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(dim) * n);
  std::vector<VertexId> boundary;
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t stride = 1;
    bool rim = false;
    for (int d = 0; d < dim; ++d) {
      const auto x = coords[v * dim + d];
      if (x == 0 || x == side - 1) rim = true;
      if (x + 1 < side) {
        edges.push_back({static_cast<VertexId>(v), static_cast<VertexId>(v + stride)});
      }
      stride *= static_cast<std::size_t>(side);
    }
    if (rim) boundary.push_back(static_cast<VertexId>(v));
  }
  return Graph::create(n, std::move(edges), std::move(boundary),
                       LatticeEmbedding{dim, std::move(coords)});
}

GraphPtr build_torus(int dim, int side, std::size_t vertex_limit) {
  if (dim < 1) throw ValidationError("dim must be at least 1");
  if (side < 3) throw ValidationError("torus side must be at least 3");
  const std::size_t n = checked_power(side, dim, vertex_limit);
  auto coords = lattice_coords(n, dim, side);

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(dim) * n);
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t stride = 1;
    for (int d = 0; d < dim; ++d) {
      const auto x = coords[v * dim + d];
      const std::size_t w = x + 1 < side ? v + stride : v - stride * (side - 1);
      edges.push_back({static_cast<VertexId>(v), static_cast<VertexId>(w)});
      stride *= static_cast<std::size_t>(side);
    }
  }
  return Graph::create(n, std::move(edges), {}, LatticeEmbedding{dim, std::move(coords)});
}

Quotient contract(const Graph& g, std::span<const std::vector<VertexId>> classes) {
  const std::size_t n = g.vertex_count();
  std::vector<VertexId> rep(n);
  std::iota(rep.begin(), rep.end(), VertexId{0});
  std::vector<char> claimed(n, 0);
  for (const auto& cls : classes) {
    if (cls.empty()) continue;
    VertexId lowest = cls.front();
    for (VertexId v : cls) {
      if (v >= n) throw ValidationError("class member " + std::to_string(v) + " is not a vertex");
      if (claimed[v]) {
        throw ValidationError("vertex " + std::to_string(v) + " appears in more than one class");
      }
      claimed[v] = 1;
      lowest = std::min(lowest, v);
    }
    for (VertexId v : cls) rep[v] = lowest;
  }

  Quotient q;
  q.vertex_map.assign(n, 0);
  std::vector<VertexId> id_of_rep(n, 0);
  VertexId next = 0;
  for (VertexId v = 0; v < n; ++v) {
    if (rep[v] == v) id_of_rep[v] = next++;
  }
  for (VertexId v = 0; v < n; ++v) q.vertex_map[v] = id_of_rep[rep[v]];

  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (const Edge& e : g.edges()) edges.push_back({q.vertex_map[e.u], q.vertex_map[e.v]});
  std::vector<VertexId> boundary;
  for (VertexId b : g.boundary()) boundary.push_back(q.vertex_map[b]);

  std::vector<int> orbit;
  if (g.vertex_count() == next) {
    orbit.resize(next);
    for (VertexId v = 0; v < n; ++v) orbit[v] = g.orbit_label(v);
  }

  q.edge_to_original.resize(g.edge_count());
  std::iota(q.edge_to_original.begin(), q.edge_to_original.end(), EdgeId{0});
  q.graph = Graph::create(next, std::move(edges), std::move(boundary), std::nullopt,
                          std::move(orbit));
  return q;
}

bool Window::is_boundary(VertexId v) const {
  return std::binary_search(boundary_.begin(), boundary_.end(), v);
}

bool Window::is_internal_edge(EdgeId e) const {
  return std::binary_search(internal_.begin(), internal_.end(), e);
}

Window induced_window(GraphPtr g, std::vector<VertexId> vertices) {
  if (!g) throw ValidationError("window needs a host graph");
  if (vertices.empty()) throw ValidationError("window vertex set is empty");
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  if (vertices.back() >= g->vertex_count()) {
    throw ValidationError("window vertex " + std::to_string(vertices.back()) + " is not a vertex");
  }

  Window w;
  w.local_.assign(g->vertex_count(), Window::kNone);
  for (std::size_t i = 0; i < vertices.size(); ++i) w.local_[vertices[i]] = i;
  for (VertexId v : vertices) {
    for (const Incidence& inc : g->incident(v)) {
      if (w.local_[inc.neighbor] == Window::kNone) {
        w.boundary_.push_back(v);
        break;
      }
    }
  }
  const auto edges = g->edges();
  for (EdgeId id = 0; id < edges.size(); ++id) {
    const bool a = w.local_[edges[id].u] != Window::kNone;
    const bool b = w.local_[edges[id].v] != Window::kNone;
    if (a && b) {
      w.internal_.push_back(id);
    } else if (a != b) {
      w.crossing_.push_back(id);
    }
  }
  w.vertices_ = std::move(vertices);
  w.host_ = std::move(g);
  return w;
}

Window box_window(GraphPtr g, std::span<const std::int32_t> corner,
                  std::span<const std::int32_t> extent) {
  if (!g || !g->has_embedding()) throw ValidationError("box window needs a lattice graph");
  const auto dim = static_cast<std::size_t>(g->dim());
  if (corner.size() != dim || extent.size() != dim) {
    throw ValidationError("window corner and extent must have " + std::to_string(dim) +
                          " coordinates");
  }
  std::vector<VertexId> members;
  for (VertexId v = 0; v < g->vertex_count(); ++v) {
    auto c = g->coord(v);
    bool inside = true;
    for (std::size_t d = 0; d < dim && inside; ++d) {
      inside = c[d] >= corner[d] && c[d] < corner[d] + extent[d];
    }
    if (inside) members.push_back(v);
  }
  return induced_window(std::move(g), std::move(members));
}

}  // namespace usf
