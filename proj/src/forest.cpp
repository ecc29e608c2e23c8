#include "usf/forest.hpp"

#include <algorithm>
#include <string>

#include "usf/error.hpp"
#include "usf/union_find.hpp"

namespace usf {

Forest::Forest(GraphPtr host, std::span<const EdgeId> edges)
    : host_(std::move(host)), edges_(edges.begin(), edges.end()) {
  if (!host_) throw ValidationError("forest needs a host graph");
  const Graph& g = *host_;
  std::sort(edges_.begin(), edges_.end());
  mask_.assign(g.edge_count(), false);
  DisjointSets sets(g.vertex_count());
  for (EdgeId e : edges_) {
    if (e >= g.edge_count()) {
      throw ValidationError("forest edge " + std::to_string(e) + " is not an edge of the host");
    }
    if (mask_[e]) throw ValidationError("forest lists edge " + std::to_string(e) + " twice");
    if (g.is_self_loop(e)) {
      throw ValidationError("forest edge " + std::to_string(e) + " is a self-loop");
    }
    mask_[e] = true;
    if (!sets.unite(g.edge(e).u, g.edge(e).v)) {
      throw ValidationError("forest edge " + std::to_string(e) + " closes a cycle");
    }
  }
  constexpr std::size_t kUnset = ~std::size_t{0};
  std::vector<std::size_t> id_of_root(g.vertex_count(), kUnset);
  component_.resize(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    auto& id = id_of_root[sets.find(v)];
    if (id == kUnset) id = component_count_++;
    component_[v] = id;
  }
}

Forest::Forest(GraphPtr host, std::span<const EdgeId> edges, std::vector<VertexId> roots)
    : Forest(std::move(host), edges) {
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  std::vector<char> rooted(component_count_, 0);
  for (VertexId r : roots) {
    if (r >= host_->vertex_count()) {
      throw ValidationError("root " + std::to_string(r) + " is not a vertex");
    }
    rooted[component_[r]] = 1;
  }
  if (std::find(rooted.begin(), rooted.end(), 0) != rooted.end()) {
    throw ValidationError("every forest component must contain a root");
  }
  roots_ = std::move(roots);
}

std::vector<std::vector<VertexId>> Forest::adjacency() const {
  std::vector<std::vector<VertexId>> adj(host_->vertex_count());
  for (EdgeId e : edges_) {
    const Edge& ed = host_->edge(e);
    adj[ed.u].push_back(ed.v);
    adj[ed.v].push_back(ed.u);
  }
  return adj;
}

}  // namespace usf
