#include "usf/sampler.hpp"

#include <string>
#include <unordered_map>

#include "usf/error.hpp"

namespace usf {
namespace {

struct Step {
  VertexId next;
  EdgeId edge;
};

// Random-successor form of a loop-erased walk: overwriting the exit edge of a
// revisited vertex erases the loop.
void walk_until_tree(const Graph& g, VertexId start, const std::vector<char>& in_tree,
                     std::vector<Step>& succ, RandomStream& rng, const WalkLimits& limits) {
  std::uint64_t steps = 0;
  VertexId u = start;
  while (!in_tree[u]) {
    const auto inc = g.incident(u);
    if (inc.empty()) throw DisconnectedGraphError("walk reached an isolated vertex");
    const Incidence& pick = inc[rng.uniform_below(inc.size())];
    succ[u] = {pick.neighbor, pick.edge};
    u = pick.neighbor;
    if (++steps > limits.max_steps) {
      throw SamplingError("random walk from vertex " + std::to_string(start) + " exceeded " +
                          std::to_string(limits.max_steps) + " steps");
    }
  }
}

std::vector<EdgeId> wilson_edges(const Graph& g, std::vector<char> in_tree, RandomStream& rng,
                                 const WalkLimits& limits) {
  std::vector<Step> succ(g.vertex_count());
  std::vector<EdgeId> edges;
  edges.reserve(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (in_tree[v]) continue;
    walk_until_tree(g, v, in_tree, succ, rng, limits);
    for (VertexId u = v; !in_tree[u]; u = succ[u].next) {
      in_tree[u] = 1;
      edges.push_back(succ[u].edge);
    }
  }
  return edges;
}

void require_connected(const Graph& g) {
  if (!g.is_connected()) throw DisconnectedGraphError("sampling requires a connected graph");
}

}  // namespace

WalkPath loop_erase(std::span<const VertexId> path) {
  WalkPath out;
  std::unordered_map<VertexId, std::size_t> position;
  for (VertexId v : path) {
    auto it = position.find(v);
    if (it != position.end()) {
      for (std::size_t i = it->second + 1; i < out.size(); ++i) position.erase(out[i]);
      out.resize(it->second + 1);
      continue;
    }
    position.emplace(v, out.size());
    out.push_back(v);
  }
  return out;
}

WalkPath loop_erased_walk(const Graph& g, VertexId start, std::span<const char> stop,
                          RandomStream& rng, WalkLimits limits) {
  if (start >= g.vertex_count()) throw ValidationError("walk start is not a vertex");
  if (stop.size() != g.vertex_count()) throw ValidationError("stop mask has the wrong size");
  std::vector<char> in_tree(stop.begin(), stop.end());
  std::vector<Step> succ(g.vertex_count());
  walk_until_tree(g, start, in_tree, succ, rng, limits);
  WalkPath path{start};
  for (VertexId u = start; !in_tree[u]; u = succ[u].next) path.push_back(succ[u].next);
  return path;
}

Forest wilson_tree(const GraphPtr& g, VertexId root, RandomStream& rng, WalkLimits limits) {
  require_connected(*g);
  if (root >= g->vertex_count()) throw ValidationError("root is not a vertex");
  std::vector<char> in_tree(g->vertex_count(), 0);
  in_tree[root] = 1;
  const auto edges = wilson_edges(*g, std::move(in_tree), rng, limits);
  return Forest(g, edges);
}

Forest wilson_rooted_forest(const GraphPtr& g, std::span<const VertexId> roots, RandomStream& rng,
                            WalkLimits limits) {
  require_connected(*g);
  if (roots.empty()) throw ValidationError("rooted forest needs at least one root");
  std::vector<char> in_tree(g->vertex_count(), 0);
  for (VertexId r : roots) {
    if (r >= g->vertex_count()) throw ValidationError("root " + std::to_string(r) + " is not a vertex");
    in_tree[r] = 1;
  }
  const auto edges = wilson_edges(*g, std::move(in_tree), rng, limits);
  return Forest(g, edges, std::vector<VertexId>(roots.begin(), roots.end()));
}

Forest sample_boundary_mode(const GraphPtr& g, BoundaryMode mode, RandomStream& rng) {
  if (mode == BoundaryMode::free) return wilson_tree(g, 0, rng);
  if (g->boundary().empty()) throw ValidationError("wired mode needs a nonempty boundary");
  return wilson_rooted_forest(g, g->boundary(), rng);
}

}  // namespace usf
