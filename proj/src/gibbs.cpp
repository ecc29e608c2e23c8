#include "usf/gibbs.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <string>

#include "usf/error.hpp"
#include "usf/kirchhoff.hpp"
#include "usf/sampler.hpp"
#include "usf/union_find.hpp"

namespace usf {
namespace {

void require_same_host(const Forest& f, const Window& w) {
  if (f.host() != w.host()) throw ValidationError("forest and window live on different graphs");
}

template <typename RootOf>
BoundaryPartition partition_boundary(const Window& w, RootOf&& root_of) {
  std::map<std::uint32_t, std::vector<VertexId>> by_root;
  for (VertexId b : w.boundary()) by_root[root_of(b)].push_back(b);
  std::vector<std::vector<VertexId>> blocks;
  blocks.reserve(by_root.size());
  for (auto& [root, block] : by_root) blocks.push_back(std::move(block));
  return BoundaryPartition::canonical(std::move(blocks));
}

std::vector<EdgeId> internal_non_loop(const Window& w) {
  std::vector<EdgeId> out;
  for (EdgeId e : w.internal_edges()) {
    if (!w.host()->is_self_loop(e)) out.push_back(e);
  }
  return out;
}

// Block index of every window vertex under `partition`, -1 off the boundary.
std::vector<int> block_labels(const Window& w, const BoundaryPartition& partition) {
  std::vector<int> label(w.size(), -1);
  for (std::size_t i = 0; i < partition.blocks.size(); ++i) {
    for (VertexId v : partition.blocks[i]) {
      if (!w.contains(v) || !w.is_boundary(v)) {
        throw ValidationError("partition member " + std::to_string(v) +
                              " is not a window boundary vertex");
      }
      label[w.local_index(v)] = static_cast<int>(i);
    }
  }
  for (VertexId b : w.boundary()) {
    if (label[w.local_index(b)] < 0) {
      throw ValidationError("partition does not cover window boundary vertex " +
                            std::to_string(b));
    }
  }
  return label;
}

// Backtracking over internal edges; components carry the block label of their
// boundary vertices and may only merge when labels agree.
class CompatibleEnumerator {
 public:
  CompatibleEnumerator(const Window& w, const std::vector<EdgeId>& edges,
                       std::vector<int> labels, std::size_t blocks)
      : w_(w), edges_(edges), label_(std::move(labels)), blocks_(blocks) {
    const std::size_t n = w.size();
    parent_.resize(n);
    for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<std::uint32_t>(i);
    size_.assign(n, 1);
    components_ = n;
    unlabeled_ = static_cast<std::size_t>(std::count(label_.begin(), label_.end(), -1));
  }

  std::vector<std::uint32_t> run() {
    recurse(0, 0);
    return std::move(found_);
  }

 private:
  std::uint32_t find(std::uint32_t x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
  }

  void recurse(std::size_t i, std::uint32_t mask) {
    if (i == edges_.size()) {
      // Every component labelled and exactly one component per block.
      if (unlabeled_ == 0 && components_ == blocks_) found_.push_back(mask);
      return;
    }
    const Edge& e = w_.host()->edge(edges_[i]);
    std::uint32_t a = find(static_cast<std::uint32_t>(w_.local_index(e.u)));
    std::uint32_t b = find(static_cast<std::uint32_t>(w_.local_index(e.v)));
    if (a != b && (label_[a] < 0 || label_[b] < 0 || label_[a] == label_[b])) {
      if (size_[a] < size_[b]) std::swap(a, b);
      const int saved = label_[a];
      const std::size_t before = (label_[a] < 0) + (label_[b] < 0);
      if (label_[a] < 0) label_[a] = label_[b];
      const std::size_t after = label_[a] < 0;
      parent_[b] = a;
      size_[a] += size_[b];
      --components_;
      unlabeled_ = unlabeled_ - before + after;
      recurse(i + 1, mask | (std::uint32_t{1} << i));
      unlabeled_ = unlabeled_ - after + before;
      ++components_;
      size_[a] -= size_[b];
      parent_[b] = b;
      label_[a] = saved;
    }
    recurse(i + 1, mask);
  }

  const Window& w_;
  const std::vector<EdgeId>& edges_;
  std::vector<int> label_;
  std::size_t blocks_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
  std::size_t components_ = 0;
  std::size_t unlabeled_ = 0;
  std::vector<std::uint32_t> found_;
};

std::vector<EdgeId> outside_edges(const Forest& f, const Window& w) {
  std::vector<EdgeId> out;
  for (EdgeId e : f.edges()) {
    if (!w.is_internal_edge(e)) out.push_back(e);
  }
  return out;
}

Forest with_window_edges(const Forest& f, const Window& w, const std::vector<EdgeId>& inside) {
  std::vector<EdgeId> edges = outside_edges(f, w);
  edges.insert(edges.end(), inside.begin(), inside.end());
  Forest out(f.host(), edges);
  if (!f.has_roots()) return out;
  // Keep the roots only while every component still holds one.
  std::vector<char> rooted(out.component_count(), 0);
  for (VertexId r : f.roots()) rooted[out.component(r)] = 1;
  if (std::find(rooted.begin(), rooted.end(), 0) != rooted.end()) return out;
  return Forest(f.host(), edges, {f.roots().begin(), f.roots().end()});
}

std::vector<EdgeId> pick_from_enumeration(const Window& w, const BoundaryPartition& partition,
                                          RandomStream& rng) {
  const CompatibleSet set = compatible_window_forests(w, partition);
  if (set.masks.empty()) throw SamplingError("no window forest is compatible with the partition");
  const std::uint32_t mask = set.masks[rng.uniform_below(set.masks.size())];
  std::vector<EdgeId> chosen;
  for (std::size_t i = 0; i < set.edges.size(); ++i) {
    if (mask & (std::uint32_t{1} << i)) chosen.push_back(set.edges[i]);
  }
  return chosen;
}

}  // namespace

BoundaryPartition BoundaryPartition::canonical(std::vector<std::vector<VertexId>> blocks) {
  BoundaryPartition p;
  for (auto& block : blocks) {
    if (block.empty()) continue;
    std::sort(block.begin(), block.end());
    block.erase(std::unique(block.begin(), block.end()), block.end());
    p.blocks.push_back(std::move(block));
  }
  std::sort(p.blocks.begin(), p.blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  for (std::size_t i = 1; i < p.blocks.size(); ++i) {
    for (VertexId v : p.blocks[i]) {
      for (std::size_t j = 0; j < i; ++j) {
        if (std::binary_search(p.blocks[j].begin(), p.blocks[j].end(), v)) {
          throw ValidationError("partition blocks overlap at vertex " + std::to_string(v));
        }
      }
    }
  }
  return p;
}

Forest restrict_inside(const Forest& f, const Window& w) {
  require_same_host(f, w);
  std::vector<EdgeId> edges;
  for (EdgeId e : f.edges()) {
    if (w.is_internal_edge(e)) edges.push_back(e);
  }
  return Forest(f.host(), edges);
}

Forest restrict_outside(const Forest& f, const Window& w) {
  require_same_host(f, w);
  return Forest(f.host(), outside_edges(f, w));
}

BoundaryPartition outside_relation(const Window& w, const Forest& f_outside) {
  require_same_host(f_outside, w);
  DisjointSets sets(w.host()->vertex_count());
  for (EdgeId e : f_outside.edges()) {
    if (w.is_internal_edge(e)) {
      throw ValidationError("outside restriction contains window-internal edge " +
                            std::to_string(e));
    }
    sets.unite(w.host()->edge(e).u, w.host()->edge(e).v);
  }
  return partition_boundary(w, [&](VertexId v) { return sets.find(v); });
}

BoundaryPartition inside_relation(const Window& w, std::span<const EdgeId> inside_edges) {
  DisjointSets sets(w.size());
  for (EdgeId e : inside_edges) {
    if (e >= w.host()->edge_count() || !w.is_internal_edge(e)) {
      throw ValidationError("edge " + std::to_string(e) + " is not internal to the window");
    }
    const Edge& ed = w.host()->edge(e);
    const auto a = static_cast<std::uint32_t>(w.local_index(ed.u));
    const auto b = static_cast<std::uint32_t>(w.local_index(ed.v));
    if (!sets.unite(a, b)) {
      throw ValidationError("inside edges contain a cycle (edge " + std::to_string(e) + ")");
    }
  }
  return partition_boundary(
      w, [&](VertexId v) { return sets.find(static_cast<std::uint32_t>(w.local_index(v))); });
}

BoundaryPartition inside_relation(const Window& w, const Forest& f) {
  require_same_host(f, w);
  std::vector<EdgeId> inside;
  for (EdgeId e : f.edges()) {
    if (w.is_internal_edge(e)) inside.push_back(e);
  }
  return inside_relation(w, inside);
}

Forest strong_gibbs_resample(const Forest& f, const Window& w, RandomStream& rng) {
  require_same_host(f, w);
  const Graph& g = *f.host();
  if (!g.is_connected()) throw DisconnectedGraphError("strong resampling needs a connected graph");
  if (!f.is_spanning_tree()) throw ValidationError("strong resampling needs a spanning tree");

  DisjointSets outside(g.vertex_count());
  for (EdgeId e : outside_edges(f, w)) outside.unite(g.edge(e).u, g.edge(e).v);

  // H': window vertices with ~O classes identified, window-internal edges only.
  std::map<std::uint32_t, VertexId> class_id;
  std::vector<VertexId> vertex_class(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto key = outside.find(w.vertices()[i]);
    vertex_class[i] = class_id.emplace(key, static_cast<VertexId>(class_id.size())).first->second;
  }
  std::vector<Edge> quotient_edges;
  const auto internal = w.internal_edges();
  quotient_edges.reserve(internal.size());
  for (EdgeId e : internal) {
    const Edge& ed = g.edge(e);
    quotient_edges.push_back(
        {vertex_class[w.local_index(ed.u)], vertex_class[w.local_index(ed.v)]});
  }
  const GraphPtr quotient = Graph::create(class_id.size(), std::move(quotient_edges));
  if (!quotient->is_connected()) {
    throw SamplingError("window quotient is disconnected; input is not a spanning tree");
  }
  const Forest tree = wilson_tree(quotient, 0, rng);
  std::vector<EdgeId> inside;
  inside.reserve(tree.edge_count());
  for (EdgeId local : tree.edges()) inside.push_back(internal[local]);
  Forest out = with_window_edges(f, w, inside);
  if (!out.is_spanning_tree()) throw SamplingError("strong resample did not produce a spanning tree");
  return out;
}

CompatibleSet compatible_window_forests(const Window& w, const BoundaryPartition& partition) {
  CompatibleSet set;
  set.edges = internal_non_loop(w);
  if (set.edges.size() > kEnumerationEdgeLimit) {
    throw CapacityError("window has " + std::to_string(set.edges.size()) +
                        " internal edges; enumeration is limited to " +
                        std::to_string(kEnumerationEdgeLimit));
  }
  set.masks = CompatibleEnumerator(w, set.edges, block_labels(w, partition),
                                   partition.block_count())
                  .run();
  std::sort(set.masks.begin(), set.masks.end());
  return set;
}

Forest weak_gibbs_resample(const Forest& f, const Window& w, RandomStream& rng,
                           WeakGibbsOptions options) {
  require_same_host(f, w);
  if (w.covers_host()) throw ValidationError("weak resampling needs a window smaller than the graph");
  const BoundaryPartition partition = inside_relation(w, f);
  const std::vector<EdgeId> candidates = internal_non_loop(w);

  if (candidates.size() <= options.enumeration_edge_limit) {
    return with_window_edges(f, w, pick_from_enumeration(w, partition, rng));
  }

  // Uniform spanning tree of the window plus an auxiliary vertex joined to each
  // window-boundary vertex. Dropping the auxiliary edges leaves a forest whose
  // components all meet the boundary; each member of the compatible set has
  // prod(|block|) preimages, a constant, so acceptance on the partition is
  // uniform over the compatible set.
  const auto aux = static_cast<VertexId>(w.size());
  std::vector<Edge> edges;
  edges.reserve(candidates.size() + w.boundary().size());
  for (EdgeId e : candidates) {
    const Edge& ed = w.host()->edge(e);
    edges.push_back({static_cast<VertexId>(w.local_index(ed.u)),
                     static_cast<VertexId>(w.local_index(ed.v))});
  }
  for (VertexId b : w.boundary()) edges.push_back({static_cast<VertexId>(w.local_index(b)), aux});
  const GraphPtr augmented = Graph::create(w.size() + 1, std::move(edges));
  if (!augmented->is_connected()) {
    throw SamplingError("window has a part that cannot reach its boundary");
  }

  for (std::uint64_t attempt = 0; attempt < options.max_rejections; ++attempt) {
    const Forest proposal = wilson_tree(augmented, aux, rng);
    std::vector<EdgeId> inside;
    for (EdgeId local : proposal.edges()) {
      if (local < candidates.size()) inside.push_back(candidates[local]);
    }
    if (inside_relation(w, inside) == partition) return with_window_edges(f, w, inside);
  }
  if (candidates.size() <= kEnumerationEdgeLimit) {
    return with_window_edges(f, w, pick_from_enumeration(w, partition, rng));
  }
  throw SamplingError("weak resampling exceeded " + std::to_string(options.max_rejections) +
                      " rejections");
}

EscapeClosure escape_closure(const Forest& f, std::span<const VertexId> c) {
  const Graph& g = *f.host();
  const std::size_t n = g.vertex_count();
  std::vector<char> in_c(n, 0);
  EscapeClosure out;
  for (VertexId v : c) {
    if (v >= n) throw ValidationError("closure vertex " + std::to_string(v) + " is not a vertex");
    in_c[v] = 1;
  }
  for (VertexId v = 0; v < n; ++v) {
    if (in_c[v]) out.window.push_back(v);
  }
  const auto adj = f.adjacency();

  // Vertices joined to the host boundary by an f-path avoiding C.
  std::vector<char> reach(n, 0);
  std::deque<VertexId> queue;
  for (VertexId b : g.boundary()) {
    if (!in_c[b]) {
      reach[b] = 1;
      queue.push_back(b);
    }
  }
  while (!queue.empty()) {
    const VertexId u = queue.front();
    queue.pop_front();
    for (VertexId w : adj[u]) {
      if (!in_c[w] && !reach[w]) {
        reach[w] = 1;
        queue.push_back(w);
      }
    }
  }

  std::vector<char> in_cf(n, 0);
  for (VertexId v : out.window) {
    bool escapes = g.is_boundary(v);
    for (VertexId w : adj[v]) escapes = escapes || reach[w];
    if (escapes) {
      in_cf[v] = 1;
      out.c_f.push_back(v);
    }
  }

  // Components of f minus c_f; keep those without a host-boundary vertex.
  std::vector<char> seen(n, 0);
  std::vector<char> in_tilde(in_cf);
  std::vector<VertexId> component;
  for (VertexId s = 0; s < n; ++s) {
    if (seen[s] || in_cf[s]) continue;
    component.clear();
    bool touches_boundary = false;
    seen[s] = 1;
    queue.push_back(s);
    while (!queue.empty()) {
      const VertexId u = queue.front();
      queue.pop_front();
      component.push_back(u);
      touches_boundary = touches_boundary || g.is_boundary(u);
      for (VertexId w : adj[u]) {
        if (!in_cf[w] && !seen[w]) {
          seen[w] = 1;
          queue.push_back(w);
        }
      }
    }
    if (!touches_boundary) {
      for (VertexId u : component) in_tilde[u] = 1;
    }
  }
  for (VertexId v = 0; v < n; ++v) {
    if (in_tilde[v]) out.c_tilde.push_back(v);
  }
  return out;
}

TrunkClosure trunk_closure(const Forest& f, std::span<const VertexId> trunk,
                           std::span<const VertexId> c) {
  const Graph& g = *f.host();
  const std::size_t n = g.vertex_count();
  if (trunk.empty()) throw ValidationError("trunk is empty");
  const auto adj = f.adjacency();
  std::vector<char> on_trunk(n, 0);
  for (std::size_t i = 0; i < trunk.size(); ++i) {
    if (trunk[i] >= n) throw ValidationError("trunk vertex is not a vertex");
    if (on_trunk[trunk[i]]) throw ValidationError("trunk is not self-avoiding");
    on_trunk[trunk[i]] = 1;
    if (i > 0 && std::find(adj[trunk[i - 1]].begin(), adj[trunk[i - 1]].end(), trunk[i]) ==
                     adj[trunk[i - 1]].end()) {
      throw ValidationError("consecutive trunk vertices are not joined by a forest edge");
    }
  }
  std::vector<char> in_c(n, 0);
  for (VertexId v : c) {
    if (v >= n) throw ValidationError("closure vertex is not a vertex");
    in_c[v] = 1;
  }
  std::size_t first = trunk.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < trunk.size(); ++i) {
    if (in_c[trunk[i]]) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first == trunk.size()) throw ValidationError("trunk does not meet C");

  TrunkClosure out;
  out.c1 = trunk[first];
  out.c2 = trunk[last];
  std::vector<VertexId> region{out.c1};
  if (last != first) region.push_back(out.c2);

  if (last > first + 1) {
    std::vector<char> seen(n, 0);
    seen[out.c1] = seen[out.c2] = 1;
    std::vector<VertexId> component;
    std::deque<VertexId> queue{trunk[first + 1]};
    seen[trunk[first + 1]] = 1;
    while (!queue.empty()) {
      const VertexId u = queue.front();
      queue.pop_front();
      component.push_back(u);
      out.segment_reaches_boundary = out.segment_reaches_boundary || g.is_boundary(u);
      for (VertexId w : adj[u]) {
        if (!seen[w]) {
          seen[w] = 1;
          queue.push_back(w);
        }
      }
    }
    if (!out.segment_reaches_boundary) region.insert(region.end(), component.begin(), component.end());
  }
  std::sort(region.begin(), region.end());
  out.region = std::move(region);
  return out;
}

}  // namespace usf
