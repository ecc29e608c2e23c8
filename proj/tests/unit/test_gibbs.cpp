#include <doctest.h>

#include <deque>
#include <map>
#include <set>

#include "../support/corpus.hpp"
#include "../support/stats.hpp"
#include "usf/error.hpp"
#include "usf/gibbs.hpp"
#include "usf/kirchhoff.hpp"
#include "usf/sampler.hpp"
#include "usf/union_find.hpp"

using namespace usf;

namespace {

Window central(const GraphPtr& g, std::int32_t c, std::int32_t e) {
  const std::int32_t corner[] = {c, c}, extent[] = {e, e};
  return box_window(g, corner, extent);
}

EdgeId edge_between(const Graph& g, VertexId a, VertexId b) {
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    if ((ed.u == a && ed.v == b) || (ed.u == b && ed.v == a)) return e;
  }
  FAIL("no edge");
  return 0;
}

VertexId at(const Graph& g, int x, int y) {
  const std::int32_t xy[] = {x, y};
  return *g.vertex_at(xy);
}

// Test-side oracle for the compatible set: all acyclic subsets of the window's
// internal edges, filtered by the partition and the boundary condition.
std::set<std::uint32_t> brute_compatible(const Window& w, const BoundaryPartition& p) {
  const Graph& g = *w.host();
  std::vector<EdgeId> edges(w.internal_edges().begin(), w.internal_edges().end());
  std::set<std::uint32_t> out;
  for (std::uint32_t m = 0; m < (1u << edges.size()); ++m) {
    DisjointSets ds(g.vertex_count());
    bool ok = true;
    std::vector<EdgeId> chosen;
    for (std::size_t i = 0; i < edges.size() && ok; ++i) {
      if (m >> i & 1) {
        ok = ds.unite(g.edge(edges[i]).u, g.edge(edges[i]).v);
        chosen.push_back(edges[i]);
      }
    }
    if (!ok) continue;
    std::set<std::uint32_t> touching;
    for (VertexId b : w.boundary()) touching.insert(ds.find(b));
    for (VertexId v : w.vertices()) ok = ok && touching.count(ds.find(v));
    if (ok && inside_relation(w, chosen) == p) out.insert(m);
  }
  return out;
}

}  // namespace

TEST_CASE("outside_relation examples") {
  auto g = build_box(2, 4);
  const Window w = central(g, 1, 2);
  CHECK(outside_relation(w, Forest::empty(g)).block_count() == 4);

  // one outside path joining (1,1) and (2,1) through (1,0),(2,0)
  const EdgeId path[] = {edge_between(*g, at(*g, 1, 1), at(*g, 1, 0)),
                         edge_between(*g, at(*g, 1, 0), at(*g, 2, 0)),
                         edge_between(*g, at(*g, 2, 0), at(*g, 2, 1))};
  const auto p = outside_relation(w, Forest(g, path));
  CHECK(p.block_count() == 3);
  CHECK(p.blocks[0] == std::vector<VertexId>{at(*g, 1, 1), at(*g, 2, 1)});

  // spanning tree of the 12-vertex ring plus the straddling edges into the window
  std::vector<EdgeId> ring;
  for (int x = 0; x < 3; ++x) ring.push_back(edge_between(*g, at(*g, x, 0), at(*g, x + 1, 0)));
  for (int y = 0; y < 3; ++y) ring.push_back(edge_between(*g, at(*g, 3, y), at(*g, 3, y + 1)));
  for (int x = 3; x > 0; --x) ring.push_back(edge_between(*g, at(*g, x, 3), at(*g, x - 1, 3)));
  for (int y = 3; y > 1; --y) ring.push_back(edge_between(*g, at(*g, 0, y), at(*g, 0, y - 1)));
  for (auto [x, y, ox, oy] : {std::array{1, 1, 1, 0}, {2, 1, 2, 0}, {1, 2, 0, 2}, {2, 2, 3, 2}}) {
    ring.push_back(edge_between(*g, at(*g, x, y), at(*g, ox, oy)));
  }
  const auto all = outside_relation(w, Forest(g, ring));
  CHECK(all.block_count() == 1);
  CHECK(all.blocks[0].size() == 4);

  const EdgeId inner[] = {edge_between(*g, at(*g, 1, 1), at(*g, 2, 1))};
  CHECK_THROWS_AS(outside_relation(w, Forest(g, inner)), ValidationError);
}

TEST_CASE("inside_relation examples") {
  auto g = build_box(2, 5);
  const Window w = central(g, 1, 3);
  CHECK(w.boundary().size() == 8);
  CHECK(inside_relation(w, std::span<const EdgeId>{}).block_count() == 8);

  const EdgeId one[] = {edge_between(*g, at(*g, 1, 1), at(*g, 2, 1))};
  const auto p1 = inside_relation(w, one);
  CHECK(p1.block_count() == 7);
  CHECK(p1.blocks[0] == std::vector<VertexId>{at(*g, 1, 1), at(*g, 2, 1)});

  const EdgeId ell[] = {edge_between(*g, at(*g, 1, 2), at(*g, 1, 1)),
                        edge_between(*g, at(*g, 1, 1), at(*g, 2, 1))};
  const auto p2 = inside_relation(w, ell);
  CHECK(p2.block_count() == 6);
  CHECK(p2.blocks[0].size() == 3);

  const EdgeId cycle[] = {edge_between(*g, at(*g, 1, 1), at(*g, 2, 1)), edge_between(*g, at(*g, 2, 1), at(*g, 2, 2)),
                          edge_between(*g, at(*g, 2, 2), at(*g, 1, 2)), edge_between(*g, at(*g, 1, 2), at(*g, 1, 1))};
  CHECK_THROWS_AS(inside_relation(w, cycle), ValidationError);
  const EdgeId crossing[] = {edge_between(*g, at(*g, 1, 1), at(*g, 0, 1))};
  CHECK_THROWS_AS(inside_relation(w, crossing), ValidationError);
}

TEST_CASE("partition canonical form") {
  const auto a = BoundaryPartition::canonical({{5, 3}, {1}, {4, 2}});
  const auto b = BoundaryPartition::canonical({{2, 4}, {3, 5}, {1}});
  CHECK(a == b);
  CHECK(a.blocks[0] == std::vector<VertexId>{1});
  CHECK(a.blocks[1] == std::vector<VertexId>{2, 4});
  CHECK_THROWS_AS(BoundaryPartition::canonical({{1, 2}, {2}}), ValidationError);
}

TEST_CASE("strong resample: single-vertex window leaves the tree alone") {
  auto g = build_box(2, 3);
  RandomStream rng(1, 0);
  const Forest t = wilson_tree(g, 0, rng);
  const Window w = induced_window(g, {4});
  for (int i = 0; i < 20; ++i) CHECK(strong_gibbs_resample(t, w, rng) == t);
}

TEST_CASE("strong resample: two parallel edges after identification") {
  // window a-b-c of the 4-cycle; outside edges c-d, d-a join a and c
  auto c4 = Graph::create(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  const Window w = induced_window(c4, {0, 1, 2});
  const EdgeId start[] = {0, 2, 3};
  const Forest f(c4, start);
  RandomStream rng(2, 0);
  int with_ab = 0;
  for (int i = 0; i < 20000; ++i) {
    const Forest g = strong_gibbs_resample(f, w, rng);
    REQUIRE(g.is_spanning_tree());
    REQUIRE(g.contains(2));
    REQUIRE(g.contains(3));
    with_ab += g.contains(0);
  }
  CHECK(std::abs(with_ab / 20000.0 - 0.5) < 0.02);
}

TEST_CASE("strong resample keeps the uniform law on the corpus") {
  for (const auto& [name, g] : testing::small_corpus()) {
    if (g->vertex_count() < 4) continue;
    CAPTURE(name);
    const auto trees = enumerate_forest_masks(*g, ForestConstraint::all_trees());
    std::map<std::uint32_t, std::size_t> index;
    for (std::size_t i = 0; i < trees.size(); ++i) index[trees[i]] = i;
    std::vector<std::uint64_t> observed(trees.size(), 0);
    if (trees.size() > 200) continue;
    // each window drops one of three vertices, so every edge is internal to one
    std::vector<Window> windows;
    for (VertexId skip : {VertexId(0), VertexId(1), VertexId(g->vertex_count() - 1)}) {
      std::vector<VertexId> vs;
      for (VertexId v = 0; v < g->vertex_count(); ++v) {
        if (v != skip) vs.push_back(v);
      }
      windows.push_back(induced_window(g, vs));
    }
    RandomStream rng(3, 0);
    Forest t = wilson_tree(g, 0, rng);
    for (int i = 0; i < 100; ++i) t = strong_gibbs_resample(t, windows[i % 3], rng);
    for (int i = 0; i < 20000; ++i) {
      t = strong_gibbs_resample(t, windows[i % 3], rng);
      std::uint32_t m = 0;
      for (EdgeId e : t.edges()) m |= 1u << e;
      ++observed[index.at(m)];
    }
    // consecutive states are correlated, so only a loose sanity bound here;
    // the acceptance suite runs the chi-square on K4 with thinning
    for (auto c : observed) CHECK(c > 0);
  }
}

TEST_CASE("compatible set matches brute force") {
  auto g = build_box(2, 5);
  const Window w = central(g, 1, 3);
  RandomStream rng(4, 0);
  for (int i = 0; i < 30; ++i) {
    const Forest f = sample_boundary_mode(g, BoundaryMode::wired, rng);
    const auto p = inside_relation(w, f);
    const CompatibleSet set = compatible_window_forests(w, p);
    std::set<std::uint32_t> got;
    for (auto m : set.masks) {
      std::uint32_t full = 0;  // re-index onto internal_edges order
      for (std::size_t i = 0; i < set.edges.size(); ++i) {
        if (m >> i & 1) {
          const auto pos = std::find(w.internal_edges().begin(), w.internal_edges().end(), set.edges[i]) -
                           w.internal_edges().begin();
          full |= 1u << pos;
        }
      }
      got.insert(full);
    }
    CHECK(got == brute_compatible(w, p));
  }
}

TEST_CASE("weak resample: singleton partition on a 3x3 window is uniform") {
  auto g = build_box(2, 5);
  const Window w = central(g, 1, 3);
  const VertexId centre = at(*g, 2, 2);
  const EdgeId spoke[] = {edge_between(*g, centre, at(*g, 2, 1))};
  // every other vertex rooted on its own; only the centre is attached
  const Forest f(g, spoke);
  REQUIRE(inside_relation(w, f).block_count() == 8);
  REQUIRE(compatible_window_forests(w, inside_relation(w, f)).masks.size() == 4);

  RandomStream rng(5, 0);
  std::map<std::vector<EdgeId>, int> freq;
  for (int i = 0; i < 50000; ++i) {
    const Forest h = weak_gibbs_resample(f, w, rng);
    freq[std::vector<EdgeId>(h.edges().begin(), h.edges().end())]++;
  }
  CHECK(freq.size() == 4);
  for (auto& [edges, c] : freq) CHECK(std::abs(c / 50000.0 - 0.25) < 0.02);
}

TEST_CASE("weak resample: rejection path is uniform") {
  // 2x2 window of a 4x4 box joined into one block: the four spanning trees of
  // the window 4-cycle are compatible
  auto g = build_box(2, 4);
  const Window w = central(g, 1, 2);
  const EdgeId three[] = {edge_between(*g, at(*g, 1, 1), at(*g, 2, 1)), edge_between(*g, at(*g, 2, 1), at(*g, 2, 2)),
                          edge_between(*g, at(*g, 2, 2), at(*g, 1, 2))};
  const Forest f(g, three);
  REQUIRE(compatible_window_forests(w, inside_relation(w, f)).masks.size() == 4);
  RandomStream rng(6, 0);
  std::map<std::vector<EdgeId>, int> freq;
  for (int i = 0; i < 50000; ++i) {
    const Forest h = weak_gibbs_resample(f, w, rng, WeakGibbsOptions{0, 1'000'000});
    freq[std::vector<EdgeId>(h.edges().begin(), h.edges().end())]++;
  }
  CHECK(freq.size() == 4);
  for (auto& [edges, c] : freq) CHECK(std::abs(c / 50000.0 - 0.25) < 0.02);
}

TEST_CASE("weak resample invariants") {
  auto g = build_box(2, 6);
  const Window w = central(g, 2, 3);
  RandomStream rng(6, 0);
  for (int i = 0; i < 300; ++i) {
    const Forest f = sample_boundary_mode(g, BoundaryMode::wired, rng);
    const std::size_t limit = i % 2 ? 20 : 0;
    const Forest h = weak_gibbs_resample(f, w, rng, WeakGibbsOptions{limit, 1'000'000});
    CHECK(inside_relation(w, h) == inside_relation(w, f));
    CHECK(restrict_outside(h, w) == restrict_outside(f, w));
    CHECK(h.component_count() == f.component_count());
    // every component still meets the host boundary
    std::set<std::size_t> touching;
    for (VertexId b : g->boundary()) touching.insert(h.component(b));
    CHECK(touching.size() == h.component_count());
  }
  // a unique compatible forest is returned unchanged
  auto c4 = build_box(2, 2);
  const Window single = induced_window(c4, {0});
  const Forest t = wilson_tree(c4, 0, rng);
  CHECK(weak_gibbs_resample(t, single, rng) == t);
  const Window whole = induced_window(c4, {0, 1, 2, 3});
  CHECK_THROWS_AS(weak_gibbs_resample(t, whole, rng), ValidationError);
}

TEST_CASE("weak resample raises window entropy from a point mass") {
  auto g = build_box(2, 5);
  const Window w = central(g, 1, 3);
  const VertexId centre = at(*g, 2, 2);
  const EdgeId spoke[] = {edge_between(*g, centre, at(*g, 2, 1))};
  const Forest f(g, spoke);
  RandomStream rng(7, 0);
  std::set<std::vector<EdgeId>> support;
  for (int i = 0; i < 100; ++i) {
    const Forest h = weak_gibbs_resample(f, w, rng);
    support.insert(std::vector<EdgeId>(h.edges().begin(), h.edges().end()));
  }
  CHECK(support.size() > 1);
}

TEST_CASE("escape_closure examples") {
  auto path = build_box(1, 5);
  const EdgeId all[] = {0, 1, 2, 3};
  const Forest f(path, all);
  const VertexId mid[] = {2};
  const auto e = escape_closure(f, mid);
  CHECK(e.c_f == std::vector<VertexId>{2});
  CHECK(e.c_tilde == std::vector<VertexId>{2});

  const VertexId interior[] = {1, 2, 3};
  const auto e2 = escape_closure(f, interior);
  CHECK(e2.c_f == std::vector<VertexId>{1, 3});
  CHECK(e2.c_tilde == std::vector<VertexId>{1, 2, 3});
}

TEST_CASE("escape_closure invariant by brute force") {
  auto g = build_box(2, 5);
  RandomStream rng(8, 0);
  std::vector<VertexId> c;
  for (int x = 1; x <= 3; ++x)
    for (int y = 1; y <= 3; ++y) c.push_back(at(*g, x, y));
  for (int trial = 0; trial < 200; ++trial) {
    const Forest f = wilson_tree(g, 0, rng);
    const auto e = escape_closure(f, c);
    std::set<VertexId> cf(e.c_f.begin(), e.c_f.end());
    for (VertexId v : e.c_f) CHECK(std::count(c.begin(), c.end(), v) == 1);
    for (VertexId v : e.c_f) CHECK(std::count(e.c_tilde.begin(), e.c_tilde.end(), v) == 1);
    for (VertexId v : c) CHECK(std::count(e.c_tilde.begin(), e.c_tilde.end(), v) == 1);
    // from c_tilde minus c_f, the boundary is unreachable without crossing c_f
    const auto adj = f.adjacency();
    for (VertexId v : e.c_tilde) {
      if (cf.count(v)) continue;
      std::vector<char> seen(g->vertex_count(), 0);
      std::deque<VertexId> q{v};
      seen[v] = 1;
      bool escaped = false;
      while (!q.empty()) {
        const VertexId u = q.front();
        q.pop_front();
        escaped = escaped || g->is_boundary(u);
        for (VertexId x : adj[u]) {
          if (!seen[x] && !cf.count(x)) {
            seen[x] = 1;
            q.push_back(x);
          }
        }
      }
      CHECK_FALSE(escaped);
    }
  }
}

TEST_CASE("trunk_closure examples") {
  auto path = build_box(1, 7);
  const EdgeId all[] = {0, 1, 2, 3, 4, 5};
  const Forest f(path, all);
  const VertexId trunk[] = {0, 1, 2, 3, 4, 5, 6};
  const VertexId one[] = {3};
  const auto t1 = trunk_closure(f, trunk, one);
  CHECK(t1.c1 == 3);
  CHECK(t1.c2 == 3);
  CHECK(t1.region == std::vector<VertexId>{3});

  const VertexId three[] = {2, 3, 4};
  const auto t3 = trunk_closure(f, trunk, three);
  CHECK(t3.c1 == 2);
  CHECK(t3.c2 == 4);
  CHECK(t3.region == std::vector<VertexId>{2, 3, 4});
  CHECK_FALSE(t3.segment_reaches_boundary);

  const VertexId miss[] = {0};
  const VertexId short_trunk[] = {2, 3};
  CHECK_THROWS_AS(trunk_closure(f, short_trunk, miss), ValidationError);

  // random trees: the region avoids the host boundary except at c1 and c2
  auto g = build_box(2, 7);
  RandomStream rng(9, 0);
  for (int i = 0; i < 100; ++i) {
    const Forest t = wilson_tree(g, 0, rng);
    // the tree path between two opposite corners
    const auto adj = t.adjacency();
    std::vector<VertexId> parent(g->vertex_count(), ~0u);
    std::deque<VertexId> q{0};
    parent[0] = 0;
    while (!q.empty()) {
      const VertexId u = q.front();
      q.pop_front();
      for (VertexId x : adj[u]) {
        if (parent[x] == ~0u) {
          parent[x] = u;
          q.push_back(x);
        }
      }
    }
    std::vector<VertexId> tr;
    for (VertexId v = VertexId(g->vertex_count() - 1); v != 0; v = parent[v]) tr.push_back(v);
    tr.push_back(0);
    std::vector<VertexId> c;
    for (int x = 2; x <= 4; ++x)
      for (int y = 2; y <= 4; ++y) c.push_back(at(*g, x, y));
    if (std::none_of(tr.begin(), tr.end(), [&](VertexId v) { return std::count(c.begin(), c.end(), v); })) continue;
    const auto cl = trunk_closure(t, tr, c);
    for (VertexId v : cl.region) {
      if (v != cl.c1 && v != cl.c2) CHECK_FALSE(g->is_boundary(v));
    }
  }
}
