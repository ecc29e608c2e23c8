#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <deque>

#include "usf/entropy.hpp"
#include "usf/error.hpp"
#include "usf/forest_stats.hpp"
#include "usf/kirchhoff.hpp"

using namespace usf;

namespace {

VertexId at(const Graph& g, int x, int y) {
  const std::int32_t xy[] = {x, y};
  return *g.vertex_at(xy);
}

int manhattan(const Graph& g, VertexId a, VertexId b) {
  return std::abs(g.coord(a)[0] - g.coord(b)[0]) + std::abs(g.coord(a)[1] - g.coord(b)[1]);
}

// Reference greedy scan with box distances equal to Manhattan distances.
std::vector<std::uint64_t> reference_fncp(const Graph& g, const std::vector<WalkPath>& paths, int k) {
  std::vector<std::uint64_t> out(paths.size(), 0);
  for (std::size_t r = 1; r < paths.size(); ++r) {
    std::optional<VertexId> last;
    for (VertexId v : paths[r]) {
      int near = 1 << 30;
      for (std::size_t i = 0; i < r; ++i)
        for (VertexId u : paths[i]) near = std::min(near, manhattan(g, u, v));
      if (near > k) continue;
      if (last && manhattan(g, *last, v) < k) continue;
      ++out[r];
      last = v;
    }
  }
  return out;
}

// Forest path from v to the root of its component.
WalkPath path_to_root(const Forest& f, VertexId v, const std::vector<char>& is_root) {
  const auto adj = f.adjacency();
  std::vector<VertexId> parent(f.host()->vertex_count(), ~0u);
  std::deque<VertexId> q{v};
  parent[v] = v;
  while (!q.empty()) {
    const VertexId u = q.front();
    q.pop_front();
    if (is_root[u]) {
      WalkPath p;
      for (VertexId x = u; x != v; x = parent[x]) p.push_back(x);
      p.push_back(v);
      std::reverse(p.begin(), p.end());
      return p;
    }
    for (VertexId x : adj[u]) {
      if (parent[x] == ~0u) {
        parent[x] = u;
        q.push_back(x);
      }
    }
  }
  return {};
}

}  // namespace

TEST_CASE("component_stats examples") {
  auto g = build_box(2, 4);
  RandomStream rng(1, 0);
  const auto tree = component_stats(wilson_tree(g, 0, rng));
  CHECK(tree.component_count == 1);
  CHECK(tree.size_histogram.at(16) == 1);
  CHECK(tree.boundary_touch_count == 1);
  const auto empty = component_stats(Forest::empty(g));
  CHECK(empty.component_count == 16);
  CHECK(empty.size_histogram.at(1) == 16);
  CHECK(empty.boundary_touch_count == 12);
  for (int i = 0; i < 100; ++i) {
    CHECK(component_stats(sample_boundary_mode(g, BoundaryMode::wired, rng)).component_count == 12);
  }
}

TEST_CASE("detect_trunks examples") {
  auto path = build_box(1, 6);
  const EdgeId all[] = {0, 1, 2, 3, 4};
  const auto t = detect_trunks(Forest(path, all));
  REQUIRE(t.trunks.size() == 1);
  CHECK(t.trunks[0] == WalkPath{0, 1, 2, 3, 4, 5});
  CHECK(t.c_b == std::vector<VertexId>{0});
  CHECK(t.c_f == std::vector<VertexId>{5});

  // star: interior centre 0, boundary leaves 1, 2, 3; all leaf pairs tie
  auto star = Graph::create(4, {{0, 1}, {0, 2}, {0, 3}}, {1, 2, 3});
  const EdgeId se[] = {0, 1, 2};
  const auto st = detect_trunks(Forest(star, se));
  REQUIRE(st.trunks.size() == 1);
  CHECK(st.trunks[0] == WalkPath{1, 0, 2});

  auto box = build_box(2, 5);
  const auto rows = detect_trunks(all_horizontal_forest(box));
  CHECK(rows.trunks.size() == 5);
  for (const auto& tr : rows.trunks) CHECK(tr.size() == 5);
  CHECK(rows.c_f_bar == rows.c_f);

  // a boundary tree without a trunk contributes one vertex to c_f_bar
  auto b4 = build_box(2, 4);
  RandomStream rng(2, 0);
  for (int i = 0; i < 50; ++i) {
    const Forest f = sample_boundary_mode(b4, BoundaryMode::wired, rng);
    const auto ts = detect_trunks(f, rng);
    std::size_t lonely = 0;
    const auto stats = component_stats(f);
    for (std::size_t c = 0; c < f.component_count(); ++c) {
      std::size_t contacts = 0;
      for (VertexId b : b4->boundary()) contacts += f.component(b) == c;
      lonely += contacts == 1;
    }
    CHECK(ts.c_f_bar.size() == ts.trunks.size() + lonely);
    for (std::size_t j = 0; j < ts.trunks.size(); ++j) {
      CHECK(b4->is_boundary(ts.trunks[j].front()));
      CHECK(b4->is_boundary(ts.trunks[j].back()));
      CHECK(ts.c_b[j] == ts.trunks[j].front());
    }
    (void)stats;
  }
}

TEST_CASE("near intersections on the all-horizontal forest") {
  for (int n : {4, 6, 9}) {
    auto box = build_box(2, n);
    const auto rows = detect_trunks(all_horizontal_forest(box));
    for (unsigned k : {0u, 1u, 2u}) {
      for (unsigned margin : {0u, 1u}) {
        CAPTURE(n);
        CAPTURE(k);
        CAPTURE(margin);
        std::uint64_t expect = 0;
        for (std::size_t i = 0; i < rows.trunks.size(); ++i) {
          for (std::size_t j = 0; j < rows.trunks.size(); ++j) {
            if (i == j) continue;
            for (VertexId v : rows.trunks[i]) {
              const int x = box->coord(v)[0], y = box->coord(v)[1];
              const int edge = std::min({x, y, n - 1 - x, n - 1 - y});
              int d = 1 << 30;
              for (VertexId u : rows.trunks[j]) d = std::min(d, manhattan(*box, u, v));
              expect += edge >= int(margin) && d <= int(k);
            }
          }
        }
        const NearIntersectionConfig cfg{k, std::nullopt, margin};
        CHECK(count_near_intersections(*box, rows.trunks, cfg) == expect);
        if (k == 1 && margin == 0) CHECK(expect == std::uint64_t(2 * (n - 1) * n));
        if (k == 0) CHECK(expect == 0);
      }
    }
    // one trunk alone never counts
    const std::vector<WalkPath> single{rows.trunks[0]};
    CHECK(count_near_intersections(*box, single, {}) == 0);
  }
}

TEST_CASE("orbit filter restricts counted vertices") {
  auto box = build_box(2, 4);
  std::vector<int> labels(16);
  for (VertexId v = 0; v < 16; ++v) labels[v] = int(box->coord(v)[0] % 2);
  std::vector<Edge> edges(box->edges().begin(), box->edges().end());
  LatticeEmbedding emb{2, {}};
  for (VertexId v = 0; v < 16; ++v) {
    emb.coords.push_back(box->coord(v)[0]);
    emb.coords.push_back(box->coord(v)[1]);
  }
  std::vector<VertexId> bnd(box->boundary().begin(), box->boundary().end());
  auto labelled = Graph::create(16, edges, bnd, emb, labels);
  const auto rows = detect_trunks(all_horizontal_forest(labelled));
  NearIntersectionConfig cfg;
  cfg.orbit_filter = 0;
  CHECK(count_near_intersections(*labelled, rows.trunks, cfg) == 2 * 3 * 2);
}

TEST_CASE("count_fncp") {
  auto box = build_box(2, 12);
  const std::vector<WalkPath> one{{at(*box, 0, 0), at(*box, 1, 0)}};
  CHECK(count_fncp(*box, one, {}) == std::vector<std::uint64_t>{0});

  WalkPath a, b, c;
  for (int x = 0; x < 12; ++x) {
    a.push_back(at(*box, x, 2));
    b.push_back(at(*box, x, 3));
    c.push_back(at(*box, x, 8));
  }
  const std::vector<WalkPath> far{a, c};
  CHECK(count_fncp(*box, far, {}) == std::vector<std::uint64_t>{0, 0});
  for (unsigned k : {1u, 2u, 3u}) {
    CAPTURE(k);
    const std::vector<WalkPath> near{a, b, c};
    NearIntersectionConfig cfg;
    cfg.k = k;
    CHECK(count_fncp(*box, near, cfg) == reference_fncp(*box, near, int(k)));
  }
  // appending far-away vertices after the last collision changes nothing
  WalkPath bent = b;
  for (int y = 4; y < 8; ++y) bent.push_back(at(*box, 11, y));
  const std::vector<WalkPath> base{a, b}, extended{a, bent};
  CHECK(count_fncp(*box, base, {}) == count_fncp(*box, extended, {}));

  const std::vector<WalkPath> looped{{at(*box, 0, 0), at(*box, 1, 0), at(*box, 0, 0)}};
  CHECK_THROWS_AS(count_fncp(*box, looped, {}), ValidationError);
}

TEST_CASE("wilson_score") {
  const auto p = wilson_score(5, 10);
  CHECK(p.estimate == 0.5);
  CHECK(p.ci_low == doctest::Approx(0.2366).epsilon(1e-3));
  CHECK(p.ci_high == doctest::Approx(0.7634).epsilon(1e-3));
  const auto z = wilson_score(0, 100);
  CHECK(z.ci_low == 0.0);
  CHECK(z.ci_high == doctest::Approx(0.0370).epsilon(1e-2));
}

TEST_CASE("estimate_nu_a edge cases") {
  auto box = build_box(2, 6);
  const RandomStream rng(3, 0);
  const VertexId cb[] = {at(*box, 0, 1), at(*box, 0, 4)};
  std::vector<VertexId> cf;
  for (int y = 0; y < 6; ++y) cf.push_back(at(*box, 5, y));
  CHECK(estimate_nu_a(*box, {}, cf, 0, {}, rng, 100).estimate == 0.0);
  CHECK(estimate_nu_a(*box, cb, {}, 0, {}, rng, 100).estimate == 0.0);
  // more near intersections than vertices is impossible
  CHECK(estimate_nu_a(*box, cb, cf, 1000, {}, rng, 500).successes == 0);
  const VertexId overlap[] = {cf[0]};
  CHECK_THROWS_AS(estimate_nu_a(*box, overlap, cf, 0, {}, rng, 10), ValidationError);
  // deterministic given the stream, independent of thread count
  const auto a = estimate_nu_a(*box, cb, cf, 2, {}, rng, 2000);
  const auto b = estimate_nu_a(*box, cb, cf, 2, {}, rng, 2000);
  CHECK(a.successes == b.successes);
}

TEST_CASE("estimate_nu_a agrees with exact enumeration on a 3x3 box") {
  auto box = build_box(2, 3);  // 12 edges
  const std::vector<VertexId> cb{at(*box, 0, 0), at(*box, 0, 2)};
  const std::vector<VertexId> cf{at(*box, 2, 0), at(*box, 2, 1), at(*box, 2, 2)};
  std::vector<char> is_root(box->vertex_count(), 0);
  for (VertexId r : cf) is_root[r] = 1;
  const auto forests = enumerate_forests(box, ForestConstraint::rooted_exactly_one(cf));
  for (std::uint64_t m : {0u, 1u, 2u, 3u}) {
    CAPTURE(m);
    std::size_t good = 0;
    for (const Forest& f : forests) {
      std::vector<WalkPath> paths;
      std::vector<char> used(box->vertex_count(), 0);
      bool disjoint = true;
      for (VertexId b : cb) {
        WalkPath p = path_to_root(f, b, is_root);
        for (VertexId v : p) {
          disjoint = disjoint && !used[v];
          used[v] = 1;
        }
        paths.push_back(p);
      }
      if (disjoint && (m == 0 || count_near_intersections(*box, paths, {}) >= m)) ++good;
    }
    const double exact = double(good) / double(forests.size());
    const auto est = estimate_nu_a(*box, cb, cf, m, {}, RandomStream(4, m), 40000);
    const double se = std::sqrt(std::max(exact * (1 - exact), 1e-6) / 40000);
    CHECK(std::abs(est.estimate - exact) < 4 * se + 1e-12);
  }
}

TEST_CASE("nu_a_decay produces a fit") {
  auto box = build_box(2, 6);
  const VertexId cb[] = {at(*box, 0, 1), at(*box, 0, 4)};
  std::vector<VertexId> cf;
  for (int y = 0; y < 6; ++y) cf.push_back(at(*box, 5, y));
  const std::uint64_t ms[] = {0, 2, 4};
  const auto fit = nu_a_decay(*box, cb, cf, ms, {}, RandomStream(5, 0), 4000);
  REQUIRE(fit.estimates.size() == 3);
  CHECK(fit.fit_valid);
  CHECK(fit.slope < 0);
  CHECK(fit.slope_upper95 > fit.slope);
  for (std::size_t j = 1; j < 3; ++j) {
    CHECK(fit.estimates[j].successes <= fit.estimates[j - 1].successes);
  }
}

TEST_CASE("hitting probabilities: gambler's ruin") {
  for (int n : {2, 10, 101}) {
    auto line = build_box(1, n + 1);
    const VertexId target[] = {0};
    const VertexId absorbing[] = {VertexId(n)};
    const auto p = hitting_probability_exact(*line, target, absorbing);
    for (int v = 0; v <= n; ++v) CHECK(std::abs(p[v] - double(n - v) / n) <= 1e-12);
    const auto h = check_harmonicity(*line, p, target, absorbing);
    CHECK(h.harmonic_defect <= 1e-12);
  }
  auto g = build_box(2, 4);
  std::vector<VertexId> all(16);
  for (VertexId v = 0; v < 16; ++v) all[v] = v;
  const auto ones = hitting_probability_exact(*g, all, {});
  for (double x : ones) CHECK(x == 1.0);
  CHECK(check_harmonicity(*g, ones, all).harmonic_defect == 0.0);
  const VertexId t0[] = {0};
  CHECK_THROWS_AS(hitting_probability_exact(*g, t0, t0), ValidationError);
  CHECK_THROWS_AS(hitting_probability_exact(*g, {}, {}), ValidationError);
}

TEST_CASE("harmonicity report catches a perturbation") {
  auto g = build_box(2, 5);
  const VertexId target[] = {at(*g, 2, 2)};
  std::vector<VertexId> absorbing(g->boundary().begin(), g->boundary().end());
  auto p = hitting_probability_exact(*g, target, absorbing);
  const auto clean = check_harmonicity(*g, p, target, absorbing);
  CHECK(clean.harmonic_defect <= 1e-12);
  CHECK(clean.subharmonic_margin <= 0.0);  // target value 1 is a maximum
  const VertexId bumped = at(*g, 1, 2);
  p[bumped] += 0.1;
  const auto bad = check_harmonicity(*g, p, target, absorbing);
  CHECK(bad.harmonic_defect >= 0.1 - 1e-12);
  CHECK(*bad.worst_vertex == bumped);

  // escape probability 1 - p is subharmonic at the target
  auto q = hitting_probability_exact(*g, target, absorbing);
  for (double& x : q) x = 1 - x;
  CHECK(check_harmonicity(*g, q, target, absorbing).subharmonic_margin >= -1e-12);
}

TEST_CASE("central hit trend") {
  const int sides[] = {8, 12};
  const auto rows = central_hit_trend(sides, 3, RandomStream(6, 0));
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.mean_min_hit >= 0.0);
    CHECK(r.mean_min_hit <= 1.0);
    CHECK(r.min_min_hit <= r.mean_min_hit + 1e-15);
  }
}

TEST_CASE("bfs distances cap") {
  auto g = build_box(1, 10);
  const VertexId s[] = {0};
  const auto d = bfs_distances(*g, s, 3);
  CHECK(d[3] == 3);
  CHECK(d[4] == 4);
  CHECK(d[9] == 4);
}
