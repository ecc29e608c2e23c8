#include "usf/forest_stats.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "usf/error.hpp"
#include "usf/parallel.hpp"

namespace usf {
namespace {

void require_self_avoiding(const Graph& g, std::span<const WalkPath> paths) {
  std::vector<char> seen(g.vertex_count(), 0);
  for (const WalkPath& p : paths) {
    for (VertexId v : p) {
      if (v >= g.vertex_count()) throw ValidationError("path vertex is not a vertex");
      if (seen[v]) throw ValidationError("path revisits vertex " + std::to_string(v));
      seen[v] = 1;
    }
    for (VertexId v : p) seen[v] = 0;
  }
}

std::vector<char> eligible_vertices(const Graph& g, const NearIntersectionConfig& cfg) {
  std::vector<char> ok(g.vertex_count(), 1);
  if (cfg.margin > 0 && !g.boundary().empty()) {
    const auto d = bfs_distances(g, g.boundary(), cfg.margin);
    for (VertexId v = 0; v < g.vertex_count(); ++v) ok[v] = d[v] >= cfg.margin;
  }
  if (cfg.orbit_filter) {
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      ok[v] = ok[v] && g.orbit_label(v) == *cfg.orbit_filter;
    }
  }
  return ok;
}

// BFS tree of one forest component from `source`.
void forest_bfs(const std::vector<std::vector<VertexId>>& adj, VertexId source,
                std::vector<unsigned>& dist, std::vector<VertexId>& parent,
                std::vector<VertexId>& visited) {
  for (VertexId v : visited) dist[v] = std::numeric_limits<unsigned>::max();
  visited.clear();
  std::deque<VertexId> queue{source};
  dist[source] = 0;
  parent[source] = source;
  while (!queue.empty()) {
    const VertexId u = queue.front();
    queue.pop_front();
    visited.push_back(u);
    for (VertexId w : adj[u]) {
      if (dist[w] == std::numeric_limits<unsigned>::max()) {
        dist[w] = dist[u] + 1;
        parent[w] = u;
        queue.push_back(w);
      }
    }
  }
}

TrunkSet detect_trunks_impl(const Forest& f, RandomStream* orientation) {
  const Graph& g = *f.host();
  const auto adj = f.adjacency();
  std::vector<std::vector<VertexId>> contacts(f.component_count());
  for (VertexId b : g.boundary()) contacts[f.component(b)].push_back(b);

  TrunkSet out;
  std::vector<unsigned> dist(g.vertex_count(), std::numeric_limits<unsigned>::max());
  std::vector<VertexId> parent(g.vertex_count());
  std::vector<VertexId> visited;
  for (const auto& bs : contacts) {
    if (bs.empty()) continue;
    if (bs.size() == 1) {
      out.c_f_bar.push_back(bs.front());
      continue;
    }
    unsigned best = 0;
    VertexId best_a = 0;
    VertexId best_b = 0;
    for (std::size_t i = 0; i < bs.size(); ++i) {
      forest_bfs(adj, bs[i], dist, parent, visited);
      for (std::size_t j = i + 1; j < bs.size(); ++j) {
        if (dist[bs[j]] > best) {
          best = dist[bs[j]];
          best_a = bs[i];
          best_b = bs[j];
        }
      }
    }
    if (best == 0) continue;
    forest_bfs(adj, best_a, dist, parent, visited);
    WalkPath path;
    for (VertexId v = best_b; v != best_a; v = parent[v]) path.push_back(v);
    path.push_back(best_a);
    std::reverse(path.begin(), path.end());
    const bool flip = orientation != nullptr && orientation->coin();
    if (flip) std::reverse(path.begin(), path.end());
    out.c_b.push_back(path.front());
    out.c_f.push_back(path.back());
    out.c_f_bar.push_back(path.back());
    out.trunks.push_back(std::move(path));
    out.reversed.push_back(flip);
  }
  std::sort(out.c_f_bar.begin(), out.c_f_bar.end());
  return out;
}

}  // namespace

std::vector<unsigned> bfs_distances(const Graph& g, std::span<const VertexId> sources,
                                    unsigned limit) {
  const unsigned far = limit + 1;
  std::vector<unsigned> dist(g.vertex_count(), far);
  std::deque<VertexId> queue;
  for (VertexId s : sources) {
    if (dist[s] != 0) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const VertexId u = queue.front();
    queue.pop_front();
    if (dist[u] >= limit) continue;
    for (const Incidence& inc : g.incident(u)) {
      if (dist[inc.neighbor] == far) {
        dist[inc.neighbor] = dist[u] + 1;
        queue.push_back(inc.neighbor);
      }
    }
  }
  return dist;
}

ComponentStats component_stats(const Forest& f) {
  const Graph& g = *f.host();
  ComponentStats s;
  s.component_count = f.component_count();
  std::vector<std::size_t> sizes(f.component_count(), 0);
  std::vector<char> touches(f.component_count(), 0);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    ++sizes[f.component(v)];
    if (g.is_boundary(v)) touches[f.component(v)] = 1;
  }
  for (std::size_t size : sizes) ++s.size_histogram[size];
  s.boundary_touch_count = static_cast<std::size_t>(std::count(touches.begin(), touches.end(), 1));
  return s;
}

TrunkSet detect_trunks(const Forest& f) { return detect_trunks_impl(f, nullptr); }

TrunkSet detect_trunks(const Forest& f, RandomStream& orientation) {
  return detect_trunks_impl(f, &orientation);
}

std::uint64_t count_near_intersections(const Graph& g, std::span<const WalkPath> trunks,
                                       const NearIntersectionConfig& cfg) {
  require_self_avoiding(g, trunks);
  const auto eligible = eligible_vertices(g, cfg);
  std::uint64_t count = 0;
  for (std::size_t j = 0; j < trunks.size(); ++j) {
    const auto dist = bfs_distances(g, trunks[j], cfg.k);
    for (std::size_t i = 0; i < trunks.size(); ++i) {
      if (i == j) continue;
      for (VertexId v : trunks[i]) {
        if (eligible[v] && dist[v] <= cfg.k) ++count;
      }
    }
  }
  return count;
}

std::vector<std::uint64_t> count_fncp(const Graph& g, std::span<const WalkPath> paths,
                                      const NearIntersectionConfig& cfg) {
  require_self_avoiding(g, paths);
  const auto eligible = eligible_vertices(g, cfg);
  std::vector<std::uint64_t> counts(paths.size(), 0);
  std::vector<VertexId> earlier;
  for (std::size_t r = 0; r < paths.size(); ++r) {
    if (r > 0) {
      const auto near_earlier = bfs_distances(g, earlier, cfg.k);
      std::vector<unsigned> from_last;
      for (VertexId v : paths[r]) {
        if (!eligible[v] || near_earlier[v] > cfg.k) continue;
        if (!from_last.empty() && from_last[v] < cfg.k) continue;
        ++counts[r];
        const VertexId source[] = {v};
        from_last = bfs_distances(g, source, cfg.k);
      }
    }
    earlier.insert(earlier.end(), paths[r].begin(), paths[r].end());
  }
  return counts;
}

ProportionEstimate wilson_score(std::uint64_t successes, std::uint64_t samples, double z) {
  ProportionEstimate out;
  out.successes = successes;
  out.samples = samples;
  if (samples == 0) return out;
  const double n = static_cast<double>(samples);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  out.estimate = p;
  // The bounds are exact at the extremes; the formula leaves rounding residue there.
  out.ci_low = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  out.ci_high = successes == samples ? 1.0 : std::min(1.0, centre + half);
  return out;
}

WilsonPaths wilson_paths(const Graph& g, std::span<const VertexId> c_b,
                         std::span<const VertexId> c_f_bar, RandomStream& rng) {
  std::vector<char> is_root(g.vertex_count(), 0);
  for (VertexId r : c_f_bar) {
    if (r >= g.vertex_count()) throw ValidationError("root is not a vertex");
    is_root[r] = 1;
  }
  std::vector<char> in_tree(is_root);
  WilsonPaths out;
  for (VertexId b : c_b) {
    if (b >= g.vertex_count()) throw ValidationError("start point is not a vertex");
    WalkPath path = in_tree[b] ? WalkPath{b} : loop_erased_walk(g, b, in_tree, rng);
    if (!is_root[path.back()] || (in_tree[b] && !is_root[b])) out.disjoint = false;
    for (VertexId v : path) in_tree[v] = 1;
    out.paths.push_back(std::move(path));
  }
  return out;
}

ProportionEstimate estimate_nu_a(const Graph& g, std::span<const VertexId> c_b,
                                 std::span<const VertexId> c_f_bar, std::uint64_t m,
                                 const NearIntersectionConfig& cfg, const RandomStream& rng,
                                 std::uint64_t samples) {
  if (c_b.empty() || c_f_bar.empty()) {
    ProportionEstimate zero;
    zero.samples = samples;
    return zero;
  }
  if (!g.is_connected()) throw DisconnectedGraphError("path sampling needs a connected graph");
  for (VertexId b : c_b) {
    if (std::find(c_f_bar.begin(), c_f_bar.end(), b) != c_f_bar.end()) {
      throw ValidationError("start set and root set must be disjoint");
    }
  }
  std::vector<char> hit(samples, 0);
  parallel_for(samples, [&](std::size_t i) {
    RandomStream stream = rng.substream(i);
    const WilsonPaths wp = wilson_paths(g, c_b, c_f_bar, stream);
    if (!wp.disjoint) return;
    hit[i] = m == 0 || count_near_intersections(g, wp.paths, cfg) >= m;
  });
  return wilson_score(static_cast<std::uint64_t>(std::count(hit.begin(), hit.end(), 1)), samples);
}

DecayFit nu_a_decay(const Graph& g, std::span<const VertexId> c_b,
                    std::span<const VertexId> c_f_bar, std::span<const std::uint64_t> ms,
                    const NearIntersectionConfig& cfg, const RandomStream& rng,
                    std::uint64_t samples_per_m) {
  DecayFit fit;
  fit.ms.assign(ms.begin(), ms.end());
  for (std::size_t j = 0; j < ms.size(); ++j) {
    fit.estimates.push_back(
        estimate_nu_a(g, c_b, c_f_bar, ms[j], cfg, rng.substream(j), samples_per_m));
  }
  fit.fit_valid = ms.size() >= 2;
  std::vector<double> x, y, w;
  for (std::size_t j = 0; j < ms.size(); ++j) {
    const auto& e = fit.estimates[j];
    if (e.successes == 0) {
      fit.fit_valid = false;
      continue;
    }
    const double n = static_cast<double>(e.samples);
    const double var = std::max((1 - e.estimate) / (n * e.estimate), 1.0 / (n * n));
    x.push_back(static_cast<double>(ms[j]));
    y.push_back(std::log(e.estimate));
    w.push_back(1.0 / var);
  }
  if (!fit.fit_valid) return fit;
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double xbar = sx / sw;
  const double ybar = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
    sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
  }
  if (sxx <= 0) {
    fit.fit_valid = false;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.slope_se = std::sqrt(1.0 / sxx);
  fit.slope_upper95 = fit.slope + 1.959963984540054 * fit.slope_se;
  return fit;
}

std::vector<double> hitting_probability_exact(const Graph& g, std::span<const VertexId> target,
                                              std::span<const VertexId> absorbing) {
  const std::size_t n = g.vertex_count();
  if (target.empty() && absorbing.empty()) {
    throw ValidationError("target and absorbing sets cannot both be empty");
  }
  std::vector<double> value(n, 0.0);
  std::vector<char> fixed(n, 0);
  for (VertexId t : target) {
    if (t >= n) throw ValidationError("target vertex is not a vertex");
    fixed[t] = 1;
    value[t] = 1.0;
  }
  for (VertexId a : absorbing) {
    if (a >= n) throw ValidationError("absorbing vertex is not a vertex");
    if (fixed[a]) throw ValidationError("vertex " + std::to_string(a) + " is both target and absorbing");
    fixed[a] = 1;
  }
  std::vector<long> index(n, -1);
  long unknowns = 0;
  for (VertexId v = 0; v < n; ++v) {
    if (!fixed[v]) index[v] = unknowns++;
  }
  if (unknowns == 0) return value;

  using SparseMatrix = Eigen::SparseMatrix<double>;
  std::vector<Eigen::Triplet<double>> entries;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unknowns);
  for (VertexId v = 0; v < n; ++v) {
    if (fixed[v]) continue;
    const long i = index[v];
    if (g.degree(v) == 0) throw ValidationError("isolated vertex makes the system singular");
    entries.emplace_back(i, i, static_cast<double>(g.degree(v)));
    for (const Incidence& inc : g.incident(v)) {
      if (fixed[inc.neighbor]) {
        rhs[i] += value[inc.neighbor];
      } else {
        entries.emplace_back(i, index[inc.neighbor], -1.0);
      }
    }
  }
  SparseMatrix a(unknowns, unknowns);
  a.setFromTriplets(entries.begin(), entries.end());
  Eigen::SimplicialLDLT<SparseMatrix> solver(a);
  if (solver.info() != Eigen::Success) {
    throw ValidationError("hitting system is singular; some region cannot reach target or absorbing set");
  }
  Eigen::VectorXd x = solver.solve(rhs);
  for (int refine = 0; refine < 3; ++refine) {
    const Eigen::VectorXd r = rhs - a * x;
    if (r.lpNorm<Eigen::Infinity>() <= 1e-12) break;
    x += solver.solve(r);
  }
  for (VertexId v = 0; v < n; ++v) {
    // exact values are probabilities; clamp away solver roundoff
    if (!fixed[v]) value[v] = std::clamp(x[index[v]], 0.0, 1.0);
  }
  return value;
}

HarmonicityReport check_harmonicity(const Graph& g, std::span<const double> values,
                                    std::span<const VertexId> target,
                                    std::span<const VertexId> absorbing) {
  if (values.size() != g.vertex_count()) throw ValidationError("one value per vertex is required");
  std::vector<char> role(g.vertex_count(), 0);  // 1 target, 2 absorbing
  for (VertexId t : target) role.at(t) = 1;
  for (VertexId a : absorbing) role.at(a) = 2;

  HarmonicityReport report;
  double margin = std::numeric_limits<double>::infinity();
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (role[v] == 2 || g.degree(v) == 0) continue;
    double sum = 0.0;
    for (const Incidence& inc : g.incident(v)) sum += values[inc.neighbor];
    const double mean = sum / static_cast<double>(g.degree(v));
    if (role[v] == 0) {
      const double defect = std::abs(values[v] - mean);
      if (!report.worst_vertex || defect > report.harmonic_defect) {
        report.harmonic_defect = defect;
        report.worst_vertex = v;
      }
    } else if (mean - values[v] < margin) {
      margin = mean - values[v];
      report.worst_target = v;
    }
  }
  report.subharmonic_margin = report.worst_target ? margin : 0.0;
  return report;
}

std::vector<HitTrendRow> central_hit_trend(std::span<const int> sides, std::size_t samples,
                                           const RandomStream& rng) {
  std::vector<HitTrendRow> rows;
  for (std::size_t s = 0; s < sides.size(); ++s) {
    const int side = sides[s];
    if (side < 4) throw ValidationError("hit trend needs side >= 4");
    const GraphPtr box = build_box(2, side);
    const int lo = side / 4;
    const int hi = lo + side / 2;
    std::vector<VertexId> centre;
    for (VertexId v = 0; v < box->vertex_count(); ++v) {
      const auto c = box->coord(v);
      if (c[0] >= lo && c[0] < hi && c[1] >= lo && c[1] < hi) centre.push_back(v);
    }
    HitTrendRow row;
    row.side = side;
    row.min_min_hit = 1.0;
    const RandomStream side_rng = rng.substream(s);
    for (std::size_t i = 0; i < samples; ++i) {
      RandomStream stream = side_rng.substream(i);
      const Forest tree = wilson_tree(box, 0, stream);
      const TrunkSet trunks = detect_trunks(tree);
      const WalkPath& trunk = trunks.trunks.front();
      std::vector<char> on_trunk(box->vertex_count(), 0);
      for (VertexId v : trunk) on_trunk[v] = 1;
      std::vector<VertexId> absorbing;
      for (VertexId b : box->boundary()) {
        if (!on_trunk[b]) absorbing.push_back(b);
      }
      const auto p = hitting_probability_exact(*box, trunk, absorbing);
      double lowest = 1.0;
      for (VertexId v : centre) lowest = std::min(lowest, p[v]);
      row.mean_min_hit += lowest / static_cast<double>(samples);
      row.min_min_hit = std::min(row.min_min_hit, lowest);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace usf
