#include "usf/entropy.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <unordered_map>

#include "usf/error.hpp"
#include "usf/kirchhoff.hpp"
#include "usf/union_find.hpp"

namespace usf {
namespace {

std::string descriptor(const char* kind, int dim, int side) {
  return std::string(kind) + "(" + std::to_string(dim) + "," + std::to_string(side) + ")";
}

std::vector<EdgeId> pattern_edges(const Window& w) {
  std::vector<EdgeId> out;
  for (EdgeId e : w.internal_edges()) {
    if (!w.host()->is_self_loop(e)) out.push_back(e);
  }
  return out;
}

constexpr std::size_t kMaxPatternEdges = 24;

}  // namespace

std::string to_string(EntropyMethod m) {
  switch (m) {
    case EntropyMethod::wired_exact: return "wired-exact";
    case EntropyMethod::mu_gn_enumerated: return "mu_Gn-enumerated";
    case EntropyMethod::torus_exact: return "torus-exact";
    case EntropyMethod::torus_integral: return "torus-integral";
    case EntropyMethod::plugin_empirical: return "plugin-empirical";
  }
  return "unknown";
}

EntropyReport per_site_entropy_sequence(int dim, std::span<const int> sides, EntropyMethod method) {
  if (dim < 1) throw ValidationError("dim must be positive");
  EntropyReport report;
  for (int side : sides) {
    EntropyRecord rec;
    rec.method = method;
    LogCount count;
    switch (method) {
      case EntropyMethod::wired_exact: {
        const GraphPtr box = build_box(dim, side);
        rec.graph = descriptor("box", dim, side);
        rec.vertex_count = box->vertex_count();
        count = count_rooted_forests(*box, box->boundary());
        break;
      }
      case EntropyMethod::mu_gn_enumerated: {
        const GraphPtr box = build_box(dim, side);
        rec.graph = descriptor("box", dim, side);
        rec.vertex_count = box->vertex_count();
        const auto n = count_enumerated_forests(*box, ForestConstraint::boundary_at_least_one());
        count.value = std::log(static_cast<double>(n));
        count.exact = BigInt(n);
        break;
      }
      case EntropyMethod::torus_exact: {
        const GraphPtr torus = build_torus(dim, side);
        rec.graph = descriptor("torus", dim, side);
        rec.vertex_count = torus->vertex_count();
        count = count_spanning_trees(*torus);
        break;
      }
      default:
        throw ValidationError("per-site sequence needs a count-based method");
    }
    rec.log_count = count.value;
    rec.per_site = count.value / static_cast<double>(rec.vertex_count);
    report.records.push_back(rec);
  }
  if (sides.size() >= 2 && sides[sides.size() - 1] == 2 * sides[sides.size() - 2]) {
    const auto n = report.records.size();
    report.limit_estimate = 2 * report.records[n - 1].per_site - report.records[n - 2].per_site;
  }
  return report;
}

double torus_entropy_oracle(int dim, int points) {
  if (points < 64) throw ValidationError("quadrature_points must be at least 64");
  if (dim == 1) return 0.0;
  if (dim != 2) throw ValidationError("torus oracle supports dim 1 or 2");
  // Midpoint nodes never hit the logarithmic singularity at the origin.
  std::vector<double> c(points);
  for (int i = 0; i < points; ++i) {
    c[i] = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * (i + 0.5) / points);
  }
  long double total = 0.0L;
  for (int i = 0; i < points; ++i) {
    long double row = 0.0L;
    for (int j = 0; j < points; ++j) row += std::log(c[i] + c[j]);
    total += row;
  }
  return static_cast<double>(total / (static_cast<long double>(points) * points));
}

PluginEstimate plugin_entropy(std::span<const Forest> samples, const Window& w) {
  if (samples.size() < 100) throw ValidationError("plugin entropy needs at least 100 samples");
  const auto edges = pattern_edges(w);
  if (edges.empty() || edges.size() > kMaxPatternEdges) {
    throw ValidationError("degenerate window: needs 1 to 24 internal edges");
  }
  std::unordered_map<std::uint32_t, std::size_t> counts;
  for (const Forest& f : samples) {
    if (f.host() != w.host()) throw ValidationError("sample host differs from window host");
    std::uint32_t key = 0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (f.contains(edges[i])) key |= std::uint32_t{1} << i;
    }
    ++counts[key];
  }
  const double n = static_cast<double>(samples.size());
  const double scale = 1.0 / static_cast<double>(w.size());
  auto xlogx = [](double x) { return x > 0 ? x * std::log(x) : 0.0; };
  double s = 0.0;
  for (const auto& [key, c] : counts) s += xlogx(static_cast<double>(c));
  const double full = std::log(n) - s / n;

  // Leave-one-out values depend only on the dropped sample's pattern.
  double mean = 0.0;
  std::vector<std::pair<double, double>> loo;  // (value, multiplicity)
  for (const auto& [key, c] : counts) {
    const double cd = static_cast<double>(c);
    const double s_minus = s - xlogx(cd) + xlogx(cd - 1);
    const double value = std::log(n - 1) - s_minus / (n - 1);
    loo.emplace_back(value, cd);
    mean += value * cd / n;
  }
  double ss = 0.0;
  for (const auto& [value, mult] : loo) ss += mult * (value - mean) * (value - mean);

  PluginEstimate out;
  out.estimate = full * scale;
  out.standard_error = std::sqrt((n - 1) / n * ss) * scale;
  out.distinct_patterns = counts.size();
  out.samples = samples.size();
  return out;
}

std::map<std::uint32_t, double> exact_window_patterns(const Window& w, BoundaryMode mode) {
  const Graph& host = *w.host();
  const auto edges = pattern_edges(w);
  if (edges.size() > kMaxPatternEdges) throw CapacityError("window has more than 24 internal edges");

  GraphPtr base;
  std::vector<VertexId> to_base(host.vertex_count());
  if (mode == BoundaryMode::wired) {
    if (host.boundary().empty()) throw ValidationError("wired law needs a nonempty boundary");
    const std::vector<std::vector<VertexId>> classes{
        std::vector<VertexId>(host.boundary().begin(), host.boundary().end())};
    Quotient q = contract(host, classes);
    base = q.graph;
    to_base = q.vertex_map;
  } else {
    base = w.host();
    for (VertexId v = 0; v < host.vertex_count(); ++v) to_base[v] = v;
  }
  if (!base->is_connected()) throw DisconnectedGraphError("host has no spanning tree");
  const double log_total = count_spanning_trees(*base).value;

  std::vector<char> in_window(host.edge_count(), 0);
  for (EdgeId e : edges) in_window[e] = 1;

  std::map<std::uint32_t, double> out;
  const std::uint32_t patterns = std::uint32_t{1} << edges.size();
  for (std::uint32_t mask = 0; mask < patterns; ++mask) {
    DisjointSets ds(base->vertex_count());
    bool acyclic = true;
    for (std::size_t i = 0; i < edges.size() && acyclic; ++i) {
      if (mask >> i & 1) {
        const Edge& e = host.edge(edges[i]);
        acyclic = ds.unite(to_base[e.u], to_base[e.v]);
      }
    }
    if (!acyclic) continue;
    // Contract the chosen edges, delete the rejected ones, count what is left.
    std::vector<VertexId> id(base->vertex_count(), ~VertexId{0});
    VertexId next = 0;
    for (VertexId v = 0; v < base->vertex_count(); ++v) {
      const VertexId r = static_cast<VertexId>(ds.find(v));
      if (id[r] == ~VertexId{0}) id[r] = next++;
      id[v] = id[r];
    }
    std::vector<Edge> rest;
    for (EdgeId e = 0; e < host.edge_count(); ++e) {
      if (in_window[e]) continue;
      const Edge& ed = host.edge(e);
      const VertexId a = id[to_base[ed.u]];
      const VertexId b = id[to_base[ed.v]];
      if (a != b) rest.push_back({a, b});
    }
    const LogCount c = count_spanning_trees(*Graph::create(next, std::move(rest)));
    if (c.is_zero()) continue;
    out[mask] = std::exp(c.value - log_total);
  }
  return out;
}

double exact_window_entropy(const Window& w, BoundaryMode mode) {
  double h = 0.0;
  for (const auto& [mask, p] : exact_window_patterns(w, mode)) {
    if (p > 0) h -= p * std::log(p);
  }
  return h / static_cast<double>(w.size());
}

Forest all_horizontal_forest(const GraphPtr& box2d) {
  if (box2d->dim() != 2) throw ValidationError("all-horizontal forest needs a 2D lattice graph");
  std::vector<EdgeId> edges;
  for (EdgeId e = 0; e < box2d->edge_count(); ++e) {
    const Edge& ed = box2d->edge(e);
    if (ed.is_loop()) continue;
    if (box2d->coord(ed.u)[1] == box2d->coord(ed.v)[1]) edges.push_back(e);
  }
  return Forest(box2d, edges);
}

GapReport entropy_gap_experiment(int side, const ForestSampler& sampler, GapOptions options) {
  if (side < 4) throw ValidationError("side must be at least 4");
  const GraphPtr box = build_box(2, side);
  GapReport report;
  report.side = side;
  report.competitor = sampler ? "user-supplied" : "all-horizontal";
  report.samples = options.samples;
  if (options.window_corner.empty()) options.window_corner = {side / 2 - 1, side / 2 - 1};
  if (options.window_extent.empty()) options.window_extent = {2, 2};
  report.window_corner = options.window_corner;
  report.window_extent = options.window_extent;
  const Window w = box_window(box, options.window_corner, options.window_extent);

  std::vector<Forest> forests;
  forests.reserve(options.samples);
  const RandomStream base(options.seed, 0);
  for (std::size_t i = 0; i < options.samples; ++i) {
    if (sampler) {
      RandomStream stream = base.substream(i);
      forests.push_back(sampler(box, stream));
    } else {
      forests.push_back(all_horizontal_forest(box));
    }
  }
  report.competitor_entropy = plugin_entropy(forests, w);
  report.wired_window_entropy = exact_window_entropy(w, BoundaryMode::wired);
  const int sides[] = {side};
  report.wired_exact_per_site =
      per_site_entropy_sequence(2, sides, EntropyMethod::wired_exact).records.front().per_site;
  report.torus_oracle = torus_entropy_oracle(2, 512);
  const auto& c = report.competitor_entropy;
  report.gap = report.wired_window_entropy - c.estimate;
  report.gap_declared = c.estimate + 3 * c.standard_error < report.wired_window_entropy;
  return report;
}

}  // namespace usf
