#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "usf/forest.hpp"
#include "usf/graph.hpp"
#include "usf/random.hpp"
#include "usf/sampler.hpp"

namespace usf {

enum class EntropyMethod {
  wired_exact,       // log count of boundary-rooted forests
  mu_gn_enumerated,  // log count of forests with every tree touching the boundary
  torus_exact,       // log count of spanning trees of the torus
  torus_integral,    // quadrature limit
  plugin_empirical,  // plug-in estimate from samples
};

std::string to_string(EntropyMethod m);

struct EntropyRecord {
  std::string graph;  // e.g. "box(2,16)"
  std::size_t vertex_count = 0;
  double log_count = 0.0;
  double per_site = 0.0;
  EntropyMethod method = EntropyMethod::wired_exact;
};

struct EntropyReport {
  std::vector<EntropyRecord> records;
  /// 2 p(n) - p(n/2) from the last two records when their sides differ by a
  /// factor of two (first-order extrapolation in 1/side).
  std::optional<double> limit_estimate;
};

/// Per-site log counts log(N) / |V| on build_box(dim, side) for each side.
/// method must be wired_exact, mu_gn_enumerated or torus_exact (the last on
/// build_torus instead of build_box).
EntropyReport per_site_entropy_sequence(int dim, std::span<const int> sides, EntropyMethod method);

/// (2 pi)^-dim times the integral of log(sum_i (2 - 2 cos x_i)) over the
/// period, on a midpoint grid with `points` nodes per axis. dim 1 returns 0.
double torus_entropy_oracle(int dim, int points);

struct PluginEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::size_t distinct_patterns = 0;
  std::size_t samples = 0;
};

/// Empirical pattern entropy of the window's internal edges, divided by the
/// window vertex count, with a jackknife standard error.
PluginEstimate plugin_entropy(std::span<const Forest> samples, const Window& w);

/// Exact probabilities of each pattern of window internal edges under the
/// free or wired uniform law on the window's host. Key bit i refers to
/// internal_edges()[i]; zero-probability patterns are omitted.
std::map<std::uint32_t, double> exact_window_patterns(const Window& w, BoundaryMode mode);
/// -sum p log p over exact_window_patterns, divided by the window vertex count.
double exact_window_entropy(const Window& w, BoundaryMode mode);

/// Every edge of a 2D box that joins horizontally adjacent vertices.
Forest all_horizontal_forest(const GraphPtr& box2d);

/// Draws one forest of the host per call.
using ForestSampler = std::function<Forest(const GraphPtr&, RandomStream&)>;

struct GapReport {
  int side = 0;
  std::string competitor;
  std::vector<std::int32_t> window_corner;
  std::vector<std::int32_t> window_extent;
  std::size_t samples = 0;
  PluginEstimate competitor_entropy;
  double wired_window_entropy = 0.0;  // exact, same window and normalization
  double wired_exact_per_site = 0.0;  // whole box
  double torus_oracle = 0.0;
  double gap = 0.0;                   // wired_window_entropy - competitor estimate
  bool gap_declared = false;          // competitor + 3 SE < wired_window_entropy
};

struct GapOptions {
  std::size_t samples = 200;
  /// Central 2x2 block when empty.
  std::vector<std::int32_t> window_corner;
  std::vector<std::int32_t> window_extent;
  std::uint64_t seed = 0;
};

/// Competitor: the all-horizontal forest when `sampler` is empty.
GapReport entropy_gap_experiment(int side, const ForestSampler& sampler = {},
                                 GapOptions options = {});

}  // namespace usf
