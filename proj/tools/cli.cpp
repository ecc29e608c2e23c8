#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "report.hpp"
#include "usf/entropy.hpp"
#include "usf/error.hpp"
#include "usf/forest_stats.hpp"
#include "usf/gibbs.hpp"
#include "usf/io.hpp"
#include "usf/kirchhoff.hpp"
#include "usf/parallel.hpp"
#include "usf/sampler.hpp"

namespace usf::cli {
namespace {

using Clock = std::chrono::steady_clock;

struct GraphSource {
  std::string file;
  std::vector<int> box;
  std::vector<int> torus;
};

void add_graph_options(CLI::App* app, GraphSource& src) {
  auto* file = app->add_option("--graph", src.file, "Graph file (n m b / edges / boundary line)");
  auto* box = app->add_option("--box", src.box, "Box lattice as D,N")->delimiter(',')->expected(2);
  auto* torus = app->add_option("--torus", src.torus, "Torus lattice as D,N")->delimiter(',')->expected(2);
  file->excludes(box)->excludes(torus);
  box->excludes(torus);
}

GraphPtr load_graph(const GraphSource& src) {
  if (!src.file.empty()) {
    std::ifstream in(src.file);
    if (!in) throw ValidationError("--graph: cannot open " + src.file);
    return read_graph(in);
  }
  if (src.box.size() == 2) return build_box(src.box[0], src.box[1]);
  if (src.torus.size() == 2) return build_torus(src.torus[0], src.torus[1]);
  throw ValidationError("--graph, --box or --torus is required");
}

Json echo_source(const GraphSource& src) {
  Json j = Json::object();
  if (!src.file.empty()) j["graph"] = src.file;
  if (!src.box.empty()) j["box"] = src.box;
  if (!src.torus.empty()) j["torus"] = src.torus;
  return j;
}

struct WindowSpec {
  std::vector<std::int32_t> corner;
  std::vector<std::int32_t> extent;
};

std::vector<std::int32_t> parse_ints(const std::string& text, const std::string& field) {
  std::vector<std::int32_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long v = std::stol(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(static_cast<std::int32_t>(v));
    } catch (const std::exception&) {
      throw ValidationError(field + ": '" + item + "' is not an integer");
    }
  }
  return out;
}

// "corner:extent", e.g. "1,1:2,2"
WindowSpec parse_window(const std::string& text, int dim) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ValidationError("--window: expected CORNER:EXTENT, got '" + text + "'");
  WindowSpec w{parse_ints(text.substr(0, colon), "--window"), parse_ints(text.substr(colon + 1), "--window")};
  if (static_cast<int>(w.corner.size()) != dim || static_cast<int>(w.extent.size()) != dim) {
    throw ValidationError("--window: needs " + std::to_string(dim) + " coordinates in corner and extent");
  }
  for (auto e : w.extent) {
    if (e <= 0) throw ValidationError("--window: extent must be positive");
  }
  return w;
}

Window make_window(const GraphPtr& g, const WindowSpec& spec) {
  try {
    return box_window(g, spec.corner, spec.extent);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("--window: ") + e.what());
  }
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ValidationError("--out: cannot open " + path);
      out_ = &file_;
    }
  }
  std::ostream& stream() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

Json base_report(const std::string& command, Json config, std::uint64_t seed) {
  Json r = Json::object();
  r["command"] = command;
  r["config"] = std::move(config);
  r["version"] = USF_VERSION;
  r["seed"] = seed;
  return r;
}

void emit_report(Json report, Clock::time_point started, const std::string& path, std::ostream& out) {
  report["timestamp_utc"] = utc_now();
  report["timestamp_wall_seconds"] =
      std::chrono::duration<double>(Clock::now() - started).count();
  Output o(path, out);
  write_json(o.stream(), report);
}

Json proportion_json(const ProportionEstimate& p) {
  return {{"successes", p.successes}, {"samples", p.samples}, {"estimate", p.estimate},
          {"ci_low", p.ci_low}, {"ci_high", p.ci_high}};
}

BoundaryMode parse_boundary(const std::string& s) {
  return s == "wired" ? BoundaryMode::wired : BoundaryMode::free;
}

// ---- sample ----------------------------------------------------------------

struct SampleArgs {
  GraphSource src;
  std::string mode = "free";
  std::vector<VertexId> roots;
  std::uint64_t seed = 0;
  std::size_t samples = 1;
  std::string out;
};

void setup_sample(CLI::App& root, SampleArgs& a, std::function<void()>& run, std::ostream& out) {
  auto* app = root.add_subcommand("sample", "Draw forests by Wilson's algorithm");
  add_graph_options(app, a.src);
  app->add_option("--mode", a.mode, "free | wired | rooted")
      ->check(CLI::IsMember({"free", "wired", "rooted"}));
  app->add_option("--roots", a.roots, "Root vertex ids for --mode rooted")->delimiter(',');
  app->add_option("--seed", a.seed, "Random seed");
  app->add_option("--samples", a.samples, "Number of forests")->check(CLI::PositiveNumber);
  app->add_option("--out", a.out, "Forest file (stdout when omitted)");
  app->callback([&a, &run, &out] {
    run = [&a, &out] {
      const GraphPtr g = load_graph(a.src);
      if (a.mode == "rooted" && a.roots.empty()) throw ValidationError("--roots: required for --mode rooted");
      std::vector<std::optional<Forest>> forests(a.samples);
      const RandomStream base(a.seed, 0);
      parallel_for(a.samples, [&](std::size_t i) {
        RandomStream rng = base.substream(i);
        if (a.mode == "rooted") {
          forests[i] = wilson_rooted_forest(g, a.roots, rng);
        } else {
          forests[i] = sample_boundary_mode(g, parse_boundary(a.mode), rng);
        }
      });
      Output o(a.out, out);
      for (const auto& f : forests) write_forest(o.stream(), *f);
    };
  });
}

// ---- count -----------------------------------------------------------------

struct CountArgs {
  GraphSource src;
  std::vector<VertexId> roots;
  bool boundary_mode = false;
  bool log = false;
};

void setup_count(CLI::App& root, CountArgs& a, std::function<void()>& run, std::ostream& out) {
  auto* app = root.add_subcommand("count", "Count spanning trees or rooted spanning forests");
  add_graph_options(app, a.src);
  auto* roots = app->add_option("--roots", a.roots, "Count forests rooted at these vertices")->delimiter(',');
  app->add_flag("--boundary-mode", a.boundary_mode, "Count forests rooted at the graph boundary")
      ->excludes(roots);
  app->add_flag("--log", a.log, "Print the natural log of the count");
  app->callback([&a, &run, &out] {
    run = [&a, &out] {
      const GraphPtr g = load_graph(a.src);
      LogCount c;
      if (a.boundary_mode) {
        c = count_rooted_forests(*g, g->boundary());
      } else if (!a.roots.empty()) {
        c = count_rooted_forests(*g, a.roots);
      } else {
        c = count_spanning_trees(*g);
      }
      if (a.log || !c.exact) {
        out << "log " << format_double(c.value) << "\n";
      } else {
        out << *c.exact << "\n";
      }
    };
  });
}

// ---- marginals -------------------------------------------------------------

struct MarginalArgs {
  GraphSource src;
  std::string out;
};

void setup_marginals(CLI::App& root, MarginalArgs& a, std::function<void()>& run, std::ostream& out) {
  auto* app = root.add_subcommand("marginals", "Exact edge marginals of the uniform spanning tree (CSV)");
  add_graph_options(app, a.src);
  app->add_option("--out", a.out, "CSV file (stdout when omitted)");
  app->callback([&a, &run, &out] {
    run = [&a, &out] {
      const GraphPtr g = load_graph(a.src);
      const MarginalTable t = edge_marginals(g);
      Output o(a.out, out);
      o.stream() << "edge_id,u,v,prob\r\n";
      for (EdgeId e = 0; e < g->edge_count(); ++e) {
        o.stream() << e << ',' << g->edge(e).u << ',' << g->edge(e).v << ','
                   << csv_field(format_double(t.probs[e])) << "\r\n";
      }
    };
  });
}

// ---- entropy ---------------------------------------------------------------

struct EntropyArgs {
  int dim = 2;
  std::vector<int> sides{4};
  std::string method = "wired";
  std::size_t samples = 1000;
  std::string window;
  int points = 512;
  std::string boundary = "wired";
  std::uint64_t seed = 0;
  std::string out;
};

Json record_json(const EntropyRecord& r) {
  return {{"graph", r.graph}, {"vertex_count", r.vertex_count}, {"log_count", r.log_count},
          {"per_site", r.per_site}, {"method", to_string(r.method)}};
}

void setup_entropy(CLI::App& root, EntropyArgs& a, std::function<void()>& run, std::ostream& out) {
  auto* app = root.add_subcommand("entropy", "Per-site entropy: exact counts, torus oracle, plug-in estimate");
  app->add_option("--dim", a.dim, "Lattice dimension")->check(CLI::PositiveNumber);
  app->add_option("--sides", a.sides, "Box sides, comma separated")->delimiter(',');
  app->add_option("--method", a.method, "wired | enum | torus | oracle | plugin")
      ->check(CLI::IsMember({"wired", "enum", "torus", "oracle", "plugin"}));
  app->add_option("--samples", a.samples, "plugin: number of sampled forests")->check(CLI::PositiveNumber);
  app->add_option("--window", a.window, "plugin: window CORNER:EXTENT (default central 2^dim block)");
  app->add_option("--points", a.points, "oracle: quadrature points per axis")->check(CLI::PositiveNumber);
  app->add_option("--boundary", a.boundary, "plugin: free | wired sampling law")
      ->check(CLI::IsMember({"free", "wired"}));
  app->add_option("--seed", a.seed, "Random seed (plugin)");
  app->add_option("--out,--report", a.out, "JSON report (stdout when omitted)");
  app->callback([&a, &run, &out] {
    run = [&a, &out] {
      const auto started = Clock::now();
      Json config = {{"dim", a.dim}, {"sides", a.sides}, {"method", a.method}};
      Json results = Json::object();
      if (a.method == "oracle") {
        config["points"] = a.points;
        const double v = torus_entropy_oracle(a.dim, a.points);
        results["records"] = Json::array({{{"graph", "torus-limit(" + std::to_string(a.dim) + ")"},
                                           {"per_site", v},
                                           {"method", to_string(EntropyMethod::torus_integral)}}});
        results["oracle"] = v;
      } else if (a.method == "plugin") {
        config["samples"] = a.samples;
        config["window"] = a.window;
        config["boundary"] = a.boundary;
        Json records = Json::array();
        const RandomStream base(a.seed, 0);
        for (std::size_t s = 0; s < a.sides.size(); ++s) {
          const GraphPtr box = build_box(a.dim, a.sides[s]);
          WindowSpec spec;
          if (a.window.empty()) {
            spec.corner.assign(a.dim, a.sides[s] / 2 - 1);
            spec.extent.assign(a.dim, 2);
          } else {
            spec = parse_window(a.window, a.dim);
          }
          const Window w = make_window(box, spec);
          std::vector<std::optional<Forest>> draws(a.samples);
          const RandomStream side_rng = base.substream(s);
          parallel_for(a.samples, [&](std::size_t i) {
            RandomStream rng = side_rng.substream(i);
            draws[i] = sample_boundary_mode(box, parse_boundary(a.boundary), rng);
          });
          std::vector<Forest> forests;
          for (auto& d : draws) forests.push_back(std::move(*d));
          const PluginEstimate p = plugin_entropy(forests, w);
          Json rec = {{"graph", "box(" + std::to_string(a.dim) + "," + std::to_string(a.sides[s]) + ")"},
                      {"window_corner", spec.corner},
                      {"window_extent", spec.extent},
                      {"vertex_count", w.size()},
                      {"log_count", p.estimate * static_cast<double>(w.size())},
                      {"per_site", p.estimate},
                      {"standard_error", p.standard_error},
                      {"distinct_patterns", p.distinct_patterns},
                      {"method", to_string(EntropyMethod::plugin_empirical)}};
          rec["exact_window_entropy"] = exact_window_entropy(w, parse_boundary(a.boundary));
          records.push_back(rec);
        }
        results["records"] = records;
      } else {
        const EntropyMethod m = a.method == "wired" ? EntropyMethod::wired_exact
                                : a.method == "enum" ? EntropyMethod::mu_gn_enumerated
                                                     : EntropyMethod::torus_exact;
        const EntropyReport rep = per_site_entropy_sequence(a.dim, a.sides, m);
        Json records = Json::array();
        for (const auto& r : rep.records) records.push_back(record_json(r));
        results["records"] = records;
        if (rep.limit_estimate) results["limit_estimate"] = *rep.limit_estimate;
      }
      Json report = base_report("entropy", config, a.seed);
      report["results"] = results;
      emit_report(report, started, a.out, out);
    };
  });
}

// ---- gibbs-test ------------------------------------------------------------

struct GibbsArgs {
  std::vector<int> box;
  std::string window;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  std::string mode = "weak";
  std::string boundary;
  std::string out;
};

void setup_gibbs(CLI::App& root, GibbsArgs& a, std::function<void()>& run, std::ostream& out) {
  auto* app = root.add_subcommand("gibbs-test", "Resample a window and compare edge marginals before and after");
  app->add_option("--box", a.box, "Box lattice as D,N")->delimiter(',')->expected(2)->required();
  app->add_option("--window", a.window, "Window CORNER:EXTENT")->required();
  app->add_option("--samples", a.samples, "Number of forests")->check(CLI::PositiveNumber);
  app->add_option("--seed", a.seed, "Random seed");
  app->add_option("--mode", a.mode, "weak | strong")->check(CLI::IsMember({"weak", "strong"}));
  app->add_option("--boundary", a.boundary, "free | wired (default wired for weak, free for strong)")
      ->check(CLI::IsMember({"free", "wired"}));
  app->add_option("--out,--report", a.out, "JSON report (stdout when omitted)");
  app->callback([&a, &run, &out] {
    run = [&a, &out] {
      const auto started = Clock::now();
      const std::string boundary = a.boundary.empty() ? (a.mode == "weak" ? "wired" : "free") : a.boundary;
      if (a.mode == "strong" && boundary == "wired") {
        throw ValidationError("--boundary: strong resampling needs spanning trees (free)");
      }
      const GraphPtr box = build_box(a.box[0], a.box[1]);
      const Window w = make_window(box, parse_window(a.window, a.box[0]));
      std::vector<EdgeId> edges;
      for (EdgeId e : w.internal_edges()) {
        if (!box->is_self_loop(e)) edges.push_back(e);
      }
      const std::size_t k = edges.size();
      std::vector<char> before(a.samples * k), after(a.samples * k), kept(a.samples, 1);
      const RandomStream base(a.seed, 0);
      parallel_for(a.samples, [&](std::size_t i) {
        RandomStream rng = base.substream(i);
        const Forest f = sample_boundary_mode(box, parse_boundary(boundary), rng);
        const Forest g = a.mode == "weak" ? weak_gibbs_resample(f, w, rng) : strong_gibbs_resample(f, w, rng);
        if (a.mode == "weak") kept[i] = inside_relation(w, f) == inside_relation(w, g);
        for (std::size_t j = 0; j < k; ++j) {
          before[i * k + j] = f.contains(edges[j]);
          after[i * k + j] = g.contains(edges[j]);
        }
      });
      const double n = static_cast<double>(a.samples);
      Json rows = Json::array();
      double max_z = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        double sb = 0, sa = 0, sd = 0, sdd = 0;
        for (std::size_t i = 0; i < a.samples; ++i) {
          const double d = double(after[i * k + j]) - double(before[i * k + j]);
          sb += before[i * k + j];
          sa += after[i * k + j];
          sd += d;
          sdd += d * d;
        }
        const double mean_d = sd / n;
        const double var_d = a.samples > 1 ? (sdd - n * mean_d * mean_d) / (n - 1) : 0.0;
        const double se = std::sqrt(std::max(var_d, 0.0) / n);
        const double z = se > 0 ? mean_d / se : (mean_d == 0 ? 0.0 : INFINITY);
        max_z = std::max(max_z, std::abs(z));
        rows.push_back({{"edge_id", edges[j]}, {"u", box->edge(edges[j]).u}, {"v", box->edge(edges[j]).v},
                        {"before", sb / n}, {"after", sa / n}, {"difference_se", se}, {"z", z}});
      }
      Json config = {{"box", a.box}, {"window", a.window}, {"samples", a.samples},
                     {"mode", a.mode}, {"boundary", boundary}};
      Json report = base_report("gibbs-test", config, a.seed);
      Json results = {{"edges", rows}, {"max_abs_z", max_z}, {"within_3se", max_z <= 3.0}};
      if (a.mode == "weak") {
        results["relation_preserved"] = std::count(kept.begin(), kept.end(), 1);
      }
      report["results"] = results;
      emit_report(report, started, a.out, out);
    };
  });
}

// ---- trunk-stats -----------------------------------------------------------

struct TrunkArgs {
  std::vector<int> box;
  std::uint64_t seed = 0;
  std::size_t samples = 100;
  unsigned k = 1;
  unsigned margin = 0;
  std::vector<std::uint64_t> ms{1, 2, 4, 8};
  std::string boundary = "wired";
  std::string out;
};

void setup_trunks(CLI::App& root, TrunkArgs& a, std::function<void()>& run, std::ostream& out) {
  auto* app = root.add_subcommand("trunk-stats", "Trunk, component and near-intersection statistics");
  app->add_option("--box", a.box, "Box lattice as 2,N")->delimiter(',')->expected(2)->required();
  app->add_option("--seed", a.seed, "Random seed");
  app->add_option("--samples", a.samples, "Number of forests")->check(CLI::PositiveNumber);
  app->add_option("--k", a.k, "Near-intersection radius");
  app->add_option("--margin", a.margin, "Only count vertices at least this far from the boundary");
  app->add_option("--ms", a.ms, "Thresholds m for the P(count >= m) table")->delimiter(',');
  app->add_option("--boundary", a.boundary, "free | wired")->check(CLI::IsMember({"free", "wired"}));
  app->add_option("--out,--report", a.out, "JSON report (stdout when omitted)");
  app->callback([&a, &run, &out] {
    run = [&a, &out] {
      const auto started = Clock::now();
      if (a.box[0] != 2) throw ValidationError("--box: trunk-stats needs dimension 2");
      const GraphPtr box = build_box(2, a.box[1]);
      const NearIntersectionConfig cfg{a.k, std::nullopt, a.margin};
      std::vector<std::uint64_t> trunks(a.samples), comps(a.samples), touching(a.samples), near(a.samples);
      const RandomStream base(a.seed, 0);
      parallel_for(a.samples, [&](std::size_t i) {
        RandomStream rng = base.substream(i);
        const Forest f = sample_boundary_mode(box, parse_boundary(a.boundary), rng);
        const TrunkSet t = detect_trunks(f, rng);
        const ComponentStats cs = component_stats(f);
        trunks[i] = t.trunks.size();
        comps[i] = cs.component_count;
        touching[i] = cs.boundary_touch_count;
        near[i] = count_near_intersections(*box, t.trunks, cfg);
      });
      auto summary = [&](const std::vector<std::uint64_t>& xs) {
        const double n = static_cast<double>(xs.size());
        double s = 0, ss = 0;
        for (auto x : xs) {
          s += double(x);
          ss += double(x) * double(x);
        }
        const double mean = s / n;
        const double var = xs.size() > 1 ? (ss - n * mean * mean) / (n - 1) : 0.0;
        return Json{{"mean", mean}, {"standard_error", std::sqrt(std::max(var, 0.0) / n)},
                    {"min", *std::min_element(xs.begin(), xs.end())},
                    {"max", *std::max_element(xs.begin(), xs.end())}};
      };
      Json table = Json::array();
      for (auto m : a.ms) {
        const auto hits = static_cast<std::uint64_t>(
            std::count_if(near.begin(), near.end(), [m](std::uint64_t c) { return c >= m; }));
        Json row = proportion_json(wilson_score(hits, a.samples));
        row["m"] = m;
        table.push_back(row);
      }
      Json config = {{"box", a.box}, {"samples", a.samples}, {"k", a.k}, {"margin", a.margin},
                     {"ms", a.ms}, {"boundary", a.boundary}};
      Json report = base_report("trunk-stats", config, a.seed);
      report["results"] = {{"trunk_count", summary(trunks)},
                           {"component_count", summary(comps)},
                           {"boundary_touch_count", summary(touching)},
                           {"near_intersections", summary(near)},
                           {"at_least_m", table},
                           {"trunk_proxy", "boundary-to-boundary forest paths"}};
      emit_report(report, started, a.out, out);
    };
  });
}

// ---- nu-a ------------------------------------------------------------------

struct NuArgs {
  GraphSource src;
  std::vector<VertexId> c_b;
  std::vector<VertexId> c_f;
  std::vector<std::uint64_t> ms{2, 4, 6, 8};
  std::size_t samples = 10000;
  unsigned k = 1;
  unsigned margin = 0;
  std::uint64_t seed = 0;
  std::string out;
};

void setup_nu(CLI::App& root, NuArgs& a, std::function<void()>& run, std::ostream& out) {
  auto* app = root.add_subcommand("nu-a", "Monte Carlo probability of disjoint paths with m near intersections");
  add_graph_options(app, a.src);
  app->add_option("--cb", a.c_b, "Start vertices (default: two left-column vertices of a 2D box)")->delimiter(',');
  app->add_option("--cf", a.c_f, "Root vertices (default: right column of a 2D box)")->delimiter(',');
  app->add_option("--ms", a.ms, "Values of m")->delimiter(',');
  app->add_option("--samples", a.samples, "Samples per m")->check(CLI::PositiveNumber);
  app->add_option("--k", a.k, "Near-intersection radius");
  app->add_option("--margin", a.margin, "Only count vertices at least this far from the boundary");
  app->add_option("--seed", a.seed, "Random seed");
  app->add_option("--out,--report", a.out, "JSON report (stdout when omitted)");
  app->callback([&a, &run, &out] {
    run = [&a, &out] {
      const auto started = Clock::now();
      const GraphPtr g = load_graph(a.src);
      std::vector<VertexId> c_b = a.c_b, c_f = a.c_f;
      if (c_b.empty() || c_f.empty()) {
        if (g->dim() != 2 || a.src.box.empty()) {
          throw ValidationError("--cb/--cf: defaults exist only for 2D --box graphs");
        }
        const int n = a.src.box[1];
        if (c_b.empty()) {
          for (int y : {n / 4, n - 1 - n / 4}) c_b.push_back(static_cast<VertexId>(y * n));
        }
        if (c_f.empty()) {
          for (int y = 0; y < n; ++y) c_f.push_back(static_cast<VertexId>(y * n + n - 1));
        }
      }
      const NearIntersectionConfig cfg{a.k, std::nullopt, a.margin};
      const DecayFit fit = nu_a_decay(*g, c_b, c_f, a.ms, cfg, RandomStream(a.seed, 0), a.samples);
      Json table = Json::array();
      for (std::size_t j = 0; j < fit.ms.size(); ++j) {
        Json row = proportion_json(fit.estimates[j]);
        row["m"] = fit.ms[j];
        table.push_back(row);
      }
      Json config = echo_source(a.src);
      config.update({{"c_b", c_b}, {"c_f_bar", c_f}, {"ms", a.ms}, {"samples", a.samples},
                     {"k", a.k}, {"margin", a.margin}});
      Json report = base_report("nu-a", config, a.seed);
      report["results"] = {{"table", table}, {"slope", fit.slope}, {"slope_se", fit.slope_se},
                           {"slope_upper95", fit.slope_upper95}, {"fit_valid", fit.fit_valid},
                           {"decreasing_95", fit.fit_valid && fit.slope_upper95 < 0}};
      emit_report(report, started, a.out, out);
    };
  });
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Uniform spanning forest sampler, counter and experiment runner", "usf"};
  app.set_version_flag("--version", USF_VERSION);
  app.set_config("--config", "", "TOML config file; unknown keys are rejected");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  std::function<void()> run;
  SampleArgs sample;
  CountArgs count;
  MarginalArgs marginals;
  EntropyArgs entropy;
  GibbsArgs gibbs;
  TrunkArgs trunks;
  NuArgs nu;
  setup_sample(app, sample, run, out);
  setup_count(app, count, run, out);
  setup_marginals(app, marginals, run, out);
  setup_entropy(app, entropy, run, out);
  setup_gibbs(app, gibbs, run, out);
  setup_trunks(app, trunks, run, out);
  setup_nu(app, nu, run, out);
  for (auto* sub : app.get_subcommands({})) sub->allow_config_extras(CLI::config_extras_mode::error);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }
  try {
    run();
    return kExitOk;
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace usf::cli
