#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "usf/entropy.hpp"
#include "usf/error.hpp"
#include "usf/forest_stats.hpp"
#include "usf/gibbs.hpp"
#include "usf/io.hpp"
#include "usf/kirchhoff.hpp"
#include "usf/sampler.hpp"

namespace py = pybind11;
using namespace usf;

namespace {

// pybind11 holders cannot point to const, so graphs cross the boundary mutable.
using GraphHolder = std::shared_ptr<Graph>;

GraphHolder hold(GraphPtr g) { return std::const_pointer_cast<Graph>(std::move(g)); }

py::object to_python_int(const BigInt& x) {
  return py::reinterpret_steal<py::object>(PyLong_FromString(x.str().c_str(), nullptr, 10));
}

py::dict count_dict(const LogCount& c) {
  py::dict d;
  d["log"] = c.value;
  d["exact"] = c.exact ? to_python_int(*c.exact) : py::none();
  return d;
}

BoundaryMode parse_mode(const std::string& s) {
  if (s == "free") return BoundaryMode::free;
  if (s == "wired") return BoundaryMode::wired;
  throw ValidationError("boundary mode must be free or wired");
}

}  // namespace

PYBIND11_MODULE(_usf, m) {
  m.doc() = "Uniform spanning trees and forests on finite graphs";

  auto base = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<DisconnectedGraphError>(m, "DisconnectedGraphError", base.ptr());
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_OverflowError);
  py::register_exception<SamplingError>(m, "SamplingError", PyExc_RuntimeError);

  py::class_<RandomStream>(m, "RandomStream")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream_id") = 0)
      .def_property_readonly("seed", &RandomStream::seed)
      .def_property_readonly("stream_id", &RandomStream::stream_id)
      .def("next_u32", &RandomStream::next_u32)
      .def("uniform01", &RandomStream::uniform01)
      .def("substream", &RandomStream::substream, py::arg("index"));

  py::class_<Graph, GraphHolder>(m, "Graph")
      .def(py::init([](std::size_t n, const std::vector<std::pair<VertexId, VertexId>>& edges,
                       std::vector<VertexId> boundary) {
             std::vector<Edge> es;
             for (auto [u, v] : edges) es.push_back({u, v});
             return hold(Graph::create(n, std::move(es), std::move(boundary)));
           }),
           py::arg("vertex_count"), py::arg("edges"), py::arg("boundary") = std::vector<VertexId>{})
      .def_property_readonly("vertex_count", &Graph::vertex_count)
      .def_property_readonly("edge_count", &Graph::edge_count)
      .def_property_readonly("edges",
                             [](const Graph& g) {
                               std::vector<std::pair<VertexId, VertexId>> out;
                               for (const Edge& e : g.edges()) out.emplace_back(e.u, e.v);
                               return out;
                             })
      .def_property_readonly("boundary",
                             [](const Graph& g) {
                               return std::vector<VertexId>(g.boundary().begin(), g.boundary().end());
                             })
      .def_property_readonly("is_connected", &Graph::is_connected)
      .def("coord",
           [](const Graph& g, VertexId v) {
             auto c = g.coord(v);
             return std::vector<std::int32_t>(c.begin(), c.end());
           })
      .def("__repr__", [](const Graph& g) {
        return "<Graph vertices=" + std::to_string(g.vertex_count()) +
               " edges=" + std::to_string(g.edge_count()) + ">";
      });

  m.def("build_box", [](int dim, int side) { return hold(build_box(dim, side)); }, py::arg("dim"),
        py::arg("side"));
  m.def("build_torus", [](int dim, int side) { return hold(build_torus(dim, side)); }, py::arg("dim"),
        py::arg("side"));

  py::class_<Forest>(m, "Forest")
      .def(py::init([](GraphHolder host, const std::vector<EdgeId>& edges) {
             return Forest(std::move(host), edges);
           }),
           py::arg("host"), py::arg("edges"))
      .def_property_readonly("host", [](const Forest& f) { return hold(f.host()); })
      .def_property_readonly("edges",
                             [](const Forest& f) {
                               return std::vector<EdgeId>(f.edges().begin(), f.edges().end());
                             })
      .def_property_readonly("roots",
                             [](const Forest& f) {
                               return std::vector<VertexId>(f.roots().begin(), f.roots().end());
                             })
      .def_property_readonly("component_count", &Forest::component_count)
      .def("contains", &Forest::contains)
      .def("is_spanning_tree", &Forest::is_spanning_tree)
      .def("to_text", [](const Forest& f) {
        std::ostringstream out;
        write_forest(out, f);
        return out.str();
      })
      .def(py::self == py::self);

  py::class_<Window>(m, "Window")
      .def_property_readonly("vertices",
                             [](const Window& w) {
                               return std::vector<VertexId>(w.vertices().begin(), w.vertices().end());
                             })
      .def_property_readonly("boundary",
                             [](const Window& w) {
                               return std::vector<VertexId>(w.boundary().begin(), w.boundary().end());
                             })
      .def_property_readonly("internal_edges", [](const Window& w) {
        return std::vector<EdgeId>(w.internal_edges().begin(), w.internal_edges().end());
      });
  m.def("box_window",
        [](GraphHolder g, const std::vector<std::int32_t>& corner,
           const std::vector<std::int32_t>& extent) { return box_window(std::move(g), corner, extent); },
        py::arg("graph"), py::arg("corner"), py::arg("extent"));
  m.def("induced_window",
        [](GraphHolder g, std::vector<VertexId> vs) { return induced_window(std::move(g), std::move(vs)); },
        py::arg("graph"), py::arg("vertices"));

  // sampler
  m.def("wilson_tree", [](const GraphHolder& g, VertexId root, RandomStream& rng) {
    return wilson_tree(g, root, rng);
  }, py::arg("graph"), py::arg("root"), py::arg("rng"));
  m.def("wilson_rooted_forest",
        [](const GraphHolder& g, const std::vector<VertexId>& roots, RandomStream& rng) {
          return wilson_rooted_forest(g, roots, rng);
        },
        py::arg("graph"), py::arg("roots"), py::arg("rng"));
  m.def("sample_boundary_mode",
        [](const GraphHolder& g, const std::string& mode, RandomStream& rng) {
          return sample_boundary_mode(g, parse_mode(mode), rng);
        },
        py::arg("graph"), py::arg("mode"), py::arg("rng"));

  // counting
  m.def("count_spanning_trees", [](const Graph& g) { return count_dict(count_spanning_trees(g)); },
        py::arg("graph"));
  m.def("count_rooted_forests",
        [](const Graph& g, const std::vector<VertexId>& roots) {
          return count_dict(count_rooted_forests(g, roots));
        },
        py::arg("graph"), py::arg("roots"));
  m.def("edge_marginal", &edge_marginal, py::arg("graph"), py::arg("edge"));
  m.def("edge_marginals", [](const GraphHolder& g) { return edge_marginals(g).probs; },
        py::arg("graph"));
  m.def("count_enumerated_trees",
        [](const Graph& g) { return count_enumerated_forests(g, ForestConstraint::all_trees()); },
        py::arg("graph"));

  // resampling
  m.def("inside_relation",
        [](const Window& w, const Forest& f) { return inside_relation(w, f).blocks; },
        py::arg("window"), py::arg("forest"));
  m.def("weak_gibbs_resample",
        [](const Forest& f, const Window& w, RandomStream& rng) { return weak_gibbs_resample(f, w, rng); },
        py::arg("forest"), py::arg("window"), py::arg("rng"));
  m.def("strong_gibbs_resample", &strong_gibbs_resample, py::arg("forest"), py::arg("window"),
        py::arg("rng"));

  // entropy
  m.def("per_site_entropy",
        [](int dim, const std::vector<int>& sides, const std::string& method) {
          EntropyMethod em;
          if (method == "wired") em = EntropyMethod::wired_exact;
          else if (method == "enum") em = EntropyMethod::mu_gn_enumerated;
          else if (method == "torus") em = EntropyMethod::torus_exact;
          else throw ValidationError("method must be wired, enum or torus");
          const auto report = per_site_entropy_sequence(dim, sides, em);
          py::list out;
          for (const auto& r : report.records) {
            py::dict d;
            d["graph"] = r.graph;
            d["vertex_count"] = r.vertex_count;
            d["log_count"] = r.log_count;
            d["per_site"] = r.per_site;
            d["method"] = to_string(r.method);
            out.append(d);
          }
          return out;
        },
        py::arg("dim"), py::arg("sides"), py::arg("method") = "wired");
  m.def("torus_entropy_oracle", &torus_entropy_oracle, py::arg("dim") = 2, py::arg("points") = 512);
  m.def("entropy_gap_experiment",
        [](int side, std::size_t samples) {
          GapOptions opt;
          opt.samples = samples;
          const GapReport r = entropy_gap_experiment(side, {}, opt);
          py::dict d;
          d["side"] = r.side;
          d["competitor"] = r.competitor;
          d["competitor_entropy"] = r.competitor_entropy.estimate;
          d["competitor_standard_error"] = r.competitor_entropy.standard_error;
          d["wired_window_entropy"] = r.wired_window_entropy;
          d["wired_exact_per_site"] = r.wired_exact_per_site;
          d["torus_oracle"] = r.torus_oracle;
          d["gap"] = r.gap;
          d["gap_declared"] = r.gap_declared;
          return d;
        },
        py::arg("side"), py::arg("samples") = 200);

  // forest statistics
  m.def("detect_trunks", [](const Forest& f) { return detect_trunks(f).trunks; }, py::arg("forest"));
  m.def("hitting_probability_exact",
        [](const Graph& g, const std::vector<VertexId>& target, const std::vector<VertexId>& absorbing) {
          return hitting_probability_exact(g, target, absorbing);
        },
        py::arg("graph"), py::arg("target"), py::arg("absorbing") = std::vector<VertexId>{});
  m.def("estimate_nu_a",
        [](const Graph& g, const std::vector<VertexId>& c_b, const std::vector<VertexId>& c_f_bar,
           std::uint64_t min_count, unsigned k, std::uint64_t seed, std::uint64_t samples) {
          NearIntersectionConfig cfg;
          cfg.k = k;
          const auto p = estimate_nu_a(g, c_b, c_f_bar, min_count, cfg, RandomStream(seed, 0), samples);
          return py::make_tuple(p.estimate, p.ci_low, p.ci_high);
        },
        py::arg("graph"), py::arg("c_b"), py::arg("c_f_bar"), py::arg("m"), py::arg("k") = 1,
        py::arg("seed") = 0, py::arg("samples") = 10000);

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          const int code = cli::run_cli(args, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"),
        "Runs one command-line invocation in process and returns (exit code, stdout, stderr).");

  m.attr("__version__") = USF_VERSION;
}
