#include "usf/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "usf/error.hpp"

namespace usf {
namespace {

std::string hex16(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

template <typename T>
T read_number(std::istream& in, const char* what) {
  long long value = 0;
  if (!(in >> value)) throw ValidationError(std::string("expected ") + what);
  if (value < 0) throw ValidationError(std::string(what) + " must be nonnegative");
  return static_cast<T>(value);
}

bool next_nonempty_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

}  // namespace

void write_graph(std::ostream& out, const Graph& g) {
  out << g.vertex_count() << ' ' << g.edge_count() << ' ' << g.boundary().size() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
  const auto b = g.boundary();
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i) out << ' ';
    out << b[i];
  }
  out << '\n';
}

GraphPtr read_graph(std::istream& in) {
  const auto n = read_number<std::size_t>(in, "vertex count");
  const auto m = read_number<std::size_t>(in, "edge count");
  const auto b = read_number<std::size_t>(in, "boundary count");
  std::vector<Edge> edges(m);
  for (auto& e : edges) {
    e.u = read_number<VertexId>(in, "edge endpoint");
    e.v = read_number<VertexId>(in, "edge endpoint");
  }
  std::vector<VertexId> boundary(b);
  for (auto& v : boundary) v = read_number<VertexId>(in, "boundary vertex");
  return Graph::create(n, std::move(edges), std::move(boundary));
}

void write_forest(std::ostream& out, const Forest& f) {
  out << hex16(f.host()->content_hash()) << '\n' << f.edge_count();
  for (EdgeId e : f.edges()) out << ' ' << e;
  out << '\n';
  if (f.has_roots()) {
    out << "roots " << f.roots().size();
    for (VertexId r : f.roots()) out << ' ' << r;
    out << '\n';
  }
}

Forest read_forest(std::istream& in, const GraphPtr& host) {
  std::string line;
  if (!next_nonempty_line(in, line)) throw ValidationError("expected a forest record");
  std::istringstream head(line);
  std::string hash;
  head >> hash;
  if (hash != hex16(host->content_hash())) {
    throw ValidationError("forest was written for a different host graph (hash " + hash + ")");
  }
  if (!std::getline(in, line)) throw ValidationError("forest record is missing its edge line");
  std::istringstream body(line);
  const auto k = read_number<std::size_t>(body, "forest edge count");
  std::vector<EdgeId> edges(k);
  for (auto& e : edges) e = read_number<EdgeId>(body, "forest edge id");

  const auto mark = in.tellg();
  if (std::getline(in, line) && line.rfind("roots", 0) == 0) {
    std::istringstream rl(line.substr(5));
    const auto r = read_number<std::size_t>(rl, "root count");
    std::vector<VertexId> roots(r);
    for (auto& v : roots) v = read_number<VertexId>(rl, "root id");
    return Forest(host, edges, std::move(roots));
  }
  in.clear();
  if (mark != std::istream::pos_type(-1)) in.seekg(mark);
  return Forest(host, edges);
}

std::vector<Forest> read_forests(std::istream& in, const GraphPtr& host) {
  std::vector<Forest> out;
  for (;;) {
    const auto mark = in.tellg();
    std::string line;
    if (!next_nonempty_line(in, line)) break;
    in.clear();
    in.seekg(mark);
    out.push_back(read_forest(in, host));
  }
  return out;
}

}  // namespace usf
