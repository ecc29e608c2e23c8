#pragma once

#include <iosfwd>
#include <vector>

#include "usf/forest.hpp"
#include "usf/graph.hpp"

namespace usf {

// Graph text format:
//   n m b
//   u v            (m lines)
//   b1 b2 ... bb   (one line, empty when b == 0)
void write_graph(std::ostream& out, const Graph& g);
GraphPtr read_graph(std::istream& in);

// Forest text format, one record per forest:
//   <host content hash, 16 hex digits>
//   k e1 e2 ... ek
// followed, for rooted forests only, by
//   roots r r1 ... rr
void write_forest(std::ostream& out, const Forest& f);
/// Throws ValidationError if the recorded hash does not match the host.
Forest read_forest(std::istream& in, const GraphPtr& host);
/// Reads records until end of input.
std::vector<Forest> read_forests(std::istream& in, const GraphPtr& host);

}  // namespace usf
