#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "usf/forest.hpp"
#include "usf/graph.hpp"

namespace usf {

using BigInt = boost::multiprecision::cpp_int;

/// Graphs with at most this many vertices are counted exactly.
inline constexpr std::size_t kExactCountVertexLimit = 64;
/// enumerate_forests refuses graphs with more edges than this.
inline constexpr std::size_t kEnumerationEdgeLimit = 28;

/// Natural log of a nonnegative count; -inf for zero.
struct LogCount {
  double value = 0.0;
  std::optional<BigInt> exact;

  bool is_zero() const;
};

/// Matrix-tree count: any cofactor of the Laplacian. Self-loops are ignored and
/// parallel edges count separately. A disconnected graph gives zero.
LogCount count_spanning_trees(const Graph& g);

/// Spanning forests in which every component holds exactly one root, as the
/// principal minor det L[V \ roots]. On the exact path the result is checked
/// against the tree count of the graph with the roots identified.
LogCount count_rooted_forests(const Graph& g, std::span<const VertexId> roots);

/// P(e in T) for a uniform spanning tree T: the effective resistance between
/// the endpoints of e at unit conductances. Self-loops give 0.
double edge_marginal(const Graph& g, EdgeId e);

struct MarginalTable {
  GraphPtr host;
  std::vector<double> probs;  // indexed by edge id
};

/// All edge marginals from one factorization.
MarginalTable edge_marginals(const GraphPtr& g);

struct ForestConstraint {
  enum class Kind { all_trees, rooted_exactly_one, boundary_at_least_one };
  Kind kind = Kind::all_trees;
  std::vector<VertexId> roots;

  static ForestConstraint all_trees() { return {Kind::all_trees, {}}; }
  static ForestConstraint rooted_exactly_one(std::vector<VertexId> roots) {
    return {Kind::rooted_exactly_one, std::move(roots)};
  }
  static ForestConstraint boundary_at_least_one() { return {Kind::boundary_at_least_one, {}}; }
};

/// Every acyclic edge subset satisfying the constraint, as bit masks over edge
/// ids in ascending numeric order. Throws CapacityError above
/// kEnumerationEdgeLimit edges.
std::vector<std::uint32_t> enumerate_forest_masks(const Graph& g, const ForestConstraint& c);
std::uint64_t count_enumerated_forests(const Graph& g, const ForestConstraint& c);
std::vector<Forest> enumerate_forests(const GraphPtr& g, const ForestConstraint& c);

/// Fraction-free Gaussian elimination over arbitrary-precision integers.
BigInt bareiss_determinant(std::vector<std::vector<BigInt>> m);

/// Natural log of a positive integer.
double log_of(const BigInt& x);

}  // namespace usf
