#include "usf/kirchhoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "usf/error.hpp"
#include "usf/union_find.hpp"

namespace usf {
namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Column index of every kept vertex, -1 for eliminated ones.
std::vector<long> index_kept(std::size_t n, const std::vector<char>& removed) {
  std::vector<long> index(n, -1);
  long next = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (!removed[v]) index[v] = next++;
  }
  return index;
}

SparseMatrix reduced_laplacian(const Graph& g, const std::vector<long>& index, long dim) {
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(4 * g.edge_count() + dim);
  for (const Edge& e : g.edges()) {
    if (e.is_loop()) continue;
    const long a = index[e.u];
    const long b = index[e.v];
    if (a >= 0) entries.emplace_back(a, a, 1.0);
    if (b >= 0) entries.emplace_back(b, b, 1.0);
    if (a >= 0 && b >= 0) {
      entries.emplace_back(a, b, -1.0);
      entries.emplace_back(b, a, -1.0);
    }
  }
  SparseMatrix m(dim, dim);
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

std::vector<std::vector<BigInt>> dense_reduced_laplacian(const Graph& g,
                                                         const std::vector<long>& index,
                                                         long dim) {
  std::vector<std::vector<BigInt>> m(dim, std::vector<BigInt>(dim, 0));
  for (const Edge& e : g.edges()) {
    if (e.is_loop()) continue;
    const long a = index[e.u];
    const long b = index[e.v];
    if (a >= 0) m[a][a] += 1;
    if (b >= 0) m[b][b] += 1;
    if (a >= 0 && b >= 0) {
      m[a][b] -= 1;
      m[b][a] -= 1;
    }
  }
  return m;
}

// log det of a symmetric positive definite matrix via sparse LDL^T.
double log_det_spd(const SparseMatrix& m) {
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(m);
  if (ldlt.info() != Eigen::Success) throw std::runtime_error("LDL^T factorization failed");
  const auto d = ldlt.vectorD();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0.0)) throw std::runtime_error("reduced Laplacian is not positive definite");
    sum += std::log(d[i]);
  }
  return sum;
}

// Determinant of the Laplacian with `removed` rows/columns deleted.
LogCount minor_count(const Graph& g, const std::vector<char>& removed) {
  const auto index = index_kept(g.vertex_count(), removed);
  const long dim = static_cast<long>(std::count(removed.begin(), removed.end(), 0));
  LogCount out;
  if (dim == 0) {
    out.value = 0.0;
    out.exact = BigInt(1);
    return out;
  }
  if (g.vertex_count() <= kExactCountVertexLimit) {
    BigInt det = bareiss_determinant(dense_reduced_laplacian(g, index, dim));
    out.value = det > 0 ? log_of(det) : kNegInf;
    out.exact = std::move(det);
    return out;
  }
  out.value = log_det_spd(reduced_laplacian(g, index, dim));
  return out;
}

LogCount zero_count(const Graph& g) {
  LogCount out;
  out.value = kNegInf;
  if (g.vertex_count() <= kExactCountVertexLimit) out.exact = BigInt(0);
  return out;
}

// Enumeration by include/exclude backtracking. Each component carries a tag
// count (roots or boundary vertices); `untagged_` counts components with none.
class ForestEnumerator {
 public:
  ForestEnumerator(const Graph& g, const ForestConstraint& c) : g_(g), c_(c) {
    const std::size_t n = g.vertex_count();
    parent_.resize(n);
    for (std::size_t v = 0; v < n; ++v) parent_[v] = static_cast<std::uint32_t>(v);
    size_.assign(n, 1);
    tags_.assign(n, 0);
    if (c.kind == ForestConstraint::Kind::rooted_exactly_one) {
      if (c.roots.empty()) throw ValidationError("rooted enumeration needs at least one root");
      for (VertexId r : c.roots) {
        if (r >= n) throw ValidationError("root " + std::to_string(r) + " is not a vertex");
        tags_[r] = 1;
      }
    } else if (c.kind == ForestConstraint::Kind::boundary_at_least_one) {
      for (VertexId b : g.boundary()) tags_[b] = 1;
    }
    untagged_ = static_cast<std::size_t>(std::count(tags_.begin(), tags_.end(), 0));
  }

  template <typename Visit>
  void run(Visit&& visit) {
    recurse(0, 0, 0, visit);
  }

 private:
  std::uint32_t find(std::uint32_t x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
  }

  bool accept_leaf() const {
    switch (c_.kind) {
      case ForestConstraint::Kind::all_trees:
        return included_ + 1 == g_.vertex_count();
      case ForestConstraint::Kind::rooted_exactly_one:
      case ForestConstraint::Kind::boundary_at_least_one:
        return untagged_ == 0;
    }
    return false;
  }

  template <typename Visit>
  void recurse(std::size_t e, std::uint32_t mask, std::size_t depth, Visit& visit) {
    const std::size_t m = g_.edge_count();
    if (c_.kind == ForestConstraint::Kind::all_trees &&
        included_ + (m - e) + 1 < g_.vertex_count()) {
      return;
    }
    if (e == m) {
      if (accept_leaf()) visit(mask);
      return;
    }
    const Edge& ed = g_.edges()[e];
    const bool tree_full =
        c_.kind == ForestConstraint::Kind::all_trees && included_ + 1 == g_.vertex_count();
    if (!ed.is_loop() && !tree_full) {
      std::uint32_t a = find(ed.u);
      std::uint32_t b = find(ed.v);
      const bool blocked = c_.kind == ForestConstraint::Kind::rooted_exactly_one &&
                           tags_[a] > 0 && tags_[b] > 0;
      if (a != b && !blocked) {
        if (size_[a] < size_[b]) std::swap(a, b);
        const std::size_t before = (tags_[a] == 0) + (tags_[b] == 0);
        parent_[b] = a;
        size_[a] += size_[b];
        tags_[a] += tags_[b];
        const std::size_t after = tags_[a] == 0;
        untagged_ = untagged_ - before + after;
        ++included_;
        recurse(e + 1, mask | (std::uint32_t{1} << e), depth + 1, visit);
        --included_;
        untagged_ = untagged_ - after + before;
        tags_[a] -= tags_[b];
        size_[a] -= size_[b];
        parent_[b] = b;
      }
    }
    recurse(e + 1, mask, depth + 1, visit);
  }

  const Graph& g_;
  const ForestConstraint& c_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
  std::vector<std::uint32_t> tags_;
  std::size_t untagged_ = 0;
  std::size_t included_ = 0;
};

void check_enumeration_cap(const Graph& g) {
  if (g.edge_count() > kEnumerationEdgeLimit) {
    throw CapacityError("enumeration is limited to " + std::to_string(kEnumerationEdgeLimit) +
                        " edges; graph has " + std::to_string(g.edge_count()));
  }
}

}  // namespace

bool LogCount::is_zero() const {
  if (exact) return *exact == 0;
  return value == kNegInf;
}

double log_of(const BigInt& x) {
  if (x <= 0) throw std::domain_error("log_of needs a positive integer");
  const auto bits = boost::multiprecision::msb(x);
  if (bits < 1000) return std::log(static_cast<double>(x));
  const unsigned shift = static_cast<unsigned>(bits) - 60;
  const BigInt top = x >> shift;
  return std::log(static_cast<double>(top)) + shift * std::log(2.0);
}

BigInt bareiss_determinant(std::vector<std::vector<BigInt>> m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  BigInt sign = 1;
  BigInt prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && m[swap_row][k] == 0) ++swap_row;
      if (swap_row == n) return 0;
      std::swap(m[k], m[swap_row]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
      }
    }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

LogCount count_spanning_trees(const Graph& g) {
  if (!g.is_connected()) return zero_count(g);
  std::vector<char> removed(g.vertex_count(), 0);
  removed[0] = 1;
  return minor_count(g, removed);
}

LogCount count_rooted_forests(const Graph& g, std::span<const VertexId> roots) {
  if (roots.empty()) throw ValidationError("rooted forest count needs at least one root");
  std::vector<char> removed(g.vertex_count(), 0);
  for (VertexId r : roots) {
    if (r >= g.vertex_count()) throw ValidationError("root " + std::to_string(r) + " is not a vertex");
    removed[r] = 1;
  }
  // A component without a root admits no forest.
  DisjointSets sets(g.vertex_count());
  for (const Edge& e : g.edges()) sets.unite(e.u, e.v);
  std::vector<char> rooted(g.vertex_count(), 0);
  for (VertexId r : roots) rooted[sets.find(r)] = 1;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (!rooted[sets.find(v)]) return zero_count(g);
  }

  LogCount minor = minor_count(g, removed);
  if (minor.exact) {
    const std::vector<std::vector<VertexId>> classes{{roots.begin(), roots.end()}};
    const Quotient q = contract(g, classes);
    const LogCount via_quotient = count_spanning_trees(*q.graph);
    if (!via_quotient.exact || *via_quotient.exact != *minor.exact) {
      throw std::logic_error("rooted forest count disagrees with the contracted tree count");
    }
  }
  return minor;
}

MarginalTable edge_marginals(const GraphPtr& gp) {
  const Graph& g = *gp;
  if (!g.is_connected()) throw DisconnectedGraphError("edge marginals need a connected graph");
  MarginalTable table{gp, std::vector<double>(g.edge_count(), 0.0)};
  if (g.vertex_count() == 1) return table;

  std::vector<char> removed(g.vertex_count(), 0);
  removed[0] = 1;
  const auto index = index_kept(g.vertex_count(), removed);
  const long dim = static_cast<long>(g.vertex_count()) - 1;
  Eigen::SimplicialLDLT<SparseMatrix> solver(reduced_laplacian(g, index, dim));
  if (solver.info() != Eigen::Success) throw std::runtime_error("LDL^T factorization failed");

  Eigen::VectorXd rhs(dim);
  for (EdgeId id = 0; id < g.edge_count(); ++id) {
    const Edge& e = g.edge(id);
    if (e.is_loop()) continue;
    rhs.setZero();
    if (index[e.u] >= 0) rhs[index[e.u]] += 1.0;
    if (index[e.v] >= 0) rhs[index[e.v]] -= 1.0;
    const Eigen::VectorXd x = solver.solve(rhs);
    const double xu = index[e.u] >= 0 ? x[index[e.u]] : 0.0;
    const double xv = index[e.v] >= 0 ? x[index[e.v]] : 0.0;
    table.probs[id] = std::clamp(xu - xv, 0.0, 1.0);
  }
  return table;
}

double edge_marginal(const Graph& g, EdgeId id) {
  if (id >= g.edge_count()) throw ValidationError("edge " + std::to_string(id) + " does not exist");
  if (!g.is_connected()) throw DisconnectedGraphError("edge marginals need a connected graph");
  const Edge& e = g.edge(id);
  if (e.is_loop()) return 0.0;
  // Ground e.v; the potential at e.u under unit injection is the resistance.
  std::vector<char> removed(g.vertex_count(), 0);
  removed[e.v] = 1;
  const auto index = index_kept(g.vertex_count(), removed);
  const long dim = static_cast<long>(g.vertex_count()) - 1;
  Eigen::SimplicialLDLT<SparseMatrix> solver(reduced_laplacian(g, index, dim));
  if (solver.info() != Eigen::Success) throw std::runtime_error("LDL^T factorization failed");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  rhs[index[e.u]] = 1.0;
  const Eigen::VectorXd x = solver.solve(rhs);
  return std::clamp(x[index[e.u]], 0.0, 1.0);
}

std::vector<std::uint32_t> enumerate_forest_masks(const Graph& g, const ForestConstraint& c) {
  check_enumeration_cap(g);
  std::vector<std::uint32_t> masks;
  ForestEnumerator(g, c).run([&](std::uint32_t mask) { masks.push_back(mask); });
  std::sort(masks.begin(), masks.end());
  return masks;
}

std::uint64_t count_enumerated_forests(const Graph& g, const ForestConstraint& c) {
  check_enumeration_cap(g);
  std::uint64_t count = 0;
  ForestEnumerator(g, c).run([&](std::uint32_t) { ++count; });
  return count;
}

std::vector<Forest> enumerate_forests(const GraphPtr& g, const ForestConstraint& c) {
  const auto masks = enumerate_forest_masks(*g, c);
  std::vector<Forest> out;
  out.reserve(masks.size());
  std::vector<EdgeId> edges;
  for (std::uint32_t mask : masks) {
    edges.clear();
    for (EdgeId e = 0; e < g->edge_count(); ++e) {
      if (mask & (std::uint32_t{1} << e)) edges.push_back(e);
    }
    if (c.kind == ForestConstraint::Kind::rooted_exactly_one) {
      out.emplace_back(g, edges, c.roots);
    } else {
      out.emplace_back(g, edges);
    }
  }
  return out;
}

}  // namespace usf
