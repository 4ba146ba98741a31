#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <vector>

#include "pathlyap/error.hpp"
#include "pathlyap/graph.hpp"
#include "pathlyap/linalg.hpp"
#include "pathlyap/lyapunov.hpp"

namespace pathlyap {

/// Exact dense integer matrix; entries of the cycle family stay 0/1.
using IntMatrix = std::vector<std::vector<std::int64_t>>;
using IntVector = std::vector<std::int64_t>;

inline IntMatrix int_identity(std::size_t n) {
  IntMatrix m(n, IntVector(n, 0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

inline IntMatrix int_multiply(const IntMatrix& a, const IntMatrix& b) {
  const std::size_t n = a.size();
  IntMatrix c(n, IntVector(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

inline IntMatrix int_transpose(const IntMatrix& a) {
  const std::size_t n = a.size();
  IntMatrix t(n, IntVector(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) t[j][i] = a[i][j];
  return t;
}

inline Matrix to_real(const IntMatrix& a) {
  const auto n = static_cast<Eigen::Index>(a.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = static_cast<double>(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
  return m;
}

/// The cycle family of a word w: n = |w| + 1 and A_l has a one at (i, i+1)
/// when w_i = l, plus A_0 closes the cycle at (n, 1). Indices are 0-based
/// here, so the closing entry is (n-1, 0) of the first symbol's matrix.
/// Every nonzero product of 2n of these matrices reads w somewhere.
struct SigmaW {
  Word word;
  std::size_t alphabet_size = 0;
  std::size_t dim = 0;
  std::vector<IntMatrix> matrices;  ///< untransposed, one per symbol

  /// Left-to-right product A_{u_1} ... A_{u_t}; entry (l, l') is one exactly
  /// when reading u walks the cycle from position l to position l'.
  IntMatrix path_product(const Word& u) const {
    IntMatrix p = int_identity(dim);
    for (Symbol s : u) p = int_multiply(p, matrices.at(s));
    return p;
  }

  /// The transposed family with the label convention of the graph: the
  /// set whose inequalities the diagonal certificate satisfies.
  MatrixSet transposed(const Alphabet& alphabet) const {
    std::vector<Matrix> ms;
    for (const auto& a : matrices) ms.push_back(to_real(int_transpose(a)));
    return MatrixSet(alphabet, std::move(ms));
  }
};

inline SigmaW build_sigma_w(const Word& w, std::size_t alphabet_size) {
  if (w.empty()) throw Error(ErrorKind::invalid_argument, "empty word");
  for (Symbol s : w)
    if (s >= alphabet_size) throw Error(ErrorKind::unknown_symbol, "word symbol out of range");
  SigmaW out;
  out.word = w;
  out.alphabet_size = alphabet_size;
  out.dim = w.size() + 1;
  out.matrices.assign(alphabet_size, IntMatrix(out.dim, IntVector(out.dim, 0)));
  for (std::size_t i = 0; i + 1 < out.dim; ++i) out.matrices[w[i]][i][i + 1] = 1;
  out.matrices[0][out.dim - 1][0] = 1;
  return out;
}

/// Checks by enumeration that every nonzero product of `length` matrices
/// from the family has an index sequence containing the word as a factor.
/// Only meaningful for length >= 2n; shorter lengths are reported as false.
inline bool subproduct_property(const SigmaW& s, std::size_t length, std::size_t budget = 20'000'000) {
  if (length < 2 * s.dim) return false;
  double count = 1.0;
  for (std::size_t k = 0; k < length; ++k) count *= static_cast<double>(s.alphabet_size);
  if (count > static_cast<double>(budget))
    throw Error(ErrorKind::budget_exceeded, "too many products to enumerate");

  Word seq;
  auto contains_word = [&] {
    if (seq.size() < s.word.size()) return false;
    for (std::size_t k = 0; k + s.word.size() <= seq.size(); ++k)
      if (std::equal(s.word.begin(), s.word.end(), seq.begin() + static_cast<std::ptrdiff_t>(k))) return true;
    return false;
  };
  bool ok = true;
  auto visit = [&](auto&& self, const IntMatrix& prefix) -> void {
    if (!ok) return;
    if (seq.size() == length) {
      if (!contains_word()) ok = false;
      return;
    }
    for (Symbol a = 0; a < s.alphabet_size && ok; ++a) {
      IntMatrix next = int_multiply(prefix, s.matrices[a]);
      bool nonzero = false;
      for (const auto& row : next)
        for (auto v : row) nonzero = nonzero || v != 0;
      // Extensions of a zero product stay zero.
      if (!nonzero) continue;
      seq.push_back(a);
      self(self, next);
      seq.pop_back();
    }
  };
  visit(visit, int_identity(s.dim));
  return ok;
}

/// Vertices (node, position) of the product graph, numbered node * n + position.
struct AuxiliaryGraph {
  std::size_t nodes = 0;
  std::size_t dim = 0;
  std::vector<std::vector<std::size_t>> successors;

  std::size_t vertex(std::size_t node, std::size_t position) const { return node * dim + position; }
  std::size_t size() const { return successors.size(); }
};

inline AuxiliaryGraph build_auxiliary_graph(const LabeledGraph& g, const SigmaW& s) {
  AuxiliaryGraph aux;
  aux.nodes = g.node_count();
  aux.dim = s.dim;
  aux.successors.assign(aux.nodes * aux.dim, {});
  for (const auto& e : g.edges()) {
    const IntMatrix p = s.path_product(e.label);
    for (std::size_t l = 0; l < s.dim; ++l)
      for (std::size_t l2 = 0; l2 < s.dim; ++l2)
        if (p[l][l2] != 0) aux.successors[aux.vertex(e.from, l)].push_back(aux.vertex(e.to, l2));
  }
  for (auto& succ : aux.successors) {
    std::sort(succ.begin(), succ.end());
    succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
  }
  return aux;
}

/// Kahn's algorithm: sources are removed in canonical vertex order and each
/// takes the largest number still free, so every edge v -> v' has
/// s(v) > s(v'). Numbers run from 1 to |V|. Throws cycle_detected.
inline std::vector<std::int64_t> reverse_topological_numbering(const AuxiliaryGraph& aux) {
  const std::size_t v = aux.size();
  std::vector<std::size_t> indegree(v, 0);
  for (const auto& succ : aux.successors)
    for (auto t : succ) ++indegree[t];
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> sources;
  for (std::size_t k = 0; k < v; ++k)
    if (indegree[k] == 0) sources.push(k);
  std::vector<std::int64_t> number(v, 0);
  auto next = static_cast<std::int64_t>(v);
  std::size_t removed = 0;
  while (!sources.empty()) {
    const auto k = sources.top();
    sources.pop();
    number[k] = next--;
    ++removed;
    for (auto t : aux.successors[k])
      if (--indegree[t] == 0) sources.push(t);
  }
  if (removed != v)
    throw Error(ErrorKind::cycle_detected, "auxiliary graph has a cycle; the word is readable on the graph");
  return number;
}

struct EdgeCheck {
  std::size_t edge = 0;
  bool pass = false;
};

struct CounterexampleBundle {
  Word word;
  SigmaW sigma;
  MatrixSet system;                  ///< transposed family, the unstable set
  std::vector<IntVector> diagonals;  ///< one positive integer vector per node
  std::vector<EdgeCheck> exact_checks;
  bool exact_pass = false;

  Certificate certificate() const {
    std::vector<Vector> ps;
    for (const auto& p : diagonals) {
      Vector v(static_cast<Eigen::Index>(p.size()));
      for (std::size_t k = 0; k < p.size(); ++k) v(static_cast<Eigen::Index>(k)) = static_cast<double>(p[k]);
      ps.push_back(std::move(v));
    }
    return Certificate::from_diagonals(ps);
  }
};

/// Exact check that path_product(u) p_j < p_i on every nonzero row, for every
/// edge i -> j with label u.
inline std::vector<EdgeCheck> check_entrywise(const LabeledGraph& g, const SigmaW& s,
                                              const std::vector<IntVector>& diagonals) {
  std::vector<EdgeCheck> out;
  for (std::size_t k = 0; k < g.edges().size(); ++k) {
    const Edge& e = g.edges()[k];
    const IntMatrix p = s.path_product(e.label);
    EdgeCheck c{k, true};
    for (std::size_t l = 0; l < s.dim; ++l) {
      std::int64_t image = 0;
      bool nonzero_row = false;
      for (std::size_t l2 = 0; l2 < s.dim; ++l2) {
        if (p[l][l2] == 0) continue;
        nonzero_row = true;
        image += p[l][l2] * diagonals[e.to][l2];
      }
      if (nonzero_row && !(image < diagonals[e.from][l])) c.pass = false;
    }
    out.push_back(c);
  }
  return out;
}

/// Builds the unstable transposed cycle family for a word that cannot be read
/// on g, together with integer diagonal forms p_i(l) = s((i, l)) from a
/// reverse topological numbering of the auxiliary graph.
inline CounterexampleBundle synthesize_counterexample(const LabeledGraph& g, const Word& w) {
  if (!g.alphabet().contains(w)) throw Error(ErrorKind::unknown_symbol, "word symbol out of range");
  CounterexampleBundle b;
  b.word = w;
  b.sigma = build_sigma_w(w, g.alphabet().size());
  b.system = b.sigma.transposed(g.alphabet());
  const auto aux = build_auxiliary_graph(g, b.sigma);
  const auto number = reverse_topological_numbering(aux);
  b.diagonals.assign(g.node_count(), IntVector(b.sigma.dim, 0));
  for (std::size_t i = 0; i < g.node_count(); ++i)
    for (std::size_t l = 0; l < b.sigma.dim; ++l) b.diagonals[i][l] = number[aux.vertex(i, l)];
  b.exact_checks = check_entrywise(g, b.sigma, b.diagonals);
  b.exact_pass = std::all_of(b.exact_checks.begin(), b.exact_checks.end(), [](const EdgeCheck& c) { return c.pass; });
  if (!b.exact_pass) throw Error(ErrorKind::verification_failed, "entrywise check failed on an acyclic auxiliary graph");
  return b;
}

}  // namespace pathlyap
