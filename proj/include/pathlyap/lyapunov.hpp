#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pathlyap/error.hpp"
#include "pathlyap/graph.hpp"
#include "pathlyap/linalg.hpp"

namespace pathlyap {

inline constexpr double default_delta = 1e-9;

/// One n x n matrix per alphabet symbol, in alphabet order.
class MatrixSet {
 public:
  MatrixSet() = default;

  MatrixSet(Alphabet alphabet, std::vector<Matrix> matrices)
      : alphabet_(std::move(alphabet)), matrices_(std::move(matrices)) {
    if (matrices_.size() != alphabet_.size())
      throw Error(ErrorKind::dimension_mismatch, "need exactly one matrix per symbol");
    dim_ = static_cast<std::size_t>(matrices_.front().rows());
    if (dim_ == 0) throw Error(ErrorKind::dimension_mismatch, "matrices must be at least 1x1");
    for (const auto& a : matrices_) {
      if (static_cast<std::size_t>(a.rows()) != dim_ || static_cast<std::size_t>(a.cols()) != dim_)
        throw Error(ErrorKind::dimension_mismatch, "all matrices must be square of a common size");
      if (!all_finite(a)) throw Error(ErrorKind::non_finite, "matrix entry");
    }
  }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  const std::vector<Matrix>& matrices() const noexcept { return matrices_; }
  const Matrix& operator[](Symbol s) const { return matrices_.at(s); }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return matrices_.size(); }

  /// Product applied in reading order: A_{u_t} ... A_{u_1}.
  Matrix product(const Word& u) const {
    Matrix p = Matrix::Identity(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
    for (Symbol s : u) p = matrices_.at(s) * p;
    return p;
  }

  MatrixSet scaled(double factor) const {
    auto ms = matrices_;
    for (auto& a : ms) a *= factor;
    return MatrixSet(alphabet_, std::move(ms));
  }

 private:
  Alphabet alphabet_;
  std::vector<Matrix> matrices_;
  std::size_t dim_ = 0;
};

/// One quadratic form per graph node, in node order.
struct Certificate {
  std::vector<Matrix> forms;
  /// Whether the forms came from (and should be written as) diagonal vectors.
  bool diagonal = false;

  static Certificate from_diagonals(const std::vector<Vector>& ps) {
    Certificate c;
    c.diagonal = true;
    for (const auto& p : ps) c.forms.push_back(p.asDiagonal());
    return c;
  }

  Certificate scaled(double factor) const {
    Certificate c = *this;
    for (auto& f : c.forms) f *= factor;
    return c;
  }
};

struct EdgeMargin {
  std::size_t edge = 0;
  double margin = 0.0;     ///< lambda_min(P_i - Phi^T P_j Phi)
  double threshold = 0.0;  ///< delta * lambda_max(P_i)
  bool pass = false;
};

struct NodeMargin {
  std::size_t node = 0;
  double margin = 0.0;  ///< lambda_min(P_i)
  double threshold = 0.0;
  bool pass = false;
};

struct VerificationReport {
  double delta = default_delta;
  std::vector<EdgeMargin> edges;
  std::vector<NodeMargin> nodes;
  bool pass = false;

  /// Edge with the smallest margin relative to its threshold, if any edge exists.
  std::optional<EdgeMargin> worst_edge() const {
    if (edges.empty()) return std::nullopt;
    return *std::min_element(edges.begin(), edges.end(), [](const EdgeMargin& a, const EdgeMargin& b) {
      return a.margin - a.threshold < b.margin - b.threshold;
    });
  }
};

namespace detail {

inline void check_symmetric(const Matrix& p, std::size_t node) {
  const double scale = std::max(1.0, p.cwiseAbs().maxCoeff());
  if ((p - p.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw Error(ErrorKind::non_symmetric, "form for node " + std::to_string(node));
}

// Strict: a zero margin never passes, whatever delta is.
inline bool meets(double margin, double threshold) { return margin > 0.0 && margin >= threshold; }

}  // namespace detail

/// Checks every edge inequality P_i - Phi(u)^T P_j Phi(u) > 0 and every form
/// P_i > 0 at margin delta. The threshold for constraints owned by node i is
/// delta * lambda_max(P_i), so the verdict does not depend on the overall
/// scale of the certificate while reported margins scale with it.
inline VerificationReport verify_certificate(const LabeledGraph& g, const MatrixSet& s, const Certificate& c,
                                             double delta = default_delta) {
  if (!(delta >= 0.0)) throw Error(ErrorKind::invalid_argument, "delta must be nonnegative");
  if (!(g.alphabet() == s.alphabet()))
    throw Error(ErrorKind::dimension_mismatch, "graph and matrix set use different alphabets");
  if (c.forms.size() != g.node_count())
    throw Error(ErrorKind::dimension_mismatch, "certificate needs one form per graph node");
  const auto n = static_cast<Eigen::Index>(s.dim());
  for (std::size_t i = 0; i < c.forms.size(); ++i) {
    if (c.forms[i].rows() != n || c.forms[i].cols() != n)
      throw Error(ErrorKind::dimension_mismatch, "form for node " + std::to_string(i));
    if (!all_finite(c.forms[i])) throw Error(ErrorKind::non_finite, "form for node " + std::to_string(i));
    detail::check_symmetric(c.forms[i], i);
  }

  VerificationReport report;
  report.delta = delta;
  std::vector<double> top(c.forms.size());
  report.pass = true;
  for (std::size_t i = 0; i < c.forms.size(); ++i) {
    const auto e = symmetric_eigen(c.forms[i]);
    top[i] = std::max(0.0, e.values(n - 1));
    NodeMargin nm{i, e.values(0), delta * top[i], false};
    nm.pass = detail::meets(nm.margin, nm.threshold);
    report.pass = report.pass && nm.pass;
    report.nodes.push_back(nm);
  }
  for (std::size_t k = 0; k < g.edges().size(); ++k) {
    const Edge& e = g.edges()[k];
    const Matrix phi = s.product(e.label);
    const Matrix gap = c.forms[e.from] - phi.transpose() * c.forms[e.to] * phi;
    EdgeMargin em{k, lambda_min(gap), delta * top[e.from], false};
    em.pass = detail::meets(em.margin, em.threshold);
    report.pass = report.pass && em.pass;
    report.edges.push_back(em);
  }
  return report;
}

struct EntrywiseComparison {
  bool lmi_holds = false;
  bool entrywise_holds = false;
};

/// For a 0/1 matrix with at most one nonzero per row and column and positive
/// weights p, p2: V_{p2}(a^T x) < V_p(x) for all x != 0 holds exactly when
/// a p2 < p on every nonzero row of a. Evaluates both sides independently.
inline EntrywiseComparison entrywise_equivalence(const Matrix& a, const Vector& p, const Vector& p2) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || p.size() != n || p2.size() != n)
    throw Error(ErrorKind::dimension_mismatch, "entrywise comparison operands");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(p(i) > 0.0) || !(p2(i) > 0.0)) throw Error(ErrorKind::invalid_argument, "weights must be positive");
    for (Eigen::Index j = 0; j < n; ++j)
      if (a(i, j) != 0.0 && a(i, j) != 1.0) throw Error(ErrorKind::invalid_argument, "matrix must be 0/1");
  }
  for (Eigen::Index i = 0; i < n; ++i)
    if (a.row(i).sum() > 1.0 || a.col(i).sum() > 1.0)
      throw Error(ErrorKind::invalid_argument, "at most one nonzero per row and column");

  EntrywiseComparison out;
  const Matrix lmi = Matrix(p.asDiagonal()) - a * p2.asDiagonal() * a.transpose();
  out.lmi_holds = lambda_min(lmi) > 0.0;

  const Vector image = a * p2;
  out.entrywise_holds = true;
  for (Eigen::Index i = 0; i < n; ++i)
    if (a.row(i).sum() != 0.0 && !(image(i) < p(i))) out.entrywise_holds = false;
  return out;
}

inline constexpr std::size_t default_word_budget = 1'000'000;

struct JsrLowerBound {
  double bound = 0.0;
  Word witness;
};

/// max over nonempty words u with |u| <= depth of rho(Phi(u))^(1/|u|). Ties go
/// to the shortlex-least word. Depth-first, so memory stays O(depth).
inline JsrLowerBound jsr_lower_bound(const MatrixSet& s, std::size_t depth,
                                     std::size_t word_budget = default_word_budget) {
  if (depth < 1) throw Error(ErrorKind::invalid_argument, "depth must be at least 1");
  const std::size_t m = s.size();
  {
    // Count words without overflow.
    double count = 0.0, layer = 1.0;
    for (std::size_t t = 1; t <= depth; ++t) {
      layer *= static_cast<double>(m);
      count += layer;
    }
    if (count > static_cast<double>(word_budget))
      throw Error(ErrorKind::budget_exceeded, std::to_string(m) + "^" + std::to_string(depth) +
                                                  " words exceed the word budget of " +
                                                  std::to_string(word_budget));
  }

  JsrLowerBound best{-1.0, {}};
  Word word;
  std::vector<Matrix> prefix{Matrix::Identity(static_cast<Eigen::Index>(s.dim()),
                                              static_cast<Eigen::Index>(s.dim()))};
  auto visit = [&](auto&& self) -> void {
    for (Symbol a = 0; a < m; ++a) {
      word.push_back(a);
      prefix.push_back(s[a] * prefix.back());
      const double rho = spectral_radius(prefix.back());
      const double value = std::pow(rho, 1.0 / static_cast<double>(word.size()));
      if (value > best.bound || (value == best.bound && shortlex_less(word, best.witness)))
        best = {value, word};
      if (word.size() < depth) self(self);
      prefix.pop_back();
      word.pop_back();
    }
  };
  visit(visit);
  return best;
}

}  // namespace pathlyap
