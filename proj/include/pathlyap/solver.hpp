#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pathlyap/error.hpp"
#include "pathlyap/graph.hpp"
#include "pathlyap/linalg.hpp"
#include "pathlyap/lyapunov.hpp"
#include "pathlyap/path_complete.hpp"

namespace pathlyap {

struct SolverOptions {
  std::size_t iterations = 20'000;
  std::uint64_t seed = 0;
  double delta = default_delta;
};

enum class SolverStatus { verified, infeasible_unknown };

struct SolverResult {
  SolverStatus status = SolverStatus::infeasible_unknown;
  Certificate certificate;         ///< meaningful only when verified
  std::size_t iterations = 0;
  double best_margin = -std::numeric_limits<double>::infinity();  ///< min block eigenvalue, trace-normalized
  /// Upper bound on the best achievable trace-normalized margin implied by the
  /// final soft-min weights. A value <= 0 means no strictly feasible point.
  double dual_bound = std::numeric_limits<double>::infinity();

  bool verified() const noexcept { return status == SolverStatus::verified; }
};

namespace detail {

/// Blocks of the margin problem: one per node (P_i itself) and one per edge
/// (P_i - Phi^T P_j Phi). The solver maximizes the smallest eigenvalue over
/// all blocks on the slice sum_i tr(P_i) = 1.
class MarginProblem {
 public:
  MarginProblem(const LabeledGraph& g, const MatrixSet& s) : g_(g), n_(static_cast<Eigen::Index>(s.dim())) {
    for (const auto& e : g.edges()) phis_.push_back(s.product(e.label));
  }

  std::size_t nodes() const { return g_.node_count(); }
  Eigen::Index dim() const { return n_; }
  std::size_t block_count() const { return g_.node_count() + g_.edges().size(); }

  Matrix block(const std::vector<Matrix>& p, std::size_t b) const {
    if (b < nodes()) return p[b];
    const auto k = b - nodes();
    const Edge& e = g_.edges()[k];
    return p[e.from] - phis_[k].transpose() * p[e.to] * phis_[k];
  }

  /// Adjoint of the block map applied to weights G_b.
  void add_adjoint(std::size_t b, const Matrix& weight, std::vector<Matrix>& grad) const {
    if (b < nodes()) {
      grad[b] += weight;
      return;
    }
    const auto k = b - nodes();
    const Edge& e = g_.edges()[k];
    grad[e.from] += weight;
    grad[e.to] -= phis_[k] * weight * phis_[k].transpose();
  }

  /// Solves P_i = I + sum_{i->j} Phi^T P_j Phi. When the summed operator is a
  /// contraction the solution is positive definite and satisfies every edge.
  /// Returns nothing unless every P_i came out positive definite.
  std::optional<std::vector<Matrix>> stein_point() const {
    const auto n = n_;
    const auto nn = n * n;
    const auto size = static_cast<Eigen::Index>(nodes()) * nn;
    if (size == 0 || size > 2500) return std::nullopt;
    Matrix system = Matrix::Identity(size, size);
    Vector rhs = Vector::Zero(size);
    for (std::size_t i = 0; i < nodes(); ++i)
      for (Eigen::Index c = 0; c < n; ++c) rhs(static_cast<Eigen::Index>(i) * nn + c * n + c) = 1.0;
    // vec(Phi^T P Phi) = (Phi^T kron Phi^T) vec(P) with column-major vec.
    for (std::size_t k = 0; k < g_.edges().size(); ++k) {
      const Edge& e = g_.edges()[k];
      const Matrix& phi = phis_[k];
      const auto row0 = static_cast<Eigen::Index>(e.from) * nn;
      const auto col0 = static_cast<Eigen::Index>(e.to) * nn;
      for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b)
          for (Eigen::Index c = 0; c < n; ++c)
            for (Eigen::Index d = 0; d < n; ++d)
              system(row0 + b * n + a, col0 + d * n + c) -= phi(c, a) * phi(d, b);
    }
    const Vector x = system.partialPivLu().solve(rhs);
    if (!x.allFinite()) return std::nullopt;
    std::vector<Matrix> p(nodes(), Matrix(n, n));
    for (std::size_t i = 0; i < nodes(); ++i) {
      p[i] = Eigen::Map<const Matrix>(x.data() + static_cast<Eigen::Index>(i) * nn, n, n);
      p[i] = 0.5 * (p[i] + p[i].transpose());
      if (!(lambda_min(p[i]) > 0.0)) return std::nullopt;
    }
    return p;
  }

 private:
  const LabeledGraph& g_;
  Eigen::Index n_;
  std::vector<Matrix> phis_;
};

/// Any positive semidefinite block weights G_b with total trace one bound the
/// best trace-normalized margin by max_i lambda_max((L^* G)_i). Soft-min
/// weights are often rank deficient, so blends with the block-wise identity
/// are tried as well and the smallest bound wins.
inline double dual_bound(const MarginProblem& prob, const std::vector<Matrix>& weights) {
  const auto n = prob.dim();
  double best = std::numeric_limits<double>::infinity();
  for (double blend : {0.0, 1e-3, 1e-2, 1e-1, 0.5}) {
    std::vector<Matrix> adj(prob.nodes(), Matrix::Zero(n, n));
    for (std::size_t b = 0; b < weights.size(); ++b) {
      const double t = weights[b].trace();
      prob.add_adjoint(b, (1.0 - blend) * weights[b] + blend * t / static_cast<double>(n) * Matrix::Identity(n, n),
                       adj);
    }
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& a : adj) top = std::max(top, lambda_max(a));
    best = std::min(best, top);
  }
  return best;
}

struct Evaluation {
  double margin = 0.0;  ///< true minimum eigenvalue over blocks
  double smooth = 0.0;  ///< soft-min at temperature mu
  double dual = 0.0;    ///< max_i lambda_max of the adjoint of the soft-min weights
  std::vector<Matrix> gradient;
};

inline Evaluation evaluate(const MarginProblem& prob, const std::vector<Matrix>& p, double mu) {
  const std::size_t blocks = prob.block_count();
  std::vector<SymmetricEigen> eig;
  eig.reserve(blocks);
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < blocks; ++b) {
    eig.push_back(symmetric_eigen(prob.block(p, b)));
    lo = std::min(lo, eig.back().values(0));
  }
  double z = 0.0;
  for (const auto& e : eig) z += (-(e.values.array() - lo) / mu).exp().sum();
  Evaluation out;
  out.margin = lo;
  out.smooth = lo - mu * std::log(z);
  out.gradient.assign(prob.nodes(), Matrix::Zero(prob.dim(), prob.dim()));
  std::vector<Matrix> weights;
  weights.reserve(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    const Vector w = (-(eig[b].values.array() - lo) / mu).exp() / z;
    weights.push_back(eig[b].vectors * w.asDiagonal() * eig[b].vectors.transpose());
    prob.add_adjoint(b, weights.back(), out.gradient);
  }
  out.dual = dual_bound(prob, weights);
  return out;
}

inline void normalize(std::vector<Matrix>& p) {
  double t = 0.0;
  for (const auto& m : p) t += m.trace();
  if (t > 0.0)
    for (auto& m : p) m /= t;
}

inline std::vector<Matrix> step_along(const std::vector<Matrix>& p, const std::vector<Matrix>& dir, double eta) {
  std::vector<Matrix> out = p;
  for (std::size_t i = 0; i < p.size(); ++i) out[i] += eta * dir[i];
  return out;
}

}  // namespace detail

/// Heuristic search for a certificate of the graph's inequalities.
///
/// Maximizes the smallest eigenvalue over all constraint blocks on the slice
/// sum_i tr(P_i) = 1 by gradient ascent on a soft-min with a decreasing
/// temperature, started from the better of a perturbed identity and the
/// summed Stein solution. Success is declared only by verify_certificate; a
/// failure is a value, never a proof of infeasibility.
inline SolverResult baseline_solver(const LabeledGraph& g, const MatrixSet& s, const SolverOptions& opts = {}) {
  if (!(g.alphabet() == s.alphabet()))
    throw Error(ErrorKind::dimension_mismatch, "graph and matrix set use different alphabets");
  SolverResult result;
  const detail::MarginProblem prob(g, s);
  const auto n = prob.dim();
  if (g.node_count() == 0) {
    result.status = SolverStatus::verified;
    return result;
  }

  auto try_accept = [&](const std::vector<Matrix>& p) {
    Certificate c;
    // Rounding in the gradient leaves tiny asymmetries the verifier rejects.
    for (const auto& m : p) c.forms.push_back(0.5 * (m + m.transpose()));
    if (verify_certificate(g, s, c, opts.delta).pass) {
      result.status = SolverStatus::verified;
      result.certificate = std::move(c);
      return true;
    }
    return false;
  };

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Matrix> p(g.node_count());
  for (auto& m : p) {
    Matrix r(n, n);
    for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = normal(rng);
    m = Matrix::Identity(n, n) + 1e-3 * (r + r.transpose());
  }
  detail::normalize(p);

  const double scale = 1.0 / static_cast<double>(g.node_count() * static_cast<std::size_t>(n));
  const double log_blocks = std::log(static_cast<double>(prob.block_count() * static_cast<std::size_t>(n)));
  double mu = 0.05 * scale;
  const double mu_floor = 1e-13 * scale;

  auto ev = detail::evaluate(prob, p, mu);
  if (auto stein = prob.stein_point()) {
    detail::normalize(*stein);
    auto ev2 = detail::evaluate(prob, *stein, mu);
    if (ev2.margin > ev.margin) {
      p = std::move(*stein);
      ev = std::move(ev2);
    }
  }
  result.best_margin = ev.margin;
  if (ev.margin > 0.0 && try_accept(p)) return result;

  double eta = scale;
  std::size_t stall = 0;
  for (std::size_t it = 1; it <= opts.iterations; ++it) {
    result.iterations = it;
    // Tangent direction: drop the component that changes the total trace.
    std::vector<Matrix> dir = ev.gradient;
    double tr = 0.0;
    for (const auto& d : dir) tr += d.trace();
    const double shift = tr / static_cast<double>(g.node_count() * static_cast<std::size_t>(n));
    double norm2 = 0.0;
    for (auto& d : dir) {
      d -= shift * Matrix::Identity(n, n);
      norm2 += d.squaredNorm();
    }

    bool moved = false;
    for (int tries = 0; tries < 40; ++tries) {
      auto candidate = detail::step_along(p, dir, eta);
      auto ev2 = detail::evaluate(prob, candidate, mu);
      if (ev2.smooth >= ev.smooth + 0.25 * eta * norm2) {
        p = std::move(candidate);
        ev = std::move(ev2);
        eta *= 1.5;
        moved = true;
        break;
      }
      eta *= 0.5;
    }

    result.best_margin = std::max(result.best_margin, ev.margin);
    result.dual_bound = std::min(result.dual_bound, ev.dual);
    if (ev.margin > 0.0 && try_accept(p)) return result;
    if (ev.dual < -1e-12 * scale) break;  // soft-min weights certify that no margin > 0 exists

    // Lower the temperature once the smoothing bias dominates the gap to the
    // dual bound, or when the line search stalls.
    const double gap = ev.dual - ev.margin;
    if (!moved || eta < 1e-18 || mu * log_blocks > 0.5 * gap) ++stall;
    else stall = 0;
    if (stall >= 3 && mu > mu_floor) {
      mu = std::max(mu_floor, 0.5 * mu);
      ev = detail::evaluate(prob, p, mu);
      eta = std::max(eta, mu);
      stall = 0;
    }
  }
  return result;
}

struct JsrBounds {
  double lower = 0.0;
  Word lower_witness;
  double upper = 0.0;
  /// Verified certificate for the set scaled by 1/upper.
  Certificate certificate;
  /// Set when no gamma below the initial norm bracket could be certified.
  bool upper_from_bracket_only = false;
  std::size_t bisection_steps = 0;
  double bracket_upper = 0.0;
};

struct BisectionOptions {
  double tol = 1e-6;
  std::size_t lower_depth = 4;
  std::size_t max_steps = 200;
  SolverOptions solver;
};

/// Upper bound on the joint spectral radius as the smallest gamma (up to tol)
/// for which the solver finds a verified certificate for Sigma / gamma.
/// Refuses graphs that are not path-complete: their inequalities can be
/// feasible for unstable sets, so no bound would follow.
inline JsrBounds gamma_star_bisection(const LabeledGraph& g, const MatrixSet& s, const BisectionOptions& opts = {}) {
  if (!(opts.tol > 0.0)) throw Error(ErrorKind::invalid_argument, "tol must be positive");
  const auto pc = check_path_complete(g);
  if (!pc.complete)
    throw Error(ErrorKind::not_path_complete,
                "missing word " + g.alphabet().to_text(pc.missing_word) +
                    "; the inequalities are feasible for some unstable set, so no upper bound follows");

  JsrBounds out;
  const auto lb = jsr_lower_bound(s, opts.lower_depth);
  out.lower = lb.bound;
  out.lower_witness = lb.witness;

  double norm_max = 0.0;
  for (const auto& a : s.matrices()) norm_max = std::max(norm_max, operator_norm(a));
  double hi = norm_max + opts.tol;
  Certificate identity;
  identity.forms.assign(g.node_count(), Matrix::Identity(static_cast<Eigen::Index>(s.dim()),
                                                         static_cast<Eigen::Index>(s.dim())));
  for (int k = 0; k < 64 && !verify_certificate(g, s.scaled(1.0 / hi), identity, opts.solver.delta).pass; ++k)
    hi *= 2.0;
  out.bracket_upper = hi;
  out.certificate = identity;

  double lo = std::min(out.lower, hi);
  bool certified_below_bracket = false;
  while (hi - lo > opts.tol * hi && out.bisection_steps < opts.max_steps) {
    ++out.bisection_steps;
    const double mid = 0.5 * (lo + hi);
    if (mid <= 0.0) break;
    auto res = baseline_solver(g, s.scaled(1.0 / mid), opts.solver);
    if (res.verified()) {
      hi = mid;
      out.certificate = std::move(res.certificate);
      certified_below_bracket = true;
    } else {
      lo = mid;
    }
  }
  // Only meaningful when bisection ran: the bracket may already be within tol.
  out.upper_from_bracket_only = out.bisection_steps > 0 && !certified_below_bracket;
  out.upper = hi;
  return out;
}

}  // namespace pathlyap
