#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "pathlyap/error.hpp"
#include "pathlyap/graph.hpp"
#include "pathlyap/linalg.hpp"
#include "pathlyap/lyapunov.hpp"
#include "pathlyap/path_complete.hpp"

namespace pathlyap {

inline constexpr std::size_t default_product_budget = 100'000;

struct Product {
  Word word;
  Matrix matrix;
};

/// Common Lyapunov function W(x) = sum_{t < r} max_{|u| = t} ||Phi(u) x||^2
/// assembled from node certificates that hold for the gamma-scaled set.
struct InvariantFunction {
  double gamma = 0.0;
  double xi = 0.0;
  int degree = 2;
  std::size_t horizon = 0;  ///< r
  std::vector<double> alpha;  ///< lambda_min(P_i)
  std::vector<double> beta;   ///< lambda_max(P_i)
  std::vector<std::vector<Product>> levels;  ///< levels[t]: all products of length t

  std::size_t dim() const { return static_cast<std::size_t>(levels.front().front().matrix.rows()); }
  std::size_t product_count() const {
    std::size_t c = 0;
    for (const auto& l : levels) c += l.size();
    return c;
  }
};

namespace detail {

inline void require_unit_path_complete(const LabeledGraph& g) {
  if (!g.unit_labels()) throw Error(ErrorKind::invalid_argument, "edge labels must have length one");
  const auto pc = check_path_complete(g);
  if (!pc.complete)
    throw Error(ErrorKind::not_path_complete, "missing word " + g.alphabet().to_text(pc.missing_word));
}

}  // namespace detail

/// Smallest s >= 1 with sqrt(xi) / gamma^s < 1, by direct iteration.
inline std::size_t invariant_horizon(double xi, double gamma) {
  const double root = std::sqrt(xi);
  double power = gamma;
  std::size_t s = 1;
  while (!(root / power < 1.0)) {
    power *= gamma;
    ++s;
    if (s > 100'000) throw Error(ErrorKind::budget_exceeded, "horizon does not terminate");
  }
  return s;
}

inline InvariantFunction build_invariant(const LabeledGraph& g, const MatrixSet& s, double gamma, const Certificate& c,
                                         double delta = default_delta,
                                         std::size_t product_budget = default_product_budget) {
  if (!(gamma > 1.0)) throw Error(ErrorKind::invalid_argument, "gamma must exceed 1");
  detail::require_unit_path_complete(g);
  const auto report = verify_certificate(g, s.scaled(gamma), c, delta);
  if (!report.pass) throw Error(ErrorKind::verification_failed, "certificate does not hold for the gamma-scaled set");

  InvariantFunction f;
  f.gamma = gamma;
  for (const auto& p : c.forms) {
    const auto e = symmetric_eigen(p);
    f.alpha.push_back(e.values(0));
    f.beta.push_back(e.values(e.values.size() - 1));
  }
  f.xi = *std::max_element(f.beta.begin(), f.beta.end()) / *std::min_element(f.alpha.begin(), f.alpha.end());
  f.horizon = invariant_horizon(f.xi, gamma);

  const auto m = static_cast<double>(s.size());
  double count = 0.0, layer = 1.0;
  for (std::size_t t = 0; t < f.horizon; ++t, layer *= m) count += layer;
  if (count > static_cast<double>(product_budget))
    throw Error(ErrorKind::budget_exceeded,
                "horizon r = " + std::to_string(f.horizon) + " needs " + std::to_string(s.size()) + "^" +
                    std::to_string(f.horizon - 1) + " products of length r-1 (" + std::to_string(count) +
                    " in total), budget " + std::to_string(product_budget));

  const auto n = static_cast<Eigen::Index>(s.dim());
  f.levels.push_back({Product{{}, Matrix::Identity(n, n)}});
  for (std::size_t t = 1; t < f.horizon; ++t) {
    std::vector<Product> next;
    next.reserve(f.levels.back().size() * s.size());
    for (const auto& p : f.levels.back())
      for (Symbol a = 0; a < s.size(); ++a) {
        Word w = p.word;
        w.push_back(a);
        next.push_back({std::move(w), s[a] * p.matrix});
      }
    f.levels.push_back(std::move(next));
  }
  return f;
}

inline double eval_W(const InvariantFunction& f, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != f.dim()) throw Error(ErrorKind::dimension_mismatch, "eval_W argument");
  double w = 0.0;
  for (const auto& level : f.levels) {
    double top = 0.0;
    for (const auto& p : level) top = std::max(top, (p.matrix * x).squaredNorm());
    w += top;
  }
  return w;
}

namespace detail {

inline Vector random_unit(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  do {
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  } while (v.norm() == 0.0);
  return v / v.norm();
}

}  // namespace detail

struct DecreaseReport {
  std::size_t samples = 0;
  std::size_t checks = 0;
  std::size_t violations = 0;
  /// min over samples and symbols of (W(x) - W(A_i x)) / W(x)
  double min_relative_gap = std::numeric_limits<double>::infinity();

  bool pass() const { return violations == 0; }
};

/// Samples unit vectors and checks W(A_i x) < W(x) for every symbol.
inline DecreaseReport check_decrease(const InvariantFunction& f, const MatrixSet& s, std::size_t samples,
                                     std::uint64_t seed) {
  if (s.dim() != f.dim()) throw Error(ErrorKind::dimension_mismatch, "matrix set and invariant function");
  std::mt19937_64 rng(seed);
  DecreaseReport rep;
  for (std::size_t k = 0; k < samples; ++k) {
    const Vector x = detail::random_unit(rng, static_cast<Eigen::Index>(f.dim()));
    const double wx = eval_W(f, x);
    ++rep.samples;
    for (const auto& a : s.matrices()) {
      const double wy = eval_W(f, a * x);
      ++rep.checks;
      if (!(wy < wx)) ++rep.violations;
      rep.min_relative_gap = std::min(rep.min_relative_gap, (wx - wy) / wx);
    }
  }
  return rep;
}

struct BiInvarianceReport {
  std::size_t samples = 0;
  std::size_t images = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  ///< max over images of min_l V_l(image) / alpha
  bool degenerate = false;   ///< alpha == 0: the intersection is {0}

  bool pass() const { return violations == 0; }
};

/// Points in the intersection of the sublevel sets {V_l <= alpha} are mapped
/// by every product of length <= depth into their union. Samples are drawn
/// along random directions at a uniformly random fraction of the distance to
/// the intersection boundary; a third of them sit exactly on the boundary.
inline BiInvarianceReport bi_invariance_check(const LabeledGraph& g, const MatrixSet& s, const Certificate& c,
                                              double level, std::size_t samples, std::uint64_t seed,
                                              std::size_t depth = 6, double delta = default_delta) {
  if (!(level >= 0.0)) throw Error(ErrorKind::invalid_argument, "level must be nonnegative");
  detail::require_unit_path_complete(g);
  if (!verify_certificate(g, s, c, delta).pass)
    throw Error(ErrorKind::verification_failed, "certificate does not hold for the matrix set");

  BiInvarianceReport rep;
  const auto n = static_cast<Eigen::Index>(s.dim());
  auto value = [&](const Matrix& p, const Vector& x) { return x.dot(p * x); };
  auto min_value = [&](const Vector& y) {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& p : c.forms) v = std::min(v, value(p, y));
    return v;
  };

  if (level == 0.0) {
    // Only the origin qualifies, and every product fixes it.
    rep.degenerate = true;
    rep.samples = 1;
    return rep;
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Word word;
  std::vector<Vector> images;
  auto visit = [&](auto&& self) -> void {
    for (Symbol a = 0; a < s.size(); ++a) {
      images.push_back(s[a] * images.back());
      const double v = min_value(images.back());
      ++rep.images;
      rep.worst_ratio = std::max(rep.worst_ratio, v / level);
      if (v > level * (1.0 + 1e-12)) ++rep.violations;
      word.push_back(a);
      if (word.size() < depth) self(self);
      word.pop_back();
      images.pop_back();
    }
  };
  for (std::size_t k = 0; k < samples; ++k) {
    const Vector u = detail::random_unit(rng, n);
    double top = 0.0;
    for (const auto& p : c.forms) top = std::max(top, value(p, u));
    const double fraction = (k % 3 == 0) ? 1.0 : unit(rng);
    images.assign(1, u * std::sqrt(level / top) * fraction);
    ++rep.samples;
    visit(visit);
  }
  return rep;
}

}  // namespace pathlyap
