#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "pathlyap/error.hpp"

namespace pathlyap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline bool all_finite(const Matrix& a) { return a.allFinite(); }

struct SymmetricEigen {
  Vector values;   ///< ascending
  Matrix vectors;  ///< columns match `values`
};

/// Cyclic Jacobi diagonalization. Sweeps until the off-diagonal Frobenius
/// norm drops below 1e-12 of the full Frobenius norm. Only the upper triangle
/// is trusted; the input is symmetrized first.
inline SymmetricEigen symmetric_eigen(const Matrix& input) {
  const Eigen::Index n = input.rows();
  Matrix a = 0.5 * (input + input.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double total = a.norm();
  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) s += 2.0 * a(p, q) * a(p, q);
    return std::sqrt(s);
  };
  for (int sweep = 0; sweep < 100 && total > 0.0; ++sweep) {
    if (off_norm() <= 1e-12 * total) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return a(i, i) < a(j, j); });
  SymmetricEigen out{Vector(n), Matrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

inline double lambda_min(const Matrix& s) { return symmetric_eigen(s).values(0); }
inline double lambda_max(const Matrix& s) {
  const auto e = symmetric_eigen(s);
  return e.values(e.values.size() - 1);
}

/// Spectral norm, via the largest eigenvalue of A^T A.
inline double operator_norm(const Matrix& a) {
  return std::sqrt(std::max(0.0, lambda_max(a.transpose() * a)));
}

inline double infinity_norm(const Matrix& a) {
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Largest eigenvalue modulus through Gelfand's formula: repeated squaring
/// with infinity-norm normalization, rho = prod_k s_k^(1/2^k). Matrices whose
/// powers stay exactly representable (0/1 sub-permutations) come out exact.
inline double spectral_radius(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::dimension_mismatch, "spectral radius of a non-square matrix");
  if (!all_finite(a)) throw Error(ErrorKind::non_finite, "spectral radius input");
  if (a.size() == 0) return 0.0;
  Matrix c = a;
  double log_rho = 0.0;
  double weight = 1.0;
  for (int k = 0; k <= 60; ++k) {
    const double s = infinity_norm(c);
    if (s == 0.0) return 0.0;
    log_rho += weight * std::log(s);
    c /= s;
    if (k == 60) break;
    Matrix next = c * c;
    if (next == c) break;  // idempotent up to scale: all further s_k are 1
    c = std::move(next);
    weight *= 0.5;
  }
  return std::exp(log_rho);
}

}  // namespace pathlyap
