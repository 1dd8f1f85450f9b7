#pragma once

#include <cmath>
#include <vector>

#include "ssnmc/error.hpp"
#include "ssnmc/tensor.hpp"

namespace ssnmc {

// Small dense routines for n x n metrics; n stays in single digits here.

/// Cholesky factor L (row-major, lower triangle) of a symmetric matrix, or
/// an empty vector when the matrix is not positive-definite.
inline std::vector<double> cholesky(std::span<const double> a, int n) {
  std::vector<double> l(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[static_cast<std::size_t>(i * n + j)];
      for (int k = 0; k < j; ++k) s -= l[static_cast<std::size_t>(i * n + k)] * l[static_cast<std::size_t>(j * n + k)];
      if (i == j) {
        if (!(s > 0.0)) return {};
        l[static_cast<std::size_t>(i * n + i)] = std::sqrt(s);
      } else {
        l[static_cast<std::size_t>(i * n + j)] = s / l[static_cast<std::size_t>(j * n + j)];
      }
    }
  }
  return l;
}

inline bool is_positive_definite(const Tensor& g) { return !cholesky(g.components(), g.dim()).empty(); }

inline double asymmetry(const Tensor& g) {
  const int n = g.dim();
  double m = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) m = std::max(m, std::abs(g(i, j) - g(j, i)));
  return m;
}

/// Inverse metric g^{ij} of a symmetric positive-definite g_ij.
inline Tensor inverse_metric(const Tensor& g) {
  const int n = g.dim();
  if (g.rank() != 2 || g.slot(0) != Slot::Lower || g.slot(1) != Slot::Lower) {
    throw Error(ErrorKind::SlotKindMismatch, "inverse_metric expects a (0,2) tensor");
  }
  const std::vector<double> l = cholesky(g.components(), n);
  if (l.empty()) throw Error(ErrorKind::SingularMetric, "metric is not positive-definite");
  auto L = [&](int i, int j) { return l[static_cast<std::size_t>(i * n + j)]; };
  std::vector<double> inv(static_cast<std::size_t>(n * n), 0.0);
  std::vector<double> col(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) {
    // Solve L y = e_c, then L^T x = y.
    for (int i = 0; i < n; ++i) {
      double s = (i == c) ? 1.0 : 0.0;
      for (int k = 0; k < i; ++k) s -= L(i, k) * col[static_cast<std::size_t>(k)];
      col[static_cast<std::size_t>(i)] = s / L(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = col[static_cast<std::size_t>(i)];
      for (int k = i + 1; k < n; ++k) s -= L(k, i) * col[static_cast<std::size_t>(k)];
      col[static_cast<std::size_t>(i)] = s / L(i, i);
    }
    for (int r = 0; r < n; ++r) inv[static_cast<std::size_t>(r * n + c)] = col[static_cast<std::size_t>(r)];
  }
  // Symmetrize to remove roundoff asymmetry.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double s = 0.5 * (inv[static_cast<std::size_t>(i * n + j)] + inv[static_cast<std::size_t>(j * n + i)]);
      inv[static_cast<std::size_t>(i * n + j)] = s;
      inv[static_cast<std::size_t>(j * n + i)] = s;
    }
  return Tensor(n, {Slot::Upper, Slot::Upper}, std::move(inv));
}

}  // namespace ssnmc
