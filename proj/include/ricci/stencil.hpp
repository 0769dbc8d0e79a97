#pragma once

// Finite-difference weights on arbitrary nodes (Fornberg's recurrence), plus
// a 5-point helper for derivatives of uniformly sampled data that works at
// grid interiors and edges alike.

#include <span>
#include <vector>

#include "ricci/errors.hpp"

namespace ricci {

// Weights w[j] such that sum_j w[j] f(xs[j]) approximates f^(m)(z).
inline std::vector<double> fd_weights(double z, std::span<const double> xs, int m) {
  const int nn = static_cast<int>(xs.size());
  if (nn < m + 1) throw DimensionError("fd_weights: need at least m+1 nodes");
  std::vector<std::vector<double>> c(nn, std::vector<double>(m + 1, 0.0));
  c[0][0] = 1.0;
  double c1 = 1.0;
  double c4 = xs[0] - z;
  for (int i = 1; i < nn; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k)
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(nn);
  for (int j = 0; j < nn; ++j) w[j] = c[j][m];
  return w;
}

// m-th derivative of uniformly sampled values at sample index i, using a
// 5-point window shifted as needed near the ends (O(ds^(5-m)) accuracy).
inline double grid_deriv(std::span<const double> values, double ds, int i, int m) {
  const int nn = static_cast<int>(values.size());
  if (nn < 5) throw DimensionError("grid_deriv: need at least 5 samples");
  int lo = i - 2;
  if (lo < 0) lo = 0;
  if (lo > nn - 5) lo = nn - 5;
  double xs[5];
  for (int j = 0; j < 5; ++j) xs[j] = (lo + j - i) * ds;
  const auto w = fd_weights(0.0, std::span<const double>(xs, 5), m);
  double acc = 0.0;
  for (int j = 0; j < 5; ++j) acc += w[j] * values[lo + j];
  return acc;
}

}  // namespace ricci
