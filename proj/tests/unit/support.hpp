#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "oedda/types.hpp"

namespace testing_support {

using oedda::Matrix;
using oedda::Vector;

inline Matrix random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = n01(rng);
  return m;
}

inline Matrix random_spd(int n, std::mt19937_64& rng, double shift = 0.5) {
  const Matrix a = random_matrix(n, n, rng);
  return a * a.transpose() / n + shift * Matrix::Identity(n, n);
}

inline Vector random_uniform(int n, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

// Rows orthonormal and orthogonal to the ones vector (Helmert contrasts), so
// sqrt(N-1) L E has sample covariance L L^T exactly.
inline Matrix helmert_rows(int rows, int n) {
  Matrix e = Matrix::Zero(rows, n);
  for (int k = 1; k <= rows; ++k) {
    const double s = 1.0 / std::sqrt(double(k) * (k + 1));
    for (int j = 0; j < k; ++j) e(k - 1, j) = s;
    e(k - 1, k) = -k * s;
  }
  return e;
}

inline Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& x, double h = 1e-6) {
  Vector g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline double rel_error(const Vector& a, const Vector& ref) {
  return (a - ref).norm() / std::max(ref.norm(), 1e-300);
}

// Gaspari-Cohn written out term by term.
inline double gc_oracle(double d, double L) {
  const double r = std::abs(d) / L;
  if (r <= 1.0)
    return -0.25 * std::pow(r, 5) + 0.5 * std::pow(r, 4) + 0.625 * std::pow(r, 3) - 5.0 / 3.0 * r * r + 1.0;
  if (r <= 2.0)
    return std::pow(r, 5) / 12.0 - 0.5 * std::pow(r, 4) + 0.625 * std::pow(r, 3) + 5.0 / 3.0 * r * r - 5.0 * r + 4.0 -
           2.0 / (3.0 * r);
  return 0.0;
}

inline int ring(int i, int n) { return ((i % n) + n) % n; }

}  // namespace testing_support
