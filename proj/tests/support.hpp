#pragma once

#include "morselab/linalg.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace testsupport {

using morselab::linalg::Matrix;
using morselab::linalg::Vector;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = uniform(rng, -1.0, 1.0);
  }
  return m;
}

inline Matrix random_symmetric(std::mt19937_64& rng, Eigen::Index n) {
  const Matrix m = random_matrix(rng, n, n);
  return 0.5 * (m + m.transpose());
}

// Q diag(values) Q^T with a random orthogonal Q.
inline Matrix with_spectrum(std::mt19937_64& rng, const std::vector<double>& values) {
  const auto n = static_cast<Eigen::Index>(values.size());
  const Eigen::HouseholderQR<Matrix> qr(random_matrix(rng, n, n));
  const Matrix q = qr.householderQ();
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = values[static_cast<std::size_t>(i)];
  const Matrix m = q * d.asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

// Eigenvalues (4/h^2) sin^2(j pi h / 2), j = 1..N-1, of the Dirichlet
// second-difference operator on [0, 1] with N cells.
inline std::vector<double> dirichlet_second_difference(int n_cells) {
  const double h = 1.0 / n_cells;
  std::vector<double> out;
  for (int j = 1; j < n_cells; ++j) {
    const double s = std::sin(j * M_PI * h / 2.0);
    out.push_back(4.0 / (h * h) * s * s);
  }
  return out;
}

// Same for the Neumann (natural closure, lumped half masses) operator:
// j = 0..N.
inline std::vector<double> neumann_second_difference(int n_cells) {
  const double h = 1.0 / n_cells;
  std::vector<double> out;
  for (int j = 0; j <= n_cells; ++j) {
    const double s = std::sin(j * M_PI * h / 2.0);
    out.push_back(4.0 / (h * h) * s * s);
  }
  return out;
}

inline int count_below(const std::vector<double>& values, double bound) {
  int n = 0;
  for (const double v : values) n += v < bound ? 1 : 0;
  return n;
}

}  // namespace testsupport
