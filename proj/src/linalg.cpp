#include "morselab/linalg.hpp"

#include "morselab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace morselab::linalg {

namespace {

constexpr double kBunchKaufmanAlpha = 0.6403882032022076;  // (1 + sqrt(17)) / 8

// Symmetric interchange of rows/columns r < p, touching only the lower
// triangle. Columns before r hold either L (already factored) or trailing
// entries; both need the row swap.
void swap_symmetric(Matrix& a, Eigen::Index r, Eigen::Index p) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index j = 0; j < r; ++j) std::swap(a(r, j), a(p, j));
  std::swap(a(r, r), a(p, p));
  for (Eigen::Index j = r + 1; j < p; ++j) std::swap(a(j, r), a(p, j));
  for (Eigen::Index i = p + 1; i < n; ++i) std::swap(a(i, r), a(i, p));
}

}  // namespace

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

SymmetricIndefiniteFactorization::SymmetricIndefiniteFactorization(const Matrix& m,
                                                                   double zero_tol)
    : n_(m.rows()), zero_tol_(zero_tol) {
  if (m.rows() != m.cols()) {
    throw Error(Errc::InvalidArgument, "factorization needs a square matrix");
  }
  inertia_.zero_tol = zero_tol;
  scale_ = max_abs(m);
  factor(m);
}

void SymmetricIndefiniteFactorization::classify(double value) {
  const double threshold = zero_tol_ * scale_;
  const double mag = std::abs(value);
  if (mag <= threshold) {
    ++inertia_.zero;
    return;
  }
  if (mag < 10.0 * threshold) indeterminate_ = true;
  inertia_.min_abs_nonzero = std::min(inertia_.min_abs_nonzero, mag);
  if (value < 0) {
    ++inertia_.negative;
  } else {
    ++inertia_.positive;
  }
}

void SymmetricIndefiniteFactorization::factor(Matrix a) {
  const Eigen::Index n = n_;
  perm_.resize(static_cast<std::size_t>(n));
  std::iota(perm_.begin(), perm_.end(), Eigen::Index{0});
  std::vector<Eigen::Index> nz;
  nz.reserve(static_cast<std::size_t>(n));

  Eigen::Index k = 0;
  while (k < n) {
    const double absakk = std::abs(a(k, k));
    double colmax = 0.0;
    Eigen::Index imax = k;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double v = std::abs(a(i, k));
      if (v > colmax) {
        colmax = v;
        imax = i;
      }
    }

    if (std::max(absakk, colmax) == 0.0) {
      pivots_.push_back({k, 1, 0.0, 0.0, 0.0});
      classify(0.0);
      ++k;
      continue;
    }

    int kstep = 1;
    Eigen::Index kp = k;
    if (absakk < kBunchKaufmanAlpha * colmax) {
      double rowmax = 0.0;
      for (Eigen::Index j = k; j < imax; ++j) rowmax = std::max(rowmax, std::abs(a(imax, j)));
      for (Eigen::Index i = imax + 1; i < n; ++i) rowmax = std::max(rowmax, std::abs(a(i, imax)));
      if (absakk >= kBunchKaufmanAlpha * colmax * (colmax / rowmax)) {
        kp = k;
      } else if (std::abs(a(imax, imax)) >= kBunchKaufmanAlpha * rowmax) {
        kp = imax;
      } else {
        kp = imax;
        kstep = 2;
      }
    }

    const Eigen::Index kk = k + kstep - 1;
    if (kp != kk) {
      swap_symmetric(a, kk, kp);
      std::swap(perm_[static_cast<std::size_t>(kk)], perm_[static_cast<std::size_t>(kp)]);
    }

    if (kstep == 1) {
      const double d = a(k, k);
      nz.clear();
      for (Eigen::Index i = k + 1; i < n; ++i) {
        if (a(i, k) != 0.0) nz.push_back(i);
      }
      for (std::size_t jj = 0; jj < nz.size(); ++jj) {
        const Eigen::Index j = nz[jj];
        const double cj = a(j, k) / d;
        for (std::size_t ii = jj; ii < nz.size(); ++ii) {
          const Eigen::Index i = nz[ii];
          a(i, j) -= a(i, k) * cj;
        }
      }
      for (const Eigen::Index i : nz) a(i, k) /= d;
      pivots_.push_back({k, 1, d, 0.0, 0.0});
      classify(d);
    } else {
      const double d11 = a(k, k);
      const double d21 = a(k + 1, k);
      const double d22 = a(k + 1, k + 1);
      const double det = d11 * d22 - d21 * d21;
      const double i11 = d22 / det;
      const double i21 = -d21 / det;
      const double i22 = d11 / det;
      nz.clear();
      for (Eigen::Index i = k + 2; i < n; ++i) {
        if (a(i, k) != 0.0 || a(i, k + 1) != 0.0) nz.push_back(i);
      }
      // L = W D^{-1}; trailing -= W D^{-1} W^T.
      for (std::size_t jj = 0; jj < nz.size(); ++jj) {
        const Eigen::Index j = nz[jj];
        const double l1 = a(j, k) * i11 + a(j, k + 1) * i21;
        const double l2 = a(j, k) * i21 + a(j, k + 1) * i22;
        for (std::size_t ii = jj; ii < nz.size(); ++ii) {
          const Eigen::Index i = nz[ii];
          a(i, j) -= a(i, k) * l1 + a(i, k + 1) * l2;
        }
      }
      for (const Eigen::Index i : nz) {
        const double w1 = a(i, k);
        const double w2 = a(i, k + 1);
        a(i, k) = w1 * i11 + w2 * i21;
        a(i, k + 1) = w1 * i21 + w2 * i22;
      }
      pivots_.push_back({k, 2, d11, d21, d22});
      // Eigenvalues of the 2x2 pivot block.
      const double mean = 0.5 * (d11 + d22);
      const double radius = std::hypot(0.5 * (d11 - d22), d21);
      classify(mean - radius);
      classify(mean + radius);
    }
    k += kstep;
  }

  lower_.assign(static_cast<std::size_t>(n), {});
  for (const Pivot& p : pivots_) {
    for (int c = 0; c < p.size; ++c) {
      const Eigen::Index col = p.k + c;
      auto& entries = lower_[static_cast<std::size_t>(col)];
      for (Eigen::Index i = p.k + p.size; i < n; ++i) {
        if (a(i, col) != 0.0) entries.push_back({i, a(i, col)});
      }
    }
  }
}

Matrix SymmetricIndefiniteFactorization::solve(const Matrix& rhs) const {
  if (rhs.rows() != n_) throw Error(Errc::InvalidArgument, "solve: rhs row count mismatch");
  if (singular()) throw Error(Errc::ASingular, "matrix is singular at the working tolerance");

  Matrix y(n_, rhs.cols());
  for (Eigen::Index i = 0; i < n_; ++i) y.row(i) = rhs.row(perm_[static_cast<std::size_t>(i)]);

  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    auto col = y.col(c);
    for (const Pivot& p : pivots_) {
      for (int s = 0; s < p.size; ++s) {
        const double v = col(p.k + s);
        if (v == 0.0) continue;
        for (const Entry& e : lower_[static_cast<std::size_t>(p.k + s)]) col(e.row) -= e.value * v;
      }
    }
    for (const Pivot& p : pivots_) {
      if (p.size == 1) {
        col(p.k) /= p.d11;
      } else {
        const double det = p.d11 * p.d22 - p.d21 * p.d21;
        const double b1 = col(p.k);
        const double b2 = col(p.k + 1);
        col(p.k) = (p.d22 * b1 - p.d21 * b2) / det;
        col(p.k + 1) = (p.d11 * b2 - p.d21 * b1) / det;
      }
    }
    for (auto it = pivots_.rbegin(); it != pivots_.rend(); ++it) {
      for (int s = 0; s < it->size; ++s) {
        double acc = 0.0;
        for (const Entry& e : lower_[static_cast<std::size_t>(it->k + s)]) acc += e.value * col(e.row);
        col(it->k + s) -= acc;
      }
    }
  }

  Matrix x(n_, rhs.cols());
  for (Eigen::Index i = 0; i < n_; ++i) x.row(perm_[static_cast<std::size_t>(i)]) = y.row(i);
  return x;
}

Inertia ldlt_inertia(const Matrix& m, double zero_tol) {
  SymmetricIndefiniteFactorization f(m, zero_tol);
  if (f.indeterminate()) {
    throw Error(Errc::Indeterminate,
                "a pivot lies just above the zero threshold; perturb the shift or refine");
  }
  return f.inertia();
}

EigenDecomposition eigs(const Matrix& m, bool with_vectors) {
  if (m.rows() != m.cols()) throw Error(Errc::InvalidArgument, "eigs needs a square matrix");
  EigenDecomposition out;
  if (m.rows() == 0) {
    out.values.resize(0);
    out.vectors.resize(0, 0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(
      m, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::NonConvergence, "symmetric eigensolver hit its iteration cap");
  }
  out.values = solver.eigenvalues();
  if (with_vectors) out.vectors = solver.eigenvectors();
  return out;
}

Inertia eig_inertia(const Vector& eigenvalues, double scale, double zero_tol) {
  Inertia in;
  in.zero_tol = zero_tol;
  const double threshold = zero_tol * scale;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const double v = eigenvalues(i);
    if (std::abs(v) <= threshold) {
      ++in.zero;
      continue;
    }
    in.min_abs_nonzero = std::min(in.min_abs_nonzero, std::abs(v));
    (v < 0 ? in.negative : in.positive) += 1;
  }
  return in;
}

Inertia eig_inertia(const Matrix& m, double zero_tol) {
  return eig_inertia(eigs(m, false).values, max_abs(m), zero_tol);
}

Matrix solve(const Matrix& a, const Matrix& rhs, double zero_tol) {
  SymmetricIndefiniteFactorization f(a, zero_tol);
  return f.solve(rhs);
}

Matrix schur_complement(const Matrix& a, const Matrix& b, const Matrix& d, double zero_tol) {
  if (b.rows() != a.rows() || b.cols() != d.rows() || d.rows() != d.cols()) {
    throw Error(Errc::InvalidArgument, "schur_complement: block sizes disagree");
  }
  if (a.rows() == 0) return 0.5 * (d + d.transpose());
  SymmetricIndefiniteFactorization f(a, zero_tol);
  Matrix s = d - b.transpose() * f.solve(b);
  return 0.5 * (s + s.transpose());
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const Matrix gram = m.transpose() * m;
  const Eigen::Index n = gram.rows();
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 0.25 * std::sin(1.0 + static_cast<double>(i));
  v.normalize();

  constexpr int kMaxIterations = 20000;
  double rho = 0.0;
  for (int it = 0; it < kMaxIterations; ++it) {
    const Vector w = gram * v;
    rho = v.dot(w);
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    if ((w - rho * v).norm() <= 1e-8 * rho) return std::sqrt(std::max(rho, 0.0));
    v = w / wn;
  }
  // Clustered top singular values stall the iteration; finish with the
  // dense solver rather than report an under-converged norm.
  return std::sqrt(std::max(eigs(gram, false).values.maxCoeff(), 0.0));
}

}  // namespace morselab::linalg
