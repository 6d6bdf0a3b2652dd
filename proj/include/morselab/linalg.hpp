#pragma once

#include <Eigen/Dense>

#include <limits>
#include <vector>

namespace morselab::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative zero tolerance used for every sign classification unless a
/// caller overrides it. Values with |x| <= zero_tol * max|entry| count as 0.
inline constexpr double kDefaultZeroTol = 1e-9;

/// Sign counts of a symmetric matrix. `morse()` is the number of negative
/// eigenvalues, `morse0()` additionally counts the kernel.
struct Inertia {
  int negative = 0;
  int zero = 0;
  int positive = 0;
  double zero_tol = kDefaultZeroTol;
  // Smallest |pivot| or |eigenvalue| that was classified as nonzero.
  double min_abs_nonzero = std::numeric_limits<double>::infinity();

  int order() const { return negative + zero + positive; }
  int morse() const { return negative; }
  int morse0() const { return negative + zero; }

  bool same_counts(const Inertia& other) const {
    return negative == other.negative && zero == other.zero && positive == other.positive;
  }
};

double max_abs(const Matrix& m);

/// Symmetric-pivoted LDL^T (Bunch-Kaufman, 1x1 and 2x2 pivots) over the lower
/// triangle. Exact zeros in the trailing matrix are skipped, so banded and
/// arrow-shaped grid operators factor in time proportional to their fill.
class SymmetricIndefiniteFactorization {
 public:
  explicit SymmetricIndefiniteFactorization(const Matrix& m, double zero_tol = kDefaultZeroTol);

  Eigen::Index order() const { return n_; }
  const Inertia& inertia() const { return inertia_; }
  // Some pivot fell in (zero_tol*scale, 10*zero_tol*scale).
  bool indeterminate() const { return indeterminate_; }
  bool singular() const { return inertia_.zero > 0; }
  double scale() const { return scale_; }

  // Throws Errc::ASingular when a pivot was classified as zero.
  Matrix solve(const Matrix& rhs) const;

 private:
  struct Pivot {
    Eigen::Index k;
    int size;            // 1 or 2
    double d11, d21, d22;
  };
  struct Entry {
    Eigen::Index row;
    double value;
  };

  void factor(Matrix a);
  void classify(double value);

  Eigen::Index n_ = 0;
  double zero_tol_;
  double scale_ = 0.0;
  bool indeterminate_ = false;
  Inertia inertia_;
  std::vector<Eigen::Index> perm_;
  std::vector<Pivot> pivots_;
  std::vector<std::vector<Entry>> lower_;  // strictly-below-block entries of L per column
};

/// Inertia from the LDL^T pivots. Throws Errc::Indeterminate when a pivot lands
/// in the ambiguous band just above the zero threshold.
Inertia ldlt_inertia(const Matrix& m, double zero_tol = kDefaultZeroTol);

struct EigenDecomposition {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns, empty when not requested
};

/// Dense symmetric eigendecomposition; the oracle for every inertia claim.
EigenDecomposition eigs(const Matrix& m, bool with_vectors = true);

/// Sign counts of the eigenvalues with the same relative tolerance convention
/// as ldlt_inertia (scale = max |entry| of m).
Inertia eig_inertia(const Matrix& m, double zero_tol = kDefaultZeroTol);
Inertia eig_inertia(const Vector& eigenvalues, double scale, double zero_tol);

/// D - B^T A^{-1} B, symmetrized. Throws Errc::ASingular when A is singular at
/// the working tolerance.
Matrix schur_complement(const Matrix& a, const Matrix& b, const Matrix& d,
                        double zero_tol = kDefaultZeroTol);

/// A^{-1} rhs for symmetric A. Throws Errc::ASingular.
Matrix solve(const Matrix& a, const Matrix& rhs, double zero_tol = kDefaultZeroTol);

/// Largest singular value via power iteration on m^T m.
double spectral_norm(const Matrix& m);

}  // namespace morselab::linalg
