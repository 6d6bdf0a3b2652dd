#pragma once

#include "morselab/assemble.hpp"

#include <span>
#include <vector>

namespace morselab::dtn {

using assemble::BlockOperator;
using assemble::Potential;
using grid::GridDomain;
using grid::Index;
using linalg::Matrix;

enum class DtnSide { One, Two, Sum, Periodic, Partial };
std::string_view to_string(DtnSide side);

/// A Dirichlet-to-Neumann matrix on an interface vertex set. Not mass
/// normalized: it is the plain Schur complement onto the interface.
struct DtnMap {
  Matrix matrix;
  DtnSide side = DtnSide::One;
  double shift = 0.0;
  std::vector<Index> interface;
  // For side Sum: max-entry gap to the Schur complement of the global
  // realization, relative to its largest entry.
  double global_residual = 0.0;

  Eigen::Index size() const { return matrix.rows(); }
};

/// Relative tolerance of the sum-vs-global Schur agreement.
inline constexpr double kSumAgreementTol = 1e-10;

/// D_i - B_i^T A_i^{-1} B_i. Throws Errc::ASingular when A_i is singular.
DtnMap dtn_side(const BlockOperator& blocks, int side, double zero_tol = linalg::kDefaultZeroTol);
/// Lambda_1 + Lambda_2, cross-checked against the Schur complement of the
/// global realization onto Sigma; throws Errc::InvariantViolation when the
/// two disagree beyond kSumAgreementTol.
DtnMap dtn_sum(const BlockOperator& blocks, double zero_tol = linalg::kDefaultZeroTol);
/// Inverse of a DtN matrix. Throws Errc::Singular when it has a kernel.
Matrix ntd_map(const DtnMap& dtn, double zero_tol = linalg::kDefaultZeroTol);

/// Split of the periodic quotient operator into interior (all-Dirichlet) and
/// Gamma1-class blocks.
struct PeriodicBlocks {
  std::vector<Index> interior, boundary;
  Matrix a, b, d;
};
PeriodicBlocks periodic_blocks(const GridDomain& domain, const Potential& v, double lambda);
/// Periodic DtN map on the Gamma1 class.
DtnMap dtn_periodic(const GridDomain& domain, const Potential& v, double lambda,
                    double zero_tol = linalg::kDefaultZeroTol);
/// Schur complement onto Gamma1 of the realization with Neumann data on
/// Gamma1 and Dirichlet data on Gamma2.
DtnMap dtn_partial(const GridDomain& domain, const Potential& v, double lambda,
                   double zero_tol = linalg::kDefaultZeroTol);

struct Certificate {
  bool holds = false;
  double best_margin = 0.0;  // min over c of ||L1^{-1} L2 - cI|| - (1 + c)
  double best_c = 0.0;
};

/// 64 log-spaced values in [1e-3, 1e3] plus c = 1, ascending.
std::vector<double> default_c_grid();
Certificate perturb_certificate(const DtnMap& lambda1, const DtnMap& lambda2,
                                std::span<const double> c_grid,
                                double zero_tol = linalg::kDefaultZeroTol);

}  // namespace morselab::dtn
