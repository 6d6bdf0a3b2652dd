#pragma once

#include "morselab/assemble.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace morselab::nodal {

using assemble::Potential;
using grid::GridDomain;
using grid::Index;
using linalg::Matrix;
using linalg::Vector;

struct NodalLabeling {
  int n_plus = 0;
  int n_minus = 0;
  // Component id per lattice vertex; -1 for zero, Dirichlet or outside vertices.
  std::vector<int> component;
  // +1 or -1 per component id.
  std::vector<int> component_sign;

  int total() const { return n_plus + n_minus; }
};

/// Same-sign components of `values` (indexed by lattice vertex) over the free
/// grid edges. |value| <= zero_tol * max|value| counts as zero. Throws
/// Errc::AllZero when nothing survives the threshold.
NodalLabeling nodal_domains(const GridDomain& domain, std::span<const double> values, double zero_tol);

/// Generalized eigenpairs K phi = lambda M phi over the free vertices.
struct Spectrum {
  Vector values;               // ascending
  Matrix vectors;              // M-orthonormal columns over `nodes`
  std::vector<Index> nodes;
  std::vector<double> lattice_vector(const GridDomain& domain, Eigen::Index k) const;
};
Spectrum spectrum(const GridDomain& domain, const Potential& v);

struct Options {
  double zero_tol = 1e-8;    // nodal sign threshold, relative to max|phi|
  double gap_tol = 1e-6;     // simple iff both gaps exceed gap_tol * max(|lambda_k|, 1)
  double inertia_tol = linalg::kDefaultZeroTol;
  std::optional<double> epsilon;  // overrides half the gap above lambda_k
};

struct NodalReport {
  int k = 0;
  double lambda_k = 0.0;
  bool simple = false;
  int n_plus = 0;
  int n_minus = 0;
  int n_total = 0;
  int deficiency_direct = 0;
  double epsilon = 0.0;
  std::optional<int> deficiency_dtn;
  std::optional<bool> agreement;
  // Component checks at shift lambda_k + epsilon.
  int mor_dirichlet_plus = 0;
  int mor_dirichlet_minus = 0;
  int mor_global = 0;
  int sigma_size = 0;
  // Mor(A+) = n+, Mor(A-) = n- and Mor(L^G) = k at the shifted operator.
  bool localized = false;
  NodalLabeling labeling;
};

/// Nodal counts for k = 1..k_max; throws Errc::InvariantViolation when a
/// count exceeds k.
std::vector<NodalReport> courant_check(const GridDomain& domain, const Potential& v, int k_max,
                                       const Options& options = {});
std::vector<NodalReport> courant_check(const GridDomain& domain, const Spectrum& s, int k_max,
                                       const Options& options = {});

/// Deficiency through the DtN maps of the nodal partition at lambda_k + eps.
/// `negate` flips the sign of phi_k. Throws Errc::NotSimple,
/// Errc::SignChangeWithoutSeparator, Errc::ASingular.
NodalReport nodal_deficiency_dtn(const GridDomain& domain, const Potential& v, int k,
                                 const Options& options = {}, bool negate = false);
NodalReport nodal_deficiency_dtn(const GridDomain& domain, const Potential& v, const Spectrum& s,
                                 int k, const Options& options = {}, bool negate = false);

/// CSV grid of component ids (rows = lattice rows, top row last).
std::string labeling_csv(const GridDomain& domain, const NodalLabeling& labeling);

}  // namespace morselab::nodal
