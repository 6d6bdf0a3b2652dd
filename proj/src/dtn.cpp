#include "morselab/dtn.hpp"

#include "morselab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace morselab::dtn {

std::string_view to_string(DtnSide side) {
  switch (side) {
    case DtnSide::One: return "1";
    case DtnSide::Two: return "2";
    case DtnSide::Sum: return "sum";
    case DtnSide::Periodic: return "periodic";
    case DtnSide::Partial: return "partial";
  }
  return "?";
}

DtnMap dtn_side(const BlockOperator& blocks, int side, double zero_tol) {
  if (side != 1 && side != 2) throw Error(Errc::InvalidArgument, "side must be 1 or 2");
  DtnMap out;
  out.side = side == 1 ? DtnSide::One : DtnSide::Two;
  out.shift = blocks.shift;
  out.interface = blocks.sigma;
  out.matrix = side == 1 ? linalg::schur_complement(blocks.a1, blocks.b1, blocks.d1, zero_tol)
                         : linalg::schur_complement(blocks.a2, blocks.b2, blocks.d2, zero_tol);
  return out;
}

DtnMap dtn_sum(const BlockOperator& blocks, double zero_tol) {
  const DtnMap l1 = dtn_side(blocks, 1, zero_tol);
  const DtnMap l2 = dtn_side(blocks, 2, zero_tol);
  DtnMap out;
  out.side = DtnSide::Sum;
  out.shift = blocks.shift;
  out.interface = blocks.sigma;
  out.matrix = l1.matrix + l2.matrix;

  // Independent route: eliminate every non-Sigma row of the global realization.
  const assemble::SymMatrix g = assemble::realize(blocks, assemble::Realization::G);
  std::vector<Eigen::Index> inner, on;
  std::size_t next = 0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (next < blocks.sigma.size() && g.nodes[i] == blocks.sigma[next]) {
      on.push_back(static_cast<Eigen::Index>(i));
      ++next;
    } else {
      inner.push_back(static_cast<Eigen::Index>(i));
    }
  }
  const Matrix global_schur = linalg::schur_complement(g.values(inner, inner), g.values(inner, on),
                                                       g.values(on, on), zero_tol);
  if (out.matrix.size() > 0) {
    const double scale = std::max(linalg::max_abs(global_schur), 1.0);
    out.global_residual = linalg::max_abs(out.matrix - global_schur) / scale;
    if (!(out.global_residual <= kSumAgreementTol)) {
      throw Error(Errc::InvariantViolation,
                  "sum of side DtN maps differs from the global Schur complement by " +
                      std::to_string(out.global_residual));
    }
  }
  return out;
}

Matrix ntd_map(const DtnMap& dtn, double zero_tol) {
  linalg::SymmetricIndefiniteFactorization f(dtn.matrix, zero_tol);
  if (f.singular()) throw Error(Errc::Singular, "DtN map has a kernel; no Neumann-to-Dirichlet inverse");
  const Matrix inv = f.solve(Matrix::Identity(dtn.size(), dtn.size()));
  return 0.5 * (inv + inv.transpose());
}

PeriodicBlocks periodic_blocks(const GridDomain& domain, const Potential& v, double lambda) {
  const assemble::SymMatrix p = assemble::assemble_periodic(domain, v, lambda);
  std::vector<char> in_gamma1(static_cast<std::size_t>(domain.lattice_size()), 0);
  for (const Index g : domain.gamma1()) in_gamma1[static_cast<std::size_t>(g)] = 1;
  std::vector<Eigen::Index> inner, on;
  PeriodicBlocks out;
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    if (in_gamma1[static_cast<std::size_t>(p.nodes[i])]) {
      on.push_back(static_cast<Eigen::Index>(i));
      out.boundary.push_back(p.nodes[i]);
    } else {
      inner.push_back(static_cast<Eigen::Index>(i));
      out.interior.push_back(p.nodes[i]);
    }
  }
  if (on.empty()) throw Error(Errc::EmptyInterface, "no free vertex on the identified faces");
  out.a = p.values(inner, inner);
  out.b = p.values(inner, on);
  out.d = p.values(on, on);
  return out;
}

DtnMap dtn_periodic(const GridDomain& domain, const Potential& v, double lambda, double zero_tol) {
  const PeriodicBlocks pb = periodic_blocks(domain, v, lambda);
  DtnMap out;
  out.side = DtnSide::Periodic;
  out.shift = lambda;
  out.interface = pb.boundary;
  out.matrix = linalg::schur_complement(pb.a, pb.b, pb.d, zero_tol);
  return out;
}

DtnMap dtn_partial(const GridDomain& domain, const Potential& v, double lambda, double zero_tol) {
  if (!domain.has_periodic_map()) throw Error(Errc::PeriodicMapMissing, "Gamma1/Gamma2 come from the identification");
  if (domain.gamma1().empty()) throw Error(Errc::EmptyInterface, "Gamma1 has no free vertex");
  const GridDomain mixed =
      grid::unroll(domain, grid::BoundaryCondition::Neumann, grid::BoundaryCondition::Dirichlet);
  const assemble::SymMatrix m = assemble::assemble_global(mixed, v, lambda);
  std::vector<char> in_gamma1(static_cast<std::size_t>(domain.lattice_size()), 0);
  for (const Index g : domain.gamma1()) in_gamma1[static_cast<std::size_t>(g)] = 1;
  std::vector<Eigen::Index> inner, on;
  DtnMap out;
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    if (in_gamma1[static_cast<std::size_t>(m.nodes[i])]) {
      on.push_back(static_cast<Eigen::Index>(i));
      out.interface.push_back(m.nodes[i]);
    } else {
      inner.push_back(static_cast<Eigen::Index>(i));
    }
  }
  out.side = DtnSide::Partial;
  out.shift = lambda;
  out.matrix = linalg::schur_complement(m.values(inner, inner), m.values(inner, on), m.values(on, on), zero_tol);
  return out;
}

std::vector<double> default_c_grid() {
  std::vector<double> c;
  constexpr int kPoints = 64;
  for (int i = 0; i < kPoints; ++i) c.push_back(std::pow(10.0, -3.0 + 6.0 * i / (kPoints - 1)));
  c.push_back(1.0);
  std::sort(c.begin(), c.end());
  return c;
}

Certificate perturb_certificate(const DtnMap& lambda1, const DtnMap& lambda2,
                                std::span<const double> c_grid, double zero_tol) {
  if (lambda1.size() != lambda2.size()) throw Error(Errc::InvalidArgument, "DtN maps live on different interfaces");
  if (c_grid.empty()) throw Error(Errc::InvalidArgument, "empty c grid");
  linalg::SymmetricIndefiniteFactorization f(lambda1.matrix, zero_tol);
  if (f.singular()) throw Error(Errc::Singular, "Lambda_1 is singular");
  const Matrix x = f.solve(lambda2.matrix);
  const Matrix id = Matrix::Identity(x.rows(), x.cols());
  Certificate out;
  out.best_margin = std::numeric_limits<double>::infinity();
  for (const double c : c_grid) {
    const double margin = linalg::spectral_norm(x - c * id) - (1.0 + c);
    if (margin < out.best_margin) {
      out.best_margin = margin;
      out.best_c = c;
    }
  }
  out.holds = out.best_margin < 0.0;
  return out;
}

}  // namespace morselab::dtn
