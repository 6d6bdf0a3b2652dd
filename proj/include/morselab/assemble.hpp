#pragma once

#include "morselab/grid.hpp"
#include "morselab/linalg.hpp"

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace morselab::assemble {

using grid::GridDomain;
using grid::Index;
using linalg::Matrix;
using linalg::Vector;

/// Vertex potential V. Values are sampled at lattice vertices; identified
/// periodic vertices read their representative.
class Potential {
 public:
  static Potential constant(double value);
  // One value per lattice vertex of the domain it will be used with.
  static Potential table(std::vector<double> per_vertex);
  // Evaluated at vertex positions (x, y); y = 0 in 1D.
  static Potential function(std::function<double(double, double)> f);

  double at(const GridDomain& domain, Index v) const;
  std::vector<double> sample(const GridDomain& domain) const;
  // Minimum over in-domain vertices. When a bound was declared with
  // `with_lower_bound`, it is returned after checking it against the samples.
  double inf(const GridDomain& domain) const;
  Potential with_lower_bound(double bound) const;

 private:
  enum class Kind { Constant, Table, Function };
  Kind kind_ = Kind::Constant;
  double value_ = 0.0;
  std::vector<double> table_;
  std::function<double(double, double)> f_;
  std::optional<double> declared_inf_;
};

enum class Realization { G, D1, N1, D2, N2, DN, Periodic, Robin, Dirichlet, Neumann };
std::string_view to_string(Realization r);

/// Assembled symmetric operator over `nodes` (lattice indices of the rows, in
/// ascending order) at spectral shift `shift`.
struct SymMatrix {
  Matrix values;
  std::vector<Index> nodes;
  Realization tag = Realization::G;
  double shift = 0.0;

  Eigen::Index order() const { return values.rows(); }
};

/// 3x3 block form over (I1, S, I2). The Sigma diagonal is carried as D1 + D2,
/// each holding the contributions from its own side.
struct BlockOperator {
  std::vector<Index> i1, sigma, i2;
  Matrix a1, b1, d1, d2, b2, a2;
  double shift = 0.0;
};

/// Lumped vertex mass over the domain's free representatives, in the order of
/// `domain.free_nodes()`.
Vector lumped_mass(const GridDomain& domain);
/// Boundary measure per lattice vertex: 1 at 1D endpoints, half the length of
/// the adjacent boundary edges in 2D; zero off the geometric boundary.
std::vector<double> boundary_measure(const GridDomain& domain);

/// K + (V - lambda) M over free vertices with Dirichlet vertices eliminated.
SymMatrix assemble_global(const GridDomain& domain, const Potential& v, double lambda);
/// Quotient assembly on a periodic domain.
SymMatrix assemble_periodic(const GridDomain& domain, const Potential& v, double lambda);
/// Every outer-labeled vertex becomes Robin: Neumann closure plus
/// cot(theta) * boundary measure on its diagonal. theta = pi/2 is Neumann.
SymMatrix assemble_robin(const GridDomain& domain, const Potential& v, double theta, double lambda);

BlockOperator assemble_blocks(const GridDomain& domain, const Potential& v,
                              const grid::Partition& partition, double lambda);
/// Single-domain block form: Sigma is the whole outer boundary (relabeled
/// Neumann), I1 the interior, I2 empty and D2 = 0.
BlockOperator assemble_boundary_blocks(const GridDomain& domain, const Potential& v, double lambda);

/// Realizations of a block operator. DN is Neumann on side 1 over I1 u S, with
/// side 2 left to the caller (see README).
SymMatrix realize(const BlockOperator& blocks, Realization which);

}  // namespace morselab::assemble
