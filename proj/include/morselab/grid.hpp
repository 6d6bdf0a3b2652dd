#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace morselab::grid {

using Index = std::ptrdiff_t;
inline constexpr Index kNoVertex = -1;

enum class BoundaryCondition : std::uint8_t { Dirichlet, Neumann, Periodic };

enum class VertexKind : std::uint8_t {
  Outside,          // masked out of the domain
  Interior,
  Dirichlet,
  Neumann,
  PeriodicPending,  // on a face declared periodic that has not been identified yet
};

// Per-side conditions of an interval (left/right) or rectangle.
struct SideConditions {
  BoundaryCondition left = BoundaryCondition::Dirichlet;
  BoundaryCondition right = BoundaryCondition::Dirichlet;
  BoundaryCondition bottom = BoundaryCondition::Dirichlet;
  BoundaryCondition top = BoundaryCondition::Dirichlet;

  static SideConditions all(BoundaryCondition bc) { return {bc, bc, bc, bc}; }
};

/// A 1D or 2D structured lattice restricted to a vertex mask, with per-vertex
/// boundary kinds and an optional periodic identification of opposite faces.
/// Vertices keep their lattice index; identified vertices share a
/// representative, and all assembly happens on representatives.
class GridDomain {
 public:
  int dimension() const { return dim_; }
  int cells(int axis) const { return cells_[static_cast<std::size_t>(axis)]; }
  double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }
  double length(int axis) const { return cells(axis) * spacing(axis); }

  Index lattice_size() const { return static_cast<Index>(kind_.size()); }
  Index lattice_index(int i, int j = 0) const { return static_cast<Index>(j) * (cells_[0] + 1) + i; }
  std::array<int, 2> coords(Index v) const;
  std::array<double, 2> position(Index v) const;

  bool contains(Index v) const { return kind_[static_cast<std::size_t>(v)] != VertexKind::Outside; }
  VertexKind kind(Index v) const { return kind_[static_cast<std::size_t>(v)]; }
  // In the domain and not eliminated by a Dirichlet condition.
  bool is_free(Index v) const;
  // Carries an outer Dirichlet or Neumann label.
  bool on_boundary(Index v) const;
  Index representative(Index v) const { return rep_[static_cast<std::size_t>(v)]; }

  bool periodic(int axis) const { return periodic_[static_cast<std::size_t>(axis)]; }
  bool has_periodic_map() const { return periodic_[0] || periodic_[1]; }
  // Paired faces: gamma2 vertices are identified with gamma1 representatives.
  const std::vector<Index>& gamma1() const { return gamma1_; }
  const std::vector<Index>& gamma2() const { return gamma2_; }

  // Lower-left lattice vertex of every cell whose corners all lie in the domain.
  const std::vector<Index>& cell_origins() const { return cells_list_; }
  // Corners of a cell (2 in 1D, 4 in 2D ordered (0,0),(1,0),(0,1),(1,1)).
  std::vector<Index> cell_corners(Index origin) const;

  // Distinct representatives of in-domain vertices, ascending.
  std::vector<Index> nodes() const;
  std::vector<Index> free_nodes() const;
  // Undirected representative-level grid edges (cell edges), sorted, unique.
  const std::vector<std::pair<Index, Index>>& edges() const { return edges_; }

  const std::optional<SideConditions>& side_conditions() const { return sides_; }
  // Throws Errc::UnpairedFace when a periodic face has not been identified.
  void validate() const;

  friend GridDomain build_interval(int, double, BoundaryCondition, BoundaryCondition);
  friend GridDomain build_rectangle(int, int, double, double, const SideConditions&);
  friend GridDomain build_mask_domain(const std::vector<std::vector<bool>>&, double,
                                      BoundaryCondition);
  friend GridDomain periodic_identification(const GridDomain&, int);
  friend GridDomain unroll(const GridDomain&, BoundaryCondition, BoundaryCondition);
  friend GridDomain relabel_boundary(const GridDomain&, BoundaryCondition);

 private:
  GridDomain() = default;
  void build_cells();
  void classify_boundary(const std::vector<std::uint8_t>& side_bits);
  void rebuild_topology();

  int dim_ = 1;
  std::array<int, 2> cells_{0, 0};
  std::array<double, 2> spacing_{1.0, 1.0};
  std::vector<VertexKind> kind_;
  std::vector<Index> rep_;
  std::array<bool, 2> periodic_{false, false};
  std::optional<SideConditions> sides_;
  std::vector<Index> gamma1_;
  std::vector<Index> gamma2_;
  std::vector<Index> cells_list_;
  std::vector<std::pair<Index, Index>> edges_;
};

/// Interval [0, length] with n_cells >= 2 cells.
GridDomain build_interval(int n_cells, double length, BoundaryCondition left,
                          BoundaryCondition right);
/// Full rectangle [0,lx] x [0,ly]; corners take the stronger label
/// (Dirichlet over Neumann over Periodic). Periodic sides must come in
/// opposite pairs and stay pending until periodic_identification.
GridDomain build_rectangle(int nx, int ny, double lx, double ly, const SideConditions& bc);
/// mask[j][i] is lattice vertex (i, j); uniform spacing h on both axes and a
/// single outer label. The mask must be edge-connected through cells.
GridDomain build_mask_domain(const std::vector<std::vector<bool>>& mask, double h,
                             BoundaryCondition bc);
/// 2n x 2n square with the upper-right n x n block of cells removed.
GridDomain build_l_shape(int n, double h, BoundaryCondition bc);
/// Two (block x block)-cell squares joined by a horizontal corridor two cells
/// tall, so the corridor has a single interior vertex row.
GridDomain build_necked_domain(int block, int neck_length, double h, BoundaryCondition bc);

/// Identify the min and max faces along `axis` by translation.
GridDomain periodic_identification(const GridDomain& domain, int axis);
/// Undo the identification: gamma1 vertices get `gamma1_bc`, gamma2 vertices
/// get `gamma2_bc`, everything else keeps its label.
GridDomain unroll(const GridDomain& domain, BoundaryCondition gamma1_bc,
                  BoundaryCondition gamma2_bc);
/// Same lattice with every labeled boundary vertex relabeled to `bc`.
GridDomain relabel_boundary(const GridDomain& domain, BoundaryCondition bc);

enum class Side : std::uint8_t { None, Omega1, Sigma, Omega2 };

/// Labeling of lattice vertices into Omega1 / Sigma / Omega2. Dirichlet and
/// out-of-domain vertices carry Side::None.
struct Partition {
  std::vector<Side> side;    // per lattice vertex
  std::vector<Index> sigma;  // Sigma representatives, ascending

  Side at(Index v) const { return side[static_cast<std::size_t>(v)]; }
  Partition swapped() const;
};

/// Sigma = free vertices on the grid line coord[axis] == index. Dirichlet
/// endpoints of the line are left out of Sigma; a Neumann endpoint is an error.
Partition partition_by_line(const GridDomain& domain, int axis, int index,
                            bool lower_is_omega1 = true);
/// Sigma = free vertices with |value| <= zero_tol; Omega1 collects positive
/// values and Omega2 negative ones. `values` is indexed by lattice vertex.
Partition partition_by_sign(const GridDomain& domain, std::span<const double> values,
                            double zero_tol);
/// Throws Errc::InvalidPartition unless Sigma separates Omega1 from Omega2
/// and avoids the outer boundary.
void check_partition(const GridDomain& domain, const Partition& partition);
/// Number of grid edges joining a free Omega1 vertex to a free Omega2 vertex.
std::size_t count_cross_edges(const GridDomain& domain, const Partition& partition);

}  // namespace morselab::grid
