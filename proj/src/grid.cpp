#include "morselab/grid.hpp"

#include "morselab/disjoint_sets.hpp"
#include "morselab/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace morselab::grid {

namespace {

enum SideBit : std::uint8_t { kLeft = 1, kRight = 2, kBottom = 4, kTop = 8 };

VertexKind kind_for(BoundaryCondition bc) {
  switch (bc) {
    case BoundaryCondition::Dirichlet: return VertexKind::Dirichlet;
    case BoundaryCondition::Neumann: return VertexKind::Neumann;
    case BoundaryCondition::Periodic: return VertexKind::PeriodicPending;
  }
  return VertexKind::Interior;
}

// Strongest label among the sides a boundary vertex lies on.
VertexKind label_from_sides(std::uint8_t bits, const SideConditions& sides) {
  bool dirichlet = false;
  bool neumann = false;
  auto visit = [&](std::uint8_t bit, BoundaryCondition bc) {
    if ((bits & bit) == 0) return;
    dirichlet |= bc == BoundaryCondition::Dirichlet;
    neumann |= bc == BoundaryCondition::Neumann;
  };
  visit(kLeft, sides.left);
  visit(kRight, sides.right);
  visit(kBottom, sides.bottom);
  visit(kTop, sides.top);
  if (dirichlet) return VertexKind::Dirichlet;
  if (neumann) return VertexKind::Neumann;
  return VertexKind::PeriodicPending;
}

bool side_periodic(const SideConditions& s, int axis, bool max_face) {
  if (axis == 0) return (max_face ? s.right : s.left) == BoundaryCondition::Periodic;
  return (max_face ? s.top : s.bottom) == BoundaryCondition::Periodic;
}

void check_pairing(BoundaryCondition lo, BoundaryCondition hi, const char* axis_name) {
  const bool lo_p = lo == BoundaryCondition::Periodic;
  const bool hi_p = hi == BoundaryCondition::Periodic;
  if (lo_p != hi_p) {
    throw Error(Errc::FaceAlreadyLabeled,
                std::string("periodic face on axis ") + axis_name +
                    " is opposite a labeled face and cannot be paired");
  }
}

}  // namespace

std::array<int, 2> GridDomain::coords(Index v) const {
  const Index row = cells_[0] + 1;
  return {static_cast<int>(v % row), static_cast<int>(v / row)};
}

std::array<double, 2> GridDomain::position(Index v) const {
  const auto c = coords(v);
  return {c[0] * spacing_[0], dim_ == 2 ? c[1] * spacing_[1] : 0.0};
}

bool GridDomain::is_free(Index v) const {
  const VertexKind k = kind(v);
  return k != VertexKind::Outside && k != VertexKind::Dirichlet;
}

bool GridDomain::on_boundary(Index v) const {
  const VertexKind k = kind(v);
  return k == VertexKind::Dirichlet || k == VertexKind::Neumann;
}

std::vector<Index> GridDomain::cell_corners(Index origin) const {
  if (dim_ == 1) return {origin, origin + 1};
  const Index row = cells_[0] + 1;
  return {origin, origin + 1, origin + row, origin + row + 1};
}

std::vector<Index> GridDomain::nodes() const {
  std::vector<Index> out;
  for (Index v = 0; v < lattice_size(); ++v) {
    if (contains(v) && representative(v) == v) out.push_back(v);
  }
  return out;
}

std::vector<Index> GridDomain::free_nodes() const {
  std::vector<Index> out;
  for (Index v = 0; v < lattice_size(); ++v) {
    if (is_free(v) && representative(v) == v) out.push_back(v);
  }
  return out;
}

void GridDomain::validate() const {
  for (Index v = 0; v < lattice_size(); ++v) {
    if (kind(v) == VertexKind::PeriodicPending) {
      throw Error(Errc::UnpairedFace,
                  "vertex " + std::to_string(v) + " lies on a periodic face without a periodic map");
    }
  }
}

void GridDomain::build_cells() {
  cells_list_.clear();
  const int ny = dim_ == 2 ? cells_[1] : 1;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < cells_[0]; ++i) {
      const Index origin = lattice_index(i, j);
      const auto corners = cell_corners(origin);
      if (std::all_of(corners.begin(), corners.end(), [&](Index c) { return contains(c); })) {
        cells_list_.push_back(origin);
      }
    }
  }
  std::vector<char> covered(kind_.size(), 0);
  for (const Index origin : cells_list_) {
    for (const Index c : cell_corners(origin)) covered[static_cast<std::size_t>(c)] = 1;
  }
  for (Index v = 0; v < lattice_size(); ++v) {
    if (contains(v) && !covered[static_cast<std::size_t>(v)]) {
      throw Error(Errc::IsolatedVertex,
                  "vertex " + std::to_string(v) + " belongs to no cell of the domain");
    }
  }
}

// Geometric boundary: a vertex on a lattice edge (2D) or cell (1D) that has
// fewer neighbours than it would in the open lattice.
void GridDomain::classify_boundary(const std::vector<std::uint8_t>& side_bits) {
  std::vector<char> boundary(kind_.size(), 0);
  if (dim_ == 1) {
    std::vector<int> count(kind_.size(), 0);
    for (const Index o : cells_list_) {
      ++count[static_cast<std::size_t>(o)];
      ++count[static_cast<std::size_t>(o + 1)];
    }
    for (Index v = 0; v < lattice_size(); ++v) {
      if (contains(v) && count[static_cast<std::size_t>(v)] < 2) boundary[static_cast<std::size_t>(v)] = 1;
    }
  } else {
    // Edge ids: horizontal edge starting at v -> 2v, vertical -> 2v + 1.
    std::vector<int> count(2 * kind_.size(), 0);
    const Index row = cells_[0] + 1;
    for (const Index o : cells_list_) {
      ++count[static_cast<std::size_t>(2 * o)];
      ++count[static_cast<std::size_t>(2 * (o + row))];
      ++count[static_cast<std::size_t>(2 * o + 1)];
      ++count[static_cast<std::size_t>(2 * (o + 1) + 1)];
    }
    for (Index v = 0; v < lattice_size(); ++v) {
      if (count[static_cast<std::size_t>(2 * v)] == 1) {
        boundary[static_cast<std::size_t>(v)] = 1;
        boundary[static_cast<std::size_t>(v + 1)] = 1;
      }
      if (count[static_cast<std::size_t>(2 * v + 1)] == 1) {
        boundary[static_cast<std::size_t>(v)] = 1;
        boundary[static_cast<std::size_t>(v + row)] = 1;
      }
    }
  }
  for (Index v = 0; v < lattice_size(); ++v) {
    const auto sv = static_cast<std::size_t>(v);
    if (!contains(v)) continue;
    if (!boundary[sv]) {
      kind_[sv] = VertexKind::Interior;
    } else if (sides_) {
      kind_[sv] = label_from_sides(side_bits[sv], *sides_);
    }
    // Mask domains arrive with the uniform label already written.
  }
}

void GridDomain::rebuild_topology() {
  std::vector<std::pair<Index, Index>> edges;
  auto add = [&](Index a, Index b) {
    const Index ra = rep_[static_cast<std::size_t>(a)];
    const Index rb = rep_[static_cast<std::size_t>(b)];
    edges.emplace_back(std::min(ra, rb), std::max(ra, rb));
  };
  for (const Index o : cells_list_) {
    const auto c = cell_corners(o);
    if (dim_ == 1) {
      add(c[0], c[1]);
    } else {
      add(c[0], c[1]);
      add(c[2], c[3]);
      add(c[0], c[2]);
      add(c[1], c[3]);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);

  DisjointSets sets(kind_.size());
  for (const auto& [a, b] : edges_) sets.unite(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  const auto all = nodes();
  if (all.empty()) throw Error(Errc::InvalidArgument, "domain has no vertices");
  const std::size_t root = sets.find(static_cast<std::size_t>(all.front()));
  for (const Index v : all) {
    if (sets.find(static_cast<std::size_t>(v)) != root) {
      throw Error(Errc::Disconnected, "domain vertices are not edge-connected");
    }
  }

  gamma1_.clear();
  gamma2_.clear();
  for (Index v = 0; v < lattice_size(); ++v) {
    if (!is_free(v)) continue;
    const auto c = coords(v);
    bool on_max = false;
    bool on_min = false;
    for (int a = 0; a < dim_; ++a) {
      if (!periodic_[static_cast<std::size_t>(a)]) continue;
      on_max |= c[static_cast<std::size_t>(a)] == cells_[static_cast<std::size_t>(a)];
      on_min |= c[static_cast<std::size_t>(a)] == 0;
    }
    if (on_max) {
      gamma2_.push_back(v);
    } else if (on_min) {
      gamma1_.push_back(v);
    }
  }
}

GridDomain build_interval(int n_cells, double length, BoundaryCondition left,
                          BoundaryCondition right) {
  if (n_cells < 2) throw Error(Errc::InvalidArgument, "interval needs at least 2 cells");
  if (!(length > 0.0)) throw Error(Errc::InvalidArgument, "interval length must be positive");
  check_pairing(left, right, "0");
  GridDomain d;
  d.dim_ = 1;
  d.cells_ = {n_cells, 0};
  d.spacing_ = {length / n_cells, 1.0};
  d.sides_ = SideConditions{left, right, BoundaryCondition::Dirichlet, BoundaryCondition::Dirichlet};
  const std::size_t n = static_cast<std::size_t>(n_cells) + 1;
  d.kind_.assign(n, VertexKind::Interior);
  d.rep_.resize(n);
  for (std::size_t v = 0; v < n; ++v) d.rep_[v] = static_cast<Index>(v);
  std::vector<std::uint8_t> bits(n, 0);
  bits.front() |= kLeft;
  bits.back() |= kRight;
  d.build_cells();
  d.classify_boundary(bits);
  d.rebuild_topology();
  return d;
}

GridDomain build_rectangle(int nx, int ny, double lx, double ly, const SideConditions& bc) {
  if (nx < 2 || ny < 2) throw Error(Errc::InvalidArgument, "rectangle needs at least 2 cells per axis");
  if (!(lx > 0.0) || !(ly > 0.0)) throw Error(Errc::InvalidArgument, "rectangle lengths must be positive");
  check_pairing(bc.left, bc.right, "0");
  check_pairing(bc.bottom, bc.top, "1");
  GridDomain d;
  d.dim_ = 2;
  d.cells_ = {nx, ny};
  d.spacing_ = {lx / nx, ly / ny};
  d.sides_ = bc;
  const std::size_t n = static_cast<std::size_t>(nx + 1) * static_cast<std::size_t>(ny + 1);
  d.kind_.assign(n, VertexKind::Interior);
  d.rep_.resize(n);
  std::vector<std::uint8_t> bits(n, 0);
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const auto v = static_cast<std::size_t>(d.lattice_index(i, j));
      d.rep_[v] = static_cast<Index>(v);
      if (i == 0) bits[v] |= kLeft;
      if (i == nx) bits[v] |= kRight;
      if (j == 0) bits[v] |= kBottom;
      if (j == ny) bits[v] |= kTop;
    }
  }
  d.build_cells();
  d.classify_boundary(bits);
  d.rebuild_topology();
  return d;
}

GridDomain build_mask_domain(const std::vector<std::vector<bool>>& mask, double h,
                             BoundaryCondition bc) {
  if (!(h > 0.0)) throw Error(Errc::InvalidArgument, "mask spacing must be positive");
  if (bc == BoundaryCondition::Periodic) {
    throw Error(Errc::InvalidArgument, "mask domains take a Dirichlet or Neumann outer label");
  }
  if (mask.size() < 3 || mask.front().size() < 3) {
    throw Error(Errc::InvalidArgument, "mask must span at least 2 x 2 cells");
  }
  const std::size_t width = mask.front().size();
  for (const auto& row : mask) {
    if (row.size() != width) throw Error(Errc::InvalidArgument, "mask rows must have equal length");
  }
  GridDomain d;
  d.dim_ = 2;
  d.cells_ = {static_cast<int>(width) - 1, static_cast<int>(mask.size()) - 1};
  d.spacing_ = {h, h};
  const std::size_t n = width * mask.size();
  d.kind_.assign(n, VertexKind::Outside);
  d.rep_.assign(n, kNoVertex);
  for (std::size_t j = 0; j < mask.size(); ++j) {
    for (std::size_t i = 0; i < width; ++i) {
      if (!mask[j][i]) continue;
      const std::size_t v = j * width + i;
      d.kind_[v] = kind_for(bc);
      d.rep_[v] = static_cast<Index>(v);
    }
  }
  d.build_cells();
  d.classify_boundary({});
  d.rebuild_topology();
  return d;
}

GridDomain build_l_shape(int n, double h, BoundaryCondition bc) {
  if (n < 1) throw Error(Errc::InvalidArgument, "L-shape block size must be positive");
  const int size = 2 * n + 1;
  std::vector<std::vector<bool>> mask(static_cast<std::size_t>(size),
                                      std::vector<bool>(static_cast<std::size_t>(size), true));
  for (int j = n + 1; j < size; ++j) {
    for (int i = n + 1; i < size; ++i) mask[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = false;
  }
  return build_mask_domain(mask, h, bc);
}

GridDomain build_necked_domain(int block, int neck_length, double h, BoundaryCondition bc) {
  if (block < 2 || neck_length < 1) throw Error(Errc::InvalidArgument, "necked domain sizes too small");
  const int width = 2 * block + neck_length + 1;
  const int height = block + 1;
  const int mid = block / 2;
  std::vector<std::vector<bool>> mask(static_cast<std::size_t>(height),
                                      std::vector<bool>(static_cast<std::size_t>(width), false));
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      const bool in_left = i <= block;
      const bool in_right = i >= block + neck_length;
      const bool in_neck = j >= mid - 1 && j <= mid + 1;
      mask[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = in_left || in_right || in_neck;
    }
  }
  return build_mask_domain(mask, h, bc);
}

GridDomain periodic_identification(const GridDomain& domain, int axis) {
  if (axis < 0 || axis >= domain.dimension()) throw Error(Errc::InvalidArgument, "axis out of range");
  if (domain.periodic(axis)) throw Error(Errc::InvalidArgument, "axis is already periodic");
  if (!domain.side_conditions() || !side_periodic(*domain.side_conditions(), axis, false) ||
      !side_periodic(*domain.side_conditions(), axis, true)) {
    throw Error(Errc::FaceAlreadyLabeled, "faces along the axis carry Dirichlet/Neumann labels");
  }
  const SideConditions& sides = *domain.side_conditions();
  GridDomain d = domain;
  d.periodic_[static_cast<std::size_t>(axis)] = true;
  const int other = 1 - axis;
  for (Index v = 0; v < d.lattice_size(); ++v) {
    const auto sv = static_cast<std::size_t>(v);
    if (d.kind_[sv] != VertexKind::PeriodicPending) continue;
    const auto c = d.coords(v);
    const int ca = c[static_cast<std::size_t>(axis)];
    if (ca != 0 && ca != d.cells(axis)) continue;
    bool still_pending = false;
    if (d.dim_ == 2 && !d.periodic(other) && side_periodic(sides, other, false)) {
      const int co = c[static_cast<std::size_t>(other)];
      still_pending = co == 0 || co == d.cells(other);
    }
    if (!still_pending) d.kind_[sv] = VertexKind::Interior;
  }
  for (Index v = 0; v < d.lattice_size(); ++v) {
    auto c = d.coords(v);
    for (int a = 0; a < d.dim_; ++a) {
      if (d.periodic(a) && c[static_cast<std::size_t>(a)] == d.cells(a)) c[static_cast<std::size_t>(a)] = 0;
    }
    const Index r = d.lattice_index(c[0], c[1]);
    if (d.kind(v) != d.kind(r)) {
      throw Error(Errc::InvariantViolation, "paired face vertices carry different labels");
    }
    d.rep_[static_cast<std::size_t>(v)] = r;
  }
  d.rebuild_topology();
  return d;
}

GridDomain unroll(const GridDomain& domain, BoundaryCondition gamma1_bc,
                  BoundaryCondition gamma2_bc) {
  if (!domain.has_periodic_map()) throw Error(Errc::PeriodicMapMissing, "nothing to unroll");
  if (gamma1_bc == BoundaryCondition::Periodic || gamma2_bc == BoundaryCondition::Periodic) {
    throw Error(Errc::InvalidArgument, "unrolled faces need Dirichlet or Neumann labels");
  }
  GridDomain d = domain;
  for (const Index v : domain.gamma1()) d.kind_[static_cast<std::size_t>(v)] = kind_for(gamma1_bc);
  for (const Index v : domain.gamma2()) d.kind_[static_cast<std::size_t>(v)] = kind_for(gamma2_bc);
  d.periodic_ = {false, false};
  d.sides_.reset();
  for (Index v = 0; v < d.lattice_size(); ++v) {
    d.rep_[static_cast<std::size_t>(v)] = d.contains(v) ? v : kNoVertex;
  }
  d.rebuild_topology();
  return d;
}

GridDomain relabel_boundary(const GridDomain& domain, BoundaryCondition bc) {
  if (bc == BoundaryCondition::Periodic) throw Error(Errc::InvalidArgument, "cannot relabel to periodic");
  GridDomain d = domain;
  for (auto& k : d.kind_) {
    if (k == VertexKind::Dirichlet || k == VertexKind::Neumann) k = kind_for(bc);
  }
  d.sides_.reset();
  d.rebuild_topology();
  return d;
}

Partition Partition::swapped() const {
  Partition p = *this;
  for (auto& s : p.side) {
    if (s == Side::Omega1) {
      s = Side::Omega2;
    } else if (s == Side::Omega2) {
      s = Side::Omega1;
    }
  }
  return p;
}

std::size_t count_cross_edges(const GridDomain& domain, const Partition& partition) {
  std::size_t count = 0;
  for (const auto& [a, b] : domain.edges()) {
    if (!domain.is_free(a) || !domain.is_free(b)) continue;
    const Side sa = partition.at(a);
    const Side sb = partition.at(b);
    if ((sa == Side::Omega1 && sb == Side::Omega2) || (sa == Side::Omega2 && sb == Side::Omega1)) ++count;
  }
  return count;
}

void check_partition(const GridDomain& domain, const Partition& partition) {
  if (static_cast<Index>(partition.side.size()) != domain.lattice_size()) {
    throw Error(Errc::InvalidPartition, "partition size does not match the lattice");
  }
  for (const Index v : domain.nodes()) {
    const Side s = partition.at(v);
    if (domain.is_free(v) && s == Side::None) {
      throw Error(Errc::InvalidPartition, "free vertex " + std::to_string(v) + " has no side");
    }
    if (s == Side::Sigma && domain.on_boundary(v)) {
      throw Error(Errc::InvalidPartition, "Sigma vertex " + std::to_string(v) + " lies on the outer boundary");
    }
  }
  if (count_cross_edges(domain, partition) != 0) {
    throw Error(Errc::InvalidPartition, "an edge joins Omega1 directly to Omega2");
  }
}

namespace {

Partition empty_partition(const GridDomain& domain) {
  Partition p;
  p.side.assign(static_cast<std::size_t>(domain.lattice_size()), Side::None);
  return p;
}

// Non-representative vertices mirror their representative's side.
void propagate_representatives(const GridDomain& domain, Partition& p) {
  for (Index v = 0; v < domain.lattice_size(); ++v) {
    if (!domain.contains(v)) continue;
    p.side[static_cast<std::size_t>(v)] = p.at(domain.representative(v));
  }
}

}  // namespace

Partition partition_by_line(const GridDomain& domain, int axis, int index, bool lower_is_omega1) {
  domain.validate();
  if (domain.has_periodic_map()) {
    throw Error(Errc::PeriodicMapPresent, "line partitions are defined on non-periodic domains");
  }
  if (axis < 0 || axis >= domain.dimension()) throw Error(Errc::InvalidArgument, "axis out of range");
  if (index <= 0 || index >= domain.cells(axis)) {
    throw Error(Errc::LineOutsideDomain, "split line must lie strictly inside the lattice");
  }
  const Side lower = lower_is_omega1 ? Side::Omega1 : Side::Omega2;
  const Side upper = lower_is_omega1 ? Side::Omega2 : Side::Omega1;
  Partition p = empty_partition(domain);
  for (const Index v : domain.free_nodes()) {
    const int c = domain.coords(v)[static_cast<std::size_t>(axis)];
    Side s = c < index ? lower : upper;
    if (c == index) {
      if (domain.kind(v) == VertexKind::Neumann) {
        throw Error(Errc::SigmaTouchesBoundary,
                    "split line meets a Neumann boundary vertex at " + std::to_string(v));
      }
      s = Side::Sigma;
      p.sigma.push_back(v);
    }
    p.side[static_cast<std::size_t>(v)] = s;
  }
  if (p.sigma.empty()) throw Error(Errc::EmptyInterface, "split line contains no free vertex");
  check_partition(domain, p);
  return p;
}

Partition partition_by_sign(const GridDomain& domain, std::span<const double> values, double zero_tol) {
  domain.validate();
  if (static_cast<Index>(values.size()) != domain.lattice_size()) {
    throw Error(Errc::InvalidArgument, "one value per lattice vertex expected");
  }
  Partition p = empty_partition(domain);
  for (const Index v : domain.free_nodes()) {
    const double x = values[static_cast<std::size_t>(v)];
    Side s = Side::Sigma;
    if (x > zero_tol) {
      s = Side::Omega1;
    } else if (x < -zero_tol) {
      s = Side::Omega2;
    } else {
      if (domain.kind(v) == VertexKind::Neumann) {
        throw Error(Errc::SigmaTouchesBoundary,
                    "zero set meets the Neumann boundary at " + std::to_string(v));
      }
      p.sigma.push_back(v);
    }
    p.side[static_cast<std::size_t>(v)] = s;
  }
  propagate_representatives(domain, p);
  if (count_cross_edges(domain, p) != 0) {
    throw Error(Errc::SignChangeWithoutSeparator,
                "values change sign across a grid edge; the zero set is not grid-aligned");
  }
  check_partition(domain, p);
  return p;
}

}  // namespace morselab::grid
