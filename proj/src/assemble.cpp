#include "morselab/assemble.hpp"

#include "morselab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace morselab::assemble {

using grid::Side;
using grid::VertexKind;

Potential Potential::constant(double value) {
  Potential p;
  p.kind_ = Kind::Constant;
  p.value_ = value;
  return p;
}

Potential Potential::table(std::vector<double> per_vertex) {
  Potential p;
  p.kind_ = Kind::Table;
  p.table_ = std::move(per_vertex);
  return p;
}

Potential Potential::function(std::function<double(double, double)> f) {
  if (!f) throw Error(Errc::InvalidArgument, "potential function is empty");
  Potential p;
  p.kind_ = Kind::Function;
  p.f_ = std::move(f);
  return p;
}

Potential Potential::with_lower_bound(double bound) const {
  Potential p = *this;
  p.declared_inf_ = bound;
  return p;
}

double Potential::at(const GridDomain& domain, Index v) const {
  const Index r = domain.representative(v) == grid::kNoVertex ? v : domain.representative(v);
  switch (kind_) {
    case Kind::Constant:
      return value_;
    case Kind::Table:
      if (static_cast<Index>(table_.size()) != domain.lattice_size()) {
        throw Error(Errc::InvalidArgument, "potential table has " + std::to_string(table_.size()) +
                                               " values for a lattice of " +
                                               std::to_string(domain.lattice_size()));
      }
      return table_[static_cast<std::size_t>(r)];
    case Kind::Function: {
      const auto p = domain.position(r);
      return f_(p[0], p[1]);
    }
  }
  return 0.0;
}

std::vector<double> Potential::sample(const GridDomain& domain) const {
  std::vector<double> out(static_cast<std::size_t>(domain.lattice_size()), 0.0);
  for (Index v = 0; v < domain.lattice_size(); ++v) {
    if (domain.contains(v)) out[static_cast<std::size_t>(v)] = at(domain, v);
  }
  return out;
}

double Potential::inf(const GridDomain& domain) const {
  double lo = std::numeric_limits<double>::infinity();
  for (const Index v : domain.nodes()) lo = std::min(lo, at(domain, v));
  if (declared_inf_) {
    if (*declared_inf_ > lo) {
      throw Error(Errc::InvalidArgument, "declared lower bound exceeds a sampled potential value");
    }
    return *declared_inf_;
  }
  return lo;
}

std::string_view to_string(Realization r) {
  switch (r) {
    case Realization::G: return "G";
    case Realization::D1: return "D1";
    case Realization::N1: return "N1";
    case Realization::D2: return "D2";
    case Realization::N2: return "N2";
    case Realization::DN: return "DN";
    case Realization::Periodic: return "P";
    case Realization::Robin: return "R";
    case Realization::Dirichlet: return "D";
    case Realization::Neumann: return "N";
  }
  return "?";
}

namespace {

// Visits every cell contribution at representative level: stiffness edges
// (a, b, weight) and lumped corner masses (v, mass).
template <class EdgeFn, class MassFn>
void for_each_contribution(const GridDomain& d, EdgeFn&& edge, MassFn&& mass) {
  if (d.dimension() == 1) {
    const double h = d.spacing(0);
    for (const Index o : d.cell_origins()) {
      const Index a = d.representative(o);
      const Index b = d.representative(o + 1);
      edge(a, b, 1.0 / h);
      mass(a, 0.5 * h);
      mass(b, 0.5 * h);
    }
    return;
  }
  const double hx = d.spacing(0);
  const double hy = d.spacing(1);
  const double wx = 0.5 * hy / hx;
  const double wy = 0.5 * hx / hy;
  const double m = 0.25 * hx * hy;
  for (const Index o : d.cell_origins()) {
    const auto c = d.cell_corners(o);
    Index r[4];
    for (int k = 0; k < 4; ++k) r[k] = d.representative(c[static_cast<std::size_t>(k)]);
    edge(r[0], r[1], wx);
    edge(r[2], r[3], wx);
    edge(r[0], r[2], wy);
    edge(r[1], r[3], wy);
    for (int k = 0; k < 4; ++k) mass(r[k], m);
  }
}

std::vector<Index> row_map(const GridDomain& d, const std::vector<Index>& nodes) {
  std::vector<Index> map(static_cast<std::size_t>(d.lattice_size()), -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) map[static_cast<std::size_t>(nodes[i])] = static_cast<Index>(i);
  return map;
}

SymMatrix assemble_free(const GridDomain& d, const Potential& v, double lambda, Realization tag) {
  d.validate();
  SymMatrix out;
  out.nodes = d.free_nodes();
  out.tag = tag;
  out.shift = lambda;
  const auto row = row_map(d, out.nodes);
  const auto n = static_cast<Eigen::Index>(out.nodes.size());
  out.values = Matrix::Zero(n, n);
  Matrix& m = out.values;
  for_each_contribution(
      d,
      [&](Index a, Index b, double w) {
        const Index ra = row[static_cast<std::size_t>(a)];
        const Index rb = row[static_cast<std::size_t>(b)];
        if (ra >= 0) m(ra, ra) += w;
        if (rb >= 0) m(rb, rb) += w;
        if (ra >= 0 && rb >= 0) {
          m(ra, rb) -= w;
          m(rb, ra) -= w;
        }
      },
      [&](Index a, double mass) {
        const Index ra = row[static_cast<std::size_t>(a)];
        if (ra >= 0) m(ra, ra) += (v.at(d, a) - lambda) * mass;
      });
  return out;
}

}  // namespace

Vector lumped_mass(const GridDomain& domain) {
  const auto nodes = domain.free_nodes();
  const auto row = row_map(domain, nodes);
  Vector mass = Vector::Zero(static_cast<Eigen::Index>(nodes.size()));
  for_each_contribution(
      domain, [](Index, Index, double) {},
      [&](Index a, double m) {
        const Index ra = row[static_cast<std::size_t>(a)];
        if (ra >= 0) mass(ra) += m;
      });
  return mass;
}

std::vector<double> boundary_measure(const GridDomain& d) {
  std::vector<double> out(static_cast<std::size_t>(d.lattice_size()), 0.0);
  if (d.dimension() == 1) {
    std::vector<int> count(out.size(), 0);
    for (const Index o : d.cell_origins()) {
      ++count[static_cast<std::size_t>(o)];
      ++count[static_cast<std::size_t>(o + 1)];
    }
    for (std::size_t v = 0; v < out.size(); ++v) {
      if (count[v] == 1) out[v] = 1.0;
    }
    return out;
  }
  const Index row = d.cells(0) + 1;
  std::vector<int> horizontal(out.size(), 0);
  std::vector<int> vertical(out.size(), 0);
  for (const Index o : d.cell_origins()) {
    ++horizontal[static_cast<std::size_t>(o)];
    ++horizontal[static_cast<std::size_t>(o + row)];
    ++vertical[static_cast<std::size_t>(o)];
    ++vertical[static_cast<std::size_t>(o + 1)];
  }
  for (Index v = 0; v < d.lattice_size(); ++v) {
    const auto sv = static_cast<std::size_t>(v);
    if (horizontal[sv] == 1) {
      out[sv] += 0.5 * d.spacing(0);
      out[sv + 1] += 0.5 * d.spacing(0);
    }
    if (vertical[sv] == 1) {
      out[sv] += 0.5 * d.spacing(1);
      out[static_cast<std::size_t>(v + row)] += 0.5 * d.spacing(1);
    }
  }
  return out;
}

SymMatrix assemble_global(const GridDomain& domain, const Potential& v, double lambda) {
  if (domain.has_periodic_map()) {
    throw Error(Errc::PeriodicMapPresent, "use assemble_periodic for identified domains");
  }
  return assemble_free(domain, v, lambda, Realization::G);
}

SymMatrix assemble_periodic(const GridDomain& domain, const Potential& v, double lambda) {
  if (!domain.has_periodic_map()) throw Error(Errc::PeriodicMapMissing, "domain has no identified faces");
  return assemble_free(domain, v, lambda, Realization::Periodic);
}

SymMatrix assemble_robin(const GridDomain& domain, const Potential& v, double theta, double lambda) {
  if (!(theta > 0.0) || theta > 0.5 * std::numbers::pi) {
    throw Error(Errc::InvalidArgument, "Robin angle must lie in (0, pi/2]");
  }
  if (domain.has_periodic_map()) throw Error(Errc::PeriodicMapPresent, "Robin realization needs an outer boundary");
  const GridDomain neumann = grid::relabel_boundary(domain, grid::BoundaryCondition::Neumann);
  SymMatrix out = assemble_free(neumann, v, lambda, Realization::Robin);
  // tan(pi/2 - theta) is exactly 0 at theta = pi/2.
  const double cot = std::tan(0.5 * std::numbers::pi - theta);
  const auto measure = boundary_measure(neumann);
  for (std::size_t i = 0; i < out.nodes.size(); ++i) {
    const Index node = out.nodes[i];
    if (neumann.on_boundary(node)) {
      const auto r = static_cast<Eigen::Index>(i);
      out.values(r, r) += cot * measure[static_cast<std::size_t>(node)];
    }
  }
  return out;
}

BlockOperator assemble_blocks(const GridDomain& domain, const Potential& v,
                              const grid::Partition& partition, double lambda) {
  if (domain.has_periodic_map()) {
    throw Error(Errc::PeriodicMapPresent, "block assembly works on non-identified domains");
  }
  grid::check_partition(domain, partition);
  BlockOperator b;
  b.shift = lambda;
  for (const Index node : domain.free_nodes()) {
    switch (partition.at(node)) {
      case Side::Omega1: b.i1.push_back(node); break;
      case Side::Sigma: b.sigma.push_back(node); break;
      case Side::Omega2: b.i2.push_back(node); break;
      case Side::None:
        throw Error(Errc::InvalidPartition, "free vertex without a side");
    }
  }
  const auto r1 = row_map(domain, b.i1);
  const auto rs = row_map(domain, b.sigma);
  const auto r2 = row_map(domain, b.i2);
  const auto n1 = static_cast<Eigen::Index>(b.i1.size());
  const auto ns = static_cast<Eigen::Index>(b.sigma.size());
  const auto n2 = static_cast<Eigen::Index>(b.i2.size());
  b.a1 = Matrix::Zero(n1, n1);
  b.b1 = Matrix::Zero(n1, ns);
  b.d1 = Matrix::Zero(ns, ns);
  b.d2 = Matrix::Zero(ns, ns);
  b.b2 = Matrix::Zero(n2, ns);
  b.a2 = Matrix::Zero(n2, n2);

  auto side_of = [&](Index x) { return domain.is_free(x) ? partition.at(x) : Side::None; };
  auto local = [&](Side s, Index x) {
    const auto sx = static_cast<std::size_t>(x);
    return s == Side::Omega1 ? r1[sx] : s == Side::Sigma ? rs[sx] : r2[sx];
  };
  // Diagonal contribution to x from an edge whose other end lies on `other`.
  auto add_diag = [&](Side s, Index x, Side other, double w) {
    const Index i = local(s, x);
    if (s == Side::Omega1) {
      b.a1(i, i) += w;
    } else if (s == Side::Omega2) {
      b.a2(i, i) += w;
    } else if (other == Side::Omega1) {
      b.d1(i, i) += w;
    } else if (other == Side::Omega2) {
      b.d2(i, i) += w;
    } else {
      b.d1(i, i) += 0.5 * w;
      b.d2(i, i) += 0.5 * w;
    }
  };

  for_each_contribution(
      domain,
      [&](Index x, Index y, double w) {
        Side sx = side_of(x);
        Side sy = side_of(y);
        if (sx != Side::None) add_diag(sx, x, sy, w);
        if (sy != Side::None) add_diag(sy, y, sx, w);
        if (sx == Side::None || sy == Side::None) return;
        if (sx > sy) {
          std::swap(sx, sy);
          std::swap(x, y);
        }
        const Index i = local(sx, x);
        const Index j = local(sy, y);
        if (sx == Side::Omega1 && sy == Side::Omega1) {
          b.a1(i, j) -= w;
          b.a1(j, i) -= w;
        } else if (sx == Side::Omega1 && sy == Side::Sigma) {
          b.b1(i, j) -= w;
        } else if (sx == Side::Sigma && sy == Side::Sigma) {
          b.d1(i, j) -= 0.5 * w;
          b.d1(j, i) -= 0.5 * w;
          b.d2(i, j) -= 0.5 * w;
          b.d2(j, i) -= 0.5 * w;
        } else if (sx == Side::Sigma && sy == Side::Omega2) {
          b.b2(j, i) -= w;
        } else if (sx == Side::Omega2 && sy == Side::Omega2) {
          b.a2(i, j) -= w;
          b.a2(j, i) -= w;
        } else {
          throw Error(Errc::InvalidPartition, "edge joins Omega1 to Omega2");
        }
      },
      [&](Index x, double mass) {
        const Side s = side_of(x);
        if (s == Side::None) return;
        const double c = (v.at(domain, x) - lambda) * mass;
        const Index i = local(s, x);
        if (s == Side::Omega1) {
          b.a1(i, i) += c;
        } else if (s == Side::Omega2) {
          b.a2(i, i) += c;
        } else {
          b.d1(i, i) += 0.5 * c;
          b.d2(i, i) += 0.5 * c;
        }
      });
  return b;
}

BlockOperator assemble_boundary_blocks(const GridDomain& domain, const Potential& v, double lambda) {
  if (domain.has_periodic_map()) throw Error(Errc::PeriodicMapPresent, "single-domain blocks need an outer boundary");
  const GridDomain neumann = grid::relabel_boundary(domain, grid::BoundaryCondition::Neumann);
  const SymMatrix full = assemble_free(neumann, v, lambda, Realization::Neumann);
  std::vector<Eigen::Index> in, on;
  BlockOperator b;
  b.shift = lambda;
  for (std::size_t i = 0; i < full.nodes.size(); ++i) {
    if (neumann.on_boundary(full.nodes[i])) {
      on.push_back(static_cast<Eigen::Index>(i));
      b.sigma.push_back(full.nodes[i]);
    } else {
      in.push_back(static_cast<Eigen::Index>(i));
      b.i1.push_back(full.nodes[i]);
    }
  }
  if (on.empty()) throw Error(Errc::EmptyInterface, "domain has no boundary vertices");
  b.a1 = full.values(in, in);
  b.b1 = full.values(in, on);
  b.d1 = full.values(on, on);
  b.d2 = Matrix::Zero(b.d1.rows(), b.d1.cols());
  b.b2 = Matrix::Zero(0, b.d1.cols());
  b.a2 = Matrix::Zero(0, 0);
  return b;
}

SymMatrix realize(const BlockOperator& b, Realization which) {
  bool use1 = false, use2 = false, useS = false;
  switch (which) {
    case Realization::G: use1 = useS = use2 = true; break;
    case Realization::D1: use1 = true; break;
    case Realization::N1:
    case Realization::DN: use1 = useS = true; break;
    case Realization::D2: use2 = true; break;
    case Realization::N2: use2 = useS = true; break;
    default: throw Error(Errc::InvalidArgument, "realization is not available from blocks");
  }
  const bool side1 = which != Realization::N2;
  const bool side2 = which != Realization::N1 && which != Realization::DN;

  // Merge the selected index sets by lattice index so rows follow the grid.
  // block: 0 = I1, 1 = Sigma, 2 = I2.
  struct Row {
    Index node;
    int block;
    Eigen::Index local;
  };
  std::vector<Row> rows;
  auto push = [&](const std::vector<Index>& set, int block) {
    for (std::size_t i = 0; i < set.size(); ++i) rows.push_back({set[i], block, static_cast<Eigen::Index>(i)});
  };
  if (use1) push(b.i1, 0);
  if (useS) push(b.sigma, 1);
  if (use2) push(b.i2, 2);
  std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) { return x.node < y.node; });

  const auto n = static_cast<Eigen::Index>(rows.size());
  SymMatrix out;
  out.tag = which;
  out.shift = b.shift;
  out.values = Matrix::Zero(n, n);
  for (const Row& r : rows) out.nodes.push_back(r.node);

  auto entry = [&](const Row& r, const Row& c) -> double {
    if (r.block == 0 && c.block == 0) return b.a1(r.local, c.local);
    if (r.block == 2 && c.block == 2) return b.a2(r.local, c.local);
    if (r.block == 1 && c.block == 1) {
      if (side1 && side2) return b.d1(r.local, c.local) + b.d2(r.local, c.local);
      return side1 ? b.d1(r.local, c.local) : b.d2(r.local, c.local);
    }
    if (r.block == 0 && c.block == 1) return b.b1(r.local, c.local);
    if (r.block == 1 && c.block == 0) return b.b1(c.local, r.local);
    if (r.block == 2 && c.block == 1) return b.b2(r.local, c.local);
    if (r.block == 1 && c.block == 2) return b.b2(c.local, r.local);
    return 0.0;
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out.values(i, j) = entry(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

}  // namespace morselab::assemble
