#include "morselab/maslov.hpp"

#include "morselab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace morselab::maslov {

namespace {

struct Sample {
  double t = 0.0;
  Vector values;
  Matrix vectors;
};

class Pencil {
 public:
  Pencil(const Matrix& l1, const Matrix& l2) : l1_(l1), l2_(l2) {
    scale_ = std::max({linalg::max_abs(l1), linalg::max_abs(l2), std::numeric_limits<double>::min()});
  }

  Matrix at(double t) const { return l1_ + (t * t) * l2_; }

  Sample sample(double t) const {
    const auto e = linalg::eigs(at(t), true);
    return {t, e.values, e.vectors};
  }

  double branch(double t, Eigen::Index k) const { return linalg::eigs(at(t), false).values(k); }

  // d/dt of a simple eigenvalue branch with unit eigenvector v.
  double slope(double t, const Vector& v) const { return 2.0 * t * v.dot(l2_ * v); }

  const Matrix& l2() const { return l2_; }
  double scale() const { return scale_; }

 private:
  const Matrix& l1_;
  const Matrix& l2_;
  double scale_;
};

struct Bracket {
  Eigen::Index branch;
  double lo, hi;
  bool downward;
};

// Could branch k touch zero between two samples with the same sign? Tangent
// lines from both ends must point toward zero and meet on the far side.
bool may_dip(const Pencil& p, const Sample& a, const Sample& b, Eigen::Index k) {
  const double va = a.values(k);
  const double vb = b.values(k);
  const double da = p.slope(a.t, a.vectors.col(k));
  const double db = p.slope(b.t, b.vectors.col(k));
  const double sign = va > 0 ? 1.0 : -1.0;
  if (!(sign * da < 0 && sign * db > 0)) return false;
  const double t_meet = (vb - va + da * a.t - db * b.t) / (da - db);
  const double v_meet = va + da * (t_meet - a.t);
  return sign * v_meet <= 0.0;
}

void scan(const Pencil& p, const Sample& a, const Sample& b, int depth, int max_depth,
          std::vector<Bracket>& out) {
  const Eigen::Index m = a.values.size();
  bool refine = false;
  for (Eigen::Index k = 0; k < m && depth < max_depth; ++k) {
    const bool same_sign = (a.values(k) <= 0.0) == (b.values(k) <= 0.0);
    if (same_sign && may_dip(p, a, b, k)) refine = true;
  }
  if (refine) {
    const Sample mid = p.sample(0.5 * (a.t + b.t));
    scan(p, a, mid, depth + 1, max_depth, out);
    scan(p, mid, b, depth + 1, max_depth, out);
    return;
  }
  for (Eigen::Index k = 0; k < m; ++k) {
    const bool neg_a = a.values(k) <= 0.0;
    const bool neg_b = b.values(k) <= 0.0;
    if (neg_a != neg_b) out.push_back({k, a.t, b.t, neg_b});
  }
}

double bisect(const Pencil& p, const Bracket& br, double tol) {
  double lo = br.lo;
  double hi = br.hi;
  const bool neg_lo = !br.downward;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const bool neg_mid = p.branch(mid, br.branch) <= 0.0;
    if (neg_mid == neg_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

int count_in(const Vector& values, double lo, double hi) {
  int n = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) >= lo && values(i) <= hi) ++n;
  }
  return n;
}

}  // namespace

Kernel crossing_kernel(const BlockOperator& blocks, double t, double zero_tol) {
  if (t < 0.0 || t > 1.0) throw Error(Errc::InvalidArgument, "crossing parameter must lie in [0, 1]");
  const dtn::DtnMap l1 = dtn::dtn_side(blocks, 1, zero_tol);
  Kernel out;
  Matrix m = l1.matrix;
  // Scale from the summands: at a crossing the sum itself may be tiny.
  double scale = linalg::max_abs(l1.matrix);
  if (t > 0.0) {
    const dtn::DtnMap l2 = dtn::dtn_side(blocks, 2, zero_tol);
    m += (t * t) * l2.matrix;
    scale = std::max(scale, t * t * linalg::max_abs(l2.matrix));
  }
  const auto e = linalg::eigs(m, true);
  const double thr = zero_tol * scale;
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    if (std::abs(e.values(i)) <= thr) cols.push_back(i);
  }
  out.dim = static_cast<int>(cols.size());
  out.basis = e.vectors(Eigen::all, cols);
  if (t == 0.0 && blocks.a2.rows() > 0) out.dim += linalg::eig_inertia(blocks.a2, zero_tol).zero;
  return out;
}

MaslovResult maslov_beta(const BlockOperator& blocks, const Options& options, BranchTrace* trace) {
  const dtn::DtnMap l1 = dtn::dtn_side(blocks, 1, options.zero_tol);
  const dtn::DtnMap l2 = dtn::dtn_side(blocks, 2, options.zero_tol);
  return maslov_beta(l1.matrix, l2.matrix, options, trace);
}

MaslovResult maslov_beta(const Matrix& lambda1, const Matrix& lambda2, const Options& options,
                         BranchTrace* trace) {
  if (lambda1.rows() != lambda2.rows()) throw Error(Errc::InvalidArgument, "DtN maps differ in size");
  if (options.t_grid < 2) throw Error(Errc::InvalidArgument, "t grid needs at least 2 points");
  MaslovResult out;
  out.t_grid_size = options.t_grid;
  const Matrix sum = lambda1 + lambda2;
  out.index = linalg::ldlt_inertia(sum, options.zero_tol).morse0() -
              linalg::ldlt_inertia(lambda1, options.zero_tol).morse0();
  if (lambda1.rows() == 0) {
    out.method = Method::EndpointFormula;
    return out;
  }

  const Pencil pencil(lambda1, lambda2);
  const double thr = 10.0 * options.zero_tol * pencil.scale();
  std::vector<Sample> grid;
  grid.reserve(static_cast<std::size_t>(options.t_grid));
  for (int j = 0; j < options.t_grid; ++j) {
    grid.push_back(pencil.sample(static_cast<double>(j) / (options.t_grid - 1)));
  }
  if (trace) {
    trace->t.clear();
    trace->eigenvalues.clear();
    for (const Sample& s : grid) {
      trace->t.push_back(s.t);
      trace->eigenvalues.push_back(s.values);
    }
  }

  std::vector<Crossing> endpoint;
  for (const Sample* s : {&grid.front(), &grid.back()}) {
    for (Eigen::Index k = 0; k < s->values.size(); ++k) {
      if (std::abs(s->values(k)) <= thr) endpoint.push_back({s->t, 1, 0, false, true});
    }
  }

  std::vector<Bracket> brackets;
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    scan(pencil, grid[j], grid[j + 1], 0, options.max_depth, brackets);
  }

  struct Root {
    double t;
    Bracket br;
  };
  std::vector<Root> roots;
  for (const Bracket& br : brackets) roots.push_back({bisect(pencil, br, options.bisection_tol), br});
  std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) { return a.t < b.t; });

  // Roots that coincide within a few bisection widths form one crossing.
  const double merge = 8.0 * options.bisection_tol;
  std::size_t i = 0;
  bool definite = true;
  while (i < roots.size()) {
    std::size_t j = i + 1;
    while (j < roots.size() && roots[j].t - roots[j - 1].t <= merge) ++j;
    double t_star = 0.0;
    int direction = 0;
    std::vector<Eigen::Index> branches;
    for (std::size_t r = i; r < j; ++r) {
      t_star += roots[r].t;
      direction += roots[r].br.downward ? 1 : -1;
      branches.push_back(roots[r].br.branch);
    }
    t_star /= static_cast<double>(j - i);
    const Sample at = pencil.sample(t_star);
    const Matrix basis = at.vectors(Eigen::all, branches);
    // Crossing form of the path against the reference: -d/dt restricted to
    // the kernel, so a branch moving down through zero counts +1.
    const Matrix form = -2.0 * t_star * basis.transpose() * pencil.l2() * basis;
    const auto fe = linalg::eigs(form, false);
    const double form_thr = 1e-12 * std::max(pencil.scale(), 1.0);
    int pos = 0, neg = 0;
    for (Eigen::Index k = 0; k < fe.values.size(); ++k) {
      if (fe.values(k) > form_thr) ++pos;
      if (fe.values(k) < -form_thr) ++neg;
    }
    Crossing c;
    c.parameter = t_star;
    c.kernel_dim = static_cast<int>(branches.size());
    c.signature = pos - neg;
    c.sign_definite = (pos == c.kernel_dim || neg == c.kernel_dim) && c.signature == direction;
    c.at_endpoint = t_star <= merge || t_star >= 1.0 - merge;
    definite = definite && c.sign_definite;
    out.crossings.push_back(c);
    i = j;
  }

  out.trace_index = 0;
  for (const Crossing& c : out.crossings) out.trace_index += c.signature;
  for (const Crossing& c : endpoint) out.crossings.push_back(c);
  std::stable_sort(out.crossings.begin(), out.crossings.end(),
                   [](const Crossing& a, const Crossing& b) { return a.parameter < b.parameter; });

  const bool has_endpoint = std::any_of(out.crossings.begin(), out.crossings.end(),
                                        [](const Crossing& c) { return c.at_endpoint; });
  out.trace_reliable = !has_endpoint && definite;
  out.method = out.trace_reliable ? Method::CrossingTrace : Method::EndpointFormula;
  if (has_endpoint) {
    out.note = "crossing at a path endpoint; index from the endpoint formula";
  } else if (!definite) {
    out.note = "degenerate crossing form; index from the endpoint formula";
  } else if (out.trace_index != out.index) {
    out.trace_reliable = false;
    out.method = Method::EndpointFormula;
    out.note = "crossing trace disagrees with the endpoint formula";
  }
  return out;
}

HomotopyReport homotopy_boundary_check(const BlockOperator& blocks, const Options& options) {
  const dtn::DtnMap l1 = dtn::dtn_side(blocks, 1, options.zero_tol);
  const dtn::DtnMap l2 = dtn::dtn_side(blocks, 2, options.zero_tol);
  HomotopyReport out;
  BranchTrace trace;
  const MaslovResult side = maslov_beta(l1.matrix, l2.matrix, options, &trace);
  out.side = side.trace_index;
  out.endpoint_index = side.index;
  out.trace_reliable = side.trace_reliable;
  out.mor0_lambda1 = linalg::ldlt_inertia(l1.matrix, options.zero_tol).morse0();
  out.mor0_sum = linalg::ldlt_inertia(l1.matrix + l2.matrix, options.zero_tol).morse0();
  if (l1.size() == 0) {
    out.s_floor = -1.0;
    out.s_floor_ok = true;
    out.identity_holds = out.side == 0;
    return out;
  }

  constexpr int kFloorGrid = 33;
  double lowest = std::numeric_limits<double>::infinity();
  for (int j = 0; j < kFloorGrid; ++j) {
    const double t = static_cast<double>(j) / (kFloorGrid - 1);
    const Matrix m = l1.matrix + (t * t) * l2.matrix;
    lowest = std::min(lowest, linalg::eigs(m, false).values(0));
  }
  out.s_floor = lowest - 1.0;
  out.s_floor_ok = true;
  for (const Vector& values : trace.eigenvalues) {
    if (values(0) <= out.s_floor) out.s_floor_ok = false;
  }

  const Matrix sum = l1.matrix + l2.matrix;
  const double thr1 = options.zero_tol * linalg::max_abs(l1.matrix);
  const double thr2 = options.zero_tol * linalg::max_abs(sum);
  out.bottom = count_in(linalg::eigs(l1.matrix, false).values, out.s_floor, thr1);
  out.top = count_in(linalg::eigs(sum, false).values, out.s_floor, thr2);
  out.identity_holds = out.bottom + out.side == out.top;
  return out;
}

SweepResult maslov_lambda_sweep(const RealizationBuilder& builder, double lambda_floor, double lambda_end,
                                int grid, double zero_tol) {
  if (!(lambda_floor < lambda_end)) throw Error(Errc::InvalidArgument, "lambda floor must lie below the end");
  if (grid < 2) throw Error(Errc::InvalidArgument, "lambda grid needs at least 2 points");
  auto morse = [&](double lambda) {
    linalg::SymmetricIndefiniteFactorization f(builder(lambda).values, zero_tol);
    return f.inertia().negative;
  };

  SweepResult out;
  out.maslov.lambda_floor = lambda_floor;
  out.maslov.t_grid_size = grid;
  struct Jump {
    double lambda;
    int dim;
  };
  std::vector<Jump> jumps;
  const double tol = 1e-10 * std::max({1.0, std::abs(lambda_floor), std::abs(lambda_end)});
  std::function<void(double, int, double, int)> locate = [&](double a, int na, double b, int nb) {
    if (na == nb) return;
    if (nb < na) out.one_signed = false;
    if (b - a <= tol) {
      jumps.push_back({0.5 * (a + b), nb - na});
      return;
    }
    const double mid = 0.5 * (a + b);
    const int nm = morse(mid);
    locate(a, na, mid, nm);
    locate(mid, nm, b, nb);
  };

  double prev_lambda = lambda_floor;
  int prev = morse(lambda_floor);
  out.morse_at_floor = prev;
  for (int j = 1; j < grid; ++j) {
    const double lambda = lambda_floor + (lambda_end - lambda_floor) * j / (grid - 1);
    const int n = j == grid - 1 ? -1 : morse(lambda);
    if (j == grid - 1) {
      linalg::SymmetricIndefiniteFactorization f(builder(lambda_end).values, zero_tol);
      out.morse_at_end = f.inertia().negative;
      out.morse0_at_end = f.inertia().morse0();
      locate(prev_lambda, prev, lambda_end, out.morse_at_end);
    } else {
      locate(prev_lambda, prev, lambda, n);
      prev = n;
      prev_lambda = lambda;
    }
  }

  for (const Jump& jump : jumps) {
    const assemble::SymMatrix at = builder(jump.lambda);
    const Matrix derivative = builder(jump.lambda + 1.0).values - at.values;
    const auto e = linalg::eigs(at.values, true);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(e.values.size()));
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<Eigen::Index>(k);
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return std::abs(e.values(a)) < std::abs(e.values(b));
    });
    order.resize(static_cast<std::size_t>(std::max(jump.dim, 0)));
    const Matrix basis = e.vectors(Eigen::all, order);
    const auto fe = linalg::eigs(basis.transpose() * derivative * basis, false);
    int neg = 0, pos = 0;
    for (Eigen::Index k = 0; k < fe.values.size(); ++k) {
      if (fe.values(k) < 0) ++neg;
      if (fe.values(k) > 0) ++pos;
    }
    Crossing c;
    c.parameter = jump.lambda;
    c.kernel_dim = jump.dim;
    c.signature = pos - neg;
    c.sign_definite = neg == jump.dim;
    out.one_signed = out.one_signed && c.sign_definite;
    out.crossings_counted += jump.dim;
    out.maslov.crossings.push_back(c);
  }
  out.maslov.index = -out.crossings_counted;
  out.maslov.trace_index = out.maslov.index;
  out.maslov.method = Method::CrossingTrace;
  out.count_matches = out.morse_at_floor == 0 && out.crossings_counted == out.morse_at_end;
  return out;
}

std::vector<double> default_theta_grid(double theta_min, int points) {
  if (!(theta_min > 0.0) || theta_min >= 0.5 * std::numbers::pi || points < 2) {
    throw Error(Errc::InvalidArgument, "theta grid needs 0 < theta_min < pi/2 and 2+ points");
  }
  std::vector<double> out;
  const double lo = std::log(theta_min);
  const double hi = std::log(0.5 * std::numbers::pi);
  for (int i = 0; i < points; ++i) out.push_back(std::exp(lo + (hi - lo) * i / (points - 1)));
  out.back() = 0.5 * std::numbers::pi;
  return out;
}

RobinReport robin_sweep(const grid::GridDomain& domain, const assemble::Potential& v,
                        std::span<const double> theta_grid, double lambda, double zero_tol) {
  if (theta_grid.empty()) throw Error(Errc::InvalidArgument, "empty theta grid");
  std::vector<double> thetas(theta_grid.begin(), theta_grid.end());
  std::sort(thetas.begin(), thetas.end());

  const BlockOperator blocks = assemble::assemble_boundary_blocks(domain, v, lambda);
  RobinReport out;
  out.mor_dirichlet = linalg::ldlt_inertia(assemble::realize(blocks, assemble::Realization::D1).values, zero_tol).morse();
  out.mor_neumann = linalg::ldlt_inertia(assemble::realize(blocks, assemble::Realization::N1).values, zero_tol).morse();
  const dtn::DtnMap lam = dtn::dtn_side(blocks, 1, zero_tol);
  const linalg::Inertia li = linalg::ldlt_inertia(lam.matrix, zero_tol);
  out.mor_dtn = li.morse();
  out.mor0_dtn = li.morse0();
  out.kernel_dtn = li.zero;

  const auto measure = assemble::boundary_measure(grid::relabel_boundary(domain, grid::BoundaryCondition::Neumann));
  Vector w(lam.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w(i) = 1.0 / std::sqrt(measure[static_cast<std::size_t>(lam.interface[static_cast<std::size_t>(i)])]);
  }
  const Matrix normalized = w.asDiagonal() * lam.matrix * w.asDiagonal();
  const Vector mu = linalg::eigs(normalized, false).values;
  const double thr = zero_tol * linalg::max_abs(normalized);

  out.predictions_match = true;
  for (const double theta : thetas) {
    RobinPoint p;
    p.theta = theta;
    p.morse = linalg::ldlt_inertia(assemble::assemble_robin(domain, v, theta, lambda).values, zero_tol).morse();
    const double cot = std::tan(0.5 * std::numbers::pi - theta);
    p.predicted = out.mor_dirichlet;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
      if (mu(i) < -cot) ++p.predicted;
    }
    out.predictions_match = out.predictions_match && p.predicted == p.morse;
    out.points.push_back(p);
  }
  out.plateau = out.points.front().morse;
  out.plateau_matches = out.plateau == out.mor_dirichlet;
  out.monotone = true;
  for (std::size_t i = 1; i < out.points.size(); ++i) {
    if (out.points[i].morse < out.points[i - 1].morse) out.monotone = false;
  }
  const double cot_eps = std::tan(0.5 * std::numbers::pi - thetas.front());
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu(i) > -cot_eps && mu(i) <= thr) ++out.window_count;
    if (mu(i) < -thr) out.crossing_angles.push_back(std::atan(-1.0 / mu(i)));
  }
  std::sort(out.crossing_angles.begin(), out.crossing_angles.end());
  out.window_matches = out.window_count == out.mor0_dtn;
  return out;
}

std::string branch_trace_csv(const BranchTrace& trace) {
  std::ostringstream os;
  os.precision(17);
  const Eigen::Index m = trace.eigenvalues.empty() ? 0 : trace.eigenvalues.front().size();
  os << "t";
  for (Eigen::Index k = 0; k < m; ++k) os << ",eigenvalue_" << (k + 1);
  os << '\n';
  for (std::size_t j = 0; j < trace.t.size(); ++j) {
    os << trace.t[j];
    for (Eigen::Index k = 0; k < m; ++k) os << ',' << trace.eigenvalues[j](k);
    os << '\n';
  }
  return os.str();
}

}  // namespace morselab::maslov
