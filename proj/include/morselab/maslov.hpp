#pragma once

#include "morselab/assemble.hpp"
#include "morselab/dtn.hpp"

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace morselab::maslov {

using assemble::BlockOperator;
using linalg::Matrix;
using linalg::Vector;

struct Crossing {
  double parameter = 0.0;
  int kernel_dim = 0;
  // Signature of the crossing form on the kernel (positive minus negative).
  int signature = 0;
  bool sign_definite = true;
  bool at_endpoint = false;
};

enum class Method { EndpointFormula, CrossingTrace };

struct MaslovResult {
  int index = 0;
  Method method = Method::EndpointFormula;
  std::vector<Crossing> crossings;  // sorted by parameter
  int t_grid_size = 0;
  double s_floor = std::numeric_limits<double>::quiet_NaN();
  double lambda_floor = std::numeric_limits<double>::quiet_NaN();
  // Signed crossing count; equals `index` when the trace is reliable.
  int trace_index = 0;
  bool trace_reliable = true;
  std::string note;
};

struct Options {
  int t_grid = 512;
  double bisection_tol = 1e-10;
  double zero_tol = linalg::kDefaultZeroTol;
  int max_depth = 16;  // adaptive halving depth per grid interval
};

struct Kernel {
  int dim = 0;
  Matrix basis;  // orthonormal columns
};

/// ker(Lambda_1 + t^2 Lambda_2) for t > 0; at t = 0 the kernel of the
/// Neumann-on-1 / Dirichlet-on-2 pair, dim ker Lambda_1 + dim ker A_2.
Kernel crossing_kernel(const BlockOperator& blocks, double t, double zero_tol = linalg::kDefaultZeroTol);

/// Eigenvalue branches of t -> Lambda_1 + t^2 Lambda_2 on a uniform grid.
struct BranchTrace {
  std::vector<double> t;
  std::vector<Vector> eigenvalues;  // ascending at each t
};

/// Index = Mor0(L1 + L2) - Mor0(L1); crossings from branch tracking. Throws
/// Errc::ASingular when a Dirichlet block is singular.
MaslovResult maslov_beta(const BlockOperator& blocks, const Options& options = {},
                         BranchTrace* trace = nullptr);
/// Same, from precomputed DtN matrices.
MaslovResult maslov_beta(const Matrix& lambda1, const Matrix& lambda2, const Options& options = {},
                         BranchTrace* trace = nullptr);

struct HomotopyReport {
  int bottom = 0;     // eigenvalues of Lambda_1 in [s_floor, 0]
  int top = 0;        // eigenvalues of Lambda_1 + Lambda_2 in [s_floor, 0]
  int side = 0;       // crossing-trace index along s = 0
  int endpoint_index = 0;
  int mor0_lambda1 = 0;
  int mor0_sum = 0;
  double s_floor = 0.0;
  bool s_floor_ok = false;  // every sampled eigenvalue stays above s_floor
  bool trace_reliable = true;
  bool identity_holds = false;  // bottom + side == top
};

HomotopyReport homotopy_boundary_check(const BlockOperator& blocks, const Options& options = {});

using RealizationBuilder = std::function<assemble::SymMatrix(double lambda)>;

struct SweepResult {
  MaslovResult maslov;  // index = -(number of crossings), crossings in lambda
  int crossings_counted = 0;
  int morse_at_end = 0;
  int morse0_at_end = 0;
  int morse_at_floor = 0;
  bool one_signed = true;
  bool count_matches = false;
};

/// Counts eigenvalue branches of builder(lambda) crossing zero for lambda in
/// [lambda_floor, lambda_end) using inertia on a grid and bisection.
SweepResult maslov_lambda_sweep(const RealizationBuilder& builder, double lambda_floor,
                                double lambda_end = 0.0, int grid = 64,
                                double zero_tol = linalg::kDefaultZeroTol);

struct RobinPoint {
  double theta = 0.0;
  int morse = 0;
  int predicted = 0;  // Mor(L^D) + #{eig of the normalized DtN < -cot theta}
};

struct RobinReport {
  std::vector<RobinPoint> points;  // ascending theta
  int plateau = 0;                 // Mor at the smallest theta
  int mor_dirichlet = 0;
  int mor_neumann = 0;
  int mor_dtn = 0;
  int mor0_dtn = 0;
  int kernel_dtn = 0;
  int window_count = 0;            // eigenvalues of the normalized DtN in (-cot eps, 0]
  std::vector<double> crossing_angles;
  bool plateau_matches = false;
  bool window_matches = false;
  bool monotone = false;
  bool predictions_match = false;
};

/// theta grid of `points` log-spaced values in [theta_min, pi/2].
std::vector<double> default_theta_grid(double theta_min = 1e-4, int points = 32);
RobinReport robin_sweep(const grid::GridDomain& domain, const assemble::Potential& v,
                        std::span<const double> theta_grid, double lambda = 0.0,
                        double zero_tol = linalg::kDefaultZeroTol);

/// Writes "t,eigenvalue_1,...,eigenvalue_m" rows.
std::string branch_trace_csv(const BranchTrace& trace);

}  // namespace morselab::maslov
