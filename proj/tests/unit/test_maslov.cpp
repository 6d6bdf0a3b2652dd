#include "morselab/error.hpp"
#include "morselab/maslov.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace morselab;
using assemble::Potential;
using BC = grid::BoundaryCondition;
using linalg::Matrix;
using linalg::Vector;

namespace {

Matrix diag(std::initializer_list<double> v) {
  Vector d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const double x : v) d(i++) = x;
  return d.asDiagonal();
}

// Doubled interval [0, ell] split at ell/2: Dirichlet at 0, Neumann at ell.
assemble::BlockOperator doubled(double c, double ell, int n) {
  const auto d = grid::build_interval(n, ell, BC::Dirichlet, BC::Neumann);
  return assemble::assemble_blocks(d, Potential::constant(-c), grid::partition_by_line(d, 0, n / 2), 0.0);
}

// Signed index of the doubled problem from the closed forms
// Lambda_1 = sqrt(C) cot(theta), Lambda_1 + Lambda_2 = 2 sqrt(C) cot(2 theta).
int doubled_oracle(double theta) {
  const auto mor0 = [](double x) { return x <= 0.0 ? 1 : 0; };
  return mor0(1.0 / std::tan(2.0 * theta)) - mor0(1.0 / std::tan(theta));
}

}  // namespace

TEST_CASE("maslov_beta: scalar crossing") {
  const auto r = maslov::maslov_beta(diag({1.0}), diag({-3.0}));
  CHECK(r.index == 1);
  CHECK(r.trace_index == 1);
  CHECK(r.trace_reliable);
  CHECK(r.method == maslov::Method::CrossingTrace);
  REQUIRE(r.crossings.size() == 1);
  CHECK(std::abs(r.crossings[0].parameter - 1.0 / std::sqrt(3.0)) <= 1e-9);
  CHECK(r.crossings[0].signature == 1);
  CHECK(r.crossings[0].kernel_dim == 1);
}

TEST_CASE("maslov_beta: opposite crossings cancel and survive congruence") {
  const Matrix l1 = diag({1.0, 2.0, -1.0});
  const Matrix l2 = diag({-2.0, -1.0, 3.0});
  const auto r = maslov::maslov_beta(l1, l2);
  CHECK(r.index == 0);
  CHECK(r.trace_reliable);
  REQUIRE(r.crossings.size() == 2);
  CHECK(r.crossings[0].parameter == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-9));
  CHECK(r.crossings[0].signature == -1);
  CHECK(r.crossings[1].parameter == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  CHECK(r.crossings[1].signature == 1);

  std::mt19937_64 rng(3);
  const Eigen::HouseholderQR<Matrix> qr(testsupport::random_matrix(rng, 3, 3));
  const Matrix q = qr.householderQ();
  const Matrix r1 = q.transpose() * l1 * q, r2 = q.transpose() * l2 * q;
  const auto rotated = maslov::maslov_beta(0.5 * (r1 + r1.transpose()), 0.5 * (r2 + r2.transpose()));
  CHECK(rotated.index == 0);
  CHECK(rotated.trace_index == 0);
}

TEST_CASE("maslov_beta: crossing at t = 0 falls back to the endpoint formula") {
  const auto r = maslov::maslov_beta(diag({0.0, 1.0}), diag({-1.0, -2.0}));
  CHECK(r.index == 1);
  CHECK_FALSE(r.trace_reliable);
  CHECK(r.method == maslov::Method::EndpointFormula);
  CHECK_FALSE(r.note.empty());
  CHECK(std::any_of(r.crossings.begin(), r.crossings.end(), [](const maslov::Crossing& c) { return c.at_endpoint; }));
}

TEST_CASE("maslov_beta: doubled interval against closed forms") {
  const double ell = 2.0;
  const int n = 2000;
  for (const double theta : {0.5, 1.2, 1.4, 1.9, 2.2}) {
    const double c = std::pow(2.0 * theta / ell, 2);
    const auto b = doubled(c, ell, n);
    const auto r = maslov::maslov_beta(b);
    CAPTURE(theta);
    CHECK(r.index == doubled_oracle(theta));
    CHECK(r.trace_reliable);
    CHECK(r.trace_index == r.index);
    if (r.index != 0) {
      REQUIRE(r.crossings.size() == 1);
      CHECK(std::abs(r.crossings[0].parameter - std::abs(1.0 / std::tan(theta))) <= 1e-3);
      const auto k = maslov::crossing_kernel(b, r.crossings[0].parameter);
      CHECK(k.dim == 1);
    } else {
      CHECK(r.crossings.empty());
    }
  }
}

TEST_CASE("property: reliable traces agree with the endpoint formula") {
  std::mt19937_64 rng(1234);
  int reliable = 0;
  const int trials = 60;
  for (int trial = 0; trial < trials; ++trial) {
    const int n = testsupport::uniform_int(rng, 1, 8);
    const Matrix l1 = 3.0 * testsupport::random_symmetric(rng, n);
    const Matrix l2 = 3.0 * testsupport::random_symmetric(rng, n);
    maslov::Options options;
    options.t_grid = 128;
    const auto r = maslov::maslov_beta(l1, l2, options);
    CHECK(r.index == linalg::eig_inertia(l1 + l2).morse0() - linalg::eig_inertia(l1).morse0());
    if (r.trace_reliable) {
      ++reliable;
      CHECK(r.trace_index == r.index);
    }
  }
  CHECK(reliable == trials);
}

TEST_CASE("crossing_kernel") {
  const auto b = doubled(1.44, 2.0, 400);
  const double t_star = maslov::maslov_beta(b).crossings.at(0).parameter;
  const auto k = maslov::crossing_kernel(b, t_star);
  REQUIRE(k.dim == 1);
  const Matrix m = dtn::dtn_side(b, 1).matrix + t_star * t_star * dtn::dtn_side(b, 2).matrix;
  CHECK((m * k.basis).norm() <= 1e-6 * std::max(1.0, linalg::max_abs(m)));
  CHECK(maslov::crossing_kernel(b, 0.5 * t_star).dim == 0);
  CHECK_THROWS_AS(maslov::crossing_kernel(b, 1.5), Error);
}

TEST_CASE("homotopy boundary identity") {
  for (const double theta : {0.5, 1.2, 1.9}) {
    const auto b = doubled(std::pow(theta, 2), 2.0, 800);
    const auto h = maslov::homotopy_boundary_check(b);
    CAPTURE(theta);
    CHECK(h.s_floor_ok);
    CHECK(h.identity_holds);
    CHECK(h.bottom == h.mor0_lambda1);
    CHECK(h.top == h.mor0_sum);
  }
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 15; ++trial) {
    const int nx = testsupport::uniform_int(rng, 4, 14);
    const int ny = testsupport::uniform_int(rng, 3, 10);
    const auto d = grid::build_rectangle(nx, ny, 1.0, 1.0, grid::SideConditions::all(BC::Dirichlet));
    std::vector<double> table(static_cast<std::size_t>(d.lattice_size()));
    for (double& x : table) x = testsupport::uniform(rng, -200.0, 200.0);
    const auto b = assemble::assemble_blocks(d, Potential::table(table),
                                             grid::partition_by_line(d, 0, testsupport::uniform_int(rng, 1, nx - 1)), 0.0);
    const auto h = maslov::homotopy_boundary_check(b);
    CHECK(h.s_floor_ok);
    CHECK(h.identity_holds);
  }
}

TEST_CASE("lambda sweep counts the negative eigenvalues") {
  const auto d = grid::build_interval(200, 1.0, BC::Dirichlet, BC::Dirichlet);
  const auto v = Potential::constant(-50.0);
  const auto sweep = maslov::maslov_lambda_sweep(
      [&](double lambda) { return assemble::assemble_global(d, v, lambda); }, -51.0);
  CHECK(sweep.morse_at_floor == 0);
  CHECK(sweep.morse_at_end == 2);
  CHECK(sweep.crossings_counted == 2);
  CHECK(sweep.maslov.index == -2);
  CHECK(sweep.one_signed);
  CHECK(sweep.count_matches);
  // Crossings sit at the eigenvalues of the operator, (4/h^2) sin^2(j pi h/2) - 50.
  const auto closed = testsupport::dirichlet_second_difference(200);
  REQUIRE(sweep.maslov.crossings.size() == 2);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(sweep.maslov.crossings[j].parameter == doctest::Approx(closed[j] - 50.0).epsilon(1e-8));
  }
  CHECK_THROWS_AS(maslov::maslov_lambda_sweep([&](double l) { return assemble::assemble_global(d, v, l); }, 1.0), Error);
}

TEST_CASE("robin sweep interpolates Dirichlet and Neumann") {
  const auto grid_theta = maslov::default_theta_grid();
  REQUIRE(grid_theta.size() == 32);
  CHECK(grid_theta.back() == std::numbers::pi / 2);
  CHECK(grid_theta.front() == doctest::Approx(1e-4));

  const auto d = grid::build_interval(200, 1.0, BC::Neumann, BC::Neumann);
  const auto r = maslov::robin_sweep(d, Potential::constant(-50.0), grid_theta);
  CHECK(r.mor_dirichlet == 2);
  CHECK(r.mor_neumann == 3);
  CHECK(r.plateau == 2);
  CHECK(r.points.back().morse == 3);
  CHECK(r.plateau_matches);
  CHECK(r.monotone);
  CHECK(r.predictions_match);
  CHECK(r.window_matches);
  CHECK(r.mor_neumann - r.mor_dirichlet == r.mor_dtn);

  const auto rect = grid::build_rectangle(10, 8, 1.0, 1.0, grid::SideConditions::all(BC::Neumann));
  const auto r2 = maslov::robin_sweep(rect, Potential::constant(-60.0), grid_theta);
  CHECK(r2.plateau_matches);
  CHECK(r2.monotone);
  CHECK(r2.predictions_match);
  CHECK(r2.points.back().morse == r2.mor_neumann);
}

TEST_CASE("branch trace csv") {
  maslov::BranchTrace trace;
  maslov::maslov_beta(diag({1.0, 2.0}), diag({-3.0, 1.0}), {}, &trace);
  CHECK(trace.t.size() == 512);
  const std::string csv = maslov::branch_trace_csv(trace);
  CHECK(csv.rfind("t,eigenvalue_1,eigenvalue_2\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 513);
}
