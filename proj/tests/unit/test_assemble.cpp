#include "morselab/assemble.hpp"
#include "morselab/error.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace morselab;
using namespace morselab::assemble;
using grid::BoundaryCondition;
using grid::SideConditions;
using BC = BoundaryCondition;

namespace {

int morse(const Matrix& m) { return linalg::ldlt_inertia(m).morse(); }

Potential random_potential(const grid::GridDomain& d, std::mt19937_64& rng, double vmax) {
  std::vector<double> v(static_cast<std::size_t>(d.lattice_size()));
  for (double& x : v) x = testsupport::uniform(rng, -vmax, vmax);
  return Potential::table(std::move(v));
}

struct RandomCase {
  grid::GridDomain domain;
  grid::Partition partition;
  Potential v;
  double lambda;
};

RandomCase random_case(std::mt19937_64& rng) {
  const int nx = testsupport::uniform_int(rng, 3, 16);
  const int ny = testsupport::uniform_int(rng, 3, 16);
  const int axis = testsupport::uniform_int(rng, 0, 1);
  SideConditions bc;
  auto pick = [&] { return testsupport::uniform_int(rng, 0, 1) == 0 ? BC::Dirichlet : BC::Neumann; };
  bc.left = pick();
  bc.right = pick();
  bc.bottom = axis == 0 ? BC::Dirichlet : pick();
  bc.top = axis == 0 ? BC::Dirichlet : pick();
  if (axis == 1) bc.left = bc.right = BC::Dirichlet;
  auto d = grid::build_rectangle(nx, ny, testsupport::uniform(rng, 0.5, 2.0), testsupport::uniform(rng, 0.5, 2.0), bc);
  const int index = testsupport::uniform_int(rng, 1, d.cells(axis) - 1);
  auto p = grid::partition_by_line(d, axis, index);
  auto v = random_potential(d, rng, 200.0);
  return {std::move(d), std::move(p), std::move(v), testsupport::uniform(rng, -5.0, 5.0)};
}

}  // namespace

TEST_CASE("assemble_global: hand stencil and closed-form Morse indices") {
  const auto two = grid::build_interval(2, 1.0, BC::Dirichlet, BC::Dirichlet);
  const SymMatrix m = assemble_global(two, Potential::constant(0.0), 0.0);
  REQUIRE(m.order() == 1);
  const double h = 0.5;
  CHECK(m.values(0, 0) == doctest::Approx(2.0 / h));
  CHECK(m.values(0, 0) / lumped_mass(two)(0) == doctest::Approx(8.0));

  const int n = 1000;
  const double c = 50.0;
  const auto dir = grid::build_interval(n, 1.0, BC::Dirichlet, BC::Dirichlet);
  CHECK(morse(assemble_global(dir, Potential::constant(-c), 0.0).values) ==
        testsupport::count_below(testsupport::dirichlet_second_difference(n), c));
  CHECK(morse(assemble_global(dir, Potential::constant(-c), 0.0).values) == 2);

  const auto neu = grid::build_interval(n, 1.0, BC::Neumann, BC::Neumann);
  CHECK(morse(assemble_global(neu, Potential::constant(-c), 0.0).values) ==
        testsupport::count_below(testsupport::neumann_second_difference(n), c));
  CHECK(morse(assemble_global(neu, Potential::constant(-c), 0.0).values) == 3);
}

TEST_CASE("assemble_global rejects periodic domains; assemble_periodic needs them") {
  const auto circle = grid::periodic_identification(grid::build_interval(8, 1.0, BC::Periodic, BC::Periodic), 0);
  CHECK_THROWS_AS(assemble_global(circle, Potential::constant(0.0), 0.0), Error);
  const auto line = grid::build_interval(8, 1.0, BC::Dirichlet, BC::Dirichlet);
  CHECK_THROWS_AS(assemble_periodic(line, Potential::constant(0.0), 0.0), Error);
}

TEST_CASE("assemble_periodic: circle counts and hand case") {
  const int n = 400;
  const auto circle = grid::periodic_identification(grid::build_interval(n, 1.0, BC::Periodic, BC::Periodic), 0);
  // Oracle: eigenvalues (4/h^2) sin^2(pi k / N) of the periodic second difference.
  std::vector<double> closed;
  const double h = 1.0 / n;
  for (int k = 0; k < n; ++k) closed.push_back(4.0 / (h * h) * std::pow(std::sin(M_PI * k / n), 2));
  const SymMatrix p = assemble_periodic(circle, Potential::constant(-50.0), 0.0);
  CHECK(morse(p.values) == testsupport::count_below(closed, 50.0));
  CHECK(morse(p.values) == 3);

  const SymMatrix free = assemble_periodic(circle, Potential::constant(0.0), 0.0);
  CHECK(linalg::eig_inertia(free.values).zero == 1);

  const auto tiny = grid::periodic_identification(grid::build_interval(2, 1.0, BC::Periodic, BC::Periodic), 0);
  const SymMatrix t = assemble_periodic(tiny, Potential::constant(3.0), 1.0);
  REQUIRE(t.order() == 2);
  const Vector mass = lumped_mass(tiny);
  for (Eigen::Index i = 0; i < 2; ++i) CHECK(t.values.row(i).sum() == doctest::Approx((3.0 - 1.0) * mass(i)));
}

TEST_CASE("assemble_robin") {
  const auto d = grid::build_interval(50, 1.0, BC::Dirichlet, BC::Neumann);
  const Potential v = Potential::constant(-50.0);
  const SymMatrix half_pi = assemble_robin(d, v, std::numbers::pi / 2, 0.0);
  const SymMatrix neumann = assemble_global(grid::relabel_boundary(d, BC::Neumann), v, 0.0);
  CHECK(half_pi.values == neumann.values);

  const auto small = grid::build_interval(2, 1.0, BC::Neumann, BC::Neumann);
  const double theta = 0.3;
  const Matrix diff = assemble_robin(small, Potential::constant(0.0), theta, 0.0).values -
                      assemble_global(small, Potential::constant(0.0), 0.0).values;
  const double cot = 1.0 / std::tan(theta);
  CHECK(diff(0, 0) == doctest::Approx(cot));
  CHECK(diff(2, 2) == doctest::Approx(cot));
  CHECK(diff(1, 1) == 0.0);

  // Small angles approach the Dirichlet realization.
  const auto fine = grid::build_interval(200, 1.0, BC::Neumann, BC::Neumann);
  const int mor_d = morse(assemble_global(grid::relabel_boundary(fine, BC::Dirichlet), v, 0.0).values);
  CHECK(morse(assemble_robin(fine, v, 1e-5, 0.0).values) == mor_d);

  CHECK_THROWS_AS(assemble_robin(d, v, 0.0, 0.0), Error);
  CHECK_THROWS_AS(assemble_robin(d, v, -0.1, 0.0), Error);
}

TEST_CASE("assemble_robin: 2D boundary measure sums to the perimeter") {
  const auto r = grid::build_rectangle(6, 4, 1.5, 1.0, SideConditions::all(BC::Neumann));
  const auto m = boundary_measure(r);
  double total = 0.0;
  for (const double x : m) total += x;
  CHECK(total == doctest::Approx(2.0 * (1.5 + 1.0)));
}

TEST_CASE("Potential") {
  const auto d = grid::build_interval(4, 1.0, BC::Dirichlet, BC::Dirichlet);
  CHECK(Potential::constant(-3.0).inf(d) == -3.0);
  const Potential t = Potential::table({1.0, -2.0, 3.0, 4.0, 0.5});
  CHECK(t.inf(d) == -2.0);
  CHECK(t.with_lower_bound(-5.0).inf(d) == -5.0);
  CHECK_THROWS_AS(t.with_lower_bound(0.0).inf(d), Error);
  CHECK_THROWS_AS(Potential::table({1.0, 2.0}).at(d, 0), Error);
  const Potential f = Potential::function([](double x, double) { return x * x; });
  CHECK(f.at(d, 2) == doctest::Approx(0.25));
}

TEST_CASE("blocks: 1D three-block case reconstructs the global diagonal") {
  const auto d = grid::build_interval(8, 2.0, BC::Dirichlet, BC::Dirichlet);
  const auto p = grid::partition_by_line(d, 0, 4);
  const Potential v = Potential::constant(-3.0);
  const auto b = assemble_blocks(d, v, p, 0.5);
  REQUIRE(b.sigma.size() == 1);
  const double h = 0.25;
  CHECK(b.d1(0, 0) == doctest::Approx(1.0 / h + (-3.0 - 0.5) * h / 2.0));
  CHECK(b.d2(0, 0) == doctest::Approx(1.0 / h + (-3.0 - 0.5) * h / 2.0));
  const auto g = assemble_global(d, v, 0.5);
  const auto row = static_cast<Eigen::Index>(std::find(g.nodes.begin(), g.nodes.end(), b.sigma[0]) - g.nodes.begin());
  CHECK(b.d1(0, 0) + b.d2(0, 0) == doctest::Approx(g.values(row, row)).epsilon(1e-15));
}

TEST_CASE("property: block reconstruction, symmetry, separator, swap") {
  std::mt19937_64 rng(424242);
  for (int trial = 0; trial < 60; ++trial) {
    const RandomCase rc = random_case(rng);
    const auto b = assemble_blocks(rc.domain, rc.v, rc.partition, rc.lambda);
    const SymMatrix g = assemble_global(rc.domain, rc.v, rc.lambda);
    const SymMatrix r = realize(b, Realization::G);
    REQUIRE(g.nodes == r.nodes);
    // Off-diagonal entries are accumulated in identical order; only the
    // Sigma diagonal is a sum of two partial sums.
    const double scale = linalg::max_abs(g.values);
    for (Eigen::Index i = 0; i < g.order(); ++i) {
      for (Eigen::Index j = 0; j < g.order(); ++j) {
        if (i == j) {
          CHECK(std::abs(g.values(i, j) - r.values(i, j)) <= 4e-16 * scale * 8);
        } else {
          CHECK(g.values(i, j) == r.values(i, j));
        }
      }
    }
    CHECK((g.values - g.values.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((b.d1 - b.d1.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((b.d2 - b.d2.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (const auto& [x, y] : rc.domain.edges()) {
      const auto sx = rc.partition.at(x);
      const auto sy = rc.partition.at(y);
      CHECK_FALSE(((sx == grid::Side::Omega1 && sy == grid::Side::Omega2) ||
                   (sx == grid::Side::Omega2 && sy == grid::Side::Omega1)));
    }

    const auto s = assemble_blocks(rc.domain, rc.v, rc.partition.swapped(), rc.lambda);
    CHECK(s.a1 == b.a2);
    CHECK(s.a2 == b.a1);
    CHECK(s.b1 == b.b2);
    CHECK(s.b2 == b.b1);
    CHECK(s.d1 == b.d2);
    CHECK(s.d2 == b.d1);
  }
}

TEST_CASE("property: monotonicity in lambda and Dirichlet inside Neumann") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const RandomCase rc = random_case(rng);
    const double step = testsupport::uniform(rng, 0.01, 3.0);
    const SymMatrix lo = assemble_global(rc.domain, rc.v, rc.lambda);
    const SymMatrix hi = assemble_global(rc.domain, rc.v, rc.lambda + step);
    const Matrix diff = lo.values - hi.values;
    const Vector mass = lumped_mass(rc.domain);
    CHECK((diff - Matrix(step * mass.asDiagonal())).cwiseAbs().maxCoeff() <= 1e-12 * linalg::max_abs(lo.values));
    CHECK(linalg::eig_inertia(diff).positive == diff.rows());

    const auto b = assemble_blocks(rc.domain, rc.v, rc.partition, rc.lambda);
    const SymMatrix n1 = realize(b, Realization::N1);
    const SymMatrix d1 = realize(b, Realization::D1);
    std::vector<Eigen::Index> rows;
    for (const auto node : d1.nodes) {
      rows.push_back(static_cast<Eigen::Index>(std::find(n1.nodes.begin(), n1.nodes.end(), node) - n1.nodes.begin()));
    }
    CHECK(Matrix(n1.values(rows, rows)) == d1.values);
    CHECK(realize(b, Realization::DN).values == n1.values);
  }
}

TEST_CASE("doubled example realizations") {
  const double ell = 2.0, c = 1.44;
  const int n = 2000;
  const auto d = grid::build_interval(n, ell, BC::Dirichlet, BC::Neumann);
  const auto p = grid::partition_by_line(d, 0, n / 2);
  const auto b = assemble_blocks(d, Potential::constant(-c), p, 0.0);
  // Oracle: continuum mixed eigenvalues ((2j+1) pi / (2a))^2 - C on pieces of
  // length a, and ((2j+1) pi / (2 ell))^2 - C on the whole interval.
  auto mixed_count = [&](double a) {
    int k = 0;
    for (int j = 0; j < 10; ++j) k += std::pow((2 * j + 1) * M_PI / (2 * a), 2) < c ? 1 : 0;
    return k;
  };
  CHECK(morse(realize(b, Realization::N1).values) == mixed_count(ell / 2));
  CHECK(morse(realize(b, Realization::D2).values) == mixed_count(ell / 2));
  CHECK(morse(realize(b, Realization::G).values) == mixed_count(ell));
  CHECK(mixed_count(ell) == 1);
}
