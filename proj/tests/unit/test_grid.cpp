#include "morselab/error.hpp"
#include "morselab/grid.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace morselab;
using namespace morselab::grid;

namespace {

using BC = BoundaryCondition;

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::InvalidArgument;
}

int count_free(const GridDomain& d) { return static_cast<int>(d.free_nodes().size()); }

}  // namespace

TEST_CASE("build_interval") {
  const auto d = build_interval(4, 1.0, BC::Dirichlet, BC::Dirichlet);
  CHECK(d.nodes().size() == 5);
  CHECK(d.spacing(0) == 0.25);
  CHECK(count_free(d) == 3);

  const auto small = build_interval(2, 1.0, BC::Neumann, BC::Neumann);
  CHECK(small.nodes().size() == 3);
  CHECK(small.kind(0) == VertexKind::Neumann);
  CHECK(small.kind(2) == VertexKind::Neumann);
  CHECK(small.kind(1) == VertexKind::Interior);

  const auto doubled = build_interval(2000, 2.0, BC::Dirichlet, BC::Neumann);
  CHECK(doubled.kind(0) == VertexKind::Dirichlet);
  CHECK(doubled.kind(2000) == VertexKind::Neumann);
  CHECK(doubled.spacing(0) == doctest::Approx(1e-3));

  CHECK(code_of([] { build_interval(1, 1.0, BC::Dirichlet, BC::Dirichlet); }) == Errc::InvalidArgument);
  CHECK(code_of([] { build_interval(4, 0.0, BC::Dirichlet, BC::Dirichlet); }) == Errc::InvalidArgument);
  CHECK(code_of([] { build_interval(4, -1.0, BC::Dirichlet, BC::Dirichlet); }) == Errc::InvalidArgument);
}

TEST_CASE("build_rectangle") {
  const auto d = build_rectangle(4, 4, 1, 1, SideConditions::all(BC::Dirichlet));
  CHECK(d.nodes().size() == 25);
  CHECK(count_free(d) == 9);

  const auto nodal = build_rectangle(60, 36, 1.0, 0.6, SideConditions::all(BC::Dirichlet));
  CHECK(nodal.spacing(0) == doctest::Approx(nodal.spacing(1)));
  CHECK(count_free(nodal) == 59 * 35);

  // Corners take the stronger label.
  SideConditions mixed{BC::Neumann, BC::Neumann, BC::Dirichlet, BC::Neumann};
  const auto m = build_rectangle(3, 3, 1, 1, mixed);
  CHECK(m.kind(m.lattice_index(0, 0)) == VertexKind::Dirichlet);
  CHECK(m.kind(m.lattice_index(0, 3)) == VertexKind::Neumann);
  CHECK(m.kind(m.lattice_index(1, 1)) == VertexKind::Interior);

  SideConditions paired{BC::Dirichlet, BC::Periodic, BC::Dirichlet, BC::Periodic};
  CHECK(code_of([&] { build_rectangle(8, 8, 1, 1, paired); }) == Errc::FaceAlreadyLabeled);

  SideConditions pending{BC::Periodic, BC::Periodic, BC::Dirichlet, BC::Dirichlet};
  const auto p = build_rectangle(8, 8, 1, 1, pending);
  CHECK(code_of([&] { p.validate(); }) == Errc::UnpairedFace);

  CHECK(code_of([] { build_rectangle(1, 4, 1, 1, SideConditions{}); }) == Errc::InvalidArgument);
}

TEST_CASE("build_mask_domain: L-shape, neck, disconnected") {
  const auto l = build_l_shape(3, 0.1, BC::Dirichlet);
  CHECK(l.cell_origins().size() == 27);
  CHECK(l.nodes().size() == 49 - 9);
  // Re-entrant corner vertex (3,3) is on the boundary.
  CHECK(l.kind(l.lattice_index(3, 3)) == VertexKind::Dirichlet);
  CHECK(l.kind(l.lattice_index(2, 2)) == VertexKind::Interior);

  const auto neck = build_necked_domain(4, 3, 0.1, BC::Dirichlet);
  int neck_interior = 0;
  for (int j = 0; j <= neck.cells(1); ++j) {
    if (neck.contains(neck.lattice_index(6, j)) && neck.kind(neck.lattice_index(6, j)) == VertexKind::Interior) {
      ++neck_interior;
    }
  }
  CHECK(neck_interior == 1);

  std::vector<std::vector<bool>> two(4, std::vector<bool>(7, false));
  for (int j = 0; j < 4; ++j) {
    for (int i : {0, 1, 2, 4, 5, 6}) two[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = true;
  }
  CHECK(code_of([&] { build_mask_domain(two, 0.1, BC::Dirichlet); }) == Errc::Disconnected);

  std::vector<std::vector<bool>> stray(4, std::vector<bool>(4, true));
  // Removing (2,3) and (3,2) leaves corner vertex (3,3) without a cell.
  stray[3][2] = false;
  stray[2][3] = false;
  CHECK(code_of([&] { build_mask_domain(stray, 0.1, BC::Dirichlet); }) == Errc::IsolatedVertex);
}

TEST_CASE("partition_by_line") {
  const auto iv = build_interval(8, 2.0, BC::Dirichlet, BC::Dirichlet);
  const auto p = partition_by_line(iv, 0, 4);
  REQUIRE(p.sigma.size() == 1);
  CHECK(iv.position(p.sigma[0])[0] == doctest::Approx(1.0));

  const auto r = build_rectangle(6, 4, 1.5, 1.0, SideConditions::all(BC::Dirichlet));
  const auto pr = partition_by_line(r, 0, 3);
  CHECK(pr.sigma.size() == 3);
  CHECK(pr.at(r.lattice_index(3, 0)) == Side::None);

  SideConditions neumann_bottom{BC::Dirichlet, BC::Dirichlet, BC::Neumann, BC::Dirichlet};
  const auto rn = build_rectangle(6, 4, 1.5, 1.0, neumann_bottom);
  CHECK(code_of([&] { partition_by_line(rn, 0, 3); }) == Errc::SigmaTouchesBoundary);
  CHECK(code_of([&] { partition_by_line(r, 0, 0); }) == Errc::LineOutsideDomain);
  CHECK(code_of([&] { partition_by_line(r, 1, 4); }) == Errc::LineOutsideDomain);

  const auto dbl = build_interval(2000, 2.0, BC::Dirichlet, BC::Neumann);
  const auto pd = partition_by_line(dbl, 0, 1000);
  CHECK(dbl.position(pd.sigma[0])[0] == doctest::Approx(1.0));
}

TEST_CASE("partition_by_sign") {
  const auto iv = build_interval(2, 1.0, BC::Neumann, BC::Neumann);
  // Sign changes need a zero vertex in between; Neumann vertices may not be zero.
  const std::vector<double> ok{1.0, 0.0, -1.0};
  const auto p = partition_by_sign(iv, ok, 1e-8);
  CHECK(p.sigma == std::vector<Index>{1});
  CHECK(p.at(0) == Side::Omega1);
  CHECK(p.at(2) == Side::Omega2);

  const std::vector<double> bad{1.0, 0.5, -1.0};
  const auto iv4 = build_interval(2, 1.0, BC::Neumann, BC::Neumann);
  CHECK(code_of([&] { partition_by_sign(iv4, bad, 1e-8); }) == Errc::SignChangeWithoutSeparator);

  // Mode (1,2) of the Dirichlet rectangle on a grid with ny even vanishes on
  // the horizontal midline.
  const int nx = 10, ny = 8;
  const auto r = build_rectangle(nx, ny, 1.0, 0.8, SideConditions::all(BC::Dirichlet));
  std::vector<double> mode(static_cast<std::size_t>(r.lattice_size()), 0.0);
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      mode[static_cast<std::size_t>(r.lattice_index(i, j))] =
          std::sin(M_PI * i / nx) * std::sin(2.0 * M_PI * j / ny);
    }
  }
  const auto pm = partition_by_sign(r, mode, 1e-12);
  CHECK(pm.sigma.size() == static_cast<std::size_t>(nx - 1));
  for (const Index s : pm.sigma) CHECK(r.coords(s)[1] == ny / 2);
  CHECK(count_cross_edges(r, pm) == 0);
}

TEST_CASE("periodic identification and unrolling") {
  const auto iv = build_interval(10, 1.0, BC::Periodic, BC::Periodic);
  CHECK(code_of([&] { iv.validate(); }) == Errc::UnpairedFace);
  const auto circle = periodic_identification(iv, 0);
  CHECK(circle.nodes().size() == 10);
  CHECK(circle.representative(10) == 0);
  CHECK(circle.gamma1() == std::vector<Index>{0});
  CHECK(circle.gamma2() == std::vector<Index>{10});
  const auto unrolled = unroll(circle, BC::Dirichlet, BC::Dirichlet);
  CHECK(unrolled.nodes().size() == circle.nodes().size() + circle.gamma1().size());
  CHECK(unrolled.kind(0) == VertexKind::Dirichlet);
  CHECK(unrolled.kind(10) == VertexKind::Dirichlet);

  const auto dirichlet_left = build_interval(10, 1.0, BC::Dirichlet, BC::Dirichlet);
  CHECK(code_of([&] { periodic_identification(dirichlet_left, 0); }) == Errc::FaceAlreadyLabeled);

  const auto sq = build_rectangle(5, 4, 1.0, 1.0, SideConditions::all(BC::Periodic));
  const auto once = periodic_identification(sq, 0);
  CHECK(code_of([&] { once.validate(); }) == Errc::UnpairedFace);
  const auto torus = periodic_identification(once, 1);
  torus.validate();
  CHECK(torus.nodes().size() == 20);
  CHECK(torus.free_nodes().size() == 20);
  CHECK(torus.gamma1().size() == 5 + 4 - 1);
  const auto flat = unroll(torus, BC::Neumann, BC::Dirichlet);
  CHECK(flat.nodes().size() == torus.nodes().size() + torus.gamma2().size());
  CHECK(code_of([&] { partition_by_line(torus, 0, 2); }) == Errc::PeriodicMapPresent);

  // Cylinder: one periodic axis, Dirichlet on the other; Gamma1 <-> Gamma2 is a bijection.
  SideConditions cyl{BC::Periodic, BC::Periodic, BC::Dirichlet, BC::Dirichlet};
  const auto cylinder = periodic_identification(build_rectangle(6, 5, 1.0, 1.0, cyl), 0);
  CHECK(cylinder.gamma1().size() == cylinder.gamma2().size());
  CHECK(cylinder.gamma1().size() == 4);
  const auto cyl_unrolled = unroll(cylinder, BC::Neumann, BC::Neumann);
  CHECK(cyl_unrolled.free_nodes().size() == cylinder.free_nodes().size() + cylinder.gamma1().size());
}

TEST_CASE("property: line partitions are separators; swapping orientation swaps sides") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int nx = testsupport::uniform_int(rng, 2, 30);
    const int ny = testsupport::uniform_int(rng, 2, 30);
    const auto d = build_rectangle(nx, ny, 1.0, 1.0, SideConditions::all(BC::Dirichlet));
    const int axis = testsupport::uniform_int(rng, 0, 1);
    const int index = testsupport::uniform_int(rng, 1, d.cells(axis) - 1);
    const auto p = partition_by_line(d, axis, index, true);
    const auto q = partition_by_line(d, axis, index, false);
    CHECK(count_cross_edges(d, p) == 0);
    CHECK(p.sigma == q.sigma);
    const auto s = p.swapped();
    CHECK(s.side == q.side);
  }
}

TEST_CASE("property: random sign fields either separate or are rejected") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = testsupport::uniform_int(rng, 3, 12);
    const auto d = build_rectangle(n, n, 1.0, 1.0, SideConditions::all(BC::Dirichlet));
    std::vector<double> values(static_cast<std::size_t>(d.lattice_size()));
    for (double& v : values) {
      const int k = testsupport::uniform_int(rng, 0, 4);
      v = k == 0 ? 0.0 : (k <= 2 ? 1.0 : -1.0);
    }
    try {
      const auto p = partition_by_sign(d, values, 1e-12);
      CHECK(count_cross_edges(d, p) == 0);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::SignChangeWithoutSeparator);
    }
  }
}
