#include "doctest.h"
#include "hallmhd/error.hpp"
#include "hallmhd/mesh.hpp"

#include <set>

using namespace hallmhd;

TEST_CASE("entity counts on the unit cells") {
  Mesh m2 = build_mesh(2, 1);
  CHECK(m2.nv == 4);
  CHECK(m2.ne == 5);
  CHECK(m2.num_cells() == 2);

  Mesh m3 = build_mesh(3, 1);
  CHECK(m3.nv == 8);
  CHECK(m3.ne == 19);
  CHECK(m3.nf == 18);
  CHECK(m3.num_cells() == 6);
  // Euler characteristic of the solid cube
  CHECK(m3.nv - m3.ne + m3.nf - m3.num_cells() == 1);
}

TEST_CASE("entity counts scale with refinement") {
  for (int n : {2, 3}) {
    Mesh m = build_mesh(3, n);
    long N = n;
    CHECK(m.nv == (N + 1) * (N + 1) * (N + 1));
    CHECK(m.ne == 3 * N * (N + 1) * (N + 1) + 3 * N * N * (N + 1) + N * N * N);
    CHECK(m.nf == (24 * N * N * N + 12 * N * N) / 2);
    CHECK(m.num_cells() == 6 * N * N * N);
    CHECK(m.nv - m.ne + m.nf - m.num_cells() == 1);
  }
}

TEST_CASE("cell volumes tile the box") {
  for (int dim : {2, 3})
    for (int n : {1, 2, 4}) {
      Mesh m = build_mesh(dim, n);
      double vol = 0;
      for (int c = 0; c < m.num_cells(); ++c) {
        CHECK(m.cell_volume(c) > 0);
        vol += m.cell_volume(c);
      }
      CHECK(vol == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("set_box rescales volumes and coordinates") {
  Mesh m = build_mesh(2, 2);
  m.set_box({-1.0, -1.0, 0.0}, {1.0, 1.0, 0.0});
  CHECK(m.verts.col(0).minCoeff() == doctest::Approx(-1.0));
  CHECK(m.verts.col(0).maxCoeff() == doctest::Approx(1.0));
  double vol = 0;
  for (int c = 0; c < m.num_cells(); ++c) vol += m.cell_volume(c);
  CHECK(vol == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("composite incidence vanishes identically") {
  for (int n : {1, 2, 4}) {
    Mesh m2 = build_mesh(2, n);
    CHECK((m2.d_curl() * m2.d_grad()).norm() == 0.0);

    Mesh m3 = build_mesh(3, n);
    CHECK((m3.d_curl() * m3.d_grad()).norm() == 0.0);
    CHECK((m3.d_div() * m3.d_curl()).norm() == 0.0);
  }
  Mesh mp = build_mesh(2, 3, true);
  CHECK((mp.d_curl() * mp.d_grad()).norm() == 0.0);
}

TEST_CASE("incidence accessor and its range checks") {
  Mesh m3 = build_mesh(3, 1);
  CHECK(m3.incidence(1).rows() == m3.ne);
  CHECK(m3.incidence(1).cols() == m3.nv);
  CHECK(m3.incidence(2).rows() == m3.nf);
  CHECK(m3.incidence(3).rows() == 6);
  CHECK(m3.incidence(3).cols() == 18);
  CHECK_THROWS_AS(m3.incidence(0), InvalidArgument);
  CHECK_THROWS_AS(m3.incidence(4), InvalidArgument);

  Mesh m2 = build_mesh(2, 2);
  CHECK(m2.incidence(2).rows() == m2.num_cells());
  CHECK_THROWS_AS(m2.incidence(3), InvalidArgument);
}

TEST_CASE("boundary facet markers") {
  Mesh m3 = build_mesh(3, 1);
  int marked = 0;
  for (int f = 0; f < m3.num_facets(); ++f)
    if (m3.facet_marker[f] >= 0) ++marked;
  CHECK(marked == 12);  // two triangles per box side

  Mesh m2 = build_mesh(2, 2);
  CHECK(m2.ne == 16);
  int bnd = 0;
  for (int e = 0; e < m2.num_facets(); ++e)
    if (m2.facet_marker[e] >= 0) ++bnd;
  CHECK(bnd == 8);
}

TEST_CASE("periodic identification removes the x seam") {
  Mesh m = build_mesh(2, 2, true);
  CHECK(m.nv == 6);  // 3 rows of 2 distinct x stations
  std::set<int> markers;
  for (int e = 0; e < m.num_facets(); ++e)
    if (m.facet_marker[e] >= 0) markers.insert(m.facet_marker[e]);
  CHECK(markers == std::set<int>{YMIN, YMAX});
  // the identified mesh still tiles the unit square
  double vol = 0;
  for (int c = 0; c < m.num_cells(); ++c) vol += m.cell_volume(c);
  CHECK(vol == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("invalid construction requests") {
  CHECK_THROWS_AS(build_mesh(2, 0), InvalidArgument);
  CHECK_THROWS_AS(build_mesh(4, 2), InvalidArgument);
  CHECK_THROWS_AS(build_mesh(1, 2), InvalidArgument);
  CHECK_THROWS_AS(build_mesh(3, 2, true), InvalidArgument);
  CHECK_THROWS_AS(build_mesh(2, 1, true), InvalidArgument);
}

TEST_CASE("barycentric gradients sum to zero") {
  Mesh m = build_mesh(3, 2);
  for (int c : {0, 7, 25}) {
    Eigen::MatrixXd g = m.grad_lambda(c);
    REQUIRE(g.rows() == 4);
    CHECK(g.colwise().sum().norm() < 1e-13);
  }
}
