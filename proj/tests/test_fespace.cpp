#include "doctest.h"
#include "hallmhd/error.hpp"
#include "hallmhd/fespace.hpp"

#include <cmath>

using namespace hallmhd;

namespace {

using Vec = Eigen::VectorXd;

Vec v3(double a, double b, double c) {
  Vec r(3);
  r << a, b, c;
  return r;
}

Vec v2(double a, double b) {
  Vec r(2);
  r << a, b;
  return r;
}

Vec v1(double a) {
  Vec r(1);
  r << a;
  return r;
}

// largest pointwise defect of the interpolant against the field over all
// quadrature points of all cells
double interp_error(const FeSpace& sp, const FieldFn& f) {
  const Vec coef = interpolate(sp, f);
  const QuadRule qr = quad_simplex(sp.mesh->dim, 4);
  double worst = 0;
  for (int c = 0; c < sp.mesh->num_cells(); ++c) {
    const BasisData basis = eval_basis(sp, c, qr);
    const Eigen::MatrixXd vals = eval_function(sp, coef, c, basis);
    const Eigen::MatrixXd pts = phys_points(*sp.mesh, c, qr);
    for (int q = 0; q < pts.rows(); ++q) {
      const Vec exact = f(pts.row(q).transpose());
      worst = std::max(worst, (vals.row(q).transpose() - exact).norm());
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("dof counts per family") {
  Mesh m = build_mesh(3, 2);
  CHECK(build_space(m, Family::P1).dim == m.nv);
  CHECK(build_space(m, Family::P2, 2).dim == m.nv + m.ne);
  CHECK(build_space(m, Family::VecP1).dim == 3 * m.nv);
  CHECK(build_space(m, Family::VecP2, 2).dim == 3 * (m.nv + m.ne));
  CHECK(build_space(m, Family::Edge).dim == m.ne);
  CHECK(build_space(m, Family::Face).dim == m.nf);
  CHECK(build_space(m, Family::DG0, 0).dim == m.num_cells());

  Mesh m2 = build_mesh(2, 2);
  CHECK(build_space(m2, Family::Face).dim == m2.ne);
  CHECK(build_space(m2, Family::Edge).dim == m2.ne);
}

TEST_CASE("unsupported degrees are rejected") {
  Mesh m = build_mesh(3, 1);
  CHECK_THROWS_AS(build_space(m, Family::P1, 3), UnsupportedElement);
  CHECK_THROWS_AS(build_space(m, Family::Edge, 2), UnsupportedElement);
  CHECK_THROWS_AS(build_space(m, Family::Face, 2), UnsupportedElement);
  CHECK_THROWS_AS(build_space(m, Family::DG0, 1), UnsupportedElement);
  CHECK_THROWS_AS(build_space(m, Family::P2, 1), UnsupportedElement);
}

TEST_CASE("interpolation reproduces fields inside each family's range") {
  Mesh m = build_mesh(3, 2);
  Mesh m2 = build_mesh(2, 2);

  FeSpace p1 = build_space(m, Family::P1);
  FeSpace p2 = build_space(m, Family::P2, 2);
  FeSpace vp1 = build_space(m, Family::VecP1);
  FeSpace vp2 = build_space(m, Family::VecP2, 2);
  FeSpace ned = build_space(m, Family::Edge);
  FeSpace rt = build_space(m, Family::Face);
  FeSpace dg = build_space(m, Family::DG0, 0);
  FeSpace p1_2 = build_space(m2, Family::P1);
  FeSpace ned2 = build_space(m2, Family::Edge);
  FeSpace rt2 = build_space(m2, Family::Face);

  // nodal families up to their polynomial degree
  CHECK(interp_error(p1, [](const Vec& x) { return v1(1 + 2 * x[0] - 3 * x[1] + x[2]); }) < 1e-12);
  CHECK(interp_error(p2, [](const Vec& x) {
          return v1(x[0] * x[0] + x[0] * x[1] - x[2] * x[2] + 0.5 * x[0] - 2);
        }) < 1e-12);
  CHECK(interp_error(vp1, [](const Vec& x) {
          return v3(1 + x[0], 2 - x[1], x[2] + 0.5 * x[0]);
        }) < 1e-12);
  CHECK(interp_error(vp2, [](const Vec& x) {
          return v3(x[0] * x[0], x[0] * x[1], x[1] * x[2] + x[2] * x[2]);
        }) < 1e-12);
  CHECK(interp_error(p1_2, [](const Vec& x) { return v1(3 * x[0] - x[1]); }) < 1e-12);

  // tangentially continuous family: constants and a + b cross x
  CHECK(interp_error(ned, [](const Vec&) { return v3(1, 2, 3); }) < 1e-12);
  const Vec b = v3(1.0, -2.0, 0.5);
  CHECK(interp_error(ned, [&](const Vec& x) {
          return v3(0.3 + b[1] * x[2] - b[2] * x[1], -1.0 + b[2] * x[0] - b[0] * x[2],
                    0.8 + b[0] * x[1] - b[1] * x[0]);
        }) < 1e-12);
  CHECK(interp_error(ned2, [](const Vec& x) { return v2(1 - 0.7 * x[1], -2 + 0.7 * x[0]); }) <
        1e-12);

  // normally continuous family: constants and the radial field
  CHECK(interp_error(rt, [](const Vec&) { return v3(3, -1, 2); }) < 1e-12);
  CHECK(interp_error(rt, [](const Vec& x) {
          return v3(1 + 0.7 * x[0], -2 + 0.7 * x[1], 0.5 + 0.7 * x[2]);
        }) < 1e-12);
  CHECK(interp_error(rt2, [](const Vec& x) { return v2(0.7 * x[0] - 1, 0.7 * x[1] + 2); }) <
        1e-12);

  CHECK(interp_error(dg, [](const Vec&) { return v1(4.2); }) < 1e-13);

  // and a control: a quadratic is not reproduced by degree-1 nodal elements
  CHECK(interp_error(p1, [](const Vec& x) { return v1(x[0] * x[0]); }) > 1e-3);
}

TEST_CASE("partition of unity at quadrature points") {
  Mesh m = build_mesh(3, 1);
  const QuadRule qr = quad_tetrahedron(3);
  for (Family fam : {Family::P1, Family::P2}) {
    FeSpace sp = build_space(m, fam, fam == Family::P2 ? 2 : 1);
    for (int c = 0; c < m.num_cells(); ++c) {
      const BasisData basis = eval_basis(sp, c, qr);
      for (int q = 0; q < qr.points.rows(); ++q) {
        double s = 0;
        for (int i = 0; i < sp.ndof_cell; ++i) s += basis.val(q * sp.ndof_cell + i, 0);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("boundary dof extraction") {
  Mesh m = build_mesh(3, 2);
  FeSpace p1 = build_space(m, Family::P1);
  CHECK(p1.boundary_dofs_all().size() == 26);  // all but the center vertex
  FeSpace vp1 = build_space(m, Family::VecP1);
  CHECK(vp1.boundary_dofs_all().size() == 3 * 26);

  Mesh m1 = build_mesh(3, 1);
  FeSpace ned = build_space(m1, Family::Edge);
  CHECK(ned.boundary_dofs_all().size() == 18);  // only the body diagonal is interior
  FeSpace rt = build_space(m1, Family::Face);
  CHECK(rt.boundary_dofs_all().size() == 12);
  FeSpace p2 = build_space(m1, Family::P2, 2);
  CHECK(p2.boundary_dofs_all().size() == 8 + 18);
  FeSpace dg = build_space(m1, Family::DG0, 0);
  CHECK(dg.boundary_dofs_all().empty());

  Mesh m2 = build_mesh(2, 2);
  FeSpace q1 = build_space(m2, Family::P1);
  CHECK(q1.boundary_dofs({XMIN}).size() == 3);
  CHECK(q1.boundary_dofs({XMIN, XMAX, YMIN, YMAX}).size() == 8);
}

TEST_CASE("boundary dofs cover exactly the edges inside the named part") {
  // zeroing the XMIN dofs of an interpolant kills the tangential trace there:
  // every edge contained in x=0 must be in the set, and no interior edge is
  Mesh m = build_mesh(3, 2);
  FeSpace ned = build_space(m, Family::Edge);
  // chosen so the circulation is nonzero along every edge direction the
  // subdivision produces
  Eigen::VectorXd coef = interpolate(ned, [](const Vec&) { return v3(1, 0.3, 0.07); });
  for (int d : ned.boundary_dofs({XMIN})) coef[d] = 0;

  for (long e = 0; e < m.edges.rows(); ++e) {
    const bool on_face =
        m.verts(m.edges(e, 0), 0) < 1e-12 && m.verts(m.edges(e, 1), 0) < 1e-12;
    if (on_face)
      CHECK(coef[m.edge_gid[e]] == 0.0);
    else
      CHECK(coef[m.edge_gid[e]] != 0.0);
  }
}

TEST_CASE("interpolation commutes with the differential operators") {
  Mesh m = build_mesh(3, 2);
  FeSpace p1 = build_space(m, Family::P1);
  FeSpace ned = build_space(m, Family::Edge);
  FeSpace rt = build_space(m, Family::Face);
  FeSpace dg = build_space(m, Family::DG0, 0);

  // gradient path: edge differences of the hat interpolant of x equal the
  // circulations of the constant field e_x
  Eigen::VectorXd px = interpolate(p1, [](const Vec& x) { return v1(x[0]); });
  Eigen::VectorXd ex = interpolate(ned, [](const Vec&) { return v3(1, 0, 0); });
  CHECK((m.d_grad() * px - ex).lpNorm<Eigen::Infinity>() < 1e-13);

  // curl path for a polynomial field
  Eigen::VectorXd fc = interpolate(ned, [](const Vec& x) {
    return v3(x[1] * x[2], x[0] * x[0], x[0] * x[1]);
  });
  Eigen::VectorXd curl_f = interpolate(rt, [](const Vec& x) {
    return v3(x[0], 0.0, 2 * x[0] - x[2]);
  });
  CHECK((m.d_curl() * fc - curl_f).lpNorm<Eigen::Infinity>() < 1e-12);

  // divergence path: a solenoidal field has exactly zero flux imbalance
  Eigen::VectorXd bf = interpolate(rt, [](const Vec& x) { return v3(x[1], x[2], x[0]); });
  CHECK((m.d_div() * bf).lpNorm<Eigen::Infinity>() < 1e-13);

  // and a source field balances against the cell averages of its divergence
  Eigen::VectorXd rad = interpolate(rt, [](const Vec& x) { return v3(x[0], x[1], x[2]); });
  Eigen::VectorXd divavg = interpolate(dg, [](const Vec&) { return v1(3.0); });
  Eigen::VectorXd expected(m.num_cells());
  for (int c = 0; c < m.num_cells(); ++c) expected[c] = m.cell_volume(c) * divavg[c];
  CHECK((m.d_div() * rad - expected).lpNorm<Eigen::Infinity>() < 1e-13);

  // planar rotation: circulation imbalance equals the cell integral of the
  // scalar curl
  Mesh m2 = build_mesh(2, 2);
  FeSpace ned2 = build_space(m2, Family::Edge);
  FeSpace dg2 = build_space(m2, Family::DG0, 0);
  Eigen::VectorXd f2 = interpolate(ned2, [](const Vec& x) {
    return v2(-x[1] * x[1], x[0] * x[1]);
  });
  Eigen::VectorXd curl_avg = interpolate(dg2, [](const Vec& x) { return v1(3 * x[1]); });
  Eigen::VectorXd cexp(m2.num_cells());
  for (int c = 0; c < m2.num_cells(); ++c) cexp[c] = m2.cell_volume(c) * curl_avg[c];
  CHECK((m2.d_curl() * f2 - cexp).lpNorm<Eigen::Infinity>() < 1e-13);
}

TEST_CASE("missing coefficient size is reported") {
  Mesh m = build_mesh(2, 1);
  FeSpace p1 = build_space(m, Family::P1);
  const QuadRule qr = quad_triangle(2);
  const BasisData basis = eval_basis(p1, 0, qr);
  Eigen::VectorXd bad(p1.dim - 1);
  bad.setZero();
  CHECK_THROWS_AS(eval_function(p1, bad, 0, basis), MissingCoefficient);
}
