#include "doctest.h"
#include "hallmhd/error.hpp"
#include "hallmhd/forms.hpp"

#include <cmath>
#include <random>

using namespace hallmhd;

namespace {

using Vec = Eigen::VectorXd;
using V3 = Eigen::Vector3d;

Vec random_vec(long n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist;
  Vec v(n);
  for (long i = 0; i < n; ++i) v[i] = dist(gen);
  return v;
}

State random_state(const Spaces& sp, unsigned seed) {
  State st;
  st.u = random_vec(sp.u.dim, seed);
  st.p = random_vec(sp.p.dim, seed + 1);
  st.E = random_vec(sp.E.dim, seed + 2);
  st.B = random_vec(sp.B.dim, seed + 3);
  st.j = random_vec(sp.j.dim, seed + 4);
  return st;
}

double rel_diff(const SpMat& A, const SpMat& B) {
  return (Eigen::MatrixXd(A) - Eigen::MatrixXd(B)).norm() /
         std::max(Eigen::MatrixXd(A).norm(), 1e-300);
}

// central finite differences for the manufactured-field cross checks
V3 fd_partial(const FieldFn& f, const Vec& x, int k, double h = 1e-5) {
  Vec xp = x, xm = x;
  xp[k] += h;
  xm[k] -= h;
  return (V3(f(xp)) - V3(f(xm))) / (2 * h);
}

double fd_partial_scalar(const FieldFn& f, const Vec& x, int k, double h = 1e-5) {
  Vec xp = x, xm = x;
  xp[k] += h;
  xm[k] -= h;
  return (f(xp)[0] - f(xm)[0]) / (2 * h);
}

V3 fd_curl(const FieldFn& f, const Vec& x) {
  const V3 dx = fd_partial(f, x, 0), dy = fd_partial(f, x, 1), dz = fd_partial(f, x, 2);
  return V3(dy[2] - dz[1], dz[0] - dx[2], dx[1] - dy[0]);
}

double fd_div(const FieldFn& f, const Vec& x) {
  return fd_partial(f, x, 0)[0] + fd_partial(f, x, 1)[1] + fd_partial(f, x, 2)[2];
}

V3 fd_laplacian(const FieldFn& f, const Vec& x, double h = 1e-4) {
  V3 lap = V3::Zero();
  const V3 fc = V3(f(x));
  for (int k = 0; k < 3; ++k) {
    Vec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    lap += (V3(f(xp)) - 2 * fc + V3(f(xm))) / (h * h);
  }
  return lap;
}

}  // namespace

TEST_CASE("packed field layout") {
  Mesh m = build_mesh(3, 1);
  Spaces sp = Spaces::build(m);
  CHECK(sp.off_u == 0);
  CHECK(sp.off_p == sp.u.dim);
  CHECK(sp.off_E == sp.off_p + sp.p.dim);
  CHECK(sp.off_B == sp.off_E + sp.E.dim);
  CHECK(sp.off_j == sp.off_B + sp.B.dim);
  CHECK(sp.total == sp.off_j + sp.j.dim);
  CHECK(sp.u.dim == 3 * (m.nv + m.ne));
  CHECK(sp.E.dim == m.ne);
  CHECK(sp.B.dim == m.nf);

  State st = random_state(sp, 7);
  State rt = unpack(sp, pack(sp, st));
  CHECK((rt.u - st.u).norm() == 0);
  CHECK((rt.p - st.p).norm() == 0);
  CHECK((rt.E - st.E).norm() == 0);
  CHECK((rt.B - st.B).norm() == 0);
  CHECK((rt.j - st.j).norm() == 0);
  CHECK_THROWS_AS(unpack(sp, Vec::Zero(sp.total - 1)), InvalidArgument);

  Mesh m2 = build_mesh(2, 2);
  CHECK_THROWS_AS(Spaces::build(m2), InvalidArgument);
}

TEST_CASE("parameter validation") {
  Params prm;
  prm.validate();  // defaults are fine
  prm.Re = -1;
  CHECK_THROWS_AS(prm.validate(), InvalidArgument);
  prm.Re = 1;
  prm.dt = 0;
  CHECK_THROWS_AS(prm.validate(), InvalidArgument);
  prm.dt = 0.1;
  prm.gamma = -2;
  CHECK_THROWS_AS(prm.validate(), InvalidArgument);

  Params hy;
  hy.S = 2.0;
  hy.R_H = 1.0;
  hy.alpha = 1.0;
  hy.beta = 1.0 / 3.0;
  CHECK(std::abs(hy.hybrid_relation_residual()) < 1e-15);
}

TEST_CASE("operator set structure") {
  Mesh m = build_mesh(3, 1);
  Spaces sp = Spaces::build(m);
  Params prm;
  prm.Re = 2.0;
  prm.Re_m = 3.0;
  prm.S = 1.7;
  prm.R_H = 0.4;
  prm.gamma = 10.0;
  State w = random_state(sp, 31);

  OperatorSet pic = assemble_operator_set(sp, w, prm, Mode::Picard, TimeScheme::None);

  // Picard drops the derivative blocks with respect to B
  CHECK(pic.Ktil.nonZeros() == 0);
  CHECK(pic.Gtil.nonZeros() == 0);
  CHECK(pic.Ntil.nonZeros() == 0);

  // mass identities across the electric rows
  CHECK(rel_diff(pic.M, pic.P) == 0.0);
  CHECK(rel_diff(pic.L, SpMat(prm.inv_Re_m() * pic.M)) < 1e-15);

  // adjoint pairs
  CHECK(rel_diff(pic.A, SpMat(pic.D.transpose())) < 1e-13);
  CHECK(rel_diff(pic.K, SpMat(prm.S * pic.G.transpose())) < 1e-12);

  // Hall block is skew
  for (unsigned s = 0; s < 20; ++s) {
    Vec x = random_vec(sp.j.dim, 600 + s);
    CHECK(std::abs(x.dot(pic.N * x)) <=
          1e-12 * Eigen::MatrixXd(pic.N).norm() * x.squaredNorm());
  }

  // empty frozen state is rejected
  CHECK_THROWS_AS(assemble_operator_set(sp, State{}, prm, Mode::Picard, TimeScheme::None),
                  MissingCoefficient);
}

TEST_CASE("quadratic energy of the linearized system") {
  // pairing the Picard matrix with the sign-flipped test state must cancel
  // every coupling term and leave the dissipation functional, whatever state
  // the operators were frozen at
  Mesh m = build_mesh(3, 1);
  Spaces sp = Spaces::build(m);
  Params prm;
  prm.Re = 2.0;
  prm.Re_m = 5.0;
  prm.S = 0.8;
  prm.R_H = 0.6;
  prm.gamma = 3.0;

  State w = random_state(sp, 91);
  State st = random_state(sp, 97);
  const SpMat A = compose_system(sp, assemble_operator_set(sp, w, prm, Mode::Picard,
                                                           TimeScheme::None));
  Vec x = pack(sp, st);
  Vec xhat(sp.total);
  xhat.segment(sp.off_u, sp.u.dim) = st.u;
  xhat.segment(sp.off_p, sp.p.dim) = -st.p;
  xhat.segment(sp.off_E, sp.E.dim) = prm.S * st.E;
  xhat.segment(sp.off_B, sp.B.dim) = prm.S * st.B;
  xhat.segment(sp.off_j, sp.j.dim) = prm.S * st.j;

  const double quad = energy_quadratic(sp, st, prm);
  CHECK(std::abs(xhat.dot(A * x) - quad) <= 1e-10 * std::max(std::abs(quad), 1.0));
}

TEST_CASE("the Newton matrix is the exact derivative of the residual") {
  Mesh m = build_mesh(3, 1);
  Spaces sp = Spaces::build(m);
  Params prm;
  prm.S = 1.3;
  prm.R_H = 0.5;
  prm.gamma = 2.0;
  SourceTerms src;

  State st = random_state(sp, 301);
  Vec d = random_vec(sp.total, 302);
  d /= d.norm();

  const SpMat J = compose_system(sp, assemble_operator_set(sp, st, prm, Mode::Newton,
                                                           TimeScheme::None));
  const Vec r0 = assemble_residual(sp, st, nullptr, nullptr, prm, src, TimeScheme::None);

  const auto defect = [&](double eps) {
    State pert = unpack(sp, pack(sp, st) + eps * d);
    Vec r = assemble_residual(sp, pert, nullptr, nullptr, prm, src, TimeScheme::None);
    return (r - r0 - eps * (J * d)).norm();
  };

  // the nonlinearity is quadratic, so the defect is exactly O(eps^2)
  const double ratio = defect(0.1) / defect(0.05);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("time discretization scaling of the blocks") {
  Mesh m = build_mesh(3, 1);
  Spaces sp = Spaces::build(m);
  Params prm;
  prm.Re = 2.0;
  prm.gamma = 7.0;
  prm.dt = 0.2;
  State w = random_state(sp, 41);

  OperatorSet stat = assemble_operator_set(sp, w, prm, Mode::Picard, TimeScheme::None);
  OperatorSet eul = assemble_operator_set(sp, w, prm, Mode::Picard, TimeScheme::Euler);
  OperatorSet bdf = assemble_operator_set(sp, w, prm, Mode::Picard, TimeScheme::BDF2);
  OperatorSet cn = assemble_operator_set(sp, w, prm, Mode::Picard, TimeScheme::CN);

  const SpMat Mu = assemble_mass(sp.u);
  const SpMat Mb = assemble_mass(sp.B);
  const double idt = 1.0 / prm.dt;

  CHECK(rel_diff(eul.F, SpMat(stat.F + idt * Mu)) < 1e-13);
  CHECK(rel_diff(bdf.F, SpMat(stat.F + 1.5 * idt * Mu)) < 1e-13);
  CHECK(rel_diff(eul.C, SpMat(idt * Mb)) < 1e-14);
  CHECK(rel_diff(bdf.C, SpMat(1.5 * idt * Mb)) < 1e-14);
  CHECK(rel_diff(eul.D, stat.D) == 0.0);

  // trapezoidal weights: half the differential momentum terms, full mass and
  // grad-div augmentation, half the induction coupling
  const SpMat DD = assemble_div_div(sp.u, sp.u);
  CHECK(rel_diff(cn.F, SpMat(0.5 * SpMat(stat.F - prm.gamma * DD) + prm.gamma * DD + idt * Mu)) <
        1e-13);
  CHECK(rel_diff(cn.D, SpMat(0.5 * stat.D)) < 1e-14);
  CHECK(rel_diff(cn.K, SpMat(0.5 * stat.K)) < 1e-14);
  CHECK(rel_diff(cn.C, SpMat(idt * Mb)) < 1e-14);
  // algebraic rows keep full weight
  CHECK(rel_diff(cn.G, stat.G) == 0.0);
  CHECK(rel_diff(cn.L, stat.L) == 0.0);
  CHECK(rel_diff(cn.A, stat.A) == 0.0);
}

TEST_CASE("right-hand side history terms") {
  Mesh m = build_mesh(3, 1);
  Spaces sp = Spaces::build(m);
  Params prm;
  prm.dt = 0.1;
  SourceTerms src;  // all zero

  State o1 = random_state(sp, 51);
  State o2 = random_state(sp, 52);
  const SpMat Mu = assemble_mass(sp.u);
  const SpMat Mb = assemble_mass(sp.B);
  const double idt = 1.0 / prm.dt;

  Vec re = assemble_rhs(sp, prm, src, TimeScheme::Euler, &o1);
  CHECK((re.segment(sp.off_u, sp.u.dim) - idt * (Mu * o1.u)).norm() < 1e-13);
  CHECK((re.segment(sp.off_B, sp.B.dim) - idt * (Mb * o1.B)).norm() < 1e-13);
  CHECK(re.segment(sp.off_p, sp.p.dim).norm() == 0.0);
  CHECK(re.segment(sp.off_E, sp.E.dim).norm() == 0.0);
  CHECK(re.segment(sp.off_j, sp.j.dim).norm() == 0.0);

  Vec rb = assemble_rhs(sp, prm, src, TimeScheme::BDF2, &o1, &o2);
  CHECK((rb.segment(sp.off_u, sp.u.dim) - idt * (Mu * (2 * o1.u - 0.5 * o2.u))).norm() < 1e-13);

  CHECK_THROWS_AS(assemble_rhs(sp, prm, src, TimeScheme::Euler, nullptr), InvalidArgument);
  CHECK_THROWS_AS(assemble_rhs(sp, prm, src, TimeScheme::BDF2, &o1, nullptr), InvalidArgument);

  SourceTerms bad;
  bad.f = Vec::Zero(3);
  CHECK_THROWS_AS(assemble_rhs(sp, prm, bad, TimeScheme::None), InvalidArgument);

  // stationary: sources land on their own rows
  SourceTerms srcs;
  srcs.g3 = random_vec(sp.B.dim, 53);
  Vec rs = assemble_rhs(sp, prm, srcs, TimeScheme::None);
  CHECK((rs.segment(sp.off_B, sp.B.dim) - srcs.g3).norm() == 0.0);
  CHECK(rs.norm() == srcs.g3.norm());
}

TEST_CASE("residual vanishes only at a solution") {
  // a linear sanity case: with no sources and no flow the zero state solves
  // the stationary system
  Mesh m = build_mesh(3, 1);
  Spaces sp = Spaces::build(m);
  Params prm;
  SourceTerms src;
  State z = State::zero(sp);
  CHECK(assemble_residual(sp, z, nullptr, nullptr, prm, src, TimeScheme::None).norm() == 0.0);
  State nz = random_state(sp, 61);
  CHECK(assemble_residual(sp, nz, nullptr, nullptr, prm, src, TimeScheme::None).norm() > 1e-3);
}

TEST_CASE("boundary set bookkeeping") {
  Mesh m = build_mesh(3, 1);
  Spaces sp = Spaces::build(m);
  BcSet bc;
  Vec lift = random_vec(sp.u.dim, 71);
  std::vector<int> udofs = {3, 17, 40};
  bc.add(sp.off_u, udofs, lift);
  bc.add_zero(sp.off_p, {0});
  REQUIRE(bc.dofs.size() == 4);
  CHECK(bc.dofs[0] == 3);
  CHECK(bc.values[0] == lift[3]);
  CHECK(bc.values[1] == lift[17]);
  CHECK(bc.dofs[3] == sp.off_p);
  CHECK(bc.values[3] == 0.0);
}

TEST_CASE("manufactured fields satisfy their defining relations") {
  Params prm;
  prm.Re = 3.0;
  prm.Re_m = 2.0;
  prm.S = 1.5;
  prm.R_H = 0.7;
  MmsFields mf = mms_fields(prm);

  std::mt19937 gen(2024);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  for (int trial = 0; trial < 12; ++trial) {
    Vec x(3);
    x << unif(gen), unif(gen), unif(gen);

    // structural identities the method depends on
    CHECK(std::abs(fd_div(mf.u, x)) < 2e-6);
    CHECK(std::abs(fd_div(mf.B, x)) < 2e-6);
    CHECK(fd_curl(mf.E, x).norm() < 2e-6);

    // momentum source against a finite-difference reconstruction
    const V3 u = V3(mf.u(x)), B = V3(mf.B(x)), j = V3(mf.j(x));
    V3 conv = V3::Zero();
    for (int k = 0; k < 3; ++k) conv += u[k] * fd_partial(mf.u, x, k);
    const V3 gradp = V3(fd_partial_scalar(mf.p, x, 0), fd_partial_scalar(mf.p, x, 1),
                        fd_partial_scalar(mf.p, x, 2));
    const V3 f_fd =
        -prm.inv_Re() * fd_laplacian(mf.u, x) + conv - prm.S * j.cross(B) + gradp;
    CHECK((V3(mf.f(x)) - f_fd).norm() < 2e-5);

    // current-definition source
    const V3 g2_fd = j - fd_curl(mf.B, x);
    CHECK((V3(mf.g2(x)) - g2_fd).norm() < 2e-6);

    // Ohm-row source (purely algebraic)
    const V3 E = V3(mf.E(x));
    const V3 g4 = prm.inv_Re_m() * j - E - u.cross(B) + prm.R_H * j.cross(B);
    CHECK((V3(mf.g4(x)) - g4).norm() < 1e-13);
  }
}
