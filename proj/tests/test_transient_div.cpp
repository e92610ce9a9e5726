#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "hallmhd/error.hpp"
#include "hallmhd/transient_div.hpp"

using namespace hallmhd;

namespace {

const double pi = 3.14159265358979323846;

// vector potential whose curl is the initial velocity; tangential trace zero
Eigen::VectorXd velocity_potential(const Eigen::VectorXd& x) {
  Eigen::Vector3d v{std::sin(pi * x[1]) * std::sin(pi * x[2]) / pi,
                    std::sin(pi * x[0]) * std::sin(pi * x[2]) / pi,
                    std::sin(pi * x[0]) * std::sin(pi * x[1]) / pi};
  return Eigen::VectorXd(v);
}

Eigen::VectorXd planar_potential(const Eigen::VectorXd& x) {
  Eigen::Vector3d v{0.0, 0.0, -std::sin(pi * x[0]) * std::sin(pi * x[1]) / pi};
  return Eigen::VectorXd(v);
}

Params ideal_params() {
  Params prm;
  prm.Re = prm.Re_m = std::numeric_limits<double>::infinity();
  prm.S = 1.0;
  prm.R_H = 0.5;
  prm.alpha = prm.beta = prm.R_H / prm.S;
  prm.dt = 0.05;
  return prm;
}

DivSchemeState curl_state(const DivScheme& sch) {
  return sch.initial_state(sch.initial_field_from_potential(velocity_potential),
                           sch.initial_field_from_potential(planar_potential));
}

double div_sup_norm(const Mesh& m, const Eigen::VectorXd& u) {
  const Eigen::VectorXd cellwise = m.d_div() * u;
  double mx = 0;
  for (long c = 0; c < m.num_cells(); ++c)
    mx = std::max(mx, std::abs(cellwise[c]) / m.cell_volume(static_cast<int>(c)));
  return mx;
}

Eigen::VectorXd random_vec(long n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i) v[i] = dist(gen);
  return v;
}

}  // namespace

TEST_CASE("a zero state advances to a zero state in one sweep") {
  const Mesh m = build_mesh(3, 2);
  const DivScheme sch(m, ideal_params());
  const DivSchemeState st = sch.initial_state(
      Eigen::VectorXd::Zero(sch.velocity_space().dim),
      Eigen::VectorXd::Zero(sch.magnetic_space().dim));
  const DivSchemeState next = sch.advance_step(st);
  CHECK(next.u.norm() == 0.0);
  CHECK(next.B.norm() == 0.0);
  CHECK(next.p.norm() == 0.0);
  CHECK(next.E.norm() == 0.0);
  CHECK(next.alpha.norm() == 0.0);
  CHECK(next.fixedpoint_iterations == 1);
}

TEST_CASE("potential-built initial data are exactly solenoidal and flux free") {
  const Mesh m = build_mesh(3, 4);
  const DivScheme sch(m, ideal_params());
  const Eigen::VectorXd u0 = sch.initial_field_from_potential(velocity_potential);
  CHECK(div_sup_norm(m, u0) < 1e-13);
  for (int i : sch.velocity_space().boundary_dofs_all()) CHECK(std::abs(u0[i]) < 1e-15);

  // both curls carry unit-order energy: |curl pot|^2 integrates to 3/2 and 1/2
  const Eigen::VectorXd B0 = sch.initial_field_from_potential(planar_potential);
  const double e = integrate_dot(sch.velocity_space(), u0, sch.velocity_space(), u0) +
                   integrate_dot(sch.magnetic_space(), B0, sch.magnetic_space(), B0);
  CHECK(std::abs(e - 2.0) < 0.05);
}

TEST_CASE("one step keeps the energy and the pointwise divergences") {
  const Mesh m = build_mesh(3, 6);
  const DivScheme sch(m, ideal_params());
  const auto recs = sch.run_simulation(curl_state(sch), 0.05);
  REQUIRE(recs.size() == 2);
  CHECK(std::abs(recs[1].energy - recs[0].energy) < 1e-11 * recs[0].energy);
  CHECK(recs[1].div_u_L2 < 1e-11);
  CHECK(recs[1].div_B_L2 < 1e-11);
  CHECK(std::abs(recs[0].H_M) < 1e-10);  // planar magnetic data
  CHECK(std::abs(recs[1].H_M) < 1e-10);
  CHECK(recs[0].potential_iterations > 0);
  CHECK(recs[1].iterations >= 1);
  CHECK(std::isfinite(recs[0].H_H));
  CHECK(std::isfinite(recs[1].H_H));
}

TEST_CASE("the stepped velocity is divergence free in the sup norm") {
  const Mesh m = build_mesh(3, 6);
  const DivScheme sch(m, ideal_params());
  DivSchemeState st = curl_state(sch);
  for (int k = 0; k < 2; ++k) {
    st = sch.advance_step(st);
    CHECK(div_sup_norm(m, st.u) < 1e-12);
    CHECK(div_sup_norm(m, st.B) < 1e-12);
  }
}

TEST_CASE("energy and magnetic helicity hold while the other helicities move") {
  const Mesh m = build_mesh(3, 4);
  const DivScheme sch(m, ideal_params());
  std::vector<double> seen;
  const auto recs = sch.run_simulation(curl_state(sch), 0.5, [&](const DiagnosticsRecord& r) {
    seen.push_back(r.time);
  });
  REQUIRE(recs.size() == 11);
  REQUIRE(seen.size() == 11);

  double dE = 0, dHM = 0, dHC = 0, dHF = 0;
  for (size_t k = 1; k < recs.size(); ++k) {
    CHECK(recs[k].time == doctest::Approx(0.05 * static_cast<double>(k)));
    CHECK(recs[k].div_u_L2 < 1e-11);
    CHECK(recs[k].div_B_L2 < 1e-11);
    CHECK(recs[k].iterations <= sch.params().max_fixedpoint);
    dE = std::max(dE, std::abs(recs[k].energy - recs[0].energy));
    dHM = std::max(dHM, std::abs(recs[k].H_M - recs[0].H_M));
    dHC = std::max(dHC, std::abs(recs[k].H_C - recs[0].H_C));
    dHF = std::max(dHF, std::abs(recs[k].H_F - recs[0].H_F));
  }
  CHECK(dE < 1e-10 * recs[0].energy);
  CHECK(dHM < 1e-10);
  CHECK(dHC > 1e-3);  // no cross helicity claim under the Hall term
  CHECK(dHF > 1e-3);  // fluid helicity is emitted but not an invariant
}

TEST_CASE("the zero Hall limit also conserves the cross helicity") {
  const Mesh m = build_mesh(3, 4);
  Params prm = ideal_params();
  prm.R_H = 0.0;
  prm.alpha = prm.beta = 0.0;
  const DivScheme sch(m, prm);
  const auto recs = sch.run_simulation(curl_state(sch), 0.5);
  double dHC = 0;
  for (size_t k = 1; k < recs.size(); ++k)
    dHC = std::max(dHC, std::abs(recs[k].H_C - recs[0].H_C));
  CHECK(dHC < 1e-10 * (1.0 + std::abs(recs[0].H_C)));
}

TEST_CASE("boundary conditions survive the step") {
  const Mesh m = build_mesh(3, 4);
  const DivScheme sch(m, ideal_params());
  const DivSchemeState next = sch.advance_step(curl_state(sch));
  for (int i : sch.velocity_space().boundary_dofs_all()) {
    CHECK(next.u[i] == 0.0);
    CHECK(std::abs(next.B[i]) < 1e-14);
  }
  for (int i : sch.auxiliary_space().boundary_dofs_all()) {
    CHECK(next.E[i] == 0.0);
    CHECK(next.j[i] == 0.0);
    CHECK(next.H[i] == 0.0);
    CHECK(next.omega[i] == 0.0);
    CHECK(next.U[i] == 0.0);
    CHECK(next.alpha[i] == 0.0);
  }
}

TEST_CASE("an exhausted sweep cap reports the increment history") {
  const Mesh m = build_mesh(3, 2);
  Params prm = ideal_params();
  prm.tol_fixedpoint = 1e-30;
  prm.max_fixedpoint = 2;
  const DivScheme sch(m, prm);
  CHECK_THROWS_WITH_AS((void)sch.advance_step(curl_state(sch)),
                       doctest::Contains("increments:"), FixedPointDivergence);
}

TEST_CASE("initial data are validated") {
  const Mesh m = build_mesh(3, 3);
  const DivScheme sch(m, ideal_params());
  const Eigen::VectorXd u0 = sch.initial_field_from_potential(velocity_potential);
  const Eigen::VectorXd B0 = sch.initial_field_from_potential(planar_potential);
  CHECK(sch.initial_state(u0, B0).time == 0.0);

  const long nf = sch.velocity_space().dim;
  CHECK_THROWS_AS((void)sch.initial_state(random_vec(nf, 3), B0), InconsistentField);
  CHECK_THROWS_AS((void)sch.initial_state(u0, random_vec(nf, 4)), InconsistentField);

  // solenoidal but with flux through the boundary
  const Eigen::VectorXd leaky = m.d_curl() * random_vec(sch.auxiliary_space().dim, 5);
  REQUIRE(div_l2_norm(sch.magnetic_space(), leaky) < 1e-12);
  CHECK_THROWS_AS((void)sch.initial_state(leaky, B0), InconsistentField);
  CHECK_THROWS_AS((void)sch.initial_state(u0, leaky), InconsistentField);

  CHECK_THROWS_AS((void)sch.initial_state(Eigen::VectorXd::Zero(3), B0), MissingCoefficient);
  CHECK_THROWS_AS((void)sch.initial_state(u0, Eigen::VectorXd::Zero(3)), MissingCoefficient);

  const Mesh flat = build_mesh(2, 3);
  CHECK_THROWS_AS(DivScheme(flat, ideal_params()), InvalidArgument);
}
