#include "hallmhd/forms.hpp"

#include <cmath>

#include "hallmhd/error.hpp"

namespace hallmhd {

void Params::validate() const {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0))  // NaN fails too
      throw InvalidArgument(std::string("Params: ") + name + " must be positive");
  };
  positive(Re, "Re");
  positive(Re_m, "Re_m");
  positive(S, "S");
  if (!(R_H >= 0)) throw InvalidArgument("Params: R_H must be nonnegative");
  if (!(gamma >= 0)) throw InvalidArgument("Params: gamma must be nonnegative");
  positive(dt, "dt");
  positive(tol_nonlinear, "tol_nonlinear");
  positive(tol_fixedpoint, "tol_fixedpoint");
  if (max_nonlinear < 1 || max_fixedpoint < 1)
    throw InvalidArgument("Params: iteration caps must be at least 1");
}

Spaces Spaces::build(const Mesh& mesh) {
  if (mesh.dim != 3) throw InvalidArgument("Spaces::build: the five-field system is 3D");
  Spaces sp;
  sp.mesh = &mesh;
  sp.u = build_space(mesh, Family::VecP2, 2);
  sp.p = build_space(mesh, Family::P1, 1);
  sp.E = build_space(mesh, Family::Edge, 1);
  sp.B = build_space(mesh, Family::Face, 1);
  sp.j = build_space(mesh, Family::Edge, 1);
  sp.off_u = 0;
  sp.off_p = sp.off_u + sp.u.dim;
  sp.off_E = sp.off_p + sp.p.dim;
  sp.off_B = sp.off_E + sp.E.dim;
  sp.off_j = sp.off_B + sp.B.dim;
  sp.total = sp.off_j + sp.j.dim;
  return sp;
}

State State::zero(const Spaces& sp) {
  State st;
  st.u = Eigen::VectorXd::Zero(sp.u.dim);
  st.p = Eigen::VectorXd::Zero(sp.p.dim);
  st.E = Eigen::VectorXd::Zero(sp.E.dim);
  st.B = Eigen::VectorXd::Zero(sp.B.dim);
  st.j = Eigen::VectorXd::Zero(sp.j.dim);
  return st;
}

Eigen::VectorXd pack(const Spaces& sp, const State& st) {
  Eigen::VectorXd x(sp.total);
  x.segment(sp.off_u, sp.u.dim) = st.u;
  x.segment(sp.off_p, sp.p.dim) = st.p;
  x.segment(sp.off_E, sp.E.dim) = st.E;
  x.segment(sp.off_B, sp.B.dim) = st.B;
  x.segment(sp.off_j, sp.j.dim) = st.j;
  return x;
}

State unpack(const Spaces& sp, const Eigen::VectorXd& x) {
  if (x.size() != sp.total) throw InvalidArgument("unpack: size mismatch");
  State st;
  st.u = x.segment(sp.off_u, sp.u.dim);
  st.p = x.segment(sp.off_p, sp.p.dim);
  st.E = x.segment(sp.off_E, sp.E.dim);
  st.B = x.segment(sp.off_B, sp.B.dim);
  st.j = x.segment(sp.off_j, sp.j.dim);
  return st;
}

namespace {

double dt_mass_coefficient(TimeScheme ts, double dt) {
  switch (ts) {
    case TimeScheme::None:
      return 0.0;
    case TimeScheme::Euler:
    case TimeScheme::CN:
      return 1.0 / dt;
    case TimeScheme::BDF2:
      return 1.5 / dt;
  }
  return 0.0;
}

}  // namespace

OperatorSet assemble_operator_set(const Spaces& sp, const State& frozen, const Params& prm,
                                  Mode mode, TimeScheme transient) {
  prm.validate();
  if (frozen.empty()) throw MissingCoefficient("assemble_operator_set: frozen state is empty");
  OperatorSet ops;
  ops.mode = mode;
  ops.transient = transient;
  const double th = transient == TimeScheme::CN ? 0.5 : 1.0;  // trapezoidal weight
  const double cdt = dt_mass_coefficient(transient, prm.dt);

  SpMat F = SpMat((prm.inv_Re() * th) * assemble_grad_grad(sp.u)) +
            SpMat(th * assemble_convection_skew(sp.u, sp.u, frozen.u)) +
            SpMat(prm.gamma * assemble_div_div(sp.u, sp.u));
  if (mode == Mode::Newton)
    F += SpMat(th * assemble_convection_newton(sp.u, sp.u, frozen.u));
  if (cdt > 0) F += SpMat(cdt * assemble_mass(sp.u));
  ops.F = std::move(F);

  const SpMat divp = assemble_div_pressure(sp.u, sp.p);
  ops.BT = SpMat(-divp.transpose());
  ops.Bm = SpMat(-divp);

  ops.K = SpMat((-prm.S * th) * assemble_cross_frozen(sp.j, sp.u, sp.B, frozen.B));
  ops.Ktil = mode == Mode::Newton
                 ? SpMat((prm.S * th) * assemble_cross_frozen(sp.B, sp.u, sp.j, frozen.j))
                 : SpMat(sp.u.dim, sp.B.dim);

  const SpMat Me = assemble_mass(sp.E);
  ops.M = Me;
  ops.L = SpMat(prm.inv_Re_m() * Me);
  ops.P = Me;
  ops.A = assemble_curl_test(sp.B, sp.E);   // (B, curl k)
  ops.D = SpMat(th * assemble_curl_trial(sp.E, sp.B));  // theta (curl E, C)
  ops.C = transient == TimeScheme::None ? assemble_div_div(sp.B, sp.B)
                                        : SpMat(cdt * assemble_mass(sp.B));

  ops.G = assemble_cross_frozen(sp.u, sp.E, sp.B, frozen.B);  // (u x B-, k)
  ops.N = SpMat(prm.R_H * assemble_cross_frozen(sp.j, sp.E, sp.B, frozen.B));
  ops.Gtil = mode == Mode::Newton ? assemble_cross_frozen(sp.B, sp.E, sp.u, frozen.u)
                                  : SpMat(sp.E.dim, sp.B.dim);
  ops.Ntil = mode == Mode::Newton
                 ? SpMat(-prm.R_H * assemble_cross_frozen(sp.B, sp.E, sp.j, frozen.j))
                 : SpMat(sp.E.dim, sp.B.dim);
  return ops;
}

SpMat compose_system(const Spaces& sp, const OperatorSet& ops) {
  BlockMatrix bm({sp.u.dim, sp.p.dim, sp.E.dim, sp.B.dim, sp.j.dim},
                 {sp.u.dim, sp.p.dim, sp.E.dim, sp.B.dim, sp.j.dim});
  bm.set(0, 0, ops.F);
  bm.set(0, 1, ops.BT);
  bm.set(0, 4, ops.K);
  bm.set(1, 0, ops.Bm);
  bm.set(2, 3, SpMat(-ops.A));
  bm.set(2, 4, ops.M);
  bm.set(3, 2, ops.D);
  bm.set(3, 3, ops.C);
  bm.set(4, 0, SpMat(-ops.G));
  bm.set(4, 2, SpMat(-ops.P));
  bm.set(4, 4, SpMat(ops.L + ops.N));
  if (ops.mode == Mode::Newton) {
    bm.set(0, 3, ops.Ktil);
    bm.set(4, 3, SpMat(ops.Gtil + ops.Ntil));
  }
  return bm.to_sparse();
}

Eigen::VectorXd assemble_rhs(const Spaces& sp, const Params& prm, const SourceTerms& src,
                             TimeScheme transient, const State* old1, const State* old2) {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sp.total);
  const auto put = [&](const Eigen::VectorXd& v, long off, long n, const char* name) {
    if (v.size() == 0) return;
    if (v.size() != n)
      throw InvalidArgument(std::string("assemble_rhs: source ") + name + " has wrong size");
    rhs.segment(off, n) += v;
  };
  put(src.f, sp.off_u, sp.u.dim, "f");
  put(src.g2, sp.off_E, sp.E.dim, "g2");
  put(src.g3, sp.off_B, sp.B.dim, "g3");
  put(src.g4, sp.off_j, sp.j.dim, "g4");
  if (transient == TimeScheme::None) return rhs;

  if (!old1) throw InvalidArgument("assemble_rhs: transient scheme needs the previous state");
  const SpMat Mu = assemble_mass(sp.u);
  const SpMat Mb = assemble_mass(sp.B);
  const double idt = 1.0 / prm.dt;
  switch (transient) {
    case TimeScheme::Euler:
      rhs.segment(sp.off_u, sp.u.dim) += idt * (Mu * old1->u);
      rhs.segment(sp.off_B, sp.B.dim) += idt * (Mb * old1->B);
      break;
    case TimeScheme::BDF2: {
      if (!old2) throw InvalidArgument("assemble_rhs: BDF2 needs two history states");
      rhs.segment(sp.off_u, sp.u.dim) += idt * (Mu * (2.0 * old1->u - 0.5 * old2->u));
      rhs.segment(sp.off_B, sp.B.dim) += idt * (Mb * (2.0 * old1->B - 0.5 * old2->B));
      break;
    }
    case TimeScheme::CN: {
      rhs.segment(sp.off_u, sp.u.dim) += idt * (Mu * old1->u);
      rhs.segment(sp.off_B, sp.B.dim) += idt * (Mb * old1->B);
      // explicit half of the differential terms
      Eigen::VectorXd mom = prm.inv_Re() * (assemble_grad_grad(sp.u) * old1->u);
      mom += assemble_convection_load(sp.u, sp.u, old1->u);
      mom -= prm.S * assemble_cross_load(sp.u, sp.j, old1->j, sp.B, old1->B);
      rhs.segment(sp.off_u, sp.u.dim) -= 0.5 * mom;
      rhs.segment(sp.off_B, sp.B.dim) -=
          0.5 * (assemble_curl_trial(sp.E, sp.B) * old1->E);
      break;
    }
    case TimeScheme::None:
      break;
  }
  return rhs;
}

Eigen::VectorXd assemble_residual(const Spaces& sp, const State& st, const State* old1,
                                  const State* old2, const Params& prm, const SourceTerms& src,
                                  TimeScheme transient) {
  if (transient != TimeScheme::None && !old1)
    throw InvalidArgument("assemble_residual: transient scheme needs the previous state");
  // the Picard matrix frozen at the state reproduces every nonlinear term
  // when applied to that same state
  const OperatorSet ops = assemble_operator_set(sp, st, prm, Mode::Picard, transient);
  const SpMat A = compose_system(sp, ops);
  return A * pack(sp, st) - assemble_rhs(sp, prm, src, transient, old1, old2);
}

void BcSet::add(long offset, const std::vector<int>& local_dofs, const Eigen::VectorXd& lifting) {
  const long n0 = values.size();
  values.conservativeResize(n0 + static_cast<long>(local_dofs.size()));
  for (size_t k = 0; k < local_dofs.size(); ++k) {
    dofs.push_back(static_cast<int>(offset) + local_dofs[k]);
    values[n0 + static_cast<long>(k)] = lifting[local_dofs[k]];
  }
}

void BcSet::add_zero(long offset, const std::vector<int>& local_dofs) {
  const long n0 = values.size();
  values.conservativeResize(n0 + static_cast<long>(local_dofs.size()));
  for (size_t k = 0; k < local_dofs.size(); ++k) {
    dofs.push_back(static_cast<int>(offset) + local_dofs[k]);
    values[n0 + static_cast<long>(k)] = 0.0;
  }
}

double energy_quadratic(const Spaces& sp, const State& st, const Params& prm) {
  double q = prm.inv_Re() * st.u.dot(assemble_grad_grad(sp.u) * st.u);
  q += prm.gamma * st.u.dot(assemble_div_div(sp.u, sp.u) * st.u);
  q += prm.S * st.B.dot(assemble_div_div(sp.B, sp.B) * st.B);
  q += prm.S * prm.inv_Re_m() * st.j.dot(assemble_mass(sp.j) * st.j);
  return q;
}

double energy_identity_residual(const Spaces& sp, const State& st, const Params& prm,
                                const SourceTerms& src, const BcSet& bc) {
  const OperatorSet ops = assemble_operator_set(sp, st, prm, Mode::Picard, TimeScheme::None);
  const SpMat A = compose_system(sp, ops);
  const Eigen::VectorXd rhs = assemble_rhs(sp, prm, src, TimeScheme::None);
  const Eigen::VectorXd r = A * pack(sp, st) - rhs;

  Eigen::VectorXd xhat(sp.total);
  xhat.segment(sp.off_u, sp.u.dim) = st.u;
  xhat.segment(sp.off_p, sp.p.dim) = -st.p;
  xhat.segment(sp.off_E, sp.E.dim) = prm.S * st.E;
  xhat.segment(sp.off_B, sp.B.dim) = prm.S * st.B;
  xhat.segment(sp.off_j, sp.j.dim) = prm.S * st.j;

  double reaction = 0;  // work done through the constrained rows
  for (int d : bc.dofs) reaction += xhat[d] * r[d];
  const double quad = energy_quadratic(sp, st, prm);
  const double work = xhat.dot(rhs) + reaction;
  const double scale = std::max({std::abs(quad), std::abs(work), 1e-30});
  return std::abs(quad - work) / scale;
}

MmsFields mms_fields(const Params& prm) {
  using V = Eigen::VectorXd;
  using V3 = Eigen::Vector3d;
  const double iRe = prm.inv_Re(), iRm = prm.inv_Re_m(), S = prm.S, RH = prm.R_H;

  MmsFields m;
  m.u = [](const V& x) -> V {
    return V3(std::cos(x[1]), std::sin(x[2]), std::exp(x[0]));
  };
  m.p = [](const V& x) -> V {
    V v(1);
    v[0] = x[1] * std::sin(x[0]) * std::exp(x[2]);
    return v;
  };
  m.B = [](const V& x) -> V {
    return V3(std::sin(x[2]), std::sin(x[0]), std::cos(x[1]));
  };
  m.E = [](const V& x) -> V {
    return V3(x[0] * std::sin(x[0]), std::exp(x[1]), x[2] * x[2] * x[2]);
  };
  m.j = [](const V& x) -> V {
    return V3(std::cos(x[1] * x[2]), std::exp(x[0] * x[2]), std::sinh(x[0]));
  };
  m.f = [iRe, S](const V& x) -> V {
    const double X = x[0], Y = x[1], Z = x[2];
    const V3 lap(-std::cos(Y), -std::sin(Z), std::exp(X));
    const V3 conv(-std::sin(Y) * std::sin(Z), std::exp(X) * std::cos(Z),
                  std::exp(X) * std::cos(Y));
    const V3 jv(std::cos(Y * Z), std::exp(X * Z), std::sinh(X));
    const V3 Bv(std::sin(Z), std::sin(X), std::cos(Y));
    const V3 jxB = jv.cross(Bv);
    const V3 gradp(Y * std::cos(X) * std::exp(Z), std::sin(X) * std::exp(Z),
                   Y * std::sin(X) * std::exp(Z));
    return V3(-iRe * lap + conv - S * jxB + gradp);
  };
  m.g2 = [](const V& x) -> V {  // j - curl B
    const double X = x[0], Y = x[1], Z = x[2];
    const V3 jv(std::cos(Y * Z), std::exp(X * Z), std::sinh(X));
    const V3 curlB(-std::sin(Y), std::cos(Z), std::cos(X));
    return V3(jv - curlB);
  };
  m.g4 = [iRm, RH](const V& x) -> V {  // Re_m^-1 j - E - u x B + R_H j x B
    const double X = x[0], Y = x[1], Z = x[2];
    const V3 jv(std::cos(Y * Z), std::exp(X * Z), std::sinh(X));
    const V3 Ev(X * std::sin(X), std::exp(Y), Z * Z * Z);
    const V3 uv(std::cos(Y), std::sin(Z), std::exp(X));
    const V3 Bv(std::sin(Z), std::sin(X), std::cos(Y));
    return V3(iRm * jv - Ev - uv.cross(Bv) + RH * jv.cross(Bv));
  };
  return m;
}

}  // namespace hallmhd
