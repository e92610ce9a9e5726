#include "hallmhd/transient_div.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hallmhd/error.hpp"

namespace hallmhd {

namespace {

double mass_norm(const SpMat& M, const Eigen::VectorXd& v) {
  const double q = v.dot(M * v);
  if (std::isnan(q)) return std::numeric_limits<double>::infinity();
  return q > 0 ? std::sqrt(q) : 0.0;
}

double rel_increment(const SpMat& M, const Eigen::VectorXd& next, const Eigen::VectorXd& prev) {
  const double dn = mass_norm(M, next - prev);
  const double pn = mass_norm(M, prev);
  return pn > 0 ? dn / pn : dn;
}

}  // namespace

DivScheme::DivScheme(const Mesh& mesh, const Params& prm) : mesh_(&mesh), prm_(prm) {
  prm_.validate();
  if (mesh.dim != 3) throw InvalidArgument("DivScheme: the scheme is three-dimensional");

  edge_ = build_space(mesh, Family::Edge);
  face_ = build_space(mesh, Family::Face);
  cell_ = build_space(mesh, Family::DG0, 0);

  Me_ = assemble_mass(edge_);
  Mf_ = assemble_mass(face_);
  Mef_ = assemble_mass(face_, edge_);
  Mfe_ = SpMat(Mef_.transpose());
  Act_ = assemble_curl_test(face_, edge_);
  Dc_ = mesh.d_curl();
  Dd_ = mesh.d_div();
  CCp_ = SpMat(Act_ * Dc_);

  ebc_ = edge_.boundary_dofs_all();
  fbc_ = face_.boundary_dofs_all();
  ejbc_ = ebc_;
  for (int i : ebc_) ejbc_.push_back(static_cast<int>(edge_.dim) + i);

  {
    SpMat M = Me_;
    Eigen::VectorXd dummy = Eigen::VectorXd::Zero(edge_.dim);
    eliminate_dirichlet(M, dummy, ebc_, Eigen::VectorXd::Zero(static_cast<long>(ebc_.size())));
    mass_lu_.factorize(M);
  }

  // velocity/pressure saddle, constant for the whole run.  The incidence
  // rows integrate the divergence over each cell, and with the boundary
  // fluxes eliminated the all-ones pressure vector is in the kernel, so one
  // cell value is pinned to make the multiplier unique.
  BlockMatrix sad({face_.dim, cell_.dim}, {face_.dim, cell_.dim});
  sad.set(0, 0, SpMat((1.0 / prm_.dt) * Mf_));
  sad.set(0, 1, SpMat(Dd_.transpose()));
  sad.set(1, 0, Dd_);
  SpMat S = sad.to_sparse();
  nsad_ = S.rows();
  std::vector<int> fixed = fbc_;
  fixed.push_back(static_cast<int>(face_.dim));
  Eigen::VectorXd dummy = Eigen::VectorXd::Zero(nsad_);
  eliminate_dirichlet(S, dummy, fixed, Eigen::VectorXd::Zero(static_cast<long>(fixed.size())));
  sad_ = S;
  step_lu_.factorize(S);
}

Eigen::VectorXd DivScheme::project_edge(Eigen::VectorXd rhs) const {
  for (int i : ebc_) rhs[i] = 0.0;
  return mass_lu_.solve(rhs);
}

Eigen::VectorXd DivScheme::weak_curl(const Eigen::VectorXd& u) const {
  return project_edge(Act_ * u);
}

Eigen::VectorXd DivScheme::initial_field_from_potential(const FieldFn& pot) const {
  return Dc_ * interpolate(edge_, pot);
}

DivSchemeState DivScheme::initial_state(Eigen::VectorXd u0, Eigen::VectorXd B0) const {
  if (u0.size() != face_.dim || B0.size() != face_.dim)
    throw MissingCoefficient("DivScheme: initial coefficient sizes");
  if (div_l2_norm(face_, u0) > 1e-12)
    throw InconsistentField("DivScheme: initial velocity is not solenoidal");
  if (div_l2_norm(face_, B0) > 1e-11)
    throw InconsistentField("DivScheme: initial magnetic field is not solenoidal");
  const double umax = u0.cwiseAbs().maxCoeff();
  const double bmax = B0.cwiseAbs().maxCoeff();
  for (int i : fbc_) {
    if (std::abs(u0[i]) > 1e-10 * (1.0 + umax))
      throw InconsistentField("DivScheme: initial velocity has boundary flux");
    if (std::abs(B0[i]) > 1e-10 * (1.0 + bmax))
      throw InconsistentField("DivScheme: initial magnetic field has boundary flux");
  }

  DivSchemeState st;
  st.u = std::move(u0);
  st.B = std::move(B0);
  return st;
}

DivSchemeState DivScheme::advance_step(const DivSchemeState& st) const {
  const double dt = prm_.dt;
  const double S = prm_.S;
  const double rh = prm_.R_H;

  Eigen::VectorXd u_new = st.u, B_new = st.B;
  Eigen::VectorXd E, j, H, w, U, alpha, p;

  const long ne = edge_.dim;
  const long nf = face_.dim;
  std::vector<double> history;
  bool converged = false;
  int sweeps = 0;
  for (int it = 0; it < prm_.max_fixedpoint; ++it) {
    ++sweeps;
    const Eigen::VectorXd u_mid = 0.5 * (u_new + st.u);
    const Eigen::VectorXd B_mid = 0.5 * (B_new + st.B);

    H = project_edge(Mef_ * B_mid);
    U = project_edge(Mef_ * u_mid);
    w = weak_curl(u_mid);

    // Ohm row:     (E, k) - R_H (j x H, k) = -(U x H, k)
    // current row: (j, k) + dt/2 (curl E, curl k) = (B_old, curl k)
    const SpMat XH = assemble_cross_frozen(edge_, edge_, edge_, H);
    BlockMatrix aux({ne, ne}, {ne, ne});
    aux.set(0, 0, Me_);
    aux.set(0, 1, SpMat(-rh * XH));
    aux.set(1, 0, SpMat(0.5 * dt * CCp_));
    aux.set(1, 1, Me_);
    SpMat A = aux.to_sparse();
    Eigen::VectorXd r(2 * ne);
    r.head(ne) = assemble_cross_load(edge_, edge_, Eigen::VectorXd(-U), edge_, H);
    r.tail(ne) = Act_ * st.B;
    eliminate_dirichlet(A, r, ejbc_, Eigen::VectorXd::Zero(static_cast<long>(ejbc_.size())));
    const Eigen::VectorXd ej = LuFactor(A).solve(r);
    E = ej.head(ne);
    j = ej.tail(ne);

    alpha = project_edge(assemble_cross_load(edge_, edge_, w, edge_, U) -
                         S * assemble_cross_load(edge_, edge_, j, edge_, H));

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nsad_);
    rhs.head(nf) = (1.0 / dt) * (Mf_ * st.u) - Mfe_ * alpha;
    for (int i : fbc_) rhs[i] = 0.0;
    Eigen::VectorXd sol = step_lu_.solve(rhs);
    // one refinement pass: the divergence rows are exact cell balances, and
    // the raw back substitution leaves flux residuals that the small cell
    // volumes would amplify past the pointwise divergence budget
    sol += step_lu_.solve(Eigen::VectorXd(rhs - sad_ * sol));
    const Eigen::VectorXd u_next = sol.head(nf);
    p = sol.tail(cell_.dim);
    const Eigen::VectorXd B_next = st.B - dt * (Dc_ * E);

    const double inc = rel_increment(Mf_, u_next, u_new) + rel_increment(Mf_, B_next, B_new);
    history.push_back(inc);
    u_new = u_next;
    B_new = B_next;
    if (inc < prm_.tol_fixedpoint) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "DivScheme: fixed point did not reach " << prm_.tol_fixedpoint << " in "
       << prm_.max_fixedpoint << " sweeps; increments:";
    for (double h : history) os << " " << h;
    throw FixedPointDivergence(os.str());
  }

  DivSchemeState out;
  out.u = std::move(u_new);
  out.B = std::move(B_new);
  out.p = std::move(p);
  out.E = std::move(E);
  out.j = std::move(j);
  out.H = std::move(H);
  out.omega = std::move(w);
  out.U = std::move(U);
  out.alpha = std::move(alpha);
  out.time = st.time + dt;
  out.fixedpoint_iterations = sweeps;
  return out;
}

DiagnosticsRecord DivScheme::diagnostics(const DivSchemeState& st, const Eigen::VectorXd& A,
                                         int potential_iterations) const {
  const Eigen::VectorXd wd = weak_curl(st.u);
  DiagnosticsRecord rec =
      compute_diagnostics(st.time, prm_, face_, st.u, face_, st.B, edge_, A, &edge_, &wd);
  rec.iterations = st.fixedpoint_iterations;
  rec.potential_iterations = potential_iterations;
  return rec;
}

std::vector<DiagnosticsRecord> DivScheme::run_simulation(
    const DivSchemeState& st0, double T,
    const std::function<void(const DiagnosticsRecord&)>& observer) const {
  PotentialSolver pot(edge_, face_);
  std::vector<DiagnosticsRecord> series;
  DivSchemeState st = st0;
  Eigen::VectorXd A = pot.solve(st.B);
  series.push_back(diagnostics(st, A, pot.last_iterations()));
  if (observer) observer(series.back());
  const long nsteps = std::lround(std::max(0.0, T - st0.time) / prm_.dt);
  for (long k = 0; k < nsteps; ++k) {
    st = advance_step(st);
    A -= prm_.dt * st.E;  // keeps curl A = B without another singular solve
    series.push_back(diagnostics(st, A));
    if (observer) observer(series.back());
  }
  return series;
}

}  // namespace hallmhd
