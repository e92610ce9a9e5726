#include "hallmhd/transient_curl.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hallmhd/error.hpp"

namespace hallmhd {

namespace {

// mass-weighted norm; NaN (an overflowing iterate) maps to infinity so the
// sweep can never mistake a blow-up for convergence
double mass_norm(const SpMat& M, const Eigen::VectorXd& v) {
  const double q = v.dot(M * v);
  if (std::isnan(q)) return std::numeric_limits<double>::infinity();
  return q > 0 ? std::sqrt(q) : 0.0;
}

// relative increment, absolute for a vanishing base so zero fields converge
double rel_increment(const SpMat& M, const Eigen::VectorXd& next, const Eigen::VectorXd& prev) {
  const double dn = mass_norm(M, next - prev);
  const double pn = mass_norm(M, prev);
  return pn > 0 ? dn / pn : dn;
}

}  // namespace

CurlScheme::CurlScheme(const Mesh& mesh, const Params& prm) : mesh_(&mesh), prm_(prm) {
  prm_.validate();
  if (mesh.dim != 3) throw InvalidArgument("CurlScheme: the scheme is three-dimensional");

  edge_ = build_space(mesh, Family::Edge);
  nodal_ = build_space(mesh, Family::P1);
  face_ = build_space(mesh, Family::Face);

  Me_ = assemble_mass(edge_);
  Mf_ = assemble_mass(face_);
  Mef_ = assemble_mass(face_, edge_);
  Act_ = assemble_curl_test(face_, edge_);
  if (prm_.inv_Re() > 0) CC_ = assemble_curlcurl(edge_);
  Dc_ = mesh.d_curl();
  Dg_ = mesh.d_grad();
  CCp_ = SpMat(Act_ * Dc_);

  ubc_ = edge_.boundary_dofs_all();
  pbc_ = nodal_.boundary_dofs_all();
  ejbc_ = ubc_;
  for (int i : ubc_) ejbc_.push_back(static_cast<int>(edge_.dim) + i);

  {
    SpMat M = Me_;
    Eigen::VectorXd dummy = Eigen::VectorXd::Zero(edge_.dim);
    eliminate_dirichlet(M, dummy, ubc_, Eigen::VectorXd::Zero(static_cast<long>(ubc_.size())));
    mass_lu_.factorize(M);
  }

  // velocity / total-pressure saddle, constant for the whole run
  const SpMat G = SpMat(Me_ * Dg_);
  BlockMatrix sad({edge_.dim, nodal_.dim}, {edge_.dim, nodal_.dim});
  SpMat A00 = SpMat((1.0 / prm_.dt) * Me_);
  if (prm_.inv_Re() > 0) A00 = A00 + SpMat(0.5 * prm_.inv_Re() * CC_);
  sad.set(0, 0, A00);
  sad.set(0, 1, G);
  sad.set(1, 0, SpMat(G.transpose()));
  SpMat S = sad.to_sparse();
  nsad_ = S.rows();
  std::vector<int> fixed = ubc_;
  for (int i : pbc_) fixed.push_back(static_cast<int>(edge_.dim) + i);
  Eigen::VectorXd dummy = Eigen::VectorXd::Zero(nsad_);
  eliminate_dirichlet(S, dummy, fixed, Eigen::VectorXd::Zero(static_cast<long>(fixed.size())));
  step_lu_.factorize(S);
}

Eigen::VectorXd CurlScheme::project_edge(Eigen::VectorXd rhs) const {
  for (int i : ubc_) rhs[i] = 0.0;
  return mass_lu_.solve(rhs);
}

Eigen::VectorXd CurlScheme::curl_projection(const Eigen::VectorXd& u) const {
  return project_edge(Mef_ * Eigen::VectorXd(Dc_ * u));
}

Eigen::VectorXd CurlScheme::initial_velocity(const FieldFn& u0) const {
  const Eigen::VectorXd ui = interpolate(edge_, u0);
  const SpMat G = SpMat(Me_ * Dg_);
  BlockMatrix sad({edge_.dim, nodal_.dim}, {edge_.dim, nodal_.dim});
  sad.set(0, 0, Me_);
  sad.set(0, 1, G);
  sad.set(1, 0, SpMat(G.transpose()));
  SpMat S = sad.to_sparse();
  std::vector<int> fixed = ubc_;
  for (int i : pbc_) fixed.push_back(static_cast<int>(edge_.dim) + i);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(S.rows());
  rhs.head(edge_.dim) = Me_ * ui;
  eliminate_dirichlet(S, rhs, fixed, Eigen::VectorXd::Zero(static_cast<long>(fixed.size())));
  const Eigen::VectorXd sol = LuFactor(S).solve(rhs);
  return sol.head(edge_.dim);
}

Eigen::VectorXd CurlScheme::initial_magnetic_from_potential(const FieldFn& pot) const {
  return Dc_ * interpolate(edge_, pot);
}

CurlSchemeState CurlScheme::initial_state(Eigen::VectorXd u0, Eigen::VectorXd B0) const {
  if (u0.size() != edge_.dim || B0.size() != face_.dim)
    throw MissingCoefficient("CurlScheme: initial coefficient sizes");
  if (div_l2_norm(face_, B0) > 1e-11)
    throw InconsistentField("CurlScheme: initial magnetic field is not solenoidal");
  const double bmax = B0.size() ? B0.cwiseAbs().maxCoeff() : 0.0;
  for (int i : face_.boundary_dofs_all())
    if (std::abs(B0[i]) > 1e-10 * (1.0 + bmax))
      throw InconsistentField("CurlScheme: initial magnetic field has boundary flux");
  Eigen::VectorXd c = Dg_.transpose() * Eigen::VectorXd(Me_ * u0);
  for (int i : pbc_) c[i] = 0.0;
  if (c.norm() > 1e-9 * (1.0 + u0.norm()))
    throw InconsistentField("CurlScheme: initial velocity violates the divergence constraint");

  CurlSchemeState st;
  st.u = std::move(u0);
  st.B = std::move(B0);
  return st;
}

CurlSchemeState CurlScheme::advance_step(const CurlSchemeState& st) const {
  const double dt = prm_.dt;
  const double S = prm_.S;
  const double rh = prm_.R_H;
  const double irem = prm_.inv_Re_m();

  Eigen::VectorXd u_new = st.u, B_new = st.B;
  Eigen::VectorXd E, j, H, w, P;
  Eigen::VectorXd visc_old = Eigen::VectorXd::Zero(edge_.dim);
  if (prm_.inv_Re() > 0) visc_old = 0.5 * prm_.inv_Re() * (CC_ * st.u);

  const long ne = edge_.dim;
  std::vector<double> history;
  bool converged = false;
  int sweeps = 0;
  for (int it = 0; it < prm_.max_fixedpoint; ++it) {
    ++sweeps;
    const Eigen::VectorXd u_mid = 0.5 * (u_new + st.u);
    const Eigen::VectorXd B_mid = 0.5 * (B_new + st.B);

    H = project_edge(Mef_ * B_mid);
    w = project_edge(Mef_ * Eigen::VectorXd(Dc_ * u_mid));

    // Ohm row:     (E, k) - R_H (j x H, k) - inv_Re_m (j, k) = -(u_mid x H, k)
    // current row: (j, k) + dt/2 (curl E, curl k)            =  (B_old, curl k)
    // The second row is the weak curl of the midpoint of the updated field,
    // with B_new = B_old - dt curl E already substituted.
    const SpMat XH = assemble_cross_frozen(edge_, edge_, edge_, H);
    BlockMatrix aux({ne, ne}, {ne, ne});
    aux.set(0, 0, Me_);
    if (irem > 0)
      aux.set(0, 1, SpMat(-rh * XH - irem * Me_));
    else
      aux.set(0, 1, SpMat(-rh * XH));
    aux.set(1, 0, SpMat(0.5 * dt * CCp_));
    aux.set(1, 1, Me_);
    SpMat A = aux.to_sparse();
    Eigen::VectorXd r(2 * ne);
    r.head(ne) = assemble_cross_load(edge_, edge_, Eigen::VectorXd(-u_mid), edge_, H);
    r.tail(ne) = Act_ * st.B;
    eliminate_dirichlet(A, r, ejbc_, Eigen::VectorXd::Zero(static_cast<long>(ejbc_.size())));
    const Eigen::VectorXd ej = LuFactor(A).solve(r);
    E = ej.head(ne);
    j = ej.tail(ne);

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nsad_);
    rhs.head(ne) = (1.0 / dt) * (Me_ * st.u) - visc_old +
                   S * assemble_cross_load(edge_, edge_, j, edge_, H) +
                   assemble_cross_load(edge_, edge_, u_mid, edge_, w);
    for (int i : ubc_) rhs[i] = 0.0;
    const Eigen::VectorXd sol = step_lu_.solve(rhs);
    const Eigen::VectorXd u_next = sol.head(ne);
    P = sol.tail(nodal_.dim);
    const Eigen::VectorXd B_next = st.B - dt * (Dc_ * E);

    const double inc = rel_increment(Me_, u_next, u_new) + rel_increment(Mf_, B_next, B_new);
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
    os << "CurlScheme: fixed point did not reach " << prm_.tol_fixedpoint << " in "
       << prm_.max_fixedpoint << " sweeps; increments:";
    for (double h : history) os << " " << h;
    throw FixedPointDivergence(os.str());
  }

  CurlSchemeState out;
  out.u = std::move(u_new);
  out.B = std::move(B_new);
  out.P = std::move(P);
  out.E = std::move(E);
  out.j = std::move(j);
  out.H = std::move(H);
  out.omega = std::move(w);
  out.time = st.time + dt;
  out.fixedpoint_iterations = sweeps;
  return out;
}

DiagnosticsRecord CurlScheme::diagnostics(const CurlSchemeState& st, const Eigen::VectorXd& A,
                                          int potential_iterations) const {
  // Helicity records pair the fields with the projected curl of u at the
  // record time.  That combination is what the stepping conserves exactly:
  // with it, (A, omega) collapses to the cross pairing and (u, omega) changes
  // by the same midpoint source that drives the cross helicity, so the two
  // rates cancel whenever 2 S alpha beta = R_H (alpha + beta).  The midpoint
  // vorticity of the producing step belongs to the step itself, not to the
  // record; pairing with it leaves uncancelled step-straddling products.
  const Eigen::VectorXd wd = curl_projection(st.u);
  DiagnosticsRecord rec =
      compute_diagnostics(st.time, prm_, edge_, st.u, face_, st.B, edge_, A, &edge_, &wd);
  if (st.omega.size() != edge_.dim)
    rec.H_H = std::numeric_limits<double>::quiet_NaN();  // series starts after step one
  rec.iterations = st.fixedpoint_iterations;
  rec.potential_iterations = potential_iterations;
  return rec;
}

std::vector<DiagnosticsRecord> CurlScheme::run_simulation(
    const CurlSchemeState& st0, double T,
    const std::function<void(const DiagnosticsRecord&)>& observer) const {
  PotentialSolver pot(edge_, face_);
  std::vector<DiagnosticsRecord> series;
  CurlSchemeState st = st0;
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
