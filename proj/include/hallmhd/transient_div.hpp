#pragma once

#include <functional>
#include <vector>

#include "hallmhd/diagnostics.hpp"

namespace hallmhd {

// Conservative normal-velocity stepping: velocity and magnetic field are both
// normal-continuous, the pressure is piecewise constant, and every midpoint
// auxiliary (E, j, H, omega, U, alpha) lives in the constrained edge space.
// The pair (E, j) is again solved as one linear block with the induction
// update substituted, the acceleration is the projected difference of the
// advection and Lorentz forces, and the velocity/pressure saddle enforces the
// divergence of u cell by cell, so both div u and div B vanish identically.
// The equation set is inviscid and non-resistive; finite Re or Re_m in the
// parameters are accepted but take no part in the update.
struct DivSchemeState {
  Eigen::VectorXd u, B;                        // integer-step fields
  Eigen::VectorXd p;                           // multiplier, first cell pinned to zero
  Eigen::VectorXd E, j, H, omega, U, alpha;    // midpoint auxiliaries of the producing step
  double time = 0.0;
  int fixedpoint_iterations = 0;
};

class DivScheme {
 public:
  DivScheme(const Mesh& mesh, const Params& prm);

  const FeSpace& velocity_space() const { return face_; }
  const FeSpace& pressure_space() const { return cell_; }
  const FeSpace& magnetic_space() const { return face_; }
  const FeSpace& auxiliary_space() const { return edge_; }
  const Params& params() const { return prm_; }

  // both initial fields enter as exact curls of interpolated potentials, so
  // they are solenoidal and flux-free to machine precision
  Eigen::VectorXd initial_field_from_potential(const FieldFn& pot) const;

  DivSchemeState initial_state(Eigen::VectorXd u0, Eigen::VectorXd B0) const;

  DivSchemeState advance_step(const DivSchemeState& st) const;

  // records at t=0 and after every step until time reaches T; the vector
  // potential is solved once for the initial field and then advanced by the
  // same electric field as B, exactly as in the tangential-velocity scheme
  std::vector<DiagnosticsRecord> run_simulation(
      const DivSchemeState& st0, double T,
      const std::function<void(const DiagnosticsRecord&)>& observer = nullptr) const;

  // record at the state time; vorticity pairings use the weak curl of the
  // state velocity.  The hybrid helicity column is informational here: this
  // boundary condition has no coefficient pair that makes it an invariant.
  DiagnosticsRecord diagnostics(const DivSchemeState& st, const Eigen::VectorXd& A,
                                int potential_iterations = 0) const;

 private:
  Eigen::VectorXd project_edge(Eigen::VectorXd rhs) const;  // constrained mass solve
  Eigen::VectorXd weak_curl(const Eigen::VectorXd& u) const;

  const Mesh* mesh_;
  Params prm_;
  FeSpace edge_, face_, cell_;
  SpMat Me_, Mf_;
  SpMat Mef_;         // projection right-hand map, face trial against edge test
  SpMat Mfe_;         // its transpose, edge trial against face test
  SpMat Act_;         // (B, curl k)
  SpMat CCp_;         // Act * d_curl, the exact product used by the (E, j) block
  SpMat Dc_, Dd_;
  SpMat sad_;         // eliminated saddle matrix, kept for residual refinement
  LuFactor mass_lu_;  // constrained edge mass
  LuFactor step_lu_;  // velocity/pressure saddle of the step
  std::vector<int> ebc_, fbc_;
  std::vector<int> ejbc_;  // constrained rows of the stacked (E, j) block
  long nsad_ = 0;
};

}  // namespace hallmhd
