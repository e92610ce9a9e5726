#pragma once

#include <functional>
#include <vector>

#include "hallmhd/diagnostics.hpp"

namespace hallmhd {

// Conservative tangential-velocity stepping: velocity and every midpoint
// auxiliary live in the constrained edge space, the total pressure is nodal,
// the magnetic field is normal-continuous.  Each implicit-midpoint step is
// solved by a staged fixed-point sweep: project H and omega from the current
// iterate, solve the Ohm/current pair (E, j) as one linear block with the
// Faraday update substituted (the j equation reads the midpoint of the very
// field the electric field produces, which keeps the stiff Hall coupling
// inside the block instead of in the sweep), then solve the constant
// velocity/total-pressure saddle and update B through the exact
// coefficient-level curl, which keeps div B at zero identically.
struct CurlSchemeState {
  Eigen::VectorXd u, B;               // integer-step fields
  Eigen::VectorXd P, E, j, H, omega;  // midpoint auxiliaries of the producing step
  double time = 0.0;
  int fixedpoint_iterations = 0;
};

class CurlScheme {
 public:
  CurlScheme(const Mesh& mesh, const Params& prm);

  const FeSpace& velocity_space() const { return edge_; }
  const FeSpace& pressure_space() const { return nodal_; }
  const FeSpace& magnetic_space() const { return face_; }
  const Params& params() const { return prm_; }

  // Initial data constructors.  The velocity is interpolated and then
  // projected onto the discretely constrained subspace, because the energy
  // telescoping needs (u0, grad Q) = 0 already at step zero.  The magnetic
  // field is the exact curl of the interpolated potential and therefore
  // solenoidal to machine precision.
  Eigen::VectorXd initial_velocity(const FieldFn& u0) const;
  Eigen::VectorXd initial_magnetic_from_potential(const FieldFn& pot) const;

  CurlSchemeState initial_state(Eigen::VectorXd u0, Eigen::VectorXd B0) const;

  CurlSchemeState advance_step(const CurlSchemeState& st) const;

  // records at t=0 and after every step until time reaches T; the hybrid
  // helicity column of the t=0 row is NaN and its drift series starts at the
  // first step.  The vector potential is solved once for
  // the initial field and then advanced by the same electric field as B, so
  // curl A = B holds exactly along the run and the helicity pairings see one
  // consistent gauge instead of a fresh solver gauge per step.
  std::vector<DiagnosticsRecord> run_simulation(
      const CurlSchemeState& st0, double T,
      const std::function<void(const DiagnosticsRecord&)>& observer = nullptr) const;

  // record at the state time; all vorticity pairings use the projected curl
  // of the state velocity (the combination the stepping conserves), and A is
  // the caller's potential representative for the state's magnetic field
  DiagnosticsRecord diagnostics(const CurlSchemeState& st, const Eigen::VectorXd& A,
                                int potential_iterations = 0) const;

 private:
  Eigen::VectorXd project_edge(Eigen::VectorXd rhs) const;  // constrained mass solve
  Eigen::VectorXd curl_projection(const Eigen::VectorXd& u) const;

  const Mesh* mesh_;
  Params prm_;
  FeSpace edge_, nodal_, face_;
  SpMat Me_, Mf_;     // plain edge and face masses (integrals)
  SpMat Mef_;         // projection right-hand map, face trial against edge test
  SpMat Act_;         // (B, curl k)
  SpMat CC_;          // (curl u, curl v), only assembled in the viscous case
  SpMat CCp_;         // Act * d_curl, the exact product used by the (E, j) block
  SpMat Dc_, Dg_;
  LuFactor mass_lu_;  // constrained edge mass
  LuFactor step_lu_;  // velocity/total-pressure saddle of the step
  std::vector<int> ubc_, pbc_;
  std::vector<int> ejbc_;  // constrained rows of the stacked (E, j) block
  long nsad_ = 0;
};

}  // namespace hallmhd
