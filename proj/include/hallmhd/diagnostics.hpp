#pragma once

#include "hallmhd/forms.hpp"

namespace hallmhd {

// One sampled row of the conserved-quantity time series.
struct DiagnosticsRecord {
  double time = 0.0;
  double energy = 0.0;         // integral of |u|^2 + S |B|^2
  double H_M = 0.0;            // (A, B), A a curl potential of B
  double H_C = 0.0;            // (u, B)
  double H_F = 0.0;            // (u, omega)
  double H_H = 0.0;            // (A + alpha u, B + beta omega)
  double div_u_L2 = 0.0;
  double div_B_L2 = 0.0;
  double hybrid_energy = 0.0;  // integral of |B + R_H/S omega|^2
  int iterations = 0;            // nonlinear / fixed-point count of the producing step
  int potential_iterations = 0;  // Krylov count of the vector-potential solve
};

// Representative vector potential: A in the tangentially constrained edge
// space with (curl A, curl k) = (B, curl k) for every such k.  The curl-curl
// matrix is singular (gradients span its kernel) but the right-hand side is
// consistent by construction, so diagonally scaled GMRES converges; we run it
// to rtol 1e-12 and verify the residual afterwards.  B must be solenoidal to
// 1e-9 and carry no normal boundary flux, otherwise curl A cannot reproduce B
// and every quantity built from A would depend on the gauge; such fields are
// rejected as inconsistent.
//
// The solver keeps the factorized boundary bookkeeping and the previous
// potential as warm start, which makes per-step helicity tracking cheap.
class PotentialSolver {
 public:
  PotentialSolver(const FeSpace& edge_sp, const FeSpace& face_sp);

  Eigen::VectorXd solve(const Eigen::VectorXd& B);
  int last_iterations() const { return last_iterations_; }
  void reset_warm_start() { warm_.resize(0); }

 private:
  const FeSpace* edge_;
  const FeSpace* face_;
  SpMat cc_;   // curl-curl, boundary rows/cols replaced by identity
  SpMat ct_;   // right-hand side map B -> (B, curl k)
  Eigen::VectorXd inv_diag_;
  std::vector<char> bdry_;
  Eigen::VectorXd warm_;
  int last_iterations_ = 0;
};

// One-shot convenience wrapper around PotentialSolver.
Eigen::VectorXd vector_potential(const FeSpace& face_sp, const Eigen::VectorXd& B,
                                 const FeSpace& edge_sp);

// Record assembly from explicit coefficient fields.  A is the potential
// belonging to B (see PotentialSolver).  The vorticity argument is the
// discrete omega chosen by the producing scheme; when it is absent the
// pointwise curl of the velocity representation is used instead (exact for
// nodal and edge velocities, zero for the normal-continuous family, whose
// piecewise curl is not defined).  All integrals are evaluated with
// quadrature exact for the piecewise-polynomial integrands.
DiagnosticsRecord compute_diagnostics(double time, const Params& prm, const FeSpace& u_sp,
                                      const Eigen::VectorXd& u, const FeSpace& B_sp,
                                      const Eigen::VectorXd& B, const FeSpace& A_sp,
                                      const Eigen::VectorXd& A,
                                      const FeSpace* omega_sp = nullptr,
                                      const Eigen::VectorXd* omega = nullptr);

}  // namespace hallmhd
