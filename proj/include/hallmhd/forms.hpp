#pragma once

#include <limits>
#include <optional>

#include "hallmhd/assembly.hpp"

namespace hallmhd {

struct Params {
  double Re = 1.0;     // infinity = inviscid
  double Re_m = 1.0;   // infinity = ideal (no resistivity)
  double S = 1.0;      // coupling number
  double R_H = 0.0;    // Hall parameter
  double gamma = 1e3;  // grad-div augmentation weight
  double dt = 0.05;
  double alpha = 0.0, beta = 0.0;  // hybrid-helicity coefficients
  double tol_nonlinear = 1e-8;
  int max_nonlinear = 50;
  double tol_fixedpoint = 1e-12;
  int max_fixedpoint = 100;

  double inv_Re() const { return std::isinf(Re) ? 0.0 : 1.0 / Re; }
  double inv_Re_m() const { return std::isinf(Re_m) ? 0.0 : 1.0 / Re_m; }
  // 2 S a b - R_H (a + b); zero whenever the hybrid invariant is meaningful
  double hybrid_relation_residual() const { return 2 * S * alpha * beta - R_H * (alpha + beta); }
  void validate() const;
};

enum class Mode { Picard, Newton };
enum class TimeScheme { None, Euler, BDF2, CN };

// The five coupled fields: velocity (vector nodal deg 2), pressure (nodal
// deg 1), electric field and current (edge), magnetic field (face), packed
// in the order u, p, E, B, j.
struct Spaces {
  const Mesh* mesh = nullptr;
  FeSpace u, p, E, B, j;
  long off_u = 0, off_p = 0, off_E = 0, off_B = 0, off_j = 0, total = 0;

  static Spaces build(const Mesh& mesh);
};

struct State {
  Eigen::VectorXd u, p, E, B, j;

  static State zero(const Spaces& sp);
  bool empty() const { return u.size() == 0; }
};

Eigen::VectorXd pack(const Spaces& sp, const State& st);
State unpack(const Spaces& sp, const Eigen::VectorXd& x);

// loads tested against each equation row; empty vectors are treated as zero
struct SourceTerms {
  Eigen::VectorXd f;   // momentum
  Eigen::VectorXd g2;  // current definition row
  Eigen::VectorXd g3;  // induction row (used by the island problem)
  Eigen::VectorXd g4;  // Ohm row
};

// Linearized blocks of the coupled system, stored with the signs and
// physical factors they carry inside the matrix rows
//   momentum:   F u + BT p           + Ktil B + K j    = f + time terms
//   continuity: Bm u                                   = 0
//   current:                   - A B + M j             = g2
//   induction:          D E + C B                      = g3 + time terms
//   Ohm:        -G u - P E + (Gtil + Ntil) B + (L+N) j = g4
// In Picard mode Ktil, Gtil, Ntil and the Newton convection extension are
// zero.
struct OperatorSet {
  SpMat F, BT, Bm, K, Ktil, L, P, G, Gtil, N, Ntil, D, C, M, A;
  Mode mode = Mode::Picard;
  TimeScheme transient = TimeScheme::None;
};

OperatorSet assemble_operator_set(const Spaces& sp, const State& frozen, const Params& prm,
                                  Mode mode, TimeScheme transient);

// block layout of the operator set as one matrix over the packed ordering
SpMat compose_system(const Spaces& sp, const OperatorSet& ops);

// right-hand side: loads plus time-history mass terms (and, for the
// trapezoidal first step, the old-level differential terms)
Eigen::VectorXd assemble_rhs(const Spaces& sp, const Params& prm, const SourceTerms& src,
                             TimeScheme transient, const State* old1 = nullptr,
                             const State* old2 = nullptr);

// nonlinear residual of the packed system at the given state
Eigen::VectorXd assemble_residual(const Spaces& sp, const State& st, const State* old1,
                                  const State* old2, const Params& prm, const SourceTerms& src,
                                  TimeScheme transient);

// Dirichlet data in packed indexing
struct BcSet {
  std::vector<int> dofs;
  Eigen::VectorXd values;

  void add(long offset, const std::vector<int>& local_dofs, const Eigen::VectorXd& lifting);
  void add_zero(long offset, const std::vector<int>& local_dofs);
};

// quadratic part of the discrete energy balance at a state:
//   Re^-1 |grad u|^2 + gamma |div u|^2 + S |div B|^2 + S Re_m^-1 |j|^2
double energy_quadratic(const Spaces& sp, const State& st, const Params& prm);

// relative defect of the energy identity at a solved stationary state: the
// quadratic part must equal load work plus the reaction work on constrained
// rows
double energy_identity_residual(const Spaces& sp, const State& st, const Params& prm,
                                const SourceTerms& src, const BcSet& bc);

// the manufactured stationary solution used by the convergence study
struct MmsFields {
  FieldFn u, p, B, E, j, f, g2, g4;
};
MmsFields mms_fields(const Params& prm);

}  // namespace hallmhd
