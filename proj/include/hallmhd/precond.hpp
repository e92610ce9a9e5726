#pragma once

#include <string>
#include <vector>

#include "hallmhd/stationary.hpp"

namespace hallmhd {

// Field-split preconditioning of the coupled five-field system. The packed
// ordering (u, p, E, B, j) is split into the hydrodynamic saddle block
// (u, p) and the electromagnetic block (E, B, j); one application performs a
// block-LDU sweep around the Schur complement that eliminates velocity and
// pressure. In exact mode the Schur block is inverted iteratively with the
// velocity coupling corrections applied through inner saddle solves; approx
// mode drops those corrections (they shrink like h^2) and factorizes the
// plain electromagnetic block.
struct BlockPrecondConfig {
  enum class SchurMode { exact, approx };
  SchurMode schur_mode = SchurMode::approx;
  // inner blocks are factorized directly; in exact mode rtol / max_iter of
  // inner_em_solver drive the iterative Schur solve, preconditioned by the
  // factorization of the uncorrected electromagnetic block
  SolverConfig inner_ns_solver{SolverConfig::Method::LU};
  SolverConfig inner_em_solver{SolverConfig::Method::LU};
  SolverConfig outer{SolverConfig::Method::FGMRES, 1e-8, 0.0, 200, 200};
};

class BlockPreconditioner {
 public:
  // A is a composed (and constraint-eliminated) system matrix; n_u and n_p
  // are the leading velocity / pressure block sizes
  BlockPreconditioner(const SpMat& A, long n_u, long n_p, BlockPrecondConfig cfg);

  long rows() const { return n_ns_ + n_em_; }
  Eigen::VectorXd apply(const Eigen::VectorXd& r) const;

 private:
  BlockPrecondConfig cfg_;
  long n_ns_ = 0, n_em_ = 0;
  SpMat A12_, A21_, A22_;
  LuFactor ns_lu_, em_lu_;
};

// one preconditioner application for a system given in block form; the first
// two row groups form the hydrodynamic block
Eigen::VectorXd apply_preconditioner(const BlockMatrix& blocks, const BlockPrecondConfig& cfg,
                                     const Eigen::VectorXd& rhs);

// LinearDriver running nonlinear_solve's linear systems through outer FGMRES
// with a freshly built block preconditioner per system
LinearDriver block_driver(const BlockPrecondConfig& cfg = {});

// Driven-lid data on the box: unit tangential velocity on the y = max face,
// background magnetic field through that face, zero tangential electric
// field, and the lid current trace obtained by solving the 2x2 tangential
// system that the boundary trace of Ohm's law imposes on compatible data.
// Off-lid faces carry homogeneous u, E and j traces.
struct CavityData {
  Eigen::Vector3d B0{0, 1, 0};
  Eigen::Vector3d u_lid{1, 0, 0};
  Eigen::Vector3d j_lid{0, 0, 0};
  // sup over the six boundary planes of the trace identity defect
  double compatibility_residual = 0;
};
CavityData cavity_boundary_data(const Params& prm);

// Dirichlet realization on the five-field spaces. Where lid and wall data
// meet at the rim, the lid wins for u (driven lid including its edge) and
// the walls win for j (homogeneous current trace).
BcSet cavity_bcs(const Spaces& sp, const CavityData& data);

struct IterationCell {
  double nonlinear = 0;    // iterations (stationary) or mean per step
  double linear_mean = 0;  // mean outer Krylov iterations per linear solve
};

struct CavityTable {
  std::vector<double> Re, R_H;
  std::vector<std::vector<IterationCell>> cells;  // [R_H index][Re index]
};

// Iteration-count harness for the driven cavity on an n^3 box mesh. Re_m
// tracks Re across the grid; base supplies the remaining parameters. With a
// transient scheme the run advances `steps` steps of base.dt from rest in a
// background field (BDF2 starts with one trapezoidal step) and reports
// per-step means. An optional CSV gets one row per R_H value.
CavityTable cavity_experiment(const Params& base, const std::vector<double>& re_list,
                              const std::vector<double>& rh_list, int mesh_n, Mode mode,
                              const BlockPrecondConfig& cfg,
                              TimeScheme transient = TimeScheme::None, int steps = 10,
                              const std::string& csv_path = "");

}  // namespace hallmhd
