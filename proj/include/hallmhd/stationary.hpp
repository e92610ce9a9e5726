#pragma once

#include <string>
#include <utility>

#include "hallmhd/forms.hpp"

namespace hallmhd {

struct NonlinearReport {
  int iterations = 0;
  std::vector<double> residual_norms;   // including the initial residual
  std::vector<int> linear_iterations;   // one entry per nonlinear step
  bool converged = false;
};

// builds a preconditioner application for the constrained system
using PrecFactory = std::function<LinOp(const SpMat& eliminated, const Spaces& sp)>;

struct LinearDriver {
  SolverConfig config{SolverConfig::Method::LU, 1e-10, 0.0, 500, 200};
  PrecFactory prec_factory;  // optional, Krylov methods only
};

// Picard / Newton loop for the coupled system. Initial guess is zero with
// the boundary lifting applied (or `initial` when given). Transient modes
// turn this into a single implicit step against old1/old2.
std::pair<State, NonlinearReport> nonlinear_solve(const Spaces& sp, const Params& prm,
                                                  const SourceTerms& src, const BcSet& bc,
                                                  Mode mode, const LinearDriver& lin,
                                                  TimeScheme transient = TimeScheme::None,
                                                  const State* old1 = nullptr,
                                                  const State* old2 = nullptr,
                                                  const State* initial = nullptr);

// L2 distance between a coefficient field and an analytic one; pressure-type
// comparisons can be made modulo the constant mode
double l2_error(const FeSpace& sp, const Eigen::VectorXd& coef, const FieldFn& exact,
                int degree = 10, bool modulo_constant = false);

BcSet mms_bcs(const Spaces& sp, const MmsFields& mf);
SourceTerms mms_sources(const Spaces& sp, const MmsFields& mf);

struct MmsRow {
  int n = 0;
  double h = 0, err_u = 0, err_p = 0, err_B = 0, err_E = 0, err_j = 0;
};

struct MmsTable {
  std::vector<MmsRow> rows;
  // observed slopes between consecutive mesh levels, one fewer than rows
  std::vector<double> rate_u, rate_p, rate_B, rate_E, rate_j;
  // structure checks per run
  std::vector<double> div_B, curl_E, energy_residual;
  std::vector<NonlinearReport> reports;
};

// manufactured-solution convergence study over meshes n in ns (h = 1/n)
MmsTable mms_study(const std::vector<int>& ns, Params prm, Mode mode = Mode::Newton,
                   const std::string& csv_path = "");

}  // namespace hallmhd
