#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <functional>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "hallmhd/mesh.hpp"

namespace hallmhd {

// preconditioner / operator application callback
using LinOp = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct SolverConfig {
  enum class Method { CG, GMRES, FGMRES, LU };
  Method method = Method::GMRES;
  double rtol = 1e-10;
  double atol = 0.0;
  int max_iter = 10000;
  int restart = 200;  // effectively unrestarted at the sizes we run
};

struct SolveResult {
  Eigen::VectorXd x;
  int iterations = 0;
  std::vector<double> residual_history;  // true residual norms, one per iteration
};

// Sparse direct factorization (threshold partial pivoting on top of a
// fill-reducing column ordering), reusable across right-hand sides.
class LuFactor {
 public:
  LuFactor() = default;
  explicit LuFactor(const SpMat& A) { factorize(A); }
  void factorize(const SpMat& A);
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  long rows() const { return n_; }
  bool ready() const { return n_ > 0; }

 private:
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>> lu_;
  long n_ = 0;
};

// Sparse blocks keyed by (field_row, field_col) over a fixed field ordering.
struct BlockMatrix {
  std::vector<long> row_sizes, col_sizes;
  std::map<std::pair<int, int>, SpMat> blocks;

  BlockMatrix() = default;
  BlockMatrix(std::vector<long> rs, std::vector<long> cs)
      : row_sizes(std::move(rs)), col_sizes(std::move(cs)) {}

  void set(int i, int j, SpMat A);
  const SpMat* get(int i, int j) const;
  long rows() const;
  long cols() const;
  long row_offset(int i) const;
  long col_offset(int j) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  SpMat to_sparse() const;
};

// Krylov / direct driver. Residuals are true (unpreconditioned) residuals
// because GMRES/FGMRES are right-preconditioned.
SolveResult solve_linear(const SpMat& A, const Eigen::VectorXd& b, const SolverConfig& cfg,
                         const LinOp& prec = nullptr);
SolveResult solve_linear(const BlockMatrix& A, const Eigen::VectorXd& b, const SolverConfig& cfg,
                         const LinOp& prec = nullptr);
// operator-only variant (no LU method)
SolveResult solve_linear_op(const LinOp& A, long n, const Eigen::VectorXd& b,
                            const SolverConfig& cfg, const LinOp& prec = nullptr);

}  // namespace hallmhd
