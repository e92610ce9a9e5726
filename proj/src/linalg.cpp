#include "hallmhd/linalg.hpp"

#include <cmath>

#include "hallmhd/error.hpp"

namespace hallmhd {

void LuFactor::factorize(const SpMat& A) {
  if (A.rows() != A.cols())
    throw InvalidArgument("LuFactor: matrix is " + std::to_string(A.rows()) + "x" +
                          std::to_string(A.cols()));
  lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>>();
  Eigen::SparseMatrix<double> Ac(A);
  Ac.makeCompressed();
  lu_->isSymmetric(false);
  lu_->analyzePattern(Ac);
  lu_->factorize(Ac);
  if (lu_->info() != Eigen::Success)
    throw SingularMatrix("LU factorization failed: " + lu_->lastErrorMessage());
  n_ = A.rows();
}

Eigen::VectorXd LuFactor::solve(const Eigen::VectorXd& b) const {
  if (!lu_) throw InvalidArgument("LuFactor: solve before factorize");
  if (b.size() != n_)
    throw InvalidArgument("LuFactor: rhs size " + std::to_string(b.size()) + ", expected " +
                          std::to_string(n_));
  Eigen::VectorXd x = lu_->solve(b);
  if (lu_->info() != Eigen::Success) throw SingularMatrix("LU solve failed");
  return x;
}

void BlockMatrix::set(int i, int j, SpMat A) {
  if (i < 0 || i >= static_cast<int>(row_sizes.size()) || j < 0 ||
      j >= static_cast<int>(col_sizes.size()))
    throw InvalidArgument("BlockMatrix::set: block index out of range");
  if (A.rows() != row_sizes[i] || A.cols() != col_sizes[j])
    throw InvalidArgument("BlockMatrix::set: block (" + std::to_string(i) + "," +
                          std::to_string(j) + ") is " + std::to_string(A.rows()) + "x" +
                          std::to_string(A.cols()) + ", expected " +
                          std::to_string(row_sizes[i]) + "x" + std::to_string(col_sizes[j]));
  blocks[{i, j}] = std::move(A);
}

const SpMat* BlockMatrix::get(int i, int j) const {
  auto it = blocks.find({i, j});
  return it == blocks.end() ? nullptr : &it->second;
}

long BlockMatrix::rows() const {
  long n = 0;
  for (long s : row_sizes) n += s;
  return n;
}

long BlockMatrix::cols() const {
  long n = 0;
  for (long s : col_sizes) n += s;
  return n;
}

long BlockMatrix::row_offset(int i) const {
  long n = 0;
  for (int k = 0; k < i; ++k) n += row_sizes[k];
  return n;
}

long BlockMatrix::col_offset(int j) const {
  long n = 0;
  for (int k = 0; k < j; ++k) n += col_sizes[k];
  return n;
}

Eigen::VectorXd BlockMatrix::apply(const Eigen::VectorXd& x) const {
  if (x.size() != cols()) throw InvalidArgument("BlockMatrix::apply: size mismatch");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(rows());
  for (const auto& [key, A] : blocks)
    y.segment(row_offset(key.first), A.rows()) +=
        A * x.segment(col_offset(key.second), A.cols());
  return y;
}

SpMat BlockMatrix::to_sparse() const {
  std::vector<Eigen::Triplet<double>> trips;
  long nnz = 0;
  for (const auto& [key, A] : blocks) nnz += A.nonZeros();
  trips.reserve(nnz);
  for (const auto& [key, A] : blocks) {
    const long r0 = row_offset(key.first), c0 = col_offset(key.second);
    for (int r = 0; r < A.outerSize(); ++r)
      for (SpMat::InnerIterator it(A, r); it; ++it)
        trips.emplace_back(static_cast<int>(r0 + it.row()), static_cast<int>(c0 + it.col()),
                           it.value());
  }
  SpMat out(rows(), cols());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

namespace {

SolveResult cg_solve(const LinOp& A, const Eigen::VectorXd& b, const SolverConfig& cfg,
                     const LinOp& prec) {
  SolveResult res;
  const double bnorm = b.norm();
  const double target = std::max(cfg.rtol * bnorm, cfg.atol);
  res.x = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b;
  double rnorm = r.norm();
  res.residual_history.push_back(rnorm);
  if (rnorm <= target) return res;
  Eigen::VectorXd z = prec ? prec(r) : r;
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  for (int it = 0; it < cfg.max_iter; ++it) {
    const Eigen::VectorXd Ap = A(p);
    const double pAp = p.dot(Ap);
    if (pAp <= 0.0)
      throw SolverFailure("CG: operator not positive definite (pAp = " + std::to_string(pAp) + ")",
                          rnorm, it);
    const double alpha = rz / pAp;
    res.x += alpha * p;
    r -= alpha * Ap;
    rnorm = r.norm();
    res.iterations = it + 1;
    res.residual_history.push_back(rnorm);
    if (rnorm <= target) return res;
    z = prec ? prec(r) : r;
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw SolverFailure("CG: no convergence in " + std::to_string(cfg.max_iter) + " iterations",
                      rnorm, cfg.max_iter);
}

// right-preconditioned restarted GMRES; stores the preconditioned directions,
// which also makes it a flexible variant when prec changes between calls
SolveResult gmres_solve(const LinOp& A, const Eigen::VectorXd& b, const SolverConfig& cfg,
                        const LinOp& prec) {
  SolveResult res;
  const long n = b.size();
  const double bnorm = b.norm();
  const double target = std::max(cfg.rtol * bnorm, cfg.atol);
  res.x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = b;
  double rnorm = r.norm();
  res.residual_history.push_back(rnorm);
  if (rnorm <= target) return res;

  const int m = std::max(1, cfg.restart);
  std::vector<Eigen::VectorXd> V(m + 1), Z(m);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
  Eigen::VectorXd cs(m), sn(m), g(m + 1);

  int total_it = 0;
  while (total_it < cfg.max_iter) {
    V[0] = r / rnorm;
    g.setZero();
    g[0] = rnorm;
    int k = 0;
    for (; k < m && total_it < cfg.max_iter; ++k, ++total_it) {
      Z[k] = prec ? prec(V[k]) : V[k];
      Eigen::VectorXd w = A(Z[k]);
      for (int i = 0; i <= k; ++i) {  // modified Gram-Schmidt
        H(i, k) = w.dot(V[i]);
        w -= H(i, k) * V[i];
      }
      H(k + 1, k) = w.norm();
      if (H(k + 1, k) > 0) V[k + 1] = w / H(k + 1, k);
      for (int i = 0; i < k; ++i) {  // apply stored Givens rotations
        const double t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
        H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
        H(i, k) = t;
      }
      const double denom = std::hypot(H(k, k), H(k + 1, k));
      if (denom == 0.0) {
        cs[k] = 1.0;
        sn[k] = 0.0;
      } else {
        cs[k] = H(k, k) / denom;
        sn[k] = H(k + 1, k) / denom;
      }
      H(k, k) = denom;
      H(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      rnorm = std::abs(g[k + 1]);
      res.iterations = total_it + 1;
      res.residual_history.push_back(rnorm);
      if (rnorm <= target) {
        ++k;
        ++total_it;
        break;
      }
    }
    // back substitution on the k x k triangular system
    Eigen::VectorXd y = Eigen::VectorXd::Zero(k);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= H(i, j) * y[j];
      y[i] = s / H(i, i);
    }
    for (int i = 0; i < k; ++i) res.x += y[i] * Z[i];
    r = b - A(res.x);
    rnorm = r.norm();
    res.residual_history.back() = rnorm;  // replace estimate with true residual
    if (rnorm <= target) return res;
  }
  throw SolverFailure("GMRES: no convergence in " + std::to_string(cfg.max_iter) + " iterations",
                      rnorm, cfg.max_iter);
}

}  // namespace

SolveResult solve_linear_op(const LinOp& A, long n, const Eigen::VectorXd& b,
                            const SolverConfig& cfg, const LinOp& prec) {
  if (b.size() != n) throw InvalidArgument("solve_linear: rhs size mismatch");
  switch (cfg.method) {
    case SolverConfig::Method::CG:
      return cg_solve(A, b, cfg, prec);
    case SolverConfig::Method::GMRES:
    case SolverConfig::Method::FGMRES:
      return gmres_solve(A, b, cfg, prec);
    case SolverConfig::Method::LU:
      throw InvalidArgument("solve_linear: LU needs an assembled matrix");
  }
  throw InvalidArgument("solve_linear: unknown method");
}

SolveResult solve_linear(const SpMat& A, const Eigen::VectorXd& b, const SolverConfig& cfg,
                         const LinOp& prec) {
  if (A.rows() != A.cols()) throw InvalidArgument("solve_linear: matrix not square");
  if (cfg.method == SolverConfig::Method::LU) {
    LuFactor lu(A);
    SolveResult res;
    res.x = lu.solve(b);
    res.iterations = 1;
    res.residual_history.push_back((b - A * res.x).norm());
    return res;
  }
  return solve_linear_op([&A](const Eigen::VectorXd& v) { return Eigen::VectorXd(A * v); },
                         A.rows(), b, cfg, prec);
}

SolveResult solve_linear(const BlockMatrix& A, const Eigen::VectorXd& b, const SolverConfig& cfg,
                         const LinOp& prec) {
  if (A.rows() != A.cols()) throw InvalidArgument("solve_linear: block matrix not square");
  if (cfg.method == SolverConfig::Method::LU) return solve_linear(A.to_sparse(), b, cfg, prec);
  return solve_linear_op([&A](const Eigen::VectorXd& v) { return A.apply(v); }, A.rows(), b, cfg,
                         prec);
}

}  // namespace hallmhd
