#include "hallmhd/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "hallmhd/error.hpp"

namespace hallmhd {

PotentialSolver::PotentialSolver(const FeSpace& edge_sp, const FeSpace& face_sp)
    : edge_(&edge_sp), face_(&face_sp) {
  if (edge_sp.mesh != face_sp.mesh)
    throw InvalidArgument("PotentialSolver: spaces live on different meshes");
  if (edge_sp.mesh->dim != 3 || edge_sp.family != Family::Edge || face_sp.family != Family::Face)
    throw InvalidArgument("PotentialSolver: needs 3D edge and face spaces");

  cc_ = assemble_curlcurl(edge_sp);
  ct_ = assemble_curl_test(face_sp, edge_sp);

  bdry_.assign(edge_sp.dim, 0);
  for (int i : edge_sp.boundary_dofs_all()) bdry_[i] = 1;
  Eigen::VectorXd zero_rhs = Eigen::VectorXd::Zero(edge_sp.dim);
  std::vector<int> fixed;
  for (long i = 0; i < edge_sp.dim; ++i)
    if (bdry_[i]) fixed.push_back(static_cast<int>(i));
  eliminate_dirichlet(cc_, zero_rhs, fixed, Eigen::VectorXd::Zero(static_cast<long>(fixed.size())));

  inv_diag_ = Eigen::VectorXd::Ones(edge_sp.dim);
  for (long i = 0; i < edge_sp.dim; ++i) {
    const double d = cc_.coeff(i, i);
    if (d > 0) inv_diag_[i] = 1.0 / d;
  }
}

Eigen::VectorXd PotentialSolver::solve(const Eigen::VectorXd& B) {
  if (B.size() != face_->dim) throw MissingCoefficient("vector potential: coefficient size");

  const double bmax = B.size() ? B.cwiseAbs().maxCoeff() : 0.0;
  if (div_l2_norm(*face_, B) > 1e-9)
    throw InconsistentField("vector potential: field is not solenoidal");
  for (int i : face_->boundary_dofs_all())
    if (std::abs(B[i]) > 1e-10 * (1.0 + bmax))
      throw InconsistentField("vector potential: nonzero normal boundary flux");

  Eigen::VectorXd rhs = ct_ * B;
  for (long i = 0; i < rhs.size(); ++i)
    if (bdry_[i]) rhs[i] = 0.0;
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    warm_ = Eigen::VectorXd::Zero(edge_->dim);
    last_iterations_ = 0;
    return warm_;
  }

  const LinOp prec = [this](const Eigen::VectorXd& r) {
    return Eigen::VectorXd(inv_diag_.cwiseProduct(r));
  };
  SolverConfig cfg;
  cfg.method = SolverConfig::Method::GMRES;
  cfg.rtol = 0.0;
  cfg.atol = 1e-12 * rhs_norm;
  cfg.max_iter = 10000;
  cfg.restart = 400;

  Eigen::VectorXd A;
  if (warm_.size() == edge_->dim) {
    const Eigen::VectorXd r = rhs - cc_ * warm_;
    if (r.norm() <= cfg.atol) {
      last_iterations_ = 0;
      return warm_;
    }
    SolveResult res = solve_linear(cc_, r, cfg, prec);
    A = warm_ + res.x;
    last_iterations_ = res.iterations;
  } else {
    SolveResult res = solve_linear(cc_, rhs, cfg, prec);
    A = res.x;
    last_iterations_ = res.iterations;
  }

  const double rel = (rhs - cc_ * A).norm() / rhs_norm;
  if (rel > 1e-11)
    throw SolverFailure("vector potential: residual above tolerance", rel, last_iterations_);
  warm_ = A;
  return A;
}

Eigen::VectorXd vector_potential(const FeSpace& face_sp, const Eigen::VectorXd& B,
                                 const FeSpace& edge_sp) {
  return PotentialSolver(edge_sp, face_sp).solve(B);
}

namespace {

double ref_volume(int dim) { return dim == 2 ? 0.5 : 1.0 / 6.0; }

// integrals against the pointwise curl of a nodal velocity: (u, curl u),
// (A, curl u), (B, curl u) and |curl u|^2 in one sweep
struct NodalCurlIntegrals {
  double uw = 0, aw = 0, bw = 0, ww = 0;
};

NodalCurlIntegrals nodal_curl_pairings(const FeSpace& u_sp, const Eigen::VectorXd& u,
                                       const FeSpace& B_sp, const Eigen::VectorXd& B,
                                       const FeSpace& A_sp, const Eigen::VectorXd& A) {
  const Mesh& mesh = *u_sp.mesh;
  const int qdeg = 3 * family_degree(u_sp.family) + 2;
  const QuadRule qr = quad_simplex(mesh.dim, qdeg);
  const double vref = ref_volume(mesh.dim);
  NodalCurlIntegrals out;
  for (long c = 0; c < mesh.num_cells(); ++c) {
    const int ci = static_cast<int>(c);
    const BasisData bu = eval_basis(u_sp, ci, qr);
    const Eigen::MatrixXd uq = eval_function(u_sp, u, ci, bu);
    const Eigen::MatrixXd gq = eval_function_grad(u_sp, u, ci, bu);
    const Eigen::MatrixXd bq = eval_function(B_sp, B, ci, eval_basis(B_sp, ci, qr));
    const Eigen::MatrixXd aq = eval_function(A_sp, A, ci, eval_basis(A_sp, ci, qr));
    const double scale = mesh.cell_volume(ci) / vref;
    for (long q = 0; q < qr.weights.size(); ++q) {
      const Eigen::Vector3d w(gq(q, 2 * 3 + 1) - gq(q, 1 * 3 + 2),
                              gq(q, 0 * 3 + 2) - gq(q, 2 * 3 + 0),
                              gq(q, 1 * 3 + 0) - gq(q, 0 * 3 + 1));
      const double wq = qr.weights[q] * scale;
      out.uw += wq * uq.row(q).dot(w);
      out.aw += wq * aq.row(q).dot(w);
      out.bw += wq * bq.row(q).dot(w);
      out.ww += wq * w.squaredNorm();
    }
  }
  return out;
}

}  // namespace

DiagnosticsRecord compute_diagnostics(double time, const Params& prm, const FeSpace& u_sp,
                                      const Eigen::VectorXd& u, const FeSpace& B_sp,
                                      const Eigen::VectorXd& B, const FeSpace& A_sp,
                                      const Eigen::VectorXd& A, const FeSpace* omega_sp,
                                      const Eigen::VectorXd* omega) {
  if (u.size() != u_sp.dim || B.size() != B_sp.dim || A.size() != A_sp.dim)
    throw MissingCoefficient("compute_diagnostics: coefficient size mismatch");
  if (B_sp.family != Family::Face)
    throw InvalidArgument("compute_diagnostics: B must be normal-continuous");
  if ((omega_sp == nullptr) != (omega == nullptr))
    throw InvalidArgument("compute_diagnostics: vorticity space and coefficients go together");

  DiagnosticsRecord rec;
  rec.time = time;

  const double uu = integrate_dot(u_sp, u, u_sp, u);
  const double bb = integrate_dot(B_sp, B, B_sp, B);
  rec.energy = uu + prm.S * bb;
  rec.H_M = integrate_dot(A_sp, A, B_sp, B);
  rec.H_C = integrate_dot(u_sp, u, B_sp, B);

  // pairings against the vorticity: (u, w), (A, w), (B, w), (w, w)
  double uw = 0, aw = 0, bw = 0, ww = 0;
  if (omega != nullptr) {
    uw = integrate_dot(u_sp, u, *omega_sp, *omega);
    aw = integrate_dot(A_sp, A, *omega_sp, *omega);
    bw = integrate_dot(B_sp, B, *omega_sp, *omega);
    ww = integrate_dot(*omega_sp, *omega, *omega_sp, *omega);
  } else if (u_sp.family == Family::Edge && u_sp.mesh->dim == 3) {
    const Eigen::VectorXd cu = u_sp.mesh->d_curl() * u;
    uw = integrate_dot(u_sp, u, B_sp, cu);
    aw = integrate_dot(A_sp, A, B_sp, cu);
    bw = integrate_dot(B_sp, B, B_sp, cu);
    ww = integrate_dot(B_sp, cu, B_sp, cu);
  } else if ((u_sp.family == Family::VecP1 || u_sp.family == Family::VecP2) &&
             u_sp.mesh->dim == 3) {
    const NodalCurlIntegrals p = nodal_curl_pairings(u_sp, u, B_sp, B, A_sp, A);
    uw = p.uw;
    aw = p.aw;
    bw = p.bw;
    ww = p.ww;
  }
  rec.H_F = uw;
  rec.H_H = rec.H_M + prm.beta * aw + prm.alpha * rec.H_C + prm.alpha * prm.beta * uw;
  const double cr = prm.R_H / prm.S;
  rec.hybrid_energy = bb + 2.0 * cr * bw + cr * cr * ww;

  rec.div_B_L2 = div_l2_norm(B_sp, B);
  switch (u_sp.family) {
    case Family::Face:
      rec.div_u_L2 = div_l2_norm(u_sp, u);
      break;
    case Family::VecP1:
    case Family::VecP2: {
      const Mesh& mesh = *u_sp.mesh;
      const QuadRule qr = quad_simplex(mesh.dim, 2 * family_degree(u_sp.family));
      const double vref = ref_volume(mesh.dim);
      double s = 0;
      for (long c = 0; c < mesh.num_cells(); ++c) {
        const int ci = static_cast<int>(c);
        const BasisData bd = eval_basis(u_sp, ci, qr);
        const Eigen::MatrixXd gq = eval_function_grad(u_sp, u, ci, bd);
        const double scale = mesh.cell_volume(ci) / vref;
        const int d = mesh.dim;
        for (long q = 0; q < qr.weights.size(); ++q) {
          double div = 0;
          for (int k = 0; k < d; ++k) div += gq(q, k * d + k);
          s += qr.weights[q] * scale * div * div;
        }
      }
      rec.div_u_L2 = std::sqrt(s);
      break;
    }
    default:
      rec.div_u_L2 = 0.0;  // the edge representation is piecewise solenoidal
  }
  return rec;
}

}  // namespace hallmhd
