#include "hallmhd/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hallmhd/error.hpp"

namespace hallmhd {

namespace {

using Trip = Eigen::Triplet<double>;

double ref_volume(int dim) { return dim == 2 ? 0.5 : 1.0 / 6.0; }

// kernel fills loc(i_test, j_trial) using basis data and physical weights
using CellKernel =
    std::function<void(int cell, const BasisData& bt, const BasisData& bs,
                       const Eigen::VectorXd& wq, Eigen::MatrixXd& loc)>;

SpMat assemble_generic(const FeSpace& trial, const FeSpace& test, int qdeg,
                       const CellKernel& kernel) {
  if (trial.mesh != test.mesh)
    throw InvalidArgument("assemble: trial and test spaces live on different meshes");
  const Mesh& mesh = *trial.mesh;
  const QuadRule qr = quad_simplex(mesh.dim, qdeg);
  const double vref = ref_volume(mesh.dim);
  std::vector<Trip> trips;
  trips.reserve(mesh.num_cells() * trial.ndof_cell * test.ndof_cell);
  Eigen::MatrixXd loc(test.ndof_cell, trial.ndof_cell);
  for (long c = 0; c < mesh.num_cells(); ++c) {
    const int ci = static_cast<int>(c);
    const BasisData bt = eval_basis(trial, ci, qr);
    const BasisData bs =
        (&trial == &test) ? bt : eval_basis(test, ci, qr);
    const Eigen::VectorXd wq = qr.weights * (mesh.cell_volume(ci) / vref);
    loc.setZero();
    kernel(ci, bt, bs, wq, loc);
    for (int i = 0; i < test.ndof_cell; ++i)
      for (int j = 0; j < trial.ndof_cell; ++j)
        if (loc(i, j) != 0.0)
          trips.emplace_back(test.cell_dofs(c, i), trial.cell_dofs(c, j), loc(i, j));
  }
  SpMat A(test.dim, trial.dim);
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

}  // namespace

int family_degree(Family f) {
  switch (f) {
    case Family::P1:
    case Family::VecP1:
    case Family::Edge:
    case Family::Face:
      return 1;
    case Family::P2:
    case Family::VecP2:
      return 2;
    case Family::DG0:
      return 0;
  }
  return 0;
}

SpMat assemble_mass(const FeSpace& trial, const FeSpace& test) {
  if (trial.vdim != test.vdim)
    throw InvalidArgument("assemble_mass: value dimensions differ");
  const int qdeg = family_degree(trial.family) + family_degree(test.family) + 2;
  const int ndt = trial.ndof_cell, nds = test.ndof_cell;
  return assemble_generic(trial, test, qdeg,
                          [&](int, const BasisData& bt, const BasisData& bs,
                              const Eigen::VectorXd& wq, Eigen::MatrixXd& loc) {
                            for (long q = 0; q < wq.size(); ++q)
                              for (int i = 0; i < nds; ++i)
                                for (int j = 0; j < ndt; ++j)
                                  loc(i, j) += wq[q] * bs.val.row(q * nds + i)
                                                           .dot(bt.val.row(q * ndt + j));
                          });
}

SpMat assemble_grad_grad(const FeSpace& sp) {
  switch (sp.family) {
    case Family::P1:
    case Family::P2:
    case Family::VecP1:
    case Family::VecP2:
      break;
    default:
      throw InvalidArgument("assemble_grad_grad: needs a nodal family");
  }
  const int qdeg = 2 * family_degree(sp.family) + 2;
  const int nd = sp.ndof_cell;
  return assemble_generic(sp, sp, qdeg,
                          [&](int, const BasisData& bt, const BasisData&,
                              const Eigen::VectorXd& wq, Eigen::MatrixXd& loc) {
                            for (long q = 0; q < wq.size(); ++q)
                              for (int i = 0; i < nd; ++i)
                                for (int j = 0; j < nd; ++j)
                                  loc(i, j) += wq[q] * bt.grad.row(q * nd + i)
                                                           .dot(bt.grad.row(q * nd + j));
                          });
}

SpMat assemble_div_div(const FeSpace& trial, const FeSpace& test) {
  const auto has_div = [](Family f) {
    return f == Family::VecP1 || f == Family::VecP2 || f == Family::Face;
  };
  if (!has_div(trial.family) || !has_div(test.family))
    throw InvalidArgument("assemble_div_div: spaces carry no divergence");
  const int qdeg = family_degree(trial.family) + family_degree(test.family) + 2;
  const int ndt = trial.ndof_cell, nds = test.ndof_cell;
  return assemble_generic(trial, test, qdeg,
                          [&](int, const BasisData& bt, const BasisData& bs,
                              const Eigen::VectorXd& wq, Eigen::MatrixXd& loc) {
                            for (long q = 0; q < wq.size(); ++q)
                              for (int i = 0; i < nds; ++i)
                                for (int j = 0; j < ndt; ++j)
                                  loc(i, j) += wq[q] * bs.div(q * nds + i) * bt.div(q * ndt + j);
                          });
}

SpMat assemble_curlcurl(const FeSpace& sp) {
  if (sp.family != Family::Edge)
    throw InvalidArgument("assemble_curlcurl: needs the edge family");
  const int nd = sp.ndof_cell;
  return assemble_generic(sp, sp, 4,
                          [&](int, const BasisData& bt, const BasisData&,
                              const Eigen::VectorXd& wq, Eigen::MatrixXd& loc) {
                            for (long q = 0; q < wq.size(); ++q)
                              for (int i = 0; i < nd; ++i)
                                for (int j = 0; j < nd; ++j)
                                  loc(i, j) += wq[q] * bt.curl.row(q * nd + i)
                                                           .dot(bt.curl.row(q * nd + j));
                          });
}

SpMat assemble_curl_trial(const FeSpace& trial, const FeSpace& test) {
  if (trial.family != Family::Edge && trial.family != Family::P1 && trial.family != Family::P2)
    throw InvalidArgument("assemble_curl_trial: trial family has no curl");
  const int qdeg = family_degree(trial.family) + family_degree(test.family) + 2;
  const int ndt = trial.ndof_cell, nds = test.ndof_cell;
  return assemble_generic(
      trial, test, qdeg,
      [&](int, const BasisData& bt, const BasisData& bs, const Eigen::VectorXd& wq,
          Eigen::MatrixXd& loc) {
        if (bt.curl.cols() != bs.val.cols())
          throw InvalidArgument("assemble_curl_trial: curl/value dimension mismatch");
        for (long q = 0; q < wq.size(); ++q)
          for (int i = 0; i < nds; ++i)
            for (int j = 0; j < ndt; ++j)
              loc(i, j) += wq[q] * bs.val.row(q * nds + i).dot(bt.curl.row(q * ndt + j));
      });
}

SpMat assemble_curl_test(const FeSpace& trial, const FeSpace& test) {
  if (test.family != Family::Edge && test.family != Family::P1 && test.family != Family::P2)
    throw InvalidArgument("assemble_curl_test: test family has no curl");
  const int qdeg = family_degree(trial.family) + family_degree(test.family) + 2;
  const int ndt = trial.ndof_cell, nds = test.ndof_cell;
  return assemble_generic(
      trial, test, qdeg,
      [&](int, const BasisData& bt, const BasisData& bs, const Eigen::VectorXd& wq,
          Eigen::MatrixXd& loc) {
        if (bs.curl.cols() != bt.val.cols())
          throw InvalidArgument("assemble_curl_test: curl/value dimension mismatch");
        for (long q = 0; q < wq.size(); ++q)
          for (int i = 0; i < nds; ++i)
            for (int j = 0; j < ndt; ++j)
              loc(i, j) += wq[q] * bt.val.row(q * ndt + j).dot(bs.curl.row(q * nds + i));
      });
}

SpMat assemble_div_pressure(const FeSpace& vel, const FeSpace& pres) {
  if (pres.vdim != 1) throw InvalidArgument("assemble_div_pressure: pressure must be scalar");
  const auto has_div = [](Family f) {
    return f == Family::VecP1 || f == Family::VecP2 || f == Family::Face;
  };
  if (!has_div(vel.family))
    throw InvalidArgument("assemble_div_pressure: velocity space carries no divergence");
  const int qdeg = family_degree(vel.family) + family_degree(pres.family) + 2;
  const int ndt = vel.ndof_cell, nds = pres.ndof_cell;
  return assemble_generic(vel, pres, qdeg,
                          [&](int, const BasisData& bt, const BasisData& bs,
                              const Eigen::VectorXd& wq, Eigen::MatrixXd& loc) {
                            for (long q = 0; q < wq.size(); ++q)
                              for (int i = 0; i < nds; ++i)
                                for (int j = 0; j < ndt; ++j)
                                  loc(i, j) += wq[q] * bs.val(q * nds + i, 0) * bt.div(q * ndt + j);
                          });
}

SpMat assemble_cross_frozen(const FeSpace& trial, const FeSpace& test, const FeSpace& frozen_sp,
                            const Eigen::VectorXd& frozen) {
  if (trial.mesh->dim != 3)
    throw InvalidArgument("assemble_cross_frozen: full cross product is 3D only");
  if (trial.vdim != 3 || test.vdim != 3 || frozen_sp.vdim != 3)
    throw InvalidArgument("assemble_cross_frozen: all fields must be 3-vectors");
  if (frozen.size() != frozen_sp.dim)
    throw MissingCoefficient("assemble_cross_frozen: frozen coefficient size mismatch");
  const int qdeg = family_degree(trial.family) + family_degree(test.family) +
                   family_degree(frozen_sp.family) + 2;
  const QuadRule qr = quad_simplex(3, qdeg);
  const int ndt = trial.ndof_cell, nds = test.ndof_cell;
  return assemble_generic(
      trial, test, qdeg,
      [&](int cell, const BasisData& bt, const BasisData& bs, const Eigen::VectorXd& wq,
          Eigen::MatrixXd& loc) {
        const BasisData bw = eval_basis(frozen_sp, cell, qr);
        const Eigen::MatrixXd w = eval_function(frozen_sp, frozen, cell, bw);
        for (long q = 0; q < wq.size(); ++q) {
          const Eigen::Vector3d wv = w.row(q);
          for (int j = 0; j < ndt; ++j) {
            const Eigen::Vector3d uxw = Eigen::Vector3d(bt.val.row(q * ndt + j)).cross(wv);
            for (int i = 0; i < nds; ++i)
              loc(i, j) += wq[q] * uxw.dot(bs.val.row(q * nds + i));
          }
        }
      });
}

SpMat assemble_convection_skew(const FeSpace& sp, const FeSpace& frozen_sp,
                               const Eigen::VectorXd& frozen) {
  if (sp.family != Family::VecP1 && sp.family != Family::VecP2)
    throw InvalidArgument("assemble_convection_skew: needs a vector nodal space");
  if (frozen.size() != frozen_sp.dim)
    throw MissingCoefficient("assemble_convection_skew: frozen coefficient size mismatch");
  const int d = sp.mesh->dim;
  const int qdeg = 2 * family_degree(sp.family) + family_degree(frozen_sp.family) + 2;
  const QuadRule qr = quad_simplex(d, qdeg);
  const int nd = sp.ndof_cell;
  return assemble_generic(
      sp, sp, qdeg,
      [&](int cell, const BasisData& bt, const BasisData&, const Eigen::VectorXd& wq,
          Eigen::MatrixXd& loc) {
        const BasisData bw = eval_basis(frozen_sp, cell, qr);
        const Eigen::MatrixXd w = eval_function(frozen_sp, frozen, cell, bw);
        for (long q = 0; q < wq.size(); ++q) {
          for (int i = 0; i < nd; ++i)
            for (int j = 0; j < nd; ++j) {
              double adv_u = 0, adv_v = 0;  // ((w.grad)u_j).v_i and ((w.grad)v_i).u_j
              for (int k = 0; k < d; ++k)
                for (int mcomp = 0; mcomp < d; ++mcomp) {
                  adv_u += w(q, mcomp) * bt.grad(q * nd + j, k * d + mcomp) * bt.val(q * nd + i, k);
                  adv_v += w(q, mcomp) * bt.grad(q * nd + i, k * d + mcomp) * bt.val(q * nd + j, k);
                }
              loc(i, j) += 0.5 * wq[q] * (adv_u - adv_v);
            }
        }
      });
}

SpMat assemble_convection_newton(const FeSpace& sp, const FeSpace& frozen_sp,
                                 const Eigen::VectorXd& frozen) {
  if (sp.family != Family::VecP1 && sp.family != Family::VecP2)
    throw InvalidArgument("assemble_convection_newton: needs a vector nodal space");
  if (frozen.size() != frozen_sp.dim)
    throw MissingCoefficient("assemble_convection_newton: frozen coefficient size mismatch");
  const int d = sp.mesh->dim;
  const int qdeg = 2 * family_degree(sp.family) + family_degree(frozen_sp.family) + 2;
  const QuadRule qr = quad_simplex(d, qdeg);
  const int nd = sp.ndof_cell;
  return assemble_generic(
      sp, sp, qdeg,
      [&](int cell, const BasisData& bt, const BasisData&, const Eigen::VectorXd& wq,
          Eigen::MatrixXd& loc) {
        const BasisData bw = eval_basis(frozen_sp, cell, qr);
        const Eigen::MatrixXd w = eval_function(frozen_sp, frozen, cell, bw);
        const Eigen::MatrixXd gw = eval_function_grad(frozen_sp, frozen, cell, bw);
        for (long q = 0; q < wq.size(); ++q) {
          for (int i = 0; i < nd; ++i)
            for (int j = 0; j < nd; ++j) {
              double adv_w = 0, adv_v = 0;  // ((u_j.grad)w).v_i and ((u_j.grad)v_i).w
              for (int k = 0; k < d; ++k)
                for (int mcomp = 0; mcomp < d; ++mcomp) {
                  adv_w += bt.val(q * nd + j, mcomp) * gw(q, k * d + mcomp) * bt.val(q * nd + i, k);
                  adv_v += bt.val(q * nd + j, mcomp) * bt.grad(q * nd + i, k * d + mcomp) * w(q, k);
                }
              loc(i, j) += 0.5 * wq[q] * (adv_w - adv_v);
            }
        }
      });
}

SpMat assemble_form(FormId id, const FeSpace& trial, const FeSpace& test,
                    const FeSpace* frozen_sp, const Eigen::VectorXd* frozen) {
  const auto need_frozen = [&]() {
    if (!frozen_sp || !frozen)
      throw MissingCoefficient("assemble_form: trilinear form needs a frozen coefficient field");
  };
  switch (id) {
    case FormId::Mass:
      return assemble_mass(trial, test);
    case FormId::GradGrad:
      if (&trial != &test && (trial.family != test.family || trial.mesh != test.mesh))
        throw InvalidArgument("assemble_form: grad_grad needs matching spaces");
      return assemble_grad_grad(trial);
    case FormId::DivDiv:
      return assemble_div_div(trial, test);
    case FormId::CurlTest:
      return assemble_curl_test(trial, test);
    case FormId::CurlTrial:
      return assemble_curl_trial(trial, test);
    case FormId::CrossWithFrozenField:
      need_frozen();
      return assemble_cross_frozen(trial, test, *frozen_sp, *frozen);
    case FormId::ConvectionSkew:
      need_frozen();
      if (&trial != &test && (trial.family != test.family || trial.mesh != test.mesh))
        throw InvalidArgument("assemble_form: convection needs matching spaces");
      return assemble_convection_skew(trial, *frozen_sp, *frozen);
    case FormId::DivPressure:
      return assemble_div_pressure(trial, test);
    case FormId::CurlCurl:
      if (&trial != &test && (trial.family != test.family || trial.mesh != test.mesh))
        throw InvalidArgument("assemble_form: curlcurl needs matching spaces");
      return assemble_curlcurl(trial);
  }
  throw InvalidArgument("assemble_form: unknown form id");
}

SpMat assemble_d(const FeSpace& from) {
  const Mesh& m = *from.mesh;
  switch (from.family) {
    case Family::P1:
      return m.d_grad();
    case Family::Edge:
      return m.d_curl();
    case Family::Face:
      return m.d_div();
    default:
      throw InvalidArgument("assemble_d: no next space in the sequence for this family");
  }
}

Eigen::VectorXd assemble_load(const FeSpace& test, const FieldFn& f, int degree) {
  const Mesh& mesh = *test.mesh;
  const QuadRule qr = quad_simplex(mesh.dim, std::max(degree, family_degree(test.family) + 2));
  const double vref = ref_volume(mesh.dim);
  const int nd = test.ndof_cell;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(test.dim);
  for (long c = 0; c < mesh.num_cells(); ++c) {
    const int ci = static_cast<int>(c);
    const BasisData bs = eval_basis(test, ci, qr);
    const Eigen::MatrixXd x = phys_points(mesh, ci, qr);
    const double scale = mesh.cell_volume(ci) / vref;
    for (long q = 0; q < qr.weights.size(); ++q) {
      const Eigen::VectorXd fv = f(x.row(q).transpose());
      if (fv.size() != test.vdim)
        throw InvalidArgument("assemble_load: field has wrong number of components");
      const double w = qr.weights[q] * scale;
      for (int i = 0; i < nd; ++i)
        out[test.cell_dofs(c, i)] += w * bs.val.row(q * nd + i).dot(fv.transpose());
    }
  }
  return out;
}

Eigen::VectorXd assemble_cross_load(const FeSpace& test, const FeSpace& sa,
                                    const Eigen::VectorXd& a, const FeSpace& sb,
                                    const Eigen::VectorXd& b) {
  if (test.mesh->dim != 3)
    throw InvalidArgument("assemble_cross_load: full cross product is 3D only");
  const Mesh& mesh = *test.mesh;
  const int qdeg = family_degree(test.family) + family_degree(sa.family) +
                   family_degree(sb.family) + 2;
  const QuadRule qr = quad_simplex(3, qdeg);
  const double vref = ref_volume(3);
  const int nd = test.ndof_cell;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(test.dim);
  for (long c = 0; c < mesh.num_cells(); ++c) {
    const int ci = static_cast<int>(c);
    const BasisData bs = eval_basis(test, ci, qr);
    const Eigen::MatrixXd va = eval_function(sa, a, ci, eval_basis(sa, ci, qr));
    const Eigen::MatrixXd vb = eval_function(sb, b, ci, eval_basis(sb, ci, qr));
    const double scale = mesh.cell_volume(ci) / vref;
    for (long q = 0; q < qr.weights.size(); ++q) {
      const Eigen::Vector3d axb = Eigen::Vector3d(va.row(q)).cross(Eigen::Vector3d(vb.row(q)));
      const double w = qr.weights[q] * scale;
      for (int i = 0; i < nd; ++i)
        out[test.cell_dofs(c, i)] += w * axb.dot(bs.val.row(q * nd + i));
    }
  }
  return out;
}

Eigen::VectorXd assemble_convection_load(const FeSpace& sp, const FeSpace& wsp,
                                         const Eigen::VectorXd& w) {
  if (sp.family != Family::VecP1 && sp.family != Family::VecP2)
    throw InvalidArgument("assemble_convection_load: needs a vector nodal space");
  const Mesh& mesh = *sp.mesh;
  const int d = mesh.dim;
  const int qdeg = family_degree(sp.family) + 2 * family_degree(wsp.family) + 2;
  const QuadRule qr = quad_simplex(d, qdeg);
  const double vref = ref_volume(d);
  const int nd = sp.ndof_cell;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(sp.dim);
  for (long c = 0; c < mesh.num_cells(); ++c) {
    const int ci = static_cast<int>(c);
    const BasisData bs = eval_basis(sp, ci, qr);
    const BasisData bw = eval_basis(wsp, ci, qr);
    const Eigen::MatrixXd wv = eval_function(wsp, w, ci, bw);
    const Eigen::MatrixXd gw = eval_function_grad(wsp, w, ci, bw);
    const double scale = mesh.cell_volume(ci) / vref;
    for (long q = 0; q < qr.weights.size(); ++q) {
      const double wgt = qr.weights[q] * scale;
      for (int i = 0; i < nd; ++i) {
        double adv_w = 0, adv_v = 0;
        for (int k = 0; k < d; ++k)
          for (int mcomp = 0; mcomp < d; ++mcomp) {
            adv_w += wv(q, mcomp) * gw(q, k * d + mcomp) * bs.val(q * nd + i, k);
            adv_v += wv(q, mcomp) * bs.grad(q * nd + i, k * d + mcomp) * wv(q, k);
          }
        out[sp.cell_dofs(c, i)] += 0.5 * wgt * (adv_w - adv_v);
      }
    }
  }
  return out;
}

double integrate_dot(const FeSpace& sa, const Eigen::VectorXd& a, const FeSpace& sb,
                     const Eigen::VectorXd& b) {
  if (sa.mesh != sb.mesh) throw InvalidArgument("integrate_dot: different meshes");
  if (sa.vdim != sb.vdim) throw InvalidArgument("integrate_dot: value dimensions differ");
  const Mesh& mesh = *sa.mesh;
  const int qdeg = family_degree(sa.family) + family_degree(sb.family) + 2;
  const QuadRule qr = quad_simplex(mesh.dim, qdeg);
  const double vref = ref_volume(mesh.dim);
  double sum = 0;
  for (long c = 0; c < mesh.num_cells(); ++c) {
    const int ci = static_cast<int>(c);
    const Eigen::MatrixXd va = eval_function(sa, a, ci, eval_basis(sa, ci, qr));
    const Eigen::MatrixXd vb = eval_function(sb, b, ci, eval_basis(sb, ci, qr));
    const double scale = mesh.cell_volume(ci) / vref;
    for (long q = 0; q < qr.weights.size(); ++q)
      sum += qr.weights[q] * scale * va.row(q).dot(vb.row(q));
  }
  return sum;
}

Eigen::MatrixXd eval_function_grad(const FeSpace& sp, const Eigen::VectorXd& coef, int cell,
                                   const BasisData& basis) {
  if (basis.grad.size() == 0)
    throw InvalidArgument("eval_function_grad: family carries no full gradient");
  const int nd = sp.ndof_cell;
  const long nq = basis.val.rows() / nd;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nq, basis.grad.cols());
  for (long q = 0; q < nq; ++q)
    for (int i = 0; i < nd; ++i)
      out.row(q) += coef[sp.cell_dofs(cell, i)] * basis.grad.row(q * nd + i);
  return out;
}

double curl_l2_norm(const FeSpace& edge_sp, const Eigen::VectorXd& coef) {
  if (edge_sp.family != Family::Edge)
    throw InvalidArgument("curl_l2_norm: expected the tangential edge family");
  if (coef.size() != edge_sp.dim) throw MissingCoefficient("curl_l2_norm: coefficient size");
  const Mesh& m = *edge_sp.mesh;
  const Eigen::VectorXd c = m.d_curl() * coef;
  if (m.dim == 3) {
    const FeSpace face = build_space(m, Family::Face);
    return std::sqrt(std::max(0.0, c.dot(assemble_mass(face) * c)));
  }
  double s = 0;  // piecewise constant scalar curl c_k / vol_k
  for (long k = 0; k < m.num_cells(); ++k) s += c[k] * c[k] / m.cell_volume(static_cast<int>(k));
  return std::sqrt(s);
}

double div_l2_norm(const FeSpace& face_sp, const Eigen::VectorXd& coef) {
  if (face_sp.family != Family::Face)
    throw InvalidArgument("div_l2_norm: expected the normal-continuous family");
  if (coef.size() != face_sp.dim) throw MissingCoefficient("div_l2_norm: coefficient size");
  const Mesh& m = *face_sp.mesh;
  const Eigen::VectorXd c = m.d_div() * coef;
  double s = 0;  // piecewise constant divergence c_k / vol_k
  for (long k = 0; k < m.num_cells(); ++k) s += c[k] * c[k] / m.cell_volume(static_cast<int>(k));
  return std::sqrt(s);
}

Eigen::VectorXd weak_curl(const Eigen::VectorXd& B, const FeSpace& face_sp,
                          const FeSpace& edge_sp) {
  if (B.size() != face_sp.dim) throw InvalidArgument("weak_curl: coefficient size mismatch");
  const SpMat A = assemble_curl_test(face_sp, edge_sp);  // (B, curl k)
  const SpMat M = assemble_mass(edge_sp);
  SolverConfig cfg;
  cfg.method = SolverConfig::Method::CG;
  cfg.rtol = 1e-12;
  cfg.max_iter = 20000;
  return solve_linear(M, Eigen::VectorXd(A * B), cfg).x;
}

void eliminate_dirichlet(SpMat& A, Eigen::VectorXd& b, const std::vector<int>& dofs,
                         const Eigen::VectorXd& values) {
  const long n = A.rows();
  if (A.cols() != n) throw InvalidArgument("eliminate_dirichlet: matrix not square");
  if (b.size() != n) throw InvalidArgument("eliminate_dirichlet: rhs size mismatch");
  std::vector<char> fixed(n, 0);
  std::vector<double> val(n, 0.0);
  const bool full = values.size() == n;
  if (!full && values.size() != static_cast<long>(dofs.size()))
    throw InvalidArgument("eliminate_dirichlet: values must match dofs or system size");
  for (size_t k = 0; k < dofs.size(); ++k) {
    const int i = dofs[k];
    if (i < 0 || i >= n) throw InvalidArgument("eliminate_dirichlet: dof out of range");
    fixed[i] = 1;
    val[i] = full ? values[i] : values[static_cast<long>(k)];
  }
  std::vector<Trip> trips;
  trips.reserve(A.nonZeros() + dofs.size());
  for (int r = 0; r < A.outerSize(); ++r)
    for (SpMat::InnerIterator it(A, r); it; ++it) {
      const long i = it.row(), j = it.col();
      if (fixed[i]) continue;
      if (fixed[j])
        b[i] -= it.value() * val[j];
      else
        trips.emplace_back(static_cast<int>(i), static_cast<int>(j), it.value());
    }
  for (long i = 0; i < n; ++i)
    if (fixed[i]) {
      trips.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
      b[i] = val[i];
    }
  SpMat out(n, n);
  out.setFromTriplets(trips.begin(), trips.end());
  A.swap(out);
}

}  // namespace hallmhd
