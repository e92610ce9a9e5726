#pragma once

#include "hallmhd/fespace.hpp"
#include "hallmhd/linalg.hpp"

namespace hallmhd {

// Bilinear form catalog. Trilinear forms freeze one argument (a coefficient
// field in its own space).
enum class FormId {
  Mass,                  // (u, v)
  GradGrad,              // (grad u, grad v)
  DivDiv,                // (div u, div v)
  CurlTest,              // (u, curl v)
  CurlTrial,             // (curl u, v)
  CrossWithFrozenField,  // (u x w, v), w frozen
  ConvectionSkew,        // 1/2 [((w.grad)u, v) - ((w.grad)v, u)], w frozen
  DivPressure,           // (div u, q)
  CurlCurl               // (curl u, curl v)
};

int family_degree(Family f);

SpMat assemble_mass(const FeSpace& trial, const FeSpace& test);
inline SpMat assemble_mass(const FeSpace& sp) { return assemble_mass(sp, sp); }
SpMat assemble_grad_grad(const FeSpace& sp);
SpMat assemble_div_div(const FeSpace& trial, const FeSpace& test);
SpMat assemble_curlcurl(const FeSpace& sp);
SpMat assemble_curl_trial(const FeSpace& trial, const FeSpace& test);
SpMat assemble_curl_test(const FeSpace& trial, const FeSpace& test);
SpMat assemble_div_pressure(const FeSpace& vel, const FeSpace& pres);
SpMat assemble_cross_frozen(const FeSpace& trial, const FeSpace& test, const FeSpace& frozen_sp,
                            const Eigen::VectorXd& frozen);
SpMat assemble_convection_skew(const FeSpace& sp, const FeSpace& frozen_sp,
                               const Eigen::VectorXd& frozen);
// derivative of the skew form with respect to the advecting field, frozen
// transported field w: 1/2 [((u.grad)w, v) - ((u.grad)v, w)]
SpMat assemble_convection_newton(const FeSpace& sp, const FeSpace& frozen_sp,
                                 const Eigen::VectorXd& frozen);

SpMat assemble_form(FormId id, const FeSpace& trial, const FeSpace& test,
                    const FeSpace* frozen_sp = nullptr, const Eigen::VectorXd* frozen = nullptr);

// Coefficient-level exterior derivative into the next space of the sequence
// (nodal deg 1 -> edge, edge -> face, face -> constants); pure signed
// incidence for the implemented lowest-order families.
SpMat assemble_d(const FeSpace& from);

Eigen::VectorXd assemble_load(const FeSpace& test, const FieldFn& f, int degree = 10);

// l_i = integral (a x b) . v_i over the mesh (3D)
Eigen::VectorXd assemble_cross_load(const FeSpace& test, const FeSpace& sa,
                                    const Eigen::VectorXd& a, const FeSpace& sb,
                                    const Eigen::VectorXd& b);
// l_i = 1/2 [ ((w.grad)w, v_i) - ((w.grad)v_i, w) ]
Eigen::VectorXd assemble_convection_load(const FeSpace& sp, const FeSpace& wsp,
                                         const Eigen::VectorXd& w);

// L2 pairing of two coefficient fields, exact for their polynomial degrees.
double integrate_dot(const FeSpace& sa, const Eigen::VectorXd& a, const FeSpace& sb,
                     const Eigen::VectorXd& b);

// gradient of a nodal coefficient field at quadrature points, nq x (vdim*dim)
Eigen::MatrixXd eval_function_grad(const FeSpace& sp, const Eigen::VectorXd& coef, int cell,
                                   const BasisData& basis);

// L2 norms of the exact discrete derivatives. Routed through the incidence
// factorization: the signed integer sums cancel exactly, so values far below
// the rounding floor of the assembled quadratic forms remain meaningful.
double curl_l2_norm(const FeSpace& edge_sp, const Eigen::VectorXd& coef);
double div_l2_norm(const FeSpace& face_sp, const Eigen::VectorXd& coef);

// j in the edge space with (j, k) = (B, curl k) for all edge k, via CG on the
// edge mass matrix to rtol 1e-12.
Eigen::VectorXd weak_curl(const Eigen::VectorXd& B, const FeSpace& face_sp,
                          const FeSpace& edge_sp);

// Symmetric constraint elimination: move prescribed values to the right-hand
// side, replace constrained rows/cols by identity. values may be given per
// constrained dof or as a full-length lifting vector.
void eliminate_dirichlet(SpMat& A, Eigen::VectorXd& b, const std::vector<int>& dofs,
                         const Eigen::VectorXd& values);

}  // namespace hallmhd
