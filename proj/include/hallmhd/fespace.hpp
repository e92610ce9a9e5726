#pragma once

#include <functional>
#include <vector>

#include "hallmhd/mesh.hpp"
#include "hallmhd/quadrature.hpp"

namespace hallmhd {

// Conforming families on simplicial meshes.
//   P1/P2     : scalar Lagrange (H1)
//   VecP1/2   : vector Lagrange, component-interleaved dofs
//   Edge      : lowest-order tangential-continuous family (H(curl)), one
//               circulation dof per edge, oriented low -> high vertex id
//   Face      : lowest-order normal-continuous family (H(div)); in 2D this
//               is the 90-degree rotation of Edge, one flux dof per edge
//   DG0       : piecewise constants
//
// Basis functions are built directly in physical coordinates from the
// barycentric gradients of each cell, with local vertices in ascending
// geometric order, so shared-entity orientation is automatic and no Piola
// sign bookkeeping is needed anywhere.
enum class Family { P1, P2, VecP1, VecP2, Edge, Face, DG0 };

struct FeSpace {
  const Mesh* mesh = nullptr;
  Family family = Family::P1;
  long dim = 0;       // merged global dof count
  int ndof_cell = 0;  // local dofs per cell
  int vdim = 1;       // value components
  Eigen::MatrixXi cell_dofs;

  // Dofs whose trace functionals live on the given boundary parts (point
  // values / tangential circulations / normal fluxes as appropriate).
  std::vector<int> boundary_dofs(const std::vector<int>& markers) const;
  std::vector<int> boundary_dofs_all() const;
};

// degree selects within a family: nodal degree 1/2 for P-type, degree 1 for
// Edge/Face (the only implemented order), 0 for DG0.
FeSpace build_space(const Mesh& mesh, Family family, int degree = 1);

// Values and first-order differential operators of all local basis
// functions at a set of reference points.  Row layout: q * ndof_cell + i.
struct BasisData {
  Eigen::MatrixXd val;   // x vdim
  Eigen::MatrixXd grad;  // nodal families: x (vdim*dim), component-major
  Eigen::VectorXd div;   // VecP1/2 and Face
  Eigen::MatrixXd curl;  // Edge: x3 in 3D, x1 in 2D; P1 in 2D: rotated grad x2
};

BasisData eval_basis(const FeSpace& sp, int cell, const QuadRule& qr);

// Physical coordinates of reference quadrature points in a cell, nq x dim.
Eigen::MatrixXd phys_points(const Mesh& mesh, int cell, const QuadRule& qr);

// Value of the coefficient field at each quadrature point, nq x vdim.
Eigen::MatrixXd eval_function(const FeSpace& sp, const Eigen::VectorXd& coef, int cell,
                              const BasisData& basis);

// Canonical degrees of freedom of an analytic field: point values, edge
// circulations, face fluxes, cell averages.  f maps a point to vdim values.
using FieldFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
Eigen::VectorXd interpolate(const FeSpace& sp, const FieldFn& f);

}  // namespace hallmhd
