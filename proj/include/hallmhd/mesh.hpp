#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <string>
#include <vector>

namespace hallmhd {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Boundary part labels for the unit box. With periodic_x the x planes are
// identified and stop being boundary.
enum Marker : int { XMIN = 0, XMAX = 1, YMIN = 2, YMAX = 3, ZMIN = 4, ZMAX = 5 };

// Structured simplicial mesh of a box, built on [0,1]^dim and optionally
// rescaled.  Squares are split along the (0,0)-(1,1) diagonal; cubes get the
// six-tetrahedra split around the main diagonal, so neighbouring cells always
// agree on face diagonals.
//
// Every cell/face/edge is stored as a strictly increasing tuple of geometric
// vertex ids; that single convention fixes all entity orientations, and the
// signed incidence matrices below are the coboundary maps of the resulting
// complex (integer entries, d o d = 0 exactly).
//
// Periodic identification in x is a master/slave merge: entities lying
// wholly in the x = max plane alias the translated entities in the x = min
// plane.  Geometry (cell coordinates) stays unwrapped; only the merged ids
// that finite element spaces use for numbering wrap around.
struct Mesh {
  int dim = 0;
  int n = 0;
  bool periodic_x = false;
  std::array<double, 3> box_lo{0, 0, 0};
  std::array<double, 3> box_hi{1, 1, 1};

  Eigen::MatrixXd verts;       // geometric vertex coords, (n+1)^dim rows
  Eigen::MatrixXi cells;       // ncell x (dim+1), ascending geometric ids
  Eigen::MatrixXi edges;       // nedge_geo x 2
  Eigen::MatrixXi faces;       // 3D only: nface_geo x 3
  Eigen::MatrixXi cell_edges;  // ncell x (3 | 6)
  Eigen::MatrixXi cell_faces;  // 3D only: ncell x 4

  std::vector<int> vert_gid, edge_gid, face_gid;  // geometric -> merged id
  long nv = 0, ne = 0, nf = 0;                    // merged entity counts

  // Codim-1 facets are faces in 3D and edges in 2D.  marker >= 0 labels true
  // boundary facets; interior (including periodic seam) facets carry -1.
  std::vector<int> facet_marker;

  long num_cells() const { return cells.rows(); }
  long num_facets() const { return dim == 3 ? faces.rows() : edges.rows(); }

  // Signed incidence (coboundary) matrices on merged ids.
  //   d_grad: edges x vertices        (both dims)
  //   d_curl: faces x edges in 3D, cells x edges in 2D
  //   d_div : cells x faces in 3D, cells x edges in 2D (same matrix as
  //           d_curl; the two lowest-order 2D complexes share coefficients)
  SpMat d_grad() const;
  SpMat d_curl() const;
  SpMat d_div() const;

  // incidence(1) = d_grad, incidence(2) = d_curl, incidence(3) = d_div.
  // k outside 1..dim -> invalid-argument.
  SpMat incidence(int k) const;

  double cell_volume(int c) const;

  // Gradients of the barycentric coordinates of cell c, one row per cell
  // vertex (constant over the cell).
  Eigen::MatrixXd grad_lambda(int c) const;

  // Affinely rescale [0,1]^dim coordinates into [lo,hi] per axis.
  void set_box(const std::array<double, 3>& lo, const std::array<double, 3>& hi);
};

// Build the structured mesh of [0,1]^dim with n subdivisions per axis.
// Periodic identification is 2D only and requires n >= 2 (with n = 1 a cell
// would touch its own image across the seam).
Mesh build_mesh(int dim, int n, bool periodic_x = false);

// Legacy-ASCII VTK export (POINTS / CELLS / CELL_TYPES, optionally one
// scalar cell field).
void vtk_write(const Mesh& mesh, const std::string& path,
               const Eigen::VectorXd* cell_field = nullptr,
               const std::string& field_name = "field");

}  // namespace hallmhd
