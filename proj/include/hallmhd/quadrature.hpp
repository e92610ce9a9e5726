#pragma once

#include <Eigen/Dense>
#include <vector>

namespace hallmhd {

// Quadrature rules on reference simplices, exact for polynomials up to a
// requested total degree.  Simplex rules are built by collapsing tensor
// Gauss-Legendre grids (Duffy transform), which gives positive weights at
// any degree at the price of a few extra points; at the problem sizes this
// library targets that trade is a good one.

struct QuadRule {
  Eigen::MatrixXd points;   // n x dim, reference coordinates
  Eigen::VectorXd weights;  // sums to reference volume (1, 1/2, 1/6)
  int degree = 0;           // polynomials of this total degree are exact
};

// Gauss-Legendre on [0,1]; m points integrate degree 2m-1.
QuadRule gauss_legendre(int npoints);

// Rules on the unit interval/triangle/tetrahedron exact to `degree`.
QuadRule quad_interval(int degree);
QuadRule quad_triangle(int degree);
QuadRule quad_tetrahedron(int degree);

// Dispatch on simplex dimension (1, 2 or 3).
QuadRule quad_simplex(int dim, int degree);

}  // namespace hallmhd
