#include "hallmhd/quadrature.hpp"

#include <cmath>

#include "hallmhd/error.hpp"

namespace hallmhd {

QuadRule gauss_legendre(int npoints) {
  if (npoints < 1) throw InvalidArgument("gauss_legendre: npoints must be >= 1");
  // Newton iteration on Legendre polynomials over [-1,1], then map to [0,1].
  Eigen::VectorXd x(npoints), w(npoints);
  const int n = npoints;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p0 = 0, p1 = 0;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2 * k + 1) * t * p1 - k * p2) / (k + 1);
      }
      const double dp = n * (t * p0 - p1) / (t * t - 1.0);
      const double dt = p0 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    // recompute derivative at the converged node for the weight
    p0 = 1.0;
    p1 = 0.0;
    for (int k = 0; k < n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2 * k + 1) * t * p1 - k * p2) / (k + 1);
    }
    const double dp = n * (t * p0 - p1) / (t * t - 1.0);
    x[i] = t;
    x[n - 1 - i] = -t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    w[n - 1 - i] = w[i];
  }
  QuadRule r;
  r.points.resize(n, 1);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    r.points(i, 0) = 0.5 * (1.0 - x[i]);  // map [-1,1] -> [0,1]
    r.weights[i] = 0.5 * w[i];
  }
  r.degree = 2 * n - 1;
  return r;
}

QuadRule quad_interval(int degree) {
  if (degree < 0) throw InvalidArgument("quad_interval: degree must be >= 0");
  QuadRule r = gauss_legendre(degree / 2 + 1);
  r.degree = degree;
  return r;
}

QuadRule quad_triangle(int degree) {
  if (degree < 0) throw InvalidArgument("quad_triangle: degree must be >= 0");
  // Duffy map (a,b) in [0,1]^2 -> (x,y) = (a(1-b), b); Jacobian (1-b).
  // Monomial x^i y^j pulls back to degree i in a and i+j+1 in b.
  const QuadRule ga = gauss_legendre(degree / 2 + 1);
  const QuadRule gb = gauss_legendre((degree + 1) / 2 + 1);
  const int n = static_cast<int>(ga.weights.size() * gb.weights.size());
  QuadRule r;
  r.points.resize(n, 2);
  r.weights.resize(n);
  int q = 0;
  for (int i = 0; i < ga.weights.size(); ++i)
    for (int j = 0; j < gb.weights.size(); ++j, ++q) {
      const double a = ga.points(i, 0), b = gb.points(j, 0);
      r.points(q, 0) = a * (1.0 - b);
      r.points(q, 1) = b;
      r.weights[q] = ga.weights[i] * gb.weights[j] * (1.0 - b);
    }
  r.degree = degree;
  return r;
}

QuadRule quad_tetrahedron(int degree) {
  if (degree < 0) throw InvalidArgument("quad_tetrahedron: degree must be >= 0");
  // Double Duffy: (a,b,c) -> (x,y,z) = (a(1-b)(1-c), b(1-c), c),
  // Jacobian (1-b)(1-c)^2.  Pullback degrees: a: i, b: i+j+1, c: i+j+k+2.
  const QuadRule ga = gauss_legendre(degree / 2 + 1);
  const QuadRule gb = gauss_legendre((degree + 1) / 2 + 1);
  const QuadRule gc = gauss_legendre((degree + 2) / 2 + 1);
  const int n = static_cast<int>(ga.weights.size() * gb.weights.size() * gc.weights.size());
  QuadRule r;
  r.points.resize(n, 3);
  r.weights.resize(n);
  int q = 0;
  for (int i = 0; i < ga.weights.size(); ++i)
    for (int j = 0; j < gb.weights.size(); ++j)
      for (int k = 0; k < gc.weights.size(); ++k, ++q) {
        const double a = ga.points(i, 0), b = gb.points(j, 0), c = gc.points(k, 0);
        r.points(q, 0) = a * (1.0 - b) * (1.0 - c);
        r.points(q, 1) = b * (1.0 - c);
        r.points(q, 2) = c;
        r.weights[q] =
            ga.weights[i] * gb.weights[j] * gc.weights[k] * (1.0 - b) * (1.0 - c) * (1.0 - c);
      }
  r.degree = degree;
  return r;
}

QuadRule quad_simplex(int dim, int degree) {
  switch (dim) {
    case 1: return quad_interval(degree);
    case 2: return quad_triangle(degree);
    case 3: return quad_tetrahedron(degree);
    default: throw InvalidArgument("quad_simplex: dim must be 1, 2 or 3");
  }
}

}  // namespace hallmhd
