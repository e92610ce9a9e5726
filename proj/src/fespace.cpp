#include "hallmhd/fespace.hpp"

#include <algorithm>

#include "hallmhd/error.hpp"

namespace hallmhd {

namespace {

// local index pairs for edges, (p,q) with p < q, matching Mesh::cell_edges
constexpr int kEdgePairs3[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
constexpr int kEdgePairs2[3][2] = {{0, 1}, {0, 2}, {1, 2}};

// local ascending triples for faces in omit-vertex order, matching cell_faces
constexpr int kFaceTriples[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};

Eigen::MatrixXd lambda_at(const QuadRule& qr, int dim) {
  const long nq = qr.weights.size();
  Eigen::MatrixXd lam(nq, dim + 1);
  for (long q = 0; q < nq; ++q) {
    double s = 0;
    for (int m = 0; m < dim; ++m) {
      lam(q, m + 1) = qr.points(q, m);
      s += qr.points(q, m);
    }
    lam(q, 0) = 1.0 - s;
  }
  return lam;
}

int edge_row(const Mesh& mesh, int a, int b) {
  // mesh.edges is sorted lexicographically; binary search by rows
  long lo = 0, hi = mesh.edges.rows();
  while (lo < hi) {
    const long mid = (lo + hi) / 2;
    const int ma = mesh.edges(mid, 0), mb = mesh.edges(mid, 1);
    if (ma < a || (ma == a && mb < b))
      lo = mid + 1;
    else
      hi = mid;
  }
  return static_cast<int>(lo);
}

}  // namespace

FeSpace build_space(const Mesh& mesh, Family family, int degree) {
  FeSpace sp;
  sp.mesh = &mesh;
  sp.family = family;
  const long ncell = mesh.num_cells();
  const int d = mesh.dim;
  const int nvc = d + 1;

  const auto expect_degree = [&](int want) {
    if (degree != want)
      throw UnsupportedElement("build_space: degree " + std::to_string(degree) +
                               " not implemented for this family (only " +
                               std::to_string(want) + ")");
  };

  switch (family) {
    case Family::P1:
    case Family::VecP1:
      expect_degree(1);
      break;
    case Family::P2:
    case Family::VecP2:
      expect_degree(2);
      break;
    case Family::Edge:
    case Family::Face:
      expect_degree(1);
      break;
    case Family::DG0:
      expect_degree(0);
      break;
  }

  switch (family) {
    case Family::P1:
    case Family::VecP1: {
      const int vd = family == Family::VecP1 ? d : 1;
      sp.vdim = vd;
      sp.dim = mesh.nv * vd;
      sp.ndof_cell = nvc * vd;
      sp.cell_dofs.resize(ncell, sp.ndof_cell);
      for (long c = 0; c < ncell; ++c)
        for (int p = 0; p < nvc; ++p)
          for (int k = 0; k < vd; ++k)
            sp.cell_dofs(c, p * vd + k) = mesh.vert_gid[mesh.cells(c, p)] * vd + k;
      break;
    }
    case Family::P2:
    case Family::VecP2: {
      const int vd = family == Family::VecP2 ? d : 1;
      const int nsc = nvc + (d == 2 ? 3 : 6);
      sp.vdim = vd;
      sp.dim = (mesh.nv + mesh.ne) * vd;
      sp.ndof_cell = nsc * vd;
      sp.cell_dofs.resize(ncell, sp.ndof_cell);
      for (long c = 0; c < ncell; ++c) {
        for (int p = 0; p < nvc; ++p)
          for (int k = 0; k < vd; ++k)
            sp.cell_dofs(c, p * vd + k) = mesh.vert_gid[mesh.cells(c, p)] * vd + k;
        const int nle = d == 2 ? 3 : 6;
        for (int e = 0; e < nle; ++e)
          for (int k = 0; k < vd; ++k)
            sp.cell_dofs(c, (nvc + e) * vd + k) =
                (mesh.nv + mesh.edge_gid[mesh.cell_edges(c, e)]) * vd + k;
      }
      break;
    }
    case Family::Edge: {
      sp.vdim = d;
      sp.dim = mesh.ne;
      sp.ndof_cell = d == 2 ? 3 : 6;
      sp.cell_dofs.resize(ncell, sp.ndof_cell);
      for (long c = 0; c < ncell; ++c)
        for (int e = 0; e < sp.ndof_cell; ++e)
          sp.cell_dofs(c, e) = mesh.edge_gid[mesh.cell_edges(c, e)];
      break;
    }
    case Family::Face: {
      sp.vdim = d;
      if (d == 3) {
        sp.dim = mesh.nf;
        sp.ndof_cell = 4;
        sp.cell_dofs.resize(ncell, 4);
        for (long c = 0; c < ncell; ++c)
          for (int f = 0; f < 4; ++f)
            sp.cell_dofs(c, f) = mesh.face_gid[mesh.cell_faces(c, f)];
      } else {
        sp.dim = mesh.ne;
        sp.ndof_cell = 3;
        sp.cell_dofs.resize(ncell, 3);
        for (long c = 0; c < ncell; ++c)
          for (int e = 0; e < 3; ++e)
            sp.cell_dofs(c, e) = mesh.edge_gid[mesh.cell_edges(c, e)];
      }
      break;
    }
    case Family::DG0: {
      sp.vdim = 1;
      sp.dim = ncell;
      sp.ndof_cell = 1;
      sp.cell_dofs.resize(ncell, 1);
      for (long c = 0; c < ncell; ++c) sp.cell_dofs(c, 0) = static_cast<int>(c);
      break;
    }
  }
  return sp;
}

BasisData eval_basis(const FeSpace& sp, int cell, const QuadRule& qr) {
  const Mesh& mesh = *sp.mesh;
  const int d = mesh.dim;
  const long nq = qr.weights.size();
  const Eigen::MatrixXd lam = lambda_at(qr, d);
  const Eigen::MatrixXd gl = mesh.grad_lambda(cell);  // (d+1) x d
  const int nd = sp.ndof_cell;

  BasisData b;
  b.val.setZero(nq * nd, sp.vdim);

  const auto edge_pairs = [&](int e, int& p, int& q) {
    if (d == 2) {
      p = kEdgePairs2[e][0];
      q = kEdgePairs2[e][1];
    } else {
      p = kEdgePairs3[e][0];
      q = kEdgePairs3[e][1];
    }
  };

  switch (sp.family) {
    case Family::P1: {
      b.grad.setZero(nq * nd, d);
      for (long q = 0; q < nq; ++q)
        for (int i = 0; i <= d; ++i) {
          b.val(q * nd + i, 0) = lam(q, i);
          b.grad.row(q * nd + i) = gl.row(i);
        }
      if (d == 2) {
        // rotated gradient (d/dy, -d/dx), the image of P1 in the 2D
        // normal-continuous complex
        b.curl.setZero(nq * nd, 2);
        for (long r = 0; r < nq * nd; ++r) {
          b.curl(r, 0) = b.grad(r, 1);
          b.curl(r, 1) = -b.grad(r, 0);
        }
      }
      break;
    }
    case Family::P2: {
      const int nvc = d + 1;
      b.grad.setZero(nq * nd, d);
      for (long q = 0; q < nq; ++q) {
        for (int i = 0; i < nvc; ++i) {
          const double l = lam(q, i);
          b.val(q * nd + i, 0) = l * (2 * l - 1);
          b.grad.row(q * nd + i) = (4 * l - 1) * gl.row(i);
        }
        const int nle = d == 2 ? 3 : 6;
        for (int e = 0; e < nle; ++e) {
          int p, r;
          edge_pairs(e, p, r);
          b.val(q * nd + nvc + e, 0) = 4 * lam(q, p) * lam(q, r);
          b.grad.row(q * nd + nvc + e) = 4 * (lam(q, r) * gl.row(p) + lam(q, p) * gl.row(r));
        }
      }
      if (d == 2) {
        b.curl.setZero(nq * nd, 2);
        for (long r = 0; r < nq * nd; ++r) {
          b.curl(r, 0) = b.grad(r, 1);
          b.curl(r, 1) = -b.grad(r, 0);
        }
      }
      break;
    }
    case Family::VecP1:
    case Family::VecP2: {
      // scalar basis tensorized: dof s*vd + k carries the scalar function in
      // component k
      FeSpace scalar = sp;
      scalar.family = sp.family == Family::VecP1 ? Family::P1 : Family::P2;
      scalar.vdim = 1;
      scalar.ndof_cell = nd / d;
      const BasisData sb = eval_basis(scalar, cell, qr);
      const int ns = scalar.ndof_cell;
      b.grad.setZero(nq * nd, d * d);  // component-major: comp k derivs at cols k*d..k*d+d-1
      b.div.setZero(nq * nd);
      for (long q = 0; q < nq; ++q)
        for (int s = 0; s < ns; ++s)
          for (int k = 0; k < d; ++k) {
            const long row = q * nd + s * d + k;
            b.val(row, k) = sb.val(q * ns + s, 0);
            b.grad.block(row, k * d, 1, d) = sb.grad.row(q * ns + s);
            b.div(row) = sb.grad(q * ns + s, k);
          }
      break;
    }
    case Family::Edge: {
      b.curl.setZero(nq * nd, d == 3 ? 3 : 1);
      for (long q = 0; q < nq; ++q)
        for (int e = 0; e < nd; ++e) {
          int p, r;
          edge_pairs(e, p, r);
          b.val.row(q * nd + e) = lam(q, p) * gl.row(r) - lam(q, r) * gl.row(p);
          if (d == 3) {
            const Eigen::Vector3d gp = gl.row(p), gr = gl.row(r);
            b.curl.row(q * nd + e) = 2.0 * gp.cross(gr).transpose();
          } else {
            b.curl(q * nd + e, 0) = 2.0 * (gl(p, 0) * gl(r, 1) - gl(p, 1) * gl(r, 0));
          }
        }
      break;
    }
    case Family::Face: {
      b.div.setZero(nq * nd);
      if (d == 3) {
        for (long q = 0; q < nq; ++q)
          for (int f = 0; f < 4; ++f) {
            const int i = kFaceTriples[f][0], jj = kFaceTriples[f][1], kk = kFaceTriples[f][2];
            const Eigen::Vector3d gi = gl.row(i), gj = gl.row(jj), gk = gl.row(kk);
            b.val.row(q * nd + f) =
                2.0 * (lam(q, i) * gj.cross(gk) + lam(q, jj) * gk.cross(gi) +
                       lam(q, kk) * gi.cross(gj))
                          .transpose();
            b.div(q * nd + f) = 6.0 * gi.dot(gj.cross(gk));
          }
      } else {
        // rotate the tangential basis by -90 degrees: (vx,vy) -> (vy,-vx)
        for (long q = 0; q < nq; ++q)
          for (int e = 0; e < 3; ++e) {
            int p, r;
            edge_pairs(e, p, r);
            const double wx = lam(q, p) * gl(r, 0) - lam(q, r) * gl(p, 0);
            const double wy = lam(q, p) * gl(r, 1) - lam(q, r) * gl(p, 1);
            b.val(q * nd + e, 0) = wy;
            b.val(q * nd + e, 1) = -wx;
            b.div(q * nd + e) = 2.0 * (gl(p, 0) * gl(r, 1) - gl(p, 1) * gl(r, 0));
          }
      }
      break;
    }
    case Family::DG0: {
      for (long q = 0; q < nq; ++q) b.val(q, 0) = 1.0;
      break;
    }
  }
  return b;
}

Eigen::MatrixXd phys_points(const Mesh& mesh, int cell, const QuadRule& qr) {
  const int d = mesh.dim;
  const long nq = qr.weights.size();
  Eigen::MatrixXd x(nq, d);
  const Eigen::RowVectorXd v0 = mesh.verts.row(mesh.cells(cell, 0));
  for (long q = 0; q < nq; ++q) {
    Eigen::RowVectorXd p = v0;
    for (int m = 0; m < d; ++m)
      p += qr.points(q, m) * (mesh.verts.row(mesh.cells(cell, m + 1)) - v0);
    x.row(q) = p;
  }
  return x;
}

Eigen::MatrixXd eval_function(const FeSpace& sp, const Eigen::VectorXd& coef, int cell,
                              const BasisData& basis) {
  if (coef.size() != sp.dim)
    throw MissingCoefficient("eval_function: coefficient vector has size " +
                             std::to_string(coef.size()) + ", space dim is " +
                             std::to_string(sp.dim));
  const int nd = sp.ndof_cell;
  const long nq = basis.val.rows() / nd;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nq, sp.vdim);
  for (long q = 0; q < nq; ++q)
    for (int i = 0; i < nd; ++i)
      out.row(q) += coef[sp.cell_dofs(cell, i)] * basis.val.row(q * nd + i);
  return out;
}

std::vector<int> FeSpace::boundary_dofs(const std::vector<int>& markers) const {
  const Mesh& m = *mesh;
  const int d = m.dim;
  std::vector<char> want(6, 0);
  for (int mk : markers) {
    if (mk < 0 || mk > 5) throw InvalidArgument("boundary_dofs: bad marker " + std::to_string(mk));
    want[mk] = 1;
  }
  std::vector<int> dofs;
  const long nfacet = m.num_facets();
  for (long f = 0; f < nfacet; ++f) {
    const int mk = m.facet_marker[f];
    if (mk < 0 || !want[mk]) continue;
    const auto push_vertex = [&](int v, int vd) {
      for (int k = 0; k < vd; ++k) dofs.push_back(m.vert_gid[v] * vd + k);
    };
    const auto push_p2_edge = [&](int ge, int vd) {
      for (int k = 0; k < vd; ++k)
        dofs.push_back(static_cast<int>((m.nv + m.edge_gid[ge]) * vd + k));
    };
    switch (family) {
      case Family::P1:
      case Family::VecP1: {
        for (int p = 0; p < d; ++p)
          push_vertex(d == 3 ? m.faces(f, p) : m.edges(f, p), vdim);
        break;
      }
      case Family::P2:
      case Family::VecP2: {
        if (d == 3) {
          for (int p = 0; p < 3; ++p) push_vertex(m.faces(f, p), vdim);
          push_p2_edge(edge_row(m, m.faces(f, 0), m.faces(f, 1)), vdim);
          push_p2_edge(edge_row(m, m.faces(f, 0), m.faces(f, 2)), vdim);
          push_p2_edge(edge_row(m, m.faces(f, 1), m.faces(f, 2)), vdim);
        } else {
          push_vertex(m.edges(f, 0), vdim);
          push_vertex(m.edges(f, 1), vdim);
          push_p2_edge(static_cast<int>(f), vdim);
        }
        break;
      }
      case Family::Edge: {
        if (d == 3) {
          dofs.push_back(m.edge_gid[edge_row(m, m.faces(f, 0), m.faces(f, 1))]);
          dofs.push_back(m.edge_gid[edge_row(m, m.faces(f, 0), m.faces(f, 2))]);
          dofs.push_back(m.edge_gid[edge_row(m, m.faces(f, 1), m.faces(f, 2))]);
        } else {
          dofs.push_back(m.edge_gid[f]);
        }
        break;
      }
      case Family::Face: {
        dofs.push_back(d == 3 ? m.face_gid[f] : m.edge_gid[f]);
        break;
      }
      case Family::DG0:
        break;  // no boundary trace functionals
    }
  }
  std::sort(dofs.begin(), dofs.end());
  dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());
  return dofs;
}

std::vector<int> FeSpace::boundary_dofs_all() const {
  return boundary_dofs({XMIN, XMAX, YMIN, YMAX, ZMIN, ZMAX});
}

Eigen::VectorXd interpolate(const FeSpace& sp, const FieldFn& f) {
  const Mesh& m = *sp.mesh;
  const int d = m.dim;
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(sp.dim);

  const auto value_at = [&](const Eigen::RowVectorXd& x) {
    Eigen::VectorXd v = f(x.transpose());
    if (v.size() != sp.vdim)
      throw InvalidArgument("interpolate: field returned " + std::to_string(v.size()) +
                            " components, space has " + std::to_string(sp.vdim));
    return v;
  };

  switch (sp.family) {
    case Family::P1:
    case Family::VecP1: {
      for (long v = 0; v < m.verts.rows(); ++v) {
        const Eigen::VectorXd val = value_at(m.verts.row(v));
        for (int k = 0; k < sp.vdim; ++k) coef[m.vert_gid[v] * sp.vdim + k] = val[k];
      }
      break;
    }
    case Family::P2:
    case Family::VecP2: {
      for (long v = 0; v < m.verts.rows(); ++v) {
        const Eigen::VectorXd val = value_at(m.verts.row(v));
        for (int k = 0; k < sp.vdim; ++k) coef[m.vert_gid[v] * sp.vdim + k] = val[k];
      }
      for (long e = 0; e < m.edges.rows(); ++e) {
        const Eigen::RowVectorXd mid =
            0.5 * (m.verts.row(m.edges(e, 0)) + m.verts.row(m.edges(e, 1)));
        const Eigen::VectorXd val = value_at(mid);
        for (int k = 0; k < sp.vdim; ++k)
          coef[(m.nv + m.edge_gid[e]) * sp.vdim + k] = val[k];
      }
      break;
    }
    case Family::Edge: {
      const QuadRule gl = gauss_legendre(8);
      for (long e = 0; e < m.edges.rows(); ++e) {
        const Eigen::RowVectorXd a = m.verts.row(m.edges(e, 0));
        const Eigen::RowVectorXd t = m.verts.row(m.edges(e, 1)) - a;
        double dof = 0;
        for (long q = 0; q < gl.weights.size(); ++q) {
          const Eigen::VectorXd val = value_at(a + gl.points(q, 0) * t);
          dof += gl.weights[q] * val.dot(t.transpose());
        }
        coef[m.edge_gid[e]] = dof;
      }
      break;
    }
    case Family::Face: {
      if (d == 3) {
        const QuadRule tq = quad_triangle(14);
        for (long fc = 0; fc < m.faces.rows(); ++fc) {
          const Eigen::RowVector3d a = m.verts.row(m.faces(fc, 0));
          const Eigen::RowVector3d b = m.verts.row(m.faces(fc, 1));
          const Eigen::RowVector3d c = m.verts.row(m.faces(fc, 2));
          const Eigen::Vector3d nrm =
              (b - a).transpose().cross((c - a).transpose());  // |n| = 2*area
          double dof = 0;
          for (long q = 0; q < tq.weights.size(); ++q) {
            const Eigen::RowVector3d x =
                a + tq.points(q, 0) * (b - a) + tq.points(q, 1) * (c - a);
            dof += tq.weights[q] * value_at(x).dot(nrm);
          }
          coef[m.face_gid[fc]] = dof;
        }
      } else {
        const QuadRule gl = gauss_legendre(8);
        for (long e = 0; e < m.edges.rows(); ++e) {
          const Eigen::RowVector2d a = m.verts.row(m.edges(e, 0));
          const Eigen::RowVector2d t = m.verts.row(m.edges(e, 1)) - a;
          const Eigen::Vector2d nrm(t[1], -t[0]);
          double dof = 0;
          for (long q = 0; q < gl.weights.size(); ++q)
            dof += gl.weights[q] * value_at(a + gl.points(q, 0) * t).dot(nrm);
          coef[m.edge_gid[e]] = dof;
        }
      }
      break;
    }
    case Family::DG0: {
      const QuadRule qr = quad_simplex(d, 14);
      const double vref = d == 2 ? 0.5 : 1.0 / 6.0;
      for (long c = 0; c < m.num_cells(); ++c) {
        const Eigen::MatrixXd x = phys_points(m, static_cast<int>(c), qr);
        double avg = 0;
        for (long q = 0; q < qr.weights.size(); ++q)
          avg += qr.weights[q] * value_at(x.row(q))[0];
        coef[c] = avg / vref;  // quadrature weights sum to vref
      }
      break;
    }
  }
  return coef;
}

}  // namespace hallmhd
