#include "hallmhd/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "hallmhd/error.hpp"

namespace hallmhd {

namespace {

using Edge = std::array<int, 2>;
using Tri = std::array<int, 3>;

int find_edge(const std::vector<Edge>& table, int a, int b) {
  const Edge key{a, b};
  auto it = std::lower_bound(table.begin(), table.end(), key);
  return static_cast<int>(it - table.begin());
}

int find_tri(const std::vector<Tri>& table, int a, int b, int c) {
  const Tri key{a, b, c};
  auto it = std::lower_bound(table.begin(), table.end(), key);
  return static_cast<int>(it - table.begin());
}

}  // namespace

Mesh build_mesh(int dim, int n, bool periodic_x) {
  if (dim != 2 && dim != 3) throw InvalidArgument("build_mesh: dim must be 2 or 3");
  if (n < 1) throw InvalidArgument("build_mesh: n must be >= 1");
  if (periodic_x && dim == 3)
    throw InvalidArgument("build_mesh: periodic_x is only supported in 2D");
  if (periodic_x && n < 2)
    throw InvalidArgument("build_mesh: periodic_x requires n >= 2 (n=1 would alias a cell onto itself)");

  Mesh m;
  m.dim = dim;
  m.n = n;
  m.periodic_x = periodic_x;

  const int np = n + 1;
  const long nv_geo = dim == 2 ? static_cast<long>(np) * np : static_cast<long>(np) * np * np;
  m.verts.resize(nv_geo, dim);
  if (dim == 2) {
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i) {
        const long v = static_cast<long>(j) * np + i;
        m.verts(v, 0) = double(i) / n;
        m.verts(v, 1) = double(j) / n;
      }
  } else {
    for (int k = 0; k < np; ++k)
      for (int j = 0; j < np; ++j)
        for (int i = 0; i < np; ++i) {
          const long v = (static_cast<long>(k) * np + j) * np + i;
          m.verts(v, 0) = double(i) / n;
          m.verts(v, 1) = double(j) / n;
          m.verts(v, 2) = double(k) / n;
        }
  }

  // Cells: ascending geometric vertex tuples.  The 2D diagonal and the 3D
  // Kuhn paths are monotone in the grid id, so the tuples come out sorted.
  if (dim == 2) {
    m.cells.resize(2L * n * n, 3);
    long c = 0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int a = j * np + i, b = a + 1, d = a + np, e = d + 1;
        m.cells.row(c++) << a, b, e;
        m.cells.row(c++) << a, d, e;
      }
  } else {
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                    {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    const int step[3] = {1, np, np * np};
    m.cells.resize(6L * n * n * n, 4);
    long c = 0;
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const int base = (k * np + j) * np + i;
          for (const auto& p : perms) {
            int v0 = base;
            int v1 = v0 + step[p[0]];
            int v2 = v1 + step[p[1]];
            int v3 = v2 + step[p[2]];
            m.cells.row(c++) << v0, v1, v2, v3;
          }
        }
  }
  const long ncell = m.cells.rows();

  // Enumerate edges (and faces in 3D) as deduplicated sorted tuples.
  std::vector<Edge> edge_table;
  edge_table.reserve(ncell * 6);
  const int nvc = dim + 1;
  for (long c = 0; c < ncell; ++c)
    for (int p = 0; p < nvc; ++p)
      for (int q = p + 1; q < nvc; ++q)
        edge_table.push_back({m.cells(c, p), m.cells(c, q)});
  std::sort(edge_table.begin(), edge_table.end());
  edge_table.erase(std::unique(edge_table.begin(), edge_table.end()), edge_table.end());

  m.edges.resize(static_cast<long>(edge_table.size()), 2);
  for (size_t e = 0; e < edge_table.size(); ++e)
    m.edges.row(static_cast<long>(e)) << edge_table[e][0], edge_table[e][1];

  const int nec = dim == 2 ? 3 : 6;
  m.cell_edges.resize(ncell, nec);
  for (long c = 0; c < ncell; ++c) {
    int le = 0;
    for (int p = 0; p < nvc; ++p)
      for (int q = p + 1; q < nvc; ++q)
        m.cell_edges(c, le++) = find_edge(edge_table, m.cells(c, p), m.cells(c, q));
  }

  std::vector<Tri> tri_table;
  if (dim == 3) {
    tri_table.reserve(ncell * 4);
    for (long c = 0; c < ncell; ++c)
      for (int omit = 0; omit < 4; ++omit) {
        Tri t;
        int w = 0;
        for (int p = 0; p < 4; ++p)
          if (p != omit) t[w++] = m.cells(c, p);
        tri_table.push_back(t);
      }
    std::sort(tri_table.begin(), tri_table.end());
    tri_table.erase(std::unique(tri_table.begin(), tri_table.end()), tri_table.end());

    m.faces.resize(static_cast<long>(tri_table.size()), 3);
    for (size_t f = 0; f < tri_table.size(); ++f)
      m.faces.row(static_cast<long>(f)) << tri_table[f][0], tri_table[f][1], tri_table[f][2];

    // cell_faces(c, i) omits local vertex i (boundary sign (-1)^i).
    m.cell_faces.resize(ncell, 4);
    for (long c = 0; c < ncell; ++c)
      for (int omit = 0; omit < 4; ++omit) {
        Tri t;
        int w = 0;
        for (int p = 0; p < 4; ++p)
          if (p != omit) t[w++] = m.cells(c, p);
        m.cell_faces(c, omit) = find_tri(tri_table, t[0], t[1], t[2]);
      }
  }

  // Merged ids.  A geometric entity is a slave when all its vertices sit in
  // the x = 1 plane; its master is the x = 0 translate (grid id offset -n).
  const auto slave_vertex = [&](int v) { return periodic_x && (v % np) == n; };
  m.vert_gid.resize(nv_geo);
  {
    long next = 0;
    for (long v = 0; v < nv_geo; ++v)
      m.vert_gid[v] = slave_vertex(static_cast<int>(v))
                          ? m.vert_gid[v - n]
                          : static_cast<int>(next++);
    m.nv = next;
  }

  m.edge_gid.resize(edge_table.size());
  {
    long next = 0;
    for (size_t e = 0; e < edge_table.size(); ++e) {
      const auto& t = edge_table[e];
      if (slave_vertex(t[0]) && slave_vertex(t[1]))
        m.edge_gid[e] = m.edge_gid[find_edge(edge_table, t[0] - n, t[1] - n)];
      else
        m.edge_gid[e] = static_cast<int>(next++);
    }
    m.ne = next;
  }

  if (dim == 3) {
    m.face_gid.resize(tri_table.size());
    long next = 0;
    for (size_t f = 0; f < tri_table.size(); ++f) {
      const auto& t = tri_table[f];
      if (slave_vertex(t[0]) && slave_vertex(t[1]) && slave_vertex(t[2]))
        m.face_gid[f] = m.face_gid[find_tri(tri_table, t[0] - n, t[1] - n, t[2] - n)];
      else
        m.face_gid[f] = static_cast<int>(next++);
    }
    m.nf = next;
  }

  // Boundary facets: a merged facet incident to exactly one cell.
  {
    const long nfacet = m.num_facets();
    std::vector<int> count(dim == 3 ? m.nf : m.ne, 0);
    if (dim == 3) {
      for (long c = 0; c < ncell; ++c)
        for (int i = 0; i < 4; ++i) count[m.face_gid[m.cell_faces(c, i)]]++;
    } else {
      for (long c = 0; c < ncell; ++c)
        for (int i = 0; i < 3; ++i) count[m.edge_gid[m.cell_edges(c, i)]]++;
    }
    m.facet_marker.assign(nfacet, -1);
    for (long f = 0; f < nfacet; ++f) {
      const int gid = dim == 3 ? m.face_gid[f] : m.edge_gid[f];
      if (count[gid] != 1) continue;
      // classify by the plane all facet vertices share (unit coordinates)
      for (int axis = 0; axis < dim; ++axis) {
        bool at_lo = true, at_hi = true;
        for (int p = 0; p < dim; ++p) {
          const int v = dim == 3 ? m.faces(f, p) : m.edges(f, p);
          at_lo = at_lo && m.verts(v, axis) == 0.0;
          at_hi = at_hi && m.verts(v, axis) == 1.0;
        }
        if (at_lo) m.facet_marker[f] = 2 * axis;
        if (at_hi) m.facet_marker[f] = 2 * axis + 1;
      }
      if (m.facet_marker[f] < 0)
        throw InconsistentField("build_mesh: boundary facet not on any box plane");
    }
  }

  return m;
}

SpMat Mesh::d_grad() const {
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<char> done(ne, 0);
  for (long e = 0; e < edges.rows(); ++e) {
    const int gid = edge_gid[e];
    if (done[gid]) continue;
    done[gid] = 1;
    trip.emplace_back(gid, vert_gid[edges(e, 0)], -1.0);
    trip.emplace_back(gid, vert_gid[edges(e, 1)], 1.0);
  }
  SpMat d(ne, nv);
  d.setFromTriplets(trip.begin(), trip.end());
  return d;
}

SpMat Mesh::d_curl() const {
  std::vector<Eigen::Triplet<double>> trip;
  if (dim == 3) {
    std::vector<Edge> edge_table(edges.rows());
    for (long e = 0; e < edges.rows(); ++e) edge_table[e] = {edges(e, 0), edges(e, 1)};
    std::vector<char> done(nf, 0);
    for (long f = 0; f < faces.rows(); ++f) {
      const int gid = face_gid[f];
      if (done[gid]) continue;
      done[gid] = 1;
      const int a = faces(f, 0), b = faces(f, 1), c = faces(f, 2);
      trip.emplace_back(gid, edge_gid[find_edge(edge_table, b, c)], 1.0);
      trip.emplace_back(gid, edge_gid[find_edge(edge_table, a, c)], -1.0);
      trip.emplace_back(gid, edge_gid[find_edge(edge_table, a, b)], 1.0);
    }
    SpMat d(nf, ne);
    d.setFromTriplets(trip.begin(), trip.end());
    return d;
  }
  for (long c = 0; c < cells.rows(); ++c) {
    // local edges (0,1),(0,2),(1,2) have boundary signs +,-,+ for a
    // counterclockwise cell; mirrored cells reverse the traversal, so scale
    // by the orientation to keep rows equal to the cell integral of the curl
    Eigen::Matrix2d T;
    for (int p = 0; p < 2; ++p)
      T.col(p) = (verts.row(cells(c, p + 1)) - verts.row(cells(c, 0))).transpose();
    const double s = T.determinant() > 0 ? 1.0 : -1.0;
    trip.emplace_back(c, edge_gid[cell_edges(c, 2)], s);   // (1,2)
    trip.emplace_back(c, edge_gid[cell_edges(c, 1)], -s);  // (0,2)
    trip.emplace_back(c, edge_gid[cell_edges(c, 0)], s);   // (0,1)
  }
  SpMat d(cells.rows(), ne);
  d.setFromTriplets(trip.begin(), trip.end());
  return d;
}

SpMat Mesh::d_div() const {
  if (dim == 2) return d_curl();
  std::vector<Eigen::Triplet<double>> trip;
  for (long c = 0; c < cells.rows(); ++c) {
    // omit parity gives the outward flux signs on a positively oriented
    // cell; mirrored cells flip, so scale by the orientation to keep rows
    // equal to the net outward flux
    Eigen::Matrix3d T;
    for (int p = 0; p < 3; ++p)
      T.col(p) = (verts.row(cells(c, p + 1)) - verts.row(cells(c, 0))).transpose();
    const double s = T.determinant() > 0 ? 1.0 : -1.0;
    for (int omit = 0; omit < 4; ++omit)
      trip.emplace_back(c, face_gid[cell_faces(c, omit)], omit % 2 == 0 ? s : -s);
  }
  SpMat d(cells.rows(), nf);
  d.setFromTriplets(trip.begin(), trip.end());
  return d;
}

SpMat Mesh::incidence(int k) const {
  if (k < 1 || k > dim)
    throw InvalidArgument("incidence: k must lie in 1.." + std::to_string(dim) +
                          ", got " + std::to_string(k));
  if (k == 1) return d_grad();
  if (k == 2) return d_curl();
  return d_div();
}

double Mesh::cell_volume(int c) const {
  Eigen::MatrixXd T(dim, dim);
  for (int p = 0; p < dim; ++p)
    T.col(p) = (verts.row(cells(c, p + 1)) - verts.row(cells(c, 0))).transpose();
  const double fact = dim == 2 ? 2.0 : 6.0;
  return std::abs(T.determinant()) / fact;
}

Eigen::MatrixXd Mesh::grad_lambda(int c) const {
  Eigen::MatrixXd T(dim, dim);
  for (int p = 0; p < dim; ++p)
    T.col(p) = (verts.row(cells(c, p + 1)) - verts.row(cells(c, 0))).transpose();
  const Eigen::MatrixXd Tinv = T.inverse();
  Eigen::MatrixXd g(dim + 1, dim);
  for (int p = 0; p < dim; ++p) g.row(p + 1) = Tinv.row(p);
  g.row(0) = -g.bottomRows(dim).colwise().sum();
  return g;
}

void Mesh::set_box(const std::array<double, 3>& lo, const std::array<double, 3>& hi) {
  for (int axis = 0; axis < dim; ++axis) {
    if (!(hi[axis] > lo[axis])) throw InvalidArgument("set_box: need hi > lo per axis");
    const double a = box_lo[axis], b = box_hi[axis];
    for (long v = 0; v < verts.rows(); ++v)
      verts(v, axis) = lo[axis] + (verts(v, axis) - a) / (b - a) * (hi[axis] - lo[axis]);
  }
  box_lo = lo;
  box_hi = hi;
}

void vtk_write(const Mesh& mesh, const std::string& path, const Eigen::VectorXd* cell_field,
               const std::string& field_name) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("vtk_write: cannot open " + path);
  out << "# vtk DataFile Version 3.0\nmesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.verts.rows() << " double\n";
  out.precision(17);
  for (long v = 0; v < mesh.verts.rows(); ++v) {
    out << mesh.verts(v, 0) << " " << mesh.verts(v, 1) << " "
        << (mesh.dim == 3 ? mesh.verts(v, 2) : 0.0) << "\n";
  }
  const long nc = mesh.num_cells();
  const int nvc = mesh.dim + 1;
  out << "CELLS " << nc << " " << nc * (nvc + 1) << "\n";
  for (long c = 0; c < nc; ++c) {
    out << nvc;
    for (int p = 0; p < nvc; ++p) out << " " << mesh.cells(c, p);
    out << "\n";
  }
  out << "CELL_TYPES " << nc << "\n";
  for (long c = 0; c < nc; ++c) out << (mesh.dim == 3 ? 10 : 5) << "\n";
  if (cell_field) {
    if (cell_field->size() != nc)
      throw InvalidArgument("vtk_write: cell field size mismatch");
    out << "CELL_DATA " << nc << "\nSCALARS " << field_name << " double 1\nLOOKUP_TABLE default\n";
    for (long c = 0; c < nc; ++c) out << (*cell_field)[c] << "\n";
  }
}

}  // namespace hallmhd
