#include "hallmhd/precond.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>

#include "hallmhd/csv.hpp"
#include "hallmhd/error.hpp"

namespace hallmhd {

BlockPreconditioner::BlockPreconditioner(const SpMat& A, long n_u, long n_p,
                                         BlockPrecondConfig cfg)
    : cfg_(cfg), n_ns_(n_u + n_p), n_em_(A.rows() - n_u - n_p) {
  if (A.rows() != A.cols()) throw InvalidArgument("BlockPreconditioner: matrix not square");
  if (n_u <= 0 || n_p <= 0 || n_em_ <= 0)
    throw InvalidArgument("BlockPreconditioner: degenerate block split");
  const SpMat ns = A.block(0, 0, n_ns_, n_ns_);
  A12_ = A.block(0, n_ns_, n_ns_, n_em_);
  A21_ = A.block(n_ns_, 0, n_em_, n_ns_);
  A22_ = A.block(n_ns_, n_ns_, n_em_, n_em_);
  ns_lu_.factorize(ns);
  em_lu_.factorize(A22_);
}

Eigen::VectorXd BlockPreconditioner::apply(const Eigen::VectorXd& r) const {
  if (r.size() != rows()) throw InvalidArgument("BlockPreconditioner: residual size mismatch");
  const Eigen::VectorXd r_ns = r.head(n_ns_);
  Eigen::VectorXd r_em = r.tail(n_em_);
  // lower sweep: hydrodynamic solve feeds the electromagnetic residual
  const Eigen::VectorXd du = ns_lu_.solve(r_ns);
  r_em -= A21_ * du;

  Eigen::VectorXd x_em;
  if (cfg_.schur_mode == BlockPrecondConfig::SchurMode::approx) {
    x_em = em_lu_.solve(r_em);
  } else {
    // S = A22 - A21 ns^-1 A12 applied matrix-free; A21/A12 touch only the
    // velocity block, so each product costs one saddle backsolve
    const LinOp schur = [this](const Eigen::VectorXd& v) {
      return Eigen::VectorXd(A22_ * v - A21_ * ns_lu_.solve(Eigen::VectorXd(A12_ * v)));
    };
    const LinOp inner = [this](const Eigen::VectorXd& v) { return em_lu_.solve(v); };
    SolverConfig icfg = cfg_.inner_em_solver;
    icfg.method = SolverConfig::Method::GMRES;
    if (icfg.max_iter > 400) icfg.max_iter = 400;
    x_em = solve_linear_op(schur, n_em_, r_em, icfg, inner).x;
  }
  // upper sweep
  const Eigen::VectorXd x_ns = ns_lu_.solve(Eigen::VectorXd(r_ns - A12_ * x_em));
  Eigen::VectorXd out(rows());
  out << x_ns, x_em;
  return out;
}

Eigen::VectorXd apply_preconditioner(const BlockMatrix& blocks, const BlockPrecondConfig& cfg,
                                     const Eigen::VectorXd& rhs) {
  if (blocks.row_sizes.size() < 3 || blocks.row_sizes != blocks.col_sizes)
    throw InvalidArgument("apply_preconditioner: need a square layout with at least 3 fields");
  const BlockPreconditioner prec(blocks.to_sparse(), blocks.row_sizes[0], blocks.row_sizes[1],
                                 cfg);
  return prec.apply(rhs);
}

LinearDriver block_driver(const BlockPrecondConfig& cfg) {
  LinearDriver lin;
  lin.config = cfg.outer;
  lin.prec_factory = [cfg](const SpMat& A, const Spaces& sp) -> LinOp {
    auto prec = std::make_shared<BlockPreconditioner>(A, sp.u.dim, sp.p.dim, cfg);
    return [prec](const Eigen::VectorXd& v) { return prec->apply(v); };
  };
  return lin;
}

CavityData cavity_boundary_data(const Params& prm) {
  prm.validate();
  CavityData data;
  const double irem = prm.inv_Re_m();
  const Eigen::Vector3d ex = Eigen::Vector3d::UnitX();
  const Eigen::Vector3d ey = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d ez = Eigen::Vector3d::UnitZ();

  // Tangential trace of Ohm's law on the lid with E x n = 0:
  //   Re_m^-1 j + R_H (j x B0) = u x B0  in the two in-plane components.
  // Columns of the 2x2 system are the responses to the tangential current
  // components (the normal component is left at zero).
  const Eigen::Vector3d cx = irem * ex + prm.R_H * ex.cross(data.B0);
  const Eigen::Vector3d cz = irem * ez + prm.R_H * ez.cross(data.B0);
  const Eigen::Vector3d f = data.u_lid.cross(data.B0);
  Eigen::Matrix2d T;
  T << cx[0], cz[0], cx[2], cz[2];
  const double det = T.determinant();
  if (det != 0.0) {
    const Eigen::Vector2d jt = T.inverse() * Eigen::Vector2d(f[0], f[2]);
    data.j_lid = Eigen::Vector3d(jt[0], 0.0, jt[1]);
  }

  const std::array<Eigen::Vector3d, 6> normals = {-ex, ex, -ey, ey, -ez, ez};
  double res = 0.0;
  for (const Eigen::Vector3d& n : normals) {
    const bool lid = n == ey;
    const Eigen::Vector3d u = lid ? data.u_lid : Eigen::Vector3d::Zero();
    const Eigen::Vector3d j = lid ? data.j_lid : Eigen::Vector3d::Zero();
    const Eigen::Vector3d r = irem * j.cross(n) - u.cross(data.B0).cross(n) +
                              prm.R_H * j.cross(data.B0).cross(n);
    res = std::max(res, r.lpNorm<Eigen::Infinity>());
  }
  data.compatibility_residual = res;
  return data;
}

BcSet cavity_bcs(const Spaces& sp, const CavityData& data) {
  std::map<int, double> vals;
  const auto put = [&vals](long off, const std::vector<int>& dofs, const Eigen::VectorXd& lift) {
    for (int d : dofs) vals[static_cast<int>(off) + d] = lift[d];
  };
  const auto constant = [](const Eigen::Vector3d& c) {
    return [c](const Eigen::VectorXd&) { return Eigen::VectorXd(c); };
  };
  const std::vector<int> walls = {XMIN, XMAX, YMIN, ZMIN, ZMAX};

  put(sp.off_u, sp.u.boundary_dofs_all(), Eigen::VectorXd::Zero(sp.u.dim));
  put(sp.off_u, sp.u.boundary_dofs({YMAX}), interpolate(sp.u, constant(data.u_lid)));
  put(sp.off_E, sp.E.boundary_dofs_all(), Eigen::VectorXd::Zero(sp.E.dim));
  put(sp.off_B, sp.B.boundary_dofs_all(), interpolate(sp.B, constant(data.B0)));
  put(sp.off_j, sp.j.boundary_dofs({YMAX}), interpolate(sp.j, constant(data.j_lid)));
  put(sp.off_j, sp.j.boundary_dofs(walls), Eigen::VectorXd::Zero(sp.j.dim));
  vals[static_cast<int>(sp.off_p)] = 0.0;  // pressure constant

  BcSet bc;
  bc.dofs.reserve(vals.size());
  bc.values.resize(static_cast<long>(vals.size()));
  long k = 0;
  for (const auto& [dof, v] : vals) {
    bc.dofs.push_back(dof);
    bc.values[k++] = v;
  }
  return bc;
}

namespace {

double mean(const std::vector<int>& v) {
  if (v.empty()) return 0.0;
  double s = 0;
  for (int x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::string short_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

CavityTable cavity_experiment(const Params& base, const std::vector<double>& re_list,
                              const std::vector<double>& rh_list, int mesh_n, Mode mode,
                              const BlockPrecondConfig& cfg, TimeScheme transient, int steps,
                              const std::string& csv_path) {
  if (re_list.empty() || rh_list.empty())
    throw InvalidArgument("cavity_experiment: empty parameter grid");
  if (transient != TimeScheme::None && steps < 1)
    throw InvalidArgument("cavity_experiment: need at least one step");
  Mesh mesh = build_mesh(3, mesh_n);
  mesh.set_box({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5});
  const Spaces sp = Spaces::build(mesh);
  const LinearDriver lin = block_driver(cfg);
  const SourceTerms src;

  CavityTable table;
  table.Re = re_list;
  table.R_H = rh_list;
  for (double rh : rh_list) {
    std::vector<IterationCell> row;
    for (double re : re_list) {
      Params prm = base;
      prm.Re = re;
      prm.Re_m = re;
      prm.R_H = rh;
      const CavityData data = cavity_boundary_data(prm);
      const BcSet bc = cavity_bcs(sp, data);
      IterationCell cell;
      if (transient == TimeScheme::None) {
        auto [st, rep] = nonlinear_solve(sp, prm, src, bc, mode, lin);
        cell.nonlinear = rep.iterations;
        cell.linear_mean = mean(rep.linear_iterations);
      } else {
        // impulsive start: fluid at rest in the background field
        State old1 = State::zero(sp);
        old1.B = interpolate(sp.B, [&data](const Eigen::VectorXd&) {
          return Eigen::VectorXd(data.B0);
        });
        State old2;
        long nl = 0;
        double lin_sum = 0;
        long lin_count = 0;
        for (int k = 0; k < steps; ++k) {
          const TimeScheme scheme =
              (transient == TimeScheme::BDF2 && k == 0) ? TimeScheme::CN : transient;
          auto [st, rep] = nonlinear_solve(sp, prm, src, bc, mode, lin, scheme, &old1,
                                           scheme == TimeScheme::BDF2 ? &old2 : nullptr, &old1);
          nl += rep.iterations;
          for (int li : rep.linear_iterations) {
            lin_sum += li;
            ++lin_count;
          }
          old2 = old1;
          old1 = st;
        }
        cell.nonlinear = static_cast<double>(nl) / steps;
        cell.linear_mean = lin_count ? lin_sum / static_cast<double>(lin_count) : 0.0;
      }
      row.push_back(cell);
    }
    table.cells.push_back(row);
  }

  if (!csv_path.empty()) {
    std::vector<std::string> header = {"R_H"};
    for (double re : re_list) {
      header.push_back("nonlinear_Re=" + short_label(re));
      header.push_back("linear_Re=" + short_label(re));
    }
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < rh_list.size(); ++i) {
      std::vector<double> r = {rh_list[i]};
      for (const IterationCell& c : table.cells[i]) {
        r.push_back(c.nonlinear);
        r.push_back(c.linear_mean);
      }
      rows.push_back(r);
    }
    write_csv(csv_path, header, rows);
  }
  return table;
}

}  // namespace hallmhd
