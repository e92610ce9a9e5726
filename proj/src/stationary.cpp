#include "hallmhd/stationary.hpp"

#include <algorithm>
#include <cmath>

#include "hallmhd/csv.hpp"
#include "hallmhd/error.hpp"

namespace hallmhd {

namespace {

double constrained_residual_norm(const Eigen::VectorXd& r, const BcSet& bc) {
  Eigen::VectorXd rr = r;
  for (int d : bc.dofs) rr[d] = 0.0;
  return rr.norm();
}

}  // namespace

std::pair<State, NonlinearReport> nonlinear_solve(const Spaces& sp, const Params& prm,
                                                  const SourceTerms& src, const BcSet& bc,
                                                  Mode mode, const LinearDriver& lin,
                                                  TimeScheme transient, const State* old1,
                                                  const State* old2, const State* initial) {
  prm.validate();
  State st = initial ? *initial : State::zero(sp);
  {
    Eigen::VectorXd x = pack(sp, st);
    for (size_t k = 0; k < bc.dofs.size(); ++k) x[bc.dofs[k]] = bc.values[k];
    st = unpack(sp, x);
  }

  NonlinearReport rep;
  const double r0 =
      constrained_residual_norm(assemble_residual(sp, st, old1, old2, prm, src, transient), bc);
  rep.residual_norms.push_back(r0);
  const double tol = std::max(prm.tol_nonlinear * r0, 1e-14);
  if (r0 <= tol) {
    rep.converged = true;
    return {st, rep};
  }

  const Eigen::VectorXd zero_vals = Eigen::VectorXd::Zero(bc.values.size());
  for (int it = 1; it <= prm.max_nonlinear; ++it) {
    SolveResult sol;
    if (mode == Mode::Picard) {
      const OperatorSet ops = assemble_operator_set(sp, st, prm, Mode::Picard, transient);
      SpMat A = compose_system(sp, ops);
      Eigen::VectorXd b = assemble_rhs(sp, prm, src, transient, old1, old2);
      eliminate_dirichlet(A, b, bc.dofs, bc.values);
      const LinOp prec = lin.prec_factory ? lin.prec_factory(A, sp) : LinOp();
      sol = solve_linear(A, b, lin.config, prec);
      st = unpack(sp, sol.x);
    } else {
      const OperatorSet ops = assemble_operator_set(sp, st, prm, Mode::Newton, transient);
      SpMat J = compose_system(sp, ops);
      Eigen::VectorXd b = -assemble_residual(sp, st, old1, old2, prm, src, transient);
      eliminate_dirichlet(J, b, bc.dofs, zero_vals);
      const LinOp prec = lin.prec_factory ? lin.prec_factory(J, sp) : LinOp();
      sol = solve_linear(J, b, lin.config, prec);
      st = unpack(sp, Eigen::VectorXd(pack(sp, st) + sol.x));
    }
    rep.iterations = it;
    rep.linear_iterations.push_back(sol.iterations);
    const double r =
        constrained_residual_norm(assemble_residual(sp, st, old1, old2, prm, src, transient), bc);
    rep.residual_norms.push_back(r);
    if (r <= tol) {
      rep.converged = true;
      return {st, rep};
    }
  }
  throw NonlinearDivergence("nonlinear_solve: no convergence in " +
                            std::to_string(prm.max_nonlinear) + " iterations (residual " +
                            std::to_string(rep.residual_norms.back()) + ", initial " +
                            std::to_string(r0) + ")");
}

double l2_error(const FeSpace& sp, const Eigen::VectorXd& coef, const FieldFn& exact, int degree,
                bool modulo_constant) {
  const Mesh& mesh = *sp.mesh;
  const QuadRule qr = quad_simplex(mesh.dim, degree);
  const double vref = mesh.dim == 2 ? 0.5 : 1.0 / 6.0;
  double shift = 0.0;
  if (modulo_constant) {
    if (sp.vdim != 1) throw InvalidArgument("l2_error: modulo_constant needs a scalar field");
    double diff = 0, vol = 0;
    for (long c = 0; c < mesh.num_cells(); ++c) {
      const int ci = static_cast<int>(c);
      const Eigen::MatrixXd vh = eval_function(sp, coef, ci, eval_basis(sp, ci, qr));
      const Eigen::MatrixXd x = phys_points(mesh, ci, qr);
      const double scale = mesh.cell_volume(ci) / vref;
      vol += mesh.cell_volume(ci);
      for (long q = 0; q < qr.weights.size(); ++q)
        diff += qr.weights[q] * scale * (vh(q, 0) - exact(x.row(q).transpose())[0]);
    }
    shift = diff / vol;
  }
  double err2 = 0;
  for (long c = 0; c < mesh.num_cells(); ++c) {
    const int ci = static_cast<int>(c);
    const Eigen::MatrixXd vh = eval_function(sp, coef, ci, eval_basis(sp, ci, qr));
    const Eigen::MatrixXd x = phys_points(mesh, ci, qr);
    const double scale = mesh.cell_volume(ci) / vref;
    for (long q = 0; q < qr.weights.size(); ++q) {
      Eigen::VectorXd d = vh.row(q).transpose() - exact(x.row(q).transpose());
      if (modulo_constant) d[0] -= shift;
      err2 += qr.weights[q] * scale * d.squaredNorm();
    }
  }
  return std::sqrt(err2);
}

BcSet mms_bcs(const Spaces& sp, const MmsFields& mf) {
  BcSet bc;
  bc.add(sp.off_u, sp.u.boundary_dofs_all(), interpolate(sp.u, mf.u));
  bc.add(sp.off_E, sp.E.boundary_dofs_all(), interpolate(sp.E, mf.E));
  bc.add(sp.off_B, sp.B.boundary_dofs_all(), interpolate(sp.B, mf.B));
  bc.add(sp.off_j, sp.j.boundary_dofs_all(), interpolate(sp.j, mf.j));
  bc.add_zero(sp.off_p, {0});  // fix the pressure constant
  return bc;
}

SourceTerms mms_sources(const Spaces& sp, const MmsFields& mf) {
  SourceTerms src;
  src.f = assemble_load(sp.u, mf.f);
  src.g2 = assemble_load(sp.E, mf.g2);
  src.g4 = assemble_load(sp.j, mf.g4);
  return src;
}

MmsTable mms_study(const std::vector<int>& ns, Params prm, Mode mode,
                   const std::string& csv_path) {
  MmsTable table;
  for (int n : ns) {
    const Mesh mesh = build_mesh(3, n, false);
    const Spaces sp = Spaces::build(mesh);
    const MmsFields mf = mms_fields(prm);
    const SourceTerms src = mms_sources(sp, mf);
    const BcSet bc = mms_bcs(sp, mf);
    auto [st, rep] = nonlinear_solve(sp, prm, src, bc, mode, LinearDriver{});
    MmsRow row;
    row.n = n;
    row.h = 1.0 / n;
    row.err_u = l2_error(sp.u, st.u, mf.u);
    row.err_p = l2_error(sp.p, st.p, mf.p, 10, true);
    row.err_B = l2_error(sp.B, st.B, mf.B);
    row.err_E = l2_error(sp.E, st.E, mf.E);
    row.err_j = l2_error(sp.j, st.j, mf.j);
    table.rows.push_back(row);
    table.div_B.push_back(div_l2_norm(sp.B, st.B));
    table.curl_E.push_back(curl_l2_norm(sp.E, st.E));
    table.energy_residual.push_back(energy_identity_residual(sp, st, prm, src, bc));
    table.reports.push_back(rep);
  }
  const auto slope = [&](double e0, double e1, size_t i) {
    return std::log(e0 / e1) / std::log(table.rows[i + 1].n / double(table.rows[i].n));
  };
  for (size_t i = 0; i + 1 < table.rows.size(); ++i) {
    table.rate_u.push_back(slope(table.rows[i].err_u, table.rows[i + 1].err_u, i));
    table.rate_p.push_back(slope(table.rows[i].err_p, table.rows[i + 1].err_p, i));
    table.rate_B.push_back(slope(table.rows[i].err_B, table.rows[i + 1].err_B, i));
    table.rate_E.push_back(slope(table.rows[i].err_E, table.rows[i + 1].err_E, i));
    table.rate_j.push_back(slope(table.rows[i].err_j, table.rows[i + 1].err_j, i));
  }
  if (!csv_path.empty()) {
    std::vector<std::vector<double>> rows;
    const double nan = std::nan("");
    for (size_t i = 0; i < table.rows.size(); ++i) {
      const MmsRow& r = table.rows[i];
      const auto rate = [&](const std::vector<double>& v) { return i == 0 ? nan : v[i - 1]; };
      rows.push_back({double(r.n), r.h, r.err_u, rate(table.rate_u), r.err_p, rate(table.rate_p),
                      r.err_B, rate(table.rate_B), r.err_E, rate(table.rate_E), r.err_j,
                      rate(table.rate_j), table.div_B[i], table.curl_E[i],
                      table.energy_residual[i], double(table.reports[i].iterations)});
    }
    write_csv(csv_path,
              {"n", "h", "err_u", "rate_u", "err_p", "rate_p", "err_B", "rate_B", "err_E",
               "rate_E", "err_j", "rate_j", "div_B", "curl_E", "energy_residual",
               "nonlinear_iterations"},
              rows);
  }
  return table;
}

}  // namespace hallmhd
