#include "wpcn/psd_solver.hpp"

#include <cmath>
#include <iostream>

namespace wpcn {

namespace {

// Real vectorization of Hermitian matrices: [diag; sqrt2*Re upper; sqrt2*Im
// upper], chosen so the real Frobenius inner product becomes a plain dot.
constexpr double kSqrt2 = 1.4142135623730951;

Eigen::VectorXd hvec(const Eigen::MatrixXcd& X) {
  const int n = static_cast<int>(X.rows());
  Eigen::VectorXd v(n * n);
  int idx = 0;
  for (int i = 0; i < n; ++i) v[idx++] = X(i, i).real();
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i) {
      v[idx++] = kSqrt2 * X(i, j).real();
      v[idx++] = kSqrt2 * X(i, j).imag();
    }
  return v;
}

Eigen::MatrixXcd hmat(const Eigen::VectorXd& v, int n) {
  Eigen::MatrixXcd X(n, n);
  int idx = 0;
  for (int i = 0; i < n; ++i) X(i, i) = v[idx++];
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i) {
      const double re = v[idx++] / kSqrt2;
      const double im = v[idx++] / kSqrt2;
      X(i, j) = std::complex<double>(re, im);
      X(j, i) = std::complex<double>(re, -im);
    }
  return X;
}

Eigen::MatrixXcd hermitize(const Eigen::MatrixXcd& A) { return 0.5 * (A + A.adjoint()); }

}  // namespace

Eigen::MatrixXcd project_psd(const Eigen::MatrixXcd& X) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(hermitize(X));
  Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().adjoint();
}

double rank_gap(const Eigen::MatrixXcd& X) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(hermitize(X),
                                                      Eigen::EigenvaluesOnly);
  return X.trace().real() - eig.eigenvalues().maxCoeff();
}

PsdReport solve_psd(const PsdProgram& program, const Eigen::MatrixXcd& start,
                    const PsdOptions& opts, PsdState* state) {
  PsdReport report;
  const int n = program.n;
  const int nx = n * n;
  const int j_count = static_cast<int>(program.constraints.size());
  const int dim = nx + j_count + 1;  // X block, slacks, delta
  const bool delta_active = program.delta_max > program.delta_min;

  std::vector<Eigen::MatrixXcd> A;
  A.reserve(j_count);
  for (const PsdConstraint& pc : program.constraints) A.push_back(hermitize(pc.A));

  // affine rows: unit diagonal, then Tr(A_j X) - coeff_j delta - s_j = beta_j
  const int rows = (program.unit_diagonal ? n : 0) + j_count;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows, dim);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
  Eigen::VectorXd row_scale = Eigen::VectorXd::Ones(rows);
  int r = 0;
  if (program.unit_diagonal) {
    for (int i = 0; i < n; ++i, ++r) {
      M(r, i) = 1.0;
      b[r] = 1.0;
    }
  }
  for (int j = 0; j < j_count; ++j, ++r) {
    M.row(r).head(nx) = hvec(A[j]);
    M(r, nx + j) = -1.0;
    M(r, nx + j_count) = -program.constraints[j].delta_coeff;
    b[r] = program.constraints[j].beta;
    const double norm = std::max(M.row(r).norm(), 1e-300);
    M.row(r) /= norm;
    b[r] /= norm;
    row_scale[r] = norm;
  }
  Eigen::LDLT<Eigen::MatrixXd> gram;
  if (rows > 0) gram.compute(M * M.transpose());

  Eigen::VectorXd q = Eigen::VectorXd::Zero(dim);
  q.head(nx) = hvec(hermitize(program.C));
  q[nx + j_count] = -program.delta_weight;

  auto project_affine = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    if (rows == 0) return w;
    return w - M.transpose() * gram.solve(M * w - b);
  };
  auto project_cone = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    Eigen::VectorXd out(dim);
    out.head(nx) = hvec(project_psd(hmat(w.head(nx), n)));
    out.segment(nx, j_count) = w.segment(nx, j_count).cwiseMax(0.0);
    out[nx + j_count] = delta_active
                            ? std::clamp(w[nx + j_count], program.delta_min, program.delta_max)
                            : program.delta_min;
    return out;
  };

  Eigen::VectorXd zt = Eigen::VectorXd::Zero(dim);  // cone copy
  Eigen::VectorXd u = Eigen::VectorXd::Zero(dim);
  double rho = 1.0;
  if (state && state->valid && state->z.size() == dim) {
    zt = state->z;
    u = state->u;
    rho = state->rho;
  } else {
    zt.head(nx) = hvec(hermitize(start));
    zt = project_cone(zt);
  }
  const double alpha = opts.over_relaxation;
  const double sqrt_dim = std::sqrt(static_cast<double>(dim));
  bool converged = false;
  int last_dir = 0;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const Eigen::VectorXd x = project_affine(zt - u - q / rho);
    const Eigen::VectorXd x_rel = alpha * x + (1.0 - alpha) * zt;
    const Eigen::VectorXd zt_old = zt;
    zt = project_cone(x_rel + u);
    u += x_rel - zt;

    const double r_prim = (x - zt).norm();
    const double r_dual = rho * (zt - zt_old).norm();
    const double eps_pri = sqrt_dim * 1e-10 + opts.tol * std::max(x.norm(), zt.norm());
    const double eps_dual = sqrt_dim * 1e-10 + opts.tol * rho * u.norm();
    if (r_prim <= eps_pri && r_dual <= eps_dual) {
      converged = true;
      ++it;
      break;
    }
    if (opts.verbose && it % 500 == 0)
      std::cerr << "[psd] it=" << it << " r_prim=" << r_prim << " r_dual=" << r_dual
                << " rho=" << rho << " delta=" << zt[nx + j_count] << '\n';
    if ((it + 1) % 10 == 0) {  // residual balancing, deterministic
      // hysteresis: a reversal needs a much larger imbalance than a repeat,
      // otherwise rho ping-pongs on near-degenerate programs
      const double up_thresh = last_dir < 0 ? 100.0 : 10.0;
      const double down_thresh = last_dir > 0 ? 100.0 : 10.0;
      if (r_prim > up_thresh * r_dual && rho < 1e6) {
        rho *= 2.0;
        u /= 2.0;
        last_dir = 1;
      } else if (r_dual > down_thresh * r_prim && rho > 1e-6) {
        rho /= 2.0;
        u *= 2.0;
        last_dir = -1;
      }
    }
  }

  if (state) {
    state->z = zt;
    state->u = u;
    state->rho = rho;
    state->valid = true;
  }
  report.iterations = it;
  report.X = hmat(zt.head(nx), n);
  report.delta = zt[nx + j_count];
  report.objective = (hermitize(program.C) * report.X).trace().real() -
                     program.delta_weight * report.delta;

  double violation = 0.0;
  if (program.unit_diagonal)
    for (int i = 0; i < n; ++i)
      violation = std::max(violation, std::abs(report.X(i, i).real() - 1.0));
  for (int j = 0; j < j_count; ++j) {
    const double lhs = (A[j] * report.X).trace().real() -
                       program.constraints[j].delta_coeff * report.delta;
    const double shortfall = (program.constraints[j].beta - lhs) / row_scale[program.unit_diagonal ? n + j : j];
    violation = std::max(violation, shortfall);
  }
  report.max_violation = violation;

  if (converged && violation <= std::max(10.0 * opts.tol, 1e-9)) {
    report.status = SolveStatus::optimal;
    return report;
  }
  if (!opts.classify_infeasible || j_count == 0) {
    report.status = converged ? SolveStatus::numerical_failure : SolveStatus::max_iterations;
    return report;
  }

  // Classify by maximizing a shared margin; always feasible, so if the probe
  // tops out below zero the constraint set is empty.
  PsdProgram probe;
  probe.n = n;
  probe.C = Eigen::MatrixXcd::Zero(n, n);
  probe.unit_diagonal = program.unit_diagonal;
  probe.delta_weight = 1.0;
  double beta_scale = 0.0;
  for (int j = 0; j < j_count; ++j) {
    PsdConstraint pc;
    pc.A = A[j] / row_scale[program.unit_diagonal ? n + j : j];
    pc.beta = (program.constraints[j].beta -
               program.constraints[j].delta_coeff * program.delta_min) /
              row_scale[program.unit_diagonal ? n + j : j];
    pc.delta_coeff = 1.0;
    probe.constraints.push_back(pc);
    beta_scale = std::max(beta_scale, std::abs(pc.beta));
  }
  probe.delta_max = 10.0 * (1.0 + beta_scale);
  probe.delta_min = -probe.delta_max;
  PsdOptions popts = opts;
  popts.classify_infeasible = false;
  const PsdReport feas = solve_psd(probe, Eigen::MatrixXcd::Identity(n, n), popts);
  if (feas.status == SolveStatus::optimal && feas.delta < -10.0 * opts.tol)
    report.status = SolveStatus::infeasible;
  else
    report.status = SolveStatus::max_iterations;
  return report;
}

}  // namespace wpcn
