#include "wpcn/resource_alloc.hpp"

#include <cmath>
#include <stdexcept>

namespace wpcn {

namespace {

constexpr double kLn2 = 0.6931471805599453;

}  // namespace

std::pair<double, double> dc_terms(int k, const Eigen::VectorXd& f, double tau1,
                                   const Eigen::VectorXd& gains_over_sigma2) {
  if (tau1 <= 0.0) throw std::domain_error("dc_terms: tau1 must be positive");
  double all = tau1, tail = tau1;
  for (int i = k; i < f.size(); ++i) all += gains_over_sigma2[i] * f[i];
  for (int i = k + 1; i < f.size(); ++i) tail += gains_over_sigma2[i] * f[i];
  return {std::log2(all), std::log2(tail)};
}

AffineBound taylor_upper_bound(int k, const DcPoint& point,
                               const Eigen::VectorXd& gains_over_sigma2) {
  if (point.tau1_hat <= 0.0) throw std::domain_error("taylor_upper_bound: tau1_hat <= 0");
  const int k_count = static_cast<int>(point.f_hat.size());
  double s = point.tau1_hat;
  for (int i = k + 1; i < k_count; ++i) s += gains_over_sigma2[i] * point.f_hat[i];
  AffineBound bound;
  bound.grad_f = Eigen::VectorXd::Zero(k_count);
  for (int i = k + 1; i < k_count; ++i) bound.grad_f[i] = gains_over_sigma2[i] / (s * kLn2);
  bound.grad_tau1 = 1.0 / (s * kLn2);
  bound.constant = std::log2(s) - bound.grad_f.dot(point.f_hat) -
                   bound.grad_tau1 * point.tau1_hat;
  return bound;
}

DcPoint default_sca_start(const ResourceProblem& problem) {
  DcPoint point;
  point.tau1_hat = problem.t_max / 2.0;
  point.f_hat = (problem.t_max / 2.0) * problem.eh_powers;
  return point;
}

namespace {

struct VarLayout {
  int dim;
  int tau0;  // == tau1 when equal_time
  int tau1;
  int f0;
};

VarLayout layout(int k_count, bool equal_time) {
  if (equal_time) return {k_count + 1, 0, 0, 1};
  return {k_count + 2, 0, 1, 2};
}

SmoothConvexProgram build_program(const ResourceProblem& problem, const DcPoint& point,
                                  const VarLayout& vars) {
  const int k_count = static_cast<int>(problem.gains.size());
  const Eigen::VectorXd gs2 = problem.gains / problem.sigma2;
  SmoothConvexProgram prog;
  prog.dim = vars.dim;
  prog.objective = Eigen::VectorXd::Unit(vars.dim, vars.tau0);
  for (int j = 0; j < vars.dim; ++j) prog.nonneg.push_back(j);

  for (int k = 0; k < k_count; ++k) {  // energy causality f_k <= tau0 Phi_k
    LinearConstraint lc;
    lc.a = Eigen::VectorXd::Zero(vars.dim);
    lc.a[vars.tau0] += problem.eh_powers[k];
    lc.a[vars.f0 + k] -= 1.0;
    prog.linear.push_back(lc);
  }
  {  // time budget
    LinearConstraint lc;
    lc.a = Eigen::VectorXd::Zero(vars.dim);
    lc.a[vars.tau0] -= 1.0;
    lc.a[vars.tau1] -= 1.0;
    lc.b = -problem.t_max;
    prog.linear.push_back(lc);
  }
  for (int k = 0; k < k_count; ++k) {
    if (problem.gamma[k] <= 0.0) continue;  // rate >= 0 always holds
    const AffineBound bound = taylor_upper_bound(k, point, gs2);
    LogConstraint lg;
    lg.a = Eigen::VectorXd::Zero(vars.dim);
    for (int i = k; i < k_count; ++i) lg.a[vars.f0 + i] = gs2[i];
    lg.a[vars.tau1] += 1.0;
    lg.p = Eigen::VectorXd::Zero(vars.dim);
    for (int i = k + 1; i < k_count; ++i) lg.p[vars.f0 + i] = bound.grad_f[i];
    lg.p[vars.tau1] += bound.grad_tau1;
    lg.p0 = bound.constant;
    lg.recip_index = vars.tau1;
    lg.d = problem.gamma[k];
    prog.logs.push_back(lg);
  }
  return prog;
}

DcPoint point_from(const Eigen::VectorXd& x, const VarLayout& vars, int k_count,
                   double recip_floor) {
  DcPoint point;
  point.f_hat = x.segment(vars.f0, k_count).cwiseMax(0.0);
  point.tau1_hat = std::max(x[vars.tau1], 10.0 * recip_floor);
  return point;
}

}  // namespace

ScaResult sca_solve(const ResourceProblem& problem, const DcPoint& init,
                    const ScaOptions& opts) {
  const int k_count = static_cast<int>(problem.gains.size());
  ScaResult result;
  result.alloc.f = Eigen::VectorXd::Zero(k_count);
  result.alloc.p = Eigen::VectorXd::Zero(k_count);

  if ((problem.gamma.array() <= 0.0).all()) {  // empty QoS: no charging needed
    result.status = SolveStatus::optimal;
    result.alloc.tau0 = 0.0;
    result.alloc.tau1 = problem.t_max;
    result.tau0_trace.push_back(0.0);
    result.rounds = 1;
    return result;
  }

  const VarLayout vars = layout(k_count, opts.equal_time);
  DcPoint point = init;
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(vars.dim);
  x0[vars.tau0] = problem.t_max / 2.0;
  x0[vars.tau1] = point.tau1_hat;
  x0.segment(vars.f0, k_count) = point.f_hat;

  double prev_tau0 = std::numeric_limits<double>::infinity();
  bool retried = false;
  Eigen::VectorXd x = x0;
  for (int round = 0; round < opts.max_rounds; ++round) {
    const SmoothConvexProgram prog = build_program(problem, point, vars);
    SmoothReport report = solve_smooth(prog, x, opts.solver);
    if (report.status != SolveStatus::optimal) {
      if (!retried && (report.status == SolveStatus::infeasible ||
                       report.status == SolveStatus::max_iterations)) {
        // second attempt seeded from the violation-minimizing point
        retried = true;
        point = point_from(report.x, vars, k_count, opts.solver.recip_floor);
        x = report.x;
        --round;
        continue;
      }
      if (result.rounds == 0) {
        // never completed a clean round: a max-iterations iterate here is a
        // phase-I artifact, not a usable allocation
        result.status = report.status == SolveStatus::infeasible
                            ? SolveStatus::infeasible
                            : SolveStatus::numerical_failure;
        result.alloc.tau0 = report.x[vars.tau0];
        result.alloc.tau1 = std::max(report.x[vars.tau1], opts.solver.recip_floor);
        result.alloc.f = report.x.segment(vars.f0, k_count).cwiseMax(0.0);
        result.alloc.p = result.alloc.f / result.alloc.tau1;
        return result;
      }
      break;  // keep the best completed iterate
    }
    ++result.rounds;
    const double tau0 = report.x[vars.tau0];
    if (tau0 > prev_tau0 + 1e-9) break;  // solver noise; keep previous iterate
    x = report.x;
    result.alloc.tau0 = tau0;
    result.alloc.tau1 = std::max(report.x[vars.tau1], opts.solver.recip_floor);
    result.alloc.f = report.x.segment(vars.f0, k_count).cwiseMax(0.0);
    result.tau0_trace.push_back(tau0);
    point = point_from(report.x, vars, k_count, opts.solver.recip_floor);
    result.status = SolveStatus::optimal;
    if (prev_tau0 - tau0 < opts.tau0_tol) break;
    prev_tau0 = tau0;
    if (round == opts.max_rounds - 1) result.status = SolveStatus::max_iterations;
  }
  if (result.rounds == 0) {
    result.status = SolveStatus::numerical_failure;
    return result;
  }
  result.alloc.p = result.alloc.f / result.alloc.tau1;
  return result;
}

ScaResult sca_solve(const ChannelSet& cs, const Eigen::VectorXcd& v1,
                    const Eigen::VectorXd& eh_powers, const Eigen::VectorXd& gamma,
                    double sigma2, double t_max, const DcPoint& init,
                    const ScaOptions& opts) {
  ResourceProblem problem;
  problem.gains.resize(cs.device_count());
  for (int k = 0; k < cs.device_count(); ++k) problem.gains[k] = uplink_gain(cs, k, v1);
  problem.eh_powers = eh_powers;
  problem.gamma = gamma;
  problem.sigma2 = sigma2;
  problem.t_max = t_max;
  return sca_solve(problem, init, opts);
}

}  // namespace wpcn
