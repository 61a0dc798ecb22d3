#include "wpcn/smooth_solver.hpp"

#include <cmath>
#include <functional>
#include <iostream>
#include <limits>

namespace wpcn {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kDomainEps = 1e-14;

// Unified internal atom. kLog: log2(a^T x + c) - (p^T x + p0) - d/x[recip].
struct Atom {
  enum Kind { kLin, kLog } kind = kLin;
  Eigen::VectorXd a;
  double c = 0.0;  // kLin: g = a^T x - (-c)? kept as g = a^T x + c
  Eigen::VectorXd p;
  double p0 = 0.0;
  int recip = -1;
  double d = 0.0;
};

double eval_atom(const Atom& atom, const Eigen::VectorXd& x) {
  if (atom.kind == Atom::kLin) return atom.a.dot(x) + atom.c;
  const double u = atom.a.dot(x) + atom.c;
  if (u <= 0.0) return -std::numeric_limits<double>::infinity();
  double g = std::log2(u) - atom.p.dot(x) - atom.p0;
  if (atom.recip >= 0 && atom.d != 0.0) {
    if (x[atom.recip] <= 0.0) return -std::numeric_limits<double>::infinity();
    g -= atom.d / x[atom.recip];
  }
  return g;
}

void atom_derivatives(const Atom& atom, const Eigen::VectorXd& x, Eigen::VectorXd& grad,
                      Eigen::MatrixXd& neg_hess) {
  if (atom.kind == Atom::kLin) {
    grad = atom.a;
    neg_hess.setZero(x.size(), x.size());
    return;
  }
  const double u = atom.a.dot(x) + atom.c;
  grad = atom.a / (u * kLn2) - atom.p;
  neg_hess = atom.a * atom.a.transpose() / (u * u * kLn2);
  if (atom.recip >= 0 && atom.d != 0.0) {
    const double xr = x[atom.recip];
    grad[atom.recip] += atom.d / (xr * xr);
    neg_hess(atom.recip, atom.recip) += 2.0 * atom.d / (xr * xr * xr);
  }
}

struct BarrierResult {
  Eigen::VectorXd x;
  int newton_iters = 0;
  bool converged = false;
  bool failed = false;
};

// Damped-Newton log-barrier path following for min c^T x s.t. g_i(x) >= 0.
// x0 must be strictly feasible. early_exit, when set, is polled after every
// Newton step (used by phase-I to bail out once strict feasibility shows up).
BarrierResult barrier_minimize(const std::vector<Atom>& atoms, const Eigen::VectorXd& c_obj,
                               const Eigen::VectorXd& x0, double gap_tol, int max_newton,
                               const std::function<bool(const Eigen::VectorXd&)>& early_exit,
                               bool verbose) {
  const int dim = static_cast<int>(x0.size());
  const int m = static_cast<int>(atoms.size());
  BarrierResult res;
  res.x = x0;

  double t = 1.0;
  Eigen::VectorXd grad(dim), agrad(dim);
  Eigen::MatrixXd hess(dim, dim), nh(dim, dim);

  while (res.newton_iters < max_newton) {
    // center for current t
    for (int inner = 0;; ++inner) {
      if (res.newton_iters >= max_newton) return res;
      grad = t * c_obj;
      hess.setZero();
      bool domain_ok = true;
      for (const Atom& atom : atoms) {
        const double g = eval_atom(atom, res.x);
        if (!(g > 0.0)) { domain_ok = false; break; }
        atom_derivatives(atom, res.x, agrad, nh);
        grad -= agrad / g;
        hess += agrad * agrad.transpose() / (g * g) + nh / g;
      }
      if (!domain_ok) { res.failed = true; return res; }
      hess.diagonal().array() += 1e-12;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
      Eigen::VectorXd step = ldlt.solve(-grad);
      if (!step.allFinite()) { res.failed = true; return res; }
      const double lambda2 = -grad.dot(step);
      // scale-aware: phi carries t*obj, so decrements below its floating-point
      // noise floor cannot be verified by the line search
      const double phi_scale = std::abs(t * c_obj.dot(res.x)) + static_cast<double>(m);
      if (lambda2 / 2.0 < 1e-12 * std::max(1.0, phi_scale)) break;

      // backtrack into the domain, then Armijo
      double alpha = 1.0;
      auto phi = [&](const Eigen::VectorXd& x) {
        double val = t * c_obj.dot(x);
        for (const Atom& atom : atoms) {
          const double g = eval_atom(atom, x);
          if (!(g > 0.0)) return std::numeric_limits<double>::infinity();
          val -= std::log(g);
        }
        return val;
      };
      const double phi0 = phi(res.x);
      bool moved = false;
      for (int bt = 0; bt < 60; ++bt) {
        Eigen::VectorXd cand = res.x + alpha * step;
        const double phic = phi(cand);
        if (phic <= phi0 - 1e-4 * alpha * lambda2) {
          res.x = cand;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      ++res.newton_iters;
      if (!moved) break;  // stalled; accept center as-is
      if (early_exit && early_exit(res.x)) { res.converged = true; return res; }
      if (inner > 200) break;
    }
    if (verbose)
      std::cerr << "[barrier] t=" << t << " obj=" << c_obj.dot(res.x)
                << " iters=" << res.newton_iters << '\n';
    if (static_cast<double>(m) / t < gap_tol) {
      res.converged = true;
      return res;
    }
    t *= 10.0;
  }
  return res;
}

std::vector<Atom> build_atoms(const SmoothConvexProgram& program, const SmoothOptions& opts,
                              bool with_slack) {
  const int dim = program.dim + (with_slack ? 1 : 0);
  std::vector<Atom> atoms;
  auto extend = [&](const Eigen::VectorXd& v, double slack_coeff) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
    out.head(v.size()) = v;
    if (with_slack) out[dim - 1] = slack_coeff;
    return out;
  };
  for (const LinearConstraint& lc : program.linear) {
    Atom atom;
    atom.kind = Atom::kLin;
    atom.a = extend(lc.a, 1.0);
    atom.c = -lc.b;
    atoms.push_back(atom);
  }
  for (int j : program.nonneg) {
    Atom atom;
    atom.kind = Atom::kLin;
    atom.a = extend(Eigen::VectorXd::Unit(program.dim, j), 1.0);
    atoms.push_back(atom);
  }
  for (const LogConstraint& lg : program.logs) {
    Atom atom;
    atom.kind = Atom::kLog;
    atom.a = extend(lg.a, 0.0);
    atom.c = lg.c;
    atom.p = extend(lg.p, with_slack ? -1.0 : 0.0);
    atom.p0 = lg.p0;
    atom.recip = lg.recip_index;
    atom.d = lg.d;
    atoms.push_back(atom);
    // hard domain guards (no slack): argument positivity, reciprocal floor
    Atom dom;
    dom.kind = Atom::kLin;
    dom.a = extend(lg.a, 0.0);
    dom.c = lg.c - kDomainEps;
    atoms.push_back(dom);
    if (lg.recip_index >= 0) {
      Atom floor_atom;
      floor_atom.kind = Atom::kLin;
      floor_atom.a = extend(Eigen::VectorXd::Unit(program.dim, lg.recip_index), 0.0);
      floor_atom.c = -opts.recip_floor;
      atoms.push_back(floor_atom);
    }
  }
  return atoms;
}

// max_i max(0, -g_i(x)) over the program's own constraints (no guards).
double max_violation_of(const SmoothConvexProgram& program, const Eigen::VectorXd& x) {
  double worst = 0.0;
  for (const LinearConstraint& lc : program.linear)
    worst = std::max(worst, lc.b - lc.a.dot(x));
  for (int j : program.nonneg) worst = std::max(worst, -x[j]);
  for (const LogConstraint& lg : program.logs) {
    Atom atom{Atom::kLog, lg.a, lg.c, lg.p, lg.p0, lg.recip_index, lg.d};
    const double g = eval_atom(atom, x);
    worst = std::max(worst, std::isfinite(g) ? -g : std::numeric_limits<double>::infinity());
  }
  return worst;
}

}  // namespace

SmoothReport solve_smooth(const SmoothConvexProgram& program, const Eigen::VectorXd& start,
                          const SmoothOptions& opts) {
  SmoothReport report;
  const int dim = program.dim;
  Eigen::VectorXd x = start;

  // keep reciprocal variables clear of their floor so logs are evaluable
  for (const LogConstraint& lg : program.logs)
    if (lg.recip_index >= 0)
      x[lg.recip_index] = std::max(x[lg.recip_index], 10.0 * opts.recip_floor);
  for (int j : program.nonneg) x[j] = std::max(x[j], 0.0);

  const std::vector<Atom> atoms = build_atoms(program, opts, false);

  // Phase I unless the start is already strictly feasible.
  bool strictly_feasible = true;
  for (const Atom& atom : atoms)
    if (!(eval_atom(atom, x) > 0.0)) { strictly_feasible = false; break; }

  if (!strictly_feasible) {
    const std::vector<Atom> atoms_p1 = build_atoms(program, opts, true);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(dim + 1);
    y.head(dim) = x;
    double worst = 0.0;
    for (const Atom& atom : atoms_p1) {
      Eigen::VectorXd probe = y;
      probe[dim] = 0.0;
      const double g = eval_atom(atom, probe);
      // slack enters linear atoms through a, log atoms through -p
      const double slack_gain =
          atom.kind == Atom::kLin ? atom.a[dim] : atom.a[dim] - atom.p[dim];
      if (slack_gain <= 0.0 && (!std::isfinite(g) || g <= 0.0)) {
        // hard guard violated at the start and slack cannot help
        report.status = SolveStatus::numerical_failure;
        report.x = x;
        report.max_violation = max_violation_of(program, x);
        return report;
      }
      if (std::isfinite(g)) worst = std::max(worst, -g);
    }
    y[dim] = worst + std::max(1.0, 0.1 * worst);

    Eigen::VectorXd c_p1 = Eigen::VectorXd::Unit(dim + 1, dim);
    auto exit_when_interior = [&](const Eigen::VectorXd& cand) { return cand[dim] < -1e-10; };
    BarrierResult p1 = barrier_minimize(atoms_p1, c_p1, y, 1e-9, opts.max_newton,
                                        exit_when_interior, opts.verbose);
    report.iterations += p1.newton_iters;
    if (p1.failed) {
      report.status = SolveStatus::numerical_failure;
      report.x = p1.x.head(dim);
      report.max_violation = max_violation_of(program, report.x);
      return report;
    }
    if (p1.x[dim] >= -1e-10) {
      // no strictly feasible point found: report the violation minimizer
      report.status = p1.converged ? SolveStatus::infeasible : SolveStatus::max_iterations;
      report.x = p1.x.head(dim);
      report.objective = program.objective.dot(report.x);
      report.max_violation = max_violation_of(program, report.x);
      return report;
    }
    x = p1.x.head(dim);
  }

  BarrierResult p2 = barrier_minimize(atoms, program.objective, x, opts.gap_tol,
                                      opts.max_newton - report.iterations, nullptr, opts.verbose);
  report.iterations += p2.newton_iters;
  report.x = p2.x;
  report.objective = program.objective.dot(p2.x);
  report.max_violation = max_violation_of(program, p2.x);
  if (p2.failed)
    report.status = SolveStatus::numerical_failure;
  else if (!p2.converged)
    report.status = SolveStatus::max_iterations;
  else
    report.status = report.max_violation <= opts.feas_tol ? SolveStatus::optimal
                                                          : SolveStatus::numerical_failure;
  return report;
}

}  // namespace wpcn
