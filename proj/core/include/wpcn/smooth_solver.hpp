#pragma once

#include <Eigen/Dense>
#include <vector>

#include "wpcn/solve_report.hpp"

namespace wpcn {

/// a^T x >= b
struct LinearConstraint {
  Eigen::VectorXd a;
  double b = 0.0;
};

/// log2(a^T x + c) - (p^T x + p0) - d / x[recip_index] >= 0.
/// d >= 0 and x[recip_index] kept strictly positive, so the left side is
/// concave and the constraint set convex. recip_index < 0 disables the
/// reciprocal term (d must then be 0).
struct LogConstraint {
  Eigen::VectorXd a;
  double c = 0.0;
  Eigen::VectorXd p;
  double p0 = 0.0;
  int recip_index = -1;
  double d = 0.0;
};

/// Small smooth convex program: minimize objective^T x over tagged
/// constraint atoms. Curvature is guaranteed by construction, never by a
/// free-form callable.
struct SmoothConvexProgram {
  int dim = 0;
  Eigen::VectorXd objective;
  std::vector<LinearConstraint> linear;
  std::vector<LogConstraint> logs;
  std::vector<int> nonneg;  // variable indices with x_j >= 0
};

struct SmoothReport {
  SolveStatus status = SolveStatus::numerical_failure;
  Eigen::VectorXd x;
  double objective = 0.0;
  double max_violation = 0.0;  // max_i max(0, -g_i(x))
  int iterations = 0;          // Newton iterations, both phases
};

struct SmoothOptions {
  double feas_tol = 1e-7;
  double gap_tol = 1e-9;       // duality-gap target m/t
  int max_newton = 500;
  double recip_floor = 1e-9;   // hard floor on reciprocal variables
  bool verbose = false;
};

/// Primal interior-point with log barrier and damped Newton. Phase-I
/// minimizes the common slack; if no strictly feasible point exists the
/// report carries the violation-minimizing x with status infeasible.
SmoothReport solve_smooth(const SmoothConvexProgram& program, const Eigen::VectorXd& start,
                          const SmoothOptions& opts = {});

}  // namespace wpcn
