#pragma once

#include <Eigen/Dense>
#include <vector>

#include "wpcn/solve_report.hpp"

namespace wpcn {

/// Tr(A X) - delta_coeff * delta >= beta
struct PsdConstraint {
  Eigen::MatrixXcd A;  // Hermitian
  double beta = 0.0;
  double delta_coeff = 0.0;
};

/// minimize Tr(C X) - delta_weight * delta
/// s.t.     Tr(A_j X) - delta_coeff_j * delta >= beta_j
///          diag(X) = 1 (if unit_diagonal), X PSD,
///          delta in [delta_min, delta_max].
/// delta is a shared scalar slack; with delta_min = delta_max it is inert.
struct PsdProgram {
  int n = 0;
  Eigen::MatrixXcd C;
  std::vector<PsdConstraint> constraints;
  bool unit_diagonal = true;
  double delta_weight = 0.0;
  double delta_min = 0.0;
  double delta_max = 0.0;
};

struct PsdReport {
  SolveStatus status = SolveStatus::numerical_failure;
  Eigen::MatrixXcd X;
  double delta = 0.0;
  double objective = 0.0;
  double max_violation = 0.0;
  int iterations = 0;
};

struct PsdOptions {
  double tol = 1e-7;
  int max_iterations = 20000;
  double over_relaxation = 1.0;
  bool verbose = false;
  bool classify_infeasible = true;  // internal: disabled for the probe solve
};

/// Splitting-iteration state carried between calls. Reusing it warm-starts
/// the solver when consecutive programs differ only slightly (penalty loop,
/// AO rounds); solve_psd writes the final state back.
struct PsdState {
  Eigen::VectorXd z, u;
  double rho = 1.0;
  bool valid = false;
};

/// Operator splitting: alternate least-squares projection onto the affine
/// constraint rows and eigendecomposition-based projection onto the
/// PSD x nonnegative-slack x box cone, with over-relaxation. Solved natively
/// in complex Hermitian arithmetic. Deterministic for fixed inputs.
PsdReport solve_psd(const PsdProgram& program, const Eigen::MatrixXcd& start,
                    const PsdOptions& opts = {}, PsdState* state = nullptr);

/// Projection onto the Hermitian PSD cone (eigenvalue clamping).
Eigen::MatrixXcd project_psd(const Eigen::MatrixXcd& X);

/// Tr(X) - lambda_max(X); zero exactly when a PSD matrix has rank <= 1.
double rank_gap(const Eigen::MatrixXcd& X);

}  // namespace wpcn
