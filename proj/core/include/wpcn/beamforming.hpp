#pragma once

#include <Eigen/Dense>
#include <vector>

#include "wpcn/channel.hpp"
#include "wpcn/eh.hpp"
#include "wpcn/noma.hpp"
#include "wpcn/psd_solver.hpp"

namespace wpcn {

/// Lifted unit-modulus phase vector: V ~ [v;1][v;1]^H with unit diagonal.
struct LiftedPhase {
  Eigen::MatrixXcd V;     // (N+1)x(N+1) Hermitian
  Eigen::VectorXcd v;     // extracted unit-modulus N-vector
  double rank_gap = 0.0;  // Tr(V) - lambda_max(V)
};

struct PenaltyConfig {
  double mu0_scale = 0.1;  // mu0 = mu0_scale * (constraint scale)
  double mu_growth = 5.0;
  double rank_tol = 1e-6;  // relative to Tr(V)
  int max_outer = 12;
  int max_inner = 10;
  double delta_max_factor = 10.0;  // delta cap = factor * max_k beta_k
  double feas_tol = 1e-6;
  // Randomized rank-one anchors drawn from the relaxation; the best one acts
  // as a floor for the penalty result and re-seeds the mu ladder when the
  // direct solve lands on a worse (often zero-margin) rank-one point.
  int anchor_randomizations = 64;
  PsdOptions solver;
};

/// Tr(A V) >= beta, with V the lifted phase matrix.
struct TraceConstraint {
  Eigen::MatrixXcd A;  // Hermitian, (N+1)x(N+1)
  double beta = 0.0;
};

/// Carry-over state for penalty_solve across AO rounds: the splitting-solver
/// iterate plus the penalty factor that last closed the rank gap, so warm
/// rounds skip the mu ladder.
struct PenaltyState {
  PsdState psd;
  double mu = 0.0;
};

struct PenaltyResult {
  SolveStatus status = SolveStatus::numerical_failure;
  LiftedPhase phase;
  double delta = 0.0;  // scaled constraint margin at the solution
  int outer_iterations = 0;
  int splitting_iterations = 0;  // summed over all inner solves
};

/// Downlink energy bounds: beta_k = required_rf_power(p_k tau1 / tau0) / pe,
/// paired with the lifted channel matrices H_k. Throws UnreachableDemandError
/// when the per-unit-time demand reaches the saturation level.
std::vector<double> dl_constraint_bounds(const ResourceAllocation& alloc,
                                         const std::vector<EhParams>& eh, double pe);

std::vector<TraceConstraint> dl_constraints(const ResourceAllocation& alloc,
                                            const ChannelSet& cs,
                                            const std::vector<EhParams>& eh, double pe);

/// Uplink QoS in trace form:
/// p_k Tr(Q_k V1) - (2^{Gamma_k/tau1}-1) sum_{i>k} p_i Tr(Q_i V1)
///   >= (2^{Gamma_k/tau1}-1) sigma2.
std::vector<TraceConstraint> ul_constraint_matrices(const ResourceAllocation& alloc,
                                                    const ChannelSet& cs,
                                                    const Eigen::VectorXd& gamma,
                                                    double sigma2);

/// Rank-one phase optimization via the penalty method with a jointly
/// maximized constraint margin. Constraints are normalized internally; the
/// reported delta is in normalized units.
PenaltyResult penalty_solve(const std::vector<TraceConstraint>& constraints,
                            const LiftedPhase& start, const PenaltyConfig& pcfg = {},
                            PenaltyState* state = nullptr);

/// Static mode: one shared V over the union of DL and UL constraint sets.
PenaltyResult static_solve(const std::vector<TraceConstraint>& dl,
                           const std::vector<TraceConstraint>& ul,
                           const LiftedPhase& start, const PenaltyConfig& pcfg = {},
                           PenaltyState* state = nullptr);

/// No-penalty relaxation: maximize the shared normalized margin over the
/// unit-diagonal PSD set (rank unconstrained). Used by the Gaussian
/// randomization baseline.
PsdReport relaxation_solve(const std::vector<TraceConstraint>& constraints,
                           const Eigen::MatrixXcd& start, const PenaltyConfig& pcfg = {},
                           PsdState* state = nullptr);

/// Principal eigenvector, phase-normalized so the last entry is real
/// positive, then projected entrywise to unit modulus.
Eigen::VectorXcd extract_unit_modulus(const Eigen::MatrixXcd& V);

/// Lift a unit-modulus N-vector to its (N+1)x(N+1) rank-one form.
LiftedPhase lift(const Eigen::VectorXcd& v);

/// Worst normalized shortfall of the constraints at a lifted matrix
/// (negative when all constraints hold with margin).
double constraint_violation(const std::vector<TraceConstraint>& constraints,
                            const Eigen::MatrixXcd& V);

}  // namespace wpcn
