#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "wpcn/channel.hpp"
#include "wpcn/noma.hpp"
#include "wpcn/smooth_solver.hpp"

namespace wpcn {

/// Expansion point for the concave interference term.
struct DcPoint {
  Eigen::VectorXd f_hat;  // J, >= 0
  double tau1_hat = 0.0;  // s, > 0
};

/// Inputs of the time/energy subproblem for fixed uplink phases.
struct ResourceProblem {
  Eigen::VectorXd gains;      // Tr(Q_k V1) per device, dimensionless
  Eigen::VectorXd eh_powers;  // harvested power Phi_k at the current v0, W
  Eigen::VectorXd gamma;      // QoS targets, bits/Hz
  double sigma2 = 0.0;        // W
  double t_max = 0.0;         // s
};

/// h_k = log2(sum_{i>=k} gains_i/sigma2 f_i + tau1),
/// g_k = log2(sum_{i>k} ... + tau1); the rate equals tau1*(h_k - g_k).
std::pair<double, double> dc_terms(int k, const Eigen::VectorXd& f, double tau1,
                                   const Eigen::VectorXd& gains_over_sigma2);

/// First-order expansion of the concave g_k at a point; a global upper bound.
struct AffineBound {
  Eigen::VectorXd grad_f;
  double grad_tau1 = 0.0;
  double constant = 0.0;  // value so that eval(point) == g_k(point)

  double eval(const Eigen::VectorXd& f, double tau1) const {
    return constant + grad_f.dot(f) + grad_tau1 * tau1;
  }
};

AffineBound taylor_upper_bound(int k, const DcPoint& point,
                               const Eigen::VectorXd& gains_over_sigma2);

struct ScaOptions {
  double tau0_tol = 1e-7;  // s; stop when the decrease falls below this
  int max_rounds = 50;
  bool equal_time = false;  // force tau0 = tau1 (ETA baseline)
  SmoothOptions solver;
};

struct ScaResult {
  SolveStatus status = SolveStatus::numerical_failure;
  ResourceAllocation alloc;
  std::vector<double> tau0_trace;  // objective after each SCA round
  int rounds = 0;
};

/// Solve the allocation subproblem by SCA over the DC split. Every iterate
/// is feasible for the original (un-linearized) rate constraint; the tau0
/// trace is non-increasing.
ScaResult sca_solve(const ResourceProblem& problem, const DcPoint& init,
                    const ScaOptions& opts = {});

/// Convenience wrapper computing gains from (channels, v1).
ScaResult sca_solve(const ChannelSet& cs, const Eigen::VectorXcd& v1,
                    const Eigen::VectorXd& eh_powers, const Eigen::VectorXd& gamma,
                    double sigma2, double t_max, const DcPoint& init,
                    const ScaOptions& opts = {});

/// Full-energy default start: tau1 = t_max/2, f_k = (t_max/2) * Phi_k.
DcPoint default_sca_start(const ResourceProblem& problem);

}  // namespace wpcn
