#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "wpcn/beamforming.hpp"
#include "wpcn/channel.hpp"
#include "wpcn/config.hpp"
#include "wpcn/noma.hpp"
#include "wpcn/solve_report.hpp"

namespace wpcn {

enum class Scheme { ao_dynamic, gr_dynamic, eta_dynamic, ao_static, fixed_phase, no_irs };

const char* scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

/// The two IRS phase vectors (shared in static mode) plus lifted forms.
struct PhasePlan {
  Eigen::VectorXcd v0, v1;
  Eigen::MatrixXcd V0, V1;
  bool is_static = false;
};

struct AoIterationRecord {
  double tau0 = 0.0, tau1 = 0.0;
  double delta_dl = 0.0, delta_ul = 0.0;
  double rank_gap_dl = 0.0, rank_gap_ul = 0.0;
  bool phases_adopted = false;
  bool tau0_inflated = false;  // saturation guard fired this round
  double wall_ms = 0.0;
};

struct AoTrace {
  std::vector<AoIterationRecord> iterations;
  SolveStatus termination = SolveStatus::numerical_failure;
  int beamforming_calls = 0;
  int resource_calls = 0;
  int phase_restarts = 0;
  double final_violation = 0.0;  // from-scratch re-check of the full problem
};

struct AoResult {
  SolveStatus status = SolveStatus::numerical_failure;
  ResourceAllocation alloc;
  PhasePlan phases;
  AoTrace trace;
  double energy = 0.0;  // tau0 * pe
};

/// Flat summary consumed by the experiment harness.
struct RunSummary {
  std::string scheme;
  std::uint64_t seed = 0;
  int n = 0, k = 0;
  double pe = 0.0;
  double tau0 = 0.0, energy = 0.0;
  int iterations = 0;
  std::string status;
};

struct AoOptions {
  double tau0_conv_rel = 1e-6;  // converged when |dtau0| < this * t_max
  int max_rounds = 30;
  int max_restarts = 20;  // random phase re-initializations on infeasibility
  int phase_starts = 3;   // penalty schemes keep the best of this many starts
  int gr_randomizations = 200;
  PenaltyConfig penalty;
  bool verbose = false;
};

/// Alternating optimization between the SCA resource subproblem and the
/// penalty-based phase subproblems. Channels are SIC-reordered internally;
/// the returned allocation follows that order. New phases are adopted only
/// when every constraint holds at the extracted unit-modulus vectors.
AoResult ao_optimize(const ChannelSet& channels, const SystemConfig& cfg, Scheme scheme,
                     std::uint64_t seed, const AoOptions& opts = {});

/// Gaussian-randomization baseline: plain relaxation (no penalty), then the
/// best feasible of `randomizations` unit-modulus candidates per round.
AoResult run_baseline_gr(const ChannelSet& channels, const SystemConfig& cfg,
                         int randomizations, std::uint64_t seed, const AoOptions& opts = {});

/// Equal-time baseline: tau0 = tau1 enforced in every resource subproblem.
AoResult run_baseline_eta(const ChannelSet& channels, const SystemConfig& cfg,
                          std::uint64_t seed, const AoOptions& opts = {});

/// From-scratch feasibility check of the full problem at (alloc, phases):
/// energy causality, time budget, QoS, unit modulus. Returns the largest
/// relative violation.
double check_solution(const ChannelSet& channels, const SystemConfig& cfg,
                      const ResourceAllocation& alloc, const PhasePlan& phases);

RunSummary summarize(const AoResult& result, Scheme scheme, const SystemConfig& cfg,
                     std::uint64_t seed);

}  // namespace wpcn
