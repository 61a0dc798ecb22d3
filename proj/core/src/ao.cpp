#include "wpcn/ao.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "wpcn/errors.hpp"
#include "wpcn/resource_alloc.hpp"
#include "wpcn/rng.hpp"

namespace wpcn {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Eigen::VectorXcd random_phases(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uphase(0.0, 2.0 * std::numbers::pi);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = std::polar(1.0, uphase(rng));
  return v;
}

Eigen::VectorXd harvested_powers(const ChannelSet& cs, const SystemConfig& cfg,
                                 const Eigen::VectorXcd& v0) {
  Eigen::VectorXd phi(cs.device_count());
  for (int k = 0; k < cs.device_count(); ++k) {
    const double p_rf = received_rf_power(cfg.pe, cs.h_d[k], cs.h_casc[k], v0);
    phi[k] = harvested_power(p_rf, cfg.eh[k]);
  }
  return phi;
}

// Saturation guard: grow tau0 until the per-unit-time demand of every device
// sits below its saturation level, so the DL bound inversion is defined.
bool inflate_for_saturation(ResourceAllocation& alloc, const SystemConfig& cfg) {
  bool inflated = false;
  for (int guard = 0; guard < 60; ++guard) {
    bool saturated = false;
    for (int k = 0; k < alloc.f.size(); ++k) {
      if (alloc.f[k] <= 0.0) continue;
      if (alloc.tau0 <= 0.0 ||
          alloc.f[k] / alloc.tau0 >= cfg.eh[k].saturation * (1.0 - 1e-6)) {
        saturated = true;
        break;
      }
    }
    if (!saturated) return inflated;
    alloc.tau0 = alloc.tau0 > 0.0 ? 2.0 * alloc.tau0 : 1e-6 * cfg.t_max;
    inflated = true;
  }
  return inflated;
}

// Phase candidates produced by one beamforming step.
struct PhaseStep {
  Eigen::VectorXcd v0, v1;
  double delta_dl = 0.0, delta_ul = 0.0;
  double rank_gap_dl = 0.0, rank_gap_ul = 0.0;
  bool have_dl = false, have_ul = false;
  int calls = 0;
};

// Splitting-solver state kept across AO rounds; consecutive rounds solve
// nearly identical programs, so warm starts cut the iteration counts hard.
struct SideStates {
  PenaltyState dl, ul;
};

PhaseStep penalty_step(const std::vector<TraceConstraint>& dl,
                       const std::vector<TraceConstraint>& ul, const PhasePlan& plan,
                       const AoOptions& opts, SideStates& states) {
  PhaseStep step;
  if (plan.is_static) {
    const PenaltyResult res = static_solve(dl, ul, lift(plan.v0), opts.penalty, &states.dl);
    step.calls = 1;
    if (res.status == SolveStatus::optimal) {
      step.v0 = step.v1 = res.phase.v;
      step.have_dl = step.have_ul = true;
      step.delta_dl = step.delta_ul = res.delta;
      step.rank_gap_dl = step.rank_gap_ul = res.phase.rank_gap;
    }
    return step;
  }
  // DL and UL are two independent feasibility problems.
  const PenaltyResult r0 = penalty_solve(dl, lift(plan.v0), opts.penalty, &states.dl);
  const PenaltyResult r1 = penalty_solve(ul, lift(plan.v1), opts.penalty, &states.ul);
  step.calls = 2;
  if (r0.status == SolveStatus::optimal) {
    step.v0 = r0.phase.v;
    step.have_dl = true;
    step.delta_dl = r0.delta;
    step.rank_gap_dl = r0.phase.rank_gap;
  }
  if (r1.status == SolveStatus::optimal) {
    step.v1 = r1.phase.v;
    step.have_ul = true;
    step.delta_ul = r1.delta;
    step.rank_gap_ul = r1.phase.rank_gap;
  }
  return step;
}

PhaseStep gr_step(const std::vector<TraceConstraint>& dl,
                  const std::vector<TraceConstraint>& ul, const PhasePlan& plan,
                  int randomizations, std::uint64_t round_seed, const AoOptions& opts,
                  SideStates& states) {
  PhaseStep step;
  step.calls = 2;
  std::mt19937_64 rng(round_seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  auto best_candidate = [&](const std::vector<TraceConstraint>& cons,
                            const Eigen::VectorXcd& current, PsdState& state,
                            Eigen::VectorXcd& out, double& margin_out) {
    const PsdReport relax = relaxation_solve(cons, lift(current).V, opts.penalty, &state);
    if (!relax.X.allFinite()) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(relax.X);
    const Eigen::MatrixXcd factor =
        eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    const int n1 = static_cast<int>(relax.X.rows());
    double best_margin = -std::numeric_limits<double>::infinity();
    Eigen::VectorXcd best;
    for (int c = 0; c < randomizations; ++c) {
      Eigen::VectorXcd r(n1);
      for (int i = 0; i < n1; ++i)
        r[i] = std::complex<double>(n01(rng), n01(rng)) / std::sqrt(2.0);
      Eigen::VectorXcd w = factor * r;
      Eigen::VectorXcd v(n1 - 1);
      const std::complex<double> anchor =
          std::abs(w[n1 - 1]) > 0.0 ? std::conj(w[n1 - 1]) / std::abs(w[n1 - 1])
                                    : std::complex<double>(1.0, 0.0);
      for (int i = 0; i < n1 - 1; ++i) {
        const std::complex<double> wi = w[i] * anchor;
        v[i] = std::abs(wi) > 0.0 ? wi / std::abs(wi) : std::complex<double>(1.0, 0.0);
      }
      const double margin = -constraint_violation(cons, lift(v).V);
      if (margin > best_margin) {
        best_margin = margin;
        best = v;
      }
    }
    out = best;
    margin_out = best_margin;
    return best_margin >= -opts.penalty.feas_tol;
  };
  step.have_dl = best_candidate(dl, plan.v0, states.dl.psd, step.v0, step.delta_dl);
  step.have_ul = best_candidate(ul, plan.v1, states.ul.psd, step.v1, step.delta_ul);
  return step;
}

struct Attempt {
  bool feasible = false;
  AoResult result;
};

Attempt ao_attempt(const ChannelSet& cs, const SystemConfig& cfg, Scheme scheme,
                   const Eigen::VectorXcd& init_phases, std::uint64_t seed,
                   const AoOptions& opts) {
  Attempt attempt;
  AoResult& result = attempt.result;
  const int n = cs.irs_elements();
  const bool optimize_phases =
      n > 0 && scheme != Scheme::fixed_phase && scheme != Scheme::no_irs;

  PhasePlan plan;
  plan.is_static = scheme == Scheme::ao_static;
  plan.v0 = init_phases;
  plan.v1 = init_phases;
  plan.V0 = lift(plan.v0).V;
  plan.V1 = lift(plan.v1).V;

  ScaOptions sca_opts;
  sca_opts.equal_time = scheme == Scheme::eta_dynamic;
  AoOptions opts_local = opts;
  opts_local.penalty.solver.verbose = opts.verbose;

  double prev_tau0 = std::numeric_limits<double>::infinity();
  bool have_alloc = false;
  DcPoint warm;
  SideStates states;

  for (int round = 0; round < opts.max_rounds; ++round) {
    const auto t0 = Clock::now();
    AoIterationRecord rec;

    const Eigen::VectorXd phi = harvested_powers(cs, cfg, plan.v0);
    ResourceProblem problem;
    problem.gains.resize(cs.device_count());
    for (int k = 0; k < cs.device_count(); ++k)
      problem.gains[k] = uplink_gain(cs, k, plan.v1);
    problem.eh_powers = phi;
    problem.gamma = cfg.gamma;
    problem.sigma2 = cfg.sigma2;
    problem.t_max = cfg.t_max;

    const DcPoint start = have_alloc ? warm : default_sca_start(problem);
    ScaResult sca = sca_solve(problem, start, sca_opts);
    ++result.trace.resource_calls;
    const auto usable = [](const ScaResult& s) {
      return s.status == SolveStatus::optimal || s.status == SolveStatus::max_iterations;
    };
    if (!usable(sca) && have_alloc) {  // warm start misled the solver: go cold
      sca = sca_solve(problem, default_sca_start(problem), sca_opts);
      ++result.trace.resource_calls;
    }
    if (!usable(sca)) {
      if (!have_alloc) return attempt;  // restart with new random phases
      result.trace.termination = SolveStatus::max_iterations;
      break;
    }
    // Adopting phases keeps the previous allocation feasible, so tau0 can
    // never truly rise; a small increase is SCA linearization noise. Keep the
    // better iterate and stop.
    const bool regressed = have_alloc && sca.alloc.tau0 > prev_tau0 + 1e-12;
    if (!regressed) {
      result.alloc = sca.alloc;
      warm = DcPoint{sca.alloc.f, std::max(sca.alloc.tau1, 1e-9)};
    }
    have_alloc = true;
    rec.tau0 = result.alloc.tau0;
    rec.tau1 = result.alloc.tau1;

    const bool converged =
        regressed || std::abs(prev_tau0 - result.alloc.tau0) < opts.tau0_conv_rel * cfg.t_max;
    const bool trivial = sca.alloc.tau0 <= 0.0 || (cfg.gamma.array() <= 0.0).all();
    if (!optimize_phases || converged || trivial) {
      rec.wall_ms = ms_since(t0);
      result.trace.iterations.push_back(rec);
      result.trace.termination = SolveStatus::optimal;
      break;
    }
    prev_tau0 = result.alloc.tau0;

    // phase step
    ResourceAllocation bound_alloc = result.alloc;
    rec.tau0_inflated = inflate_for_saturation(bound_alloc, cfg);
    PhaseStep step;
    try {
      const std::vector<TraceConstraint> dl =
          dl_constraints(bound_alloc, cs, cfg.eh, cfg.pe);
      const std::vector<TraceConstraint> ul =
          ul_constraint_matrices(result.alloc, cs, cfg.gamma, cfg.sigma2);
      step = scheme == Scheme::gr_dynamic
                 ? gr_step(dl, ul, plan, opts.gr_randomizations,
                           derive_seed(seed, 0xB0, static_cast<std::uint64_t>(round)),
                           opts_local, states)
                 : penalty_step(dl, ul, plan, opts_local, states);
      result.trace.beamforming_calls += step.calls;

      // Adopt only when the constraints hold at the extracted unit-modulus
      // vectors; a marginal rank gap can break feasibility on extraction.
      if (step.have_dl &&
          constraint_violation(dl, lift(step.v0).V) <= opts.penalty.feas_tol) {
        plan.v0 = step.v0;
        plan.V0 = lift(step.v0).V;
        rec.phases_adopted = true;
      }
      if (step.have_ul &&
          constraint_violation(ul, lift(step.v1).V) <= opts.penalty.feas_tol) {
        plan.v1 = step.v1;
        plan.V1 = lift(step.v1).V;
        rec.phases_adopted = true;
      }
      if (plan.is_static && !(step.have_dl && step.have_ul)) rec.phases_adopted = false;
    } catch (const UnreachableDemandError&) {
      // keep previous phases this round
    }
    rec.delta_dl = step.delta_dl;
    rec.delta_ul = step.delta_ul;
    rec.rank_gap_dl = step.rank_gap_dl;
    rec.rank_gap_ul = step.rank_gap_ul;
    rec.wall_ms = ms_since(t0);
    result.trace.iterations.push_back(rec);
    if (opts.verbose)
      std::cerr << "[ao] round " << round << " tau0=" << rec.tau0
                << " adopted=" << rec.phases_adopted << '\n';
    if (round == opts.max_rounds - 1)
      result.trace.termination = SolveStatus::max_iterations;
  }

  if (!have_alloc) return attempt;
  if (result.trace.termination == SolveStatus::numerical_failure)
    result.trace.termination = SolveStatus::optimal;
  attempt.feasible = true;
  result.status = result.trace.termination;
  result.phases = plan;
  result.energy = result.alloc.tau0 * cfg.pe;
  result.trace.final_violation = check_solution(cs, cfg, result.alloc, plan);
  return attempt;
}

}  // namespace

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::ao_dynamic: return "ao-dynamic";
    case Scheme::gr_dynamic: return "gr-dynamic";
    case Scheme::eta_dynamic: return "eta-dynamic";
    case Scheme::ao_static: return "ao-static";
    case Scheme::fixed_phase: return "fixed-phase";
    case Scheme::no_irs: return "no-irs";
  }
  throw std::invalid_argument("scheme_name: unknown scheme");
}

Scheme scheme_from_name(const std::string& name) {
  for (Scheme s : {Scheme::ao_dynamic, Scheme::gr_dynamic, Scheme::eta_dynamic,
                   Scheme::ao_static, Scheme::fixed_phase, Scheme::no_irs})
    if (name == scheme_name(s)) return s;
  throw std::invalid_argument("unknown scheme: " + name);
}

AoResult ao_optimize(const ChannelSet& channels, const SystemConfig& cfg, Scheme scheme,
                     std::uint64_t seed, const AoOptions& opts) {
  ChannelSet cs = scheme == Scheme::no_irs && channels.irs_elements() > 0
                      ? strip_irs(channels)
                      : channels;
  cs = reorder_devices(cs, sic_order(cs));
  const int n = cs.irs_elements();

  std::mt19937_64 phase_rng(derive_seed(seed, 0xC0, 0));
  AoResult last;
  // Fixed-phase schemes get no phase restarts: their one random draw (or the
  // absence of an IRS) is the scheme. The penalty schemes keep the best of
  // several starts; AO lands in a stationary point per start.
  const bool phases_fixed = scheme == Scheme::fixed_phase || scheme == Scheme::no_irs;
  const int restarts = (n > 0 && !phases_fixed) ? opts.max_restarts : 1;
  const int wanted =
      scheme == Scheme::ao_dynamic || scheme == Scheme::ao_static ? opts.phase_starts : 1;
  bool have_best = false;
  AoResult best;
  int feasible_count = 0;
  for (int attempt_idx = 0; attempt_idx < restarts; ++attempt_idx) {
    const Eigen::VectorXcd init = random_phases(n, phase_rng);
    Attempt attempt = ao_attempt(cs, cfg, scheme, init, seed, opts);
    attempt.result.trace.phase_restarts = attempt_idx;
    if (attempt.feasible) {
      if (!have_best || attempt.result.alloc.tau0 < best.alloc.tau0) {
        best = attempt.result;
        have_best = true;
      }
      if (++feasible_count >= wanted) break;
    }
    last = attempt.result;
  }
  if (have_best) return best;
  last.status = SolveStatus::infeasible;
  last.trace.termination = SolveStatus::infeasible;
  return last;
}

AoResult run_baseline_gr(const ChannelSet& channels, const SystemConfig& cfg,
                         int randomizations, std::uint64_t seed, const AoOptions& opts) {
  if (randomizations < 1)
    throw std::invalid_argument("run_baseline_gr: need at least one randomization");
  AoOptions gr_opts = opts;
  gr_opts.gr_randomizations = randomizations;
  return ao_optimize(channels, cfg, Scheme::gr_dynamic, seed, gr_opts);
}

AoResult run_baseline_eta(const ChannelSet& channels, const SystemConfig& cfg,
                          std::uint64_t seed, const AoOptions& opts) {
  return ao_optimize(channels, cfg, Scheme::eta_dynamic, seed, opts);
}

double check_solution(const ChannelSet& channels, const SystemConfig& cfg,
                      const ResourceAllocation& alloc, const PhasePlan& phases) {
  double worst = 0.0;
  for (int i = 0; i < phases.v0.size(); ++i)
    worst = std::max(worst, std::abs(std::abs(phases.v0[i]) - 1.0));
  for (int i = 0; i < phases.v1.size(); ++i)
    worst = std::max(worst, std::abs(std::abs(phases.v1[i]) - 1.0));

  worst = std::max(worst, (alloc.tau0 + alloc.tau1 - cfg.t_max) / cfg.t_max);
  worst = std::max(worst, -alloc.tau0 / cfg.t_max);
  worst = std::max(worst, -alloc.tau1 / cfg.t_max);

  for (int k = 0; k < channels.device_count(); ++k) {
    worst = std::max(worst, -alloc.p[k]);
    // energy causality from raw channels
    const double p_rf = received_rf_power(cfg.pe, channels.h_d[k], channels.h_casc[k],
                                          phases.v0);
    const double budget = alloc.tau0 * harvested_power(p_rf, cfg.eh[k]);
    const double f_k = alloc.p[k] * alloc.tau1;
    if (f_k > 0.0)
      worst = std::max(worst, (f_k - budget) / f_k);
    // QoS
    const double r = rate_k(k, alloc, channels, phases.v1, cfg.sigma2);
    if (cfg.gamma[k] > 0.0)
      worst = std::max(worst, (cfg.gamma[k] - r) / cfg.gamma[k]);
  }
  return std::max(worst, 0.0);
}

RunSummary summarize(const AoResult& result, Scheme scheme, const SystemConfig& cfg,
                     std::uint64_t seed) {
  RunSummary s;
  s.scheme = scheme_name(scheme);
  s.seed = seed;
  s.n = cfg.irs_elements;
  s.k = cfg.devices;
  s.pe = cfg.pe;
  s.tau0 = result.alloc.tau0;
  s.energy = result.energy;
  s.iterations = static_cast<int>(result.trace.iterations.size());
  s.status = to_string(result.status);
  return s;
}

}  // namespace wpcn
