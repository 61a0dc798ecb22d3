#include "wpcn/beamforming.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "wpcn/errors.hpp"

namespace wpcn {

namespace {

Eigen::VectorXcd principal_eigenvector(const Eigen::MatrixXcd& V, double* value = nullptr) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (V + V.adjoint()));
  const int n = static_cast<int>(V.rows());
  if (value) *value = eig.eigenvalues()[n - 1];
  return eig.eigenvectors().col(n - 1);  // eigenvalues ascending
}

struct NormalizedConstraints {
  std::vector<PsdConstraint> cons;  // delta_coeff = 1 on every row
  double max_beta = 0.0;            // max normalized beta, clamped at 0
  double abs_beta = 0.0;
};

NormalizedConstraints normalize(const std::vector<TraceConstraint>& constraints) {
  NormalizedConstraints out;
  for (const TraceConstraint& tc : constraints) {
    const double scale = std::max(tc.A.norm(), 1e-300);
    PsdConstraint pc;
    pc.A = tc.A / scale;
    pc.beta = tc.beta / scale;
    pc.delta_coeff = 1.0;
    out.cons.push_back(pc);
    out.max_beta = std::max(out.max_beta, pc.beta);
    out.abs_beta = std::max(out.abs_beta, std::abs(pc.beta));
  }
  return out;
}

}  // namespace

std::vector<double> dl_constraint_bounds(const ResourceAllocation& alloc,
                                         const std::vector<EhParams>& eh, double pe) {
  const int k_count = static_cast<int>(eh.size());
  std::vector<double> bounds(k_count, 0.0);
  for (int k = 0; k < k_count; ++k) {
    const double energy = alloc.p[k] * alloc.tau1;
    if (energy <= 0.0) continue;  // zero demand: any phase works
    if (alloc.tau0 <= 0.0)
      throw UnreachableDemandError("dl_constraint_bounds: positive demand with tau0 = 0");
    // demand per unit charging time; throws when at/above saturation
    bounds[k] = required_rf_power(energy / alloc.tau0, eh[k]) / pe;
  }
  return bounds;
}

std::vector<TraceConstraint> dl_constraints(const ResourceAllocation& alloc,
                                            const ChannelSet& cs,
                                            const std::vector<EhParams>& eh, double pe) {
  const std::vector<double> bounds = dl_constraint_bounds(alloc, eh, pe);
  std::vector<TraceConstraint> cons;
  for (int k = 0; k < cs.device_count(); ++k)
    cons.push_back({cs.H[k], bounds[k]});
  return cons;
}

std::vector<TraceConstraint> ul_constraint_matrices(const ResourceAllocation& alloc,
                                                    const ChannelSet& cs,
                                                    const Eigen::VectorXd& gamma,
                                                    double sigma2) {
  if (alloc.tau1 <= 0.0)
    throw std::domain_error("ul_constraint_matrices: tau1 must be positive");
  const int k_count = cs.device_count();
  std::vector<TraceConstraint> cons;
  for (int k = 0; k < k_count; ++k) {
    const double c = std::exp2(gamma[k] / alloc.tau1) - 1.0;
    TraceConstraint tc;
    tc.A = alloc.p[k] * cs.Q[k];
    for (int i = k + 1; i < k_count; ++i) tc.A -= c * alloc.p[i] * cs.Q[i];
    tc.beta = c * sigma2;
    cons.push_back(tc);
  }
  return cons;
}

double constraint_violation(const std::vector<TraceConstraint>& constraints,
                            const Eigen::MatrixXcd& V) {
  double worst = -std::numeric_limits<double>::infinity();
  if (constraints.empty()) return 0.0;
  for (const TraceConstraint& tc : constraints) {
    const double scale = std::max(tc.A.norm(), 1e-300);
    worst = std::max(worst, (tc.beta - (tc.A * V).trace().real()) / scale);
  }
  return worst;
}

Eigen::VectorXcd extract_unit_modulus(const Eigen::MatrixXcd& V) {
  const int n = static_cast<int>(V.rows()) - 1;
  Eigen::VectorXcd u = principal_eigenvector(V);
  std::complex<double> anchor = u[n];
  if (std::abs(anchor) < 1e-12) {
    // degenerate last entry: rotate by the largest-magnitude entry instead
    int best = 0;
    for (int i = 1; i <= n; ++i)
      if (std::abs(u[i]) > std::abs(u[best])) best = i;
    anchor = u[best];
  }
  u *= std::conj(anchor) / std::abs(anchor);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i)
    v[i] = std::abs(u[i]) > 0.0 ? u[i] / std::abs(u[i]) : std::complex<double>(1.0, 0.0);
  return v;
}

LiftedPhase lift(const Eigen::VectorXcd& v) {
  const int n = static_cast<int>(v.size());
  Eigen::VectorXcd aug(n + 1);
  aug << v, std::complex<double>(1.0, 0.0);
  LiftedPhase phase;
  phase.V = aug * aug.adjoint();
  phase.v = v;
  phase.rank_gap = 0.0;
  return phase;
}

PsdReport relaxation_solve(const std::vector<TraceConstraint>& constraints,
                           const Eigen::MatrixXcd& start, const PenaltyConfig& pcfg,
                           PsdState* state) {
  const int n1 = static_cast<int>(start.rows());
  const NormalizedConstraints nc = normalize(constraints);
  PsdProgram prog;
  prog.n = n1;
  prog.C = Eigen::MatrixXcd::Zero(n1, n1);
  prog.constraints = nc.cons;
  prog.delta_weight = 1.0;
  prog.delta_min = -10.0 * (1.0 + nc.abs_beta);
  prog.delta_max = nc.max_beta > 0.0 ? pcfg.delta_max_factor * nc.max_beta : 1.0;
  PsdOptions popts = pcfg.solver;
  popts.classify_infeasible = false;
  return solve_psd(prog, start, popts, state);
}

PenaltyResult penalty_solve(const std::vector<TraceConstraint>& constraints,
                            const LiftedPhase& start, const PenaltyConfig& pcfg,
                            PenaltyState* state) {
  PenaltyResult result;
  const int n1 = static_cast<int>(start.V.rows());

  if (constraints.empty()) {  // vacuous: any rank-one matrix works
    result.phase = lift(extract_unit_modulus(start.V));
    result.delta = pcfg.delta_max_factor;  // capped in lieu of unbounded
    result.status = SolveStatus::optimal;
    return result;
  }

  const NormalizedConstraints nc = normalize(constraints);
  const double delta_max =
      nc.max_beta > 0.0 ? pcfg.delta_max_factor * nc.max_beta : 1.0;
  PsdOptions popts = pcfg.solver;
  popts.classify_infeasible = false;
  PenaltyState local_state;
  if (!state) state = &local_state;  // reuse splitting state across the mu loop
  PsdState* psd_state = &state->psd;

  Eigen::MatrixXcd V = start.V;
  double delta = -constraint_violation(constraints, start.V);
  bool ran_feas = false;
  if (delta < pcfg.feas_tol) {
    ran_feas = true;
    // Feasibility pass: maximize the shared margin with no rank penalty.
    PsdProgram feas;
    feas.n = n1;
    feas.C = Eigen::MatrixXcd::Zero(n1, n1);
    feas.constraints = nc.cons;
    feas.delta_weight = 1.0;
    feas.delta_min = -10.0 * (1.0 + nc.abs_beta);
    feas.delta_max = delta_max;
    PsdReport feas_report = solve_psd(feas, start.V, popts, psd_state);
    result.splitting_iterations += feas_report.iterations;
    if (feas_report.status == SolveStatus::optimal && feas_report.delta < -pcfg.feas_tol) {
      result.status = SolveStatus::infeasible;
      result.phase = start;
      result.delta = feas_report.delta;
      return result;
    }
    if (feas_report.X.allFinite()) V = feas_report.X;
    delta = feas_report.delta;
  }
  const Eigen::MatrixXcd V_relax = V;  // relaxation iterate, anchors below
  const double mu0 = pcfg.mu0_scale * std::max(1.0, nc.max_beta);
  const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(n1, n1);

  PsdProgram prog;
  prog.n = n1;
  prog.constraints = nc.cons;
  prog.delta_weight = 1.0;
  prog.delta_min = 0.0;
  prog.delta_max = delta_max;

  // Intermediate penalty steps only steer the iterate; solve them loosely and
  // polish at full tolerance once the rank gap has closed.
  PsdOptions loose = popts;
  loose.tol = std::max(popts.tol, 1e-4);
  loose.max_iterations = std::min(popts.max_iterations, 5000);

  struct Ladder {
    Eigen::MatrixXcd V;
    double delta = 0.0;
    double mu = 0.0;
    bool closed = false;
  };
  auto run_ladder = [&](Eigen::MatrixXcd Vl, double dl, double mu, PsdState* ps) {
    Ladder out;
    bool rank_closed = false;
    double prev_gap = std::numeric_limits<double>::infinity();
    int stalled = 0;
    for (int outer = 0; outer < pcfg.max_outer && !rank_closed; ++outer) {
      ++result.outer_iterations;
      double prev_obj = std::numeric_limits<double>::infinity();
      for (int inner = 0; inner < pcfg.max_inner; ++inner) {
        const Eigen::VectorXcd vmax = principal_eigenvector(Vl);
        prog.C = mu * (identity - vmax * vmax.adjoint());
        const PsdReport report = solve_psd(prog, Vl, loose, ps);
        result.splitting_iterations += report.iterations;
        if (!report.X.allFinite()) break;
        Vl = report.X;
        dl = report.delta;
        const double obj = mu * rank_gap(Vl) - dl;
        if (std::abs(prev_obj - obj) <= 1e-4 * (1.0 + std::abs(obj))) break;
        prev_obj = obj;
      }
      const double gap = rank_gap(Vl);
      if (gap <= pcfg.rank_tol * Vl.trace().real()) {
        rank_closed = true;
      } else {
        // growing mu has stopped shrinking the gap: no rank-one point in reach
        stalled = gap > 0.5 * prev_gap ? stalled + 1 : 0;
        if (stalled >= 2) break;
        prev_gap = gap;
        mu *= pcfg.mu_growth;
      }
    }
    if (rank_closed && loose.tol > popts.tol) {  // polish at full tolerance
      const Eigen::VectorXcd vmax = principal_eigenvector(Vl);
      prog.C = mu * (identity - vmax * vmax.adjoint());
      const PsdReport report = solve_psd(prog, Vl, popts, ps);
      result.splitting_iterations += report.iterations;
      if (report.X.allFinite()) {
        Vl = report.X;
        dl = report.delta;
      }
      rank_closed = rank_gap(Vl) <= pcfg.rank_tol * Vl.trace().real();
    }
    out.V = std::move(Vl);
    out.delta = dl;
    out.mu = mu;
    out.closed = rank_closed;
    return out;
  };

  // resume near the penalty level that previously closed the rank gap
  const double mu_warm = state->mu > mu0 ? state->mu / pcfg.mu_growth : mu0;
  Ladder best = run_ladder(V, delta, mu_warm, psd_state);

  if (ran_feas && pcfg.anchor_randomizations > 0) {
    // The ladder follows the relaxation's principal direction and can settle
    // on a zero-margin rank-one point while better ones exist. Draw rank-one
    // anchors from the relaxation; the best acts as a floor and, when it
    // beats the ladder, re-seeds it from scratch.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (V_relax + V_relax.adjoint()));
    const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    std::mt19937_64 rng(0x51ab5eedULL);  // fixed: anchors must be reproducible
    std::normal_distribution<double> n01(0.0, 1.0);
    double best_margin = -std::numeric_limits<double>::infinity();
    Eigen::VectorXcd best_v;
    for (int r = 0; r < pcfg.anchor_randomizations; ++r) {
      Eigen::VectorXcd g(n1);
      for (int i = 0; i < n1; ++i)
        g[i] = lam[i] * std::complex<double>(n01(rng), n01(rng));
      Eigen::VectorXcd u = eig.eigenvectors() * g;
      std::complex<double> anchor = u[n1 - 1];
      if (std::abs(anchor) < 1e-12) anchor = 1.0;
      u *= std::conj(anchor) / std::abs(anchor);
      Eigen::VectorXcd aug(n1);
      for (int i = 0; i + 1 < n1; ++i)
        aug[i] = std::abs(u[i]) > 0.0 ? u[i] / std::abs(u[i]) : std::complex<double>(1.0, 0.0);
      aug[n1 - 1] = 1.0;
      double margin = std::numeric_limits<double>::infinity();
      for (const PsdConstraint& pc : nc.cons)
        margin = std::min(margin, std::real(aug.dot(pc.A * aug)) - pc.beta);
      if (margin > best_margin) {
        best_margin = margin;
        best_v = aug.head(n1 - 1);
      }
    }
    best_margin = std::min(best_margin, delta_max);
    if (best_margin > -pcfg.feas_tol &&
        (!best.closed || best_margin > best.delta + pcfg.feas_tol)) {
      PsdState fresh;
      const LiftedPhase seed = lift(best_v);
      Ladder retry = run_ladder(seed.V, best_margin, mu0, &fresh);
      if (!retry.closed || retry.delta < best_margin)
        retry = {seed.V, best_margin, mu0, true};  // the anchor itself is rank-one
      if (!best.closed || retry.delta > best.delta) {
        best = std::move(retry);
        *psd_state = std::move(fresh);
      }
    }
  }

  if (best.closed) state->mu = best.mu;
  result.phase.V = best.V;
  result.phase.v = extract_unit_modulus(best.V);
  result.phase.rank_gap = rank_gap(best.V);
  result.delta = best.delta;
  result.status = best.closed ? SolveStatus::optimal : SolveStatus::max_iterations;
  return result;
}

PenaltyResult static_solve(const std::vector<TraceConstraint>& dl,
                           const std::vector<TraceConstraint>& ul,
                           const LiftedPhase& start, const PenaltyConfig& pcfg,
                           PenaltyState* state) {
  std::vector<TraceConstraint> all = dl;
  all.insert(all.end(), ul.begin(), ul.end());
  return penalty_solve(all, start, pcfg, state);
}

}  // namespace wpcn
