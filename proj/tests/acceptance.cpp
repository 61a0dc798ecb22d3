// Acceptance gate: one line per criterion, nonzero exit on any failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <set>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "wpcn/ao.hpp"
#include "wpcn/beamforming.hpp"
#include "wpcn/channel.hpp"
#include "wpcn/eh.hpp"
#include "wpcn/experiments.hpp"
#include "wpcn/noma.hpp"
#include "wpcn/psd_solver.hpp"
#include "wpcn/resource_alloc.hpp"
#include "wpcn/rng.hpp"

using namespace wpcn;

namespace {

bool approx(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

ChannelSet channels_for(const SystemConfig& cfg, std::uint64_t trial_seed) {
  const Topology topo =
      make_topology(cfg.devices, cfg.irs_elements, cfg.ps_pos, cfg.irs_pos, cfg.ds_pos,
                    cfg.cluster_center, cfg.cluster_radius, derive_seed(trial_seed, 1, 0));
  FadingParams fading = cfg.fading;
  fading.seed = derive_seed(trial_seed, 2, 0);
  return sample_channels(topo, fading);
}

SystemConfig make_cfg(int devices, int n) {
  SystemConfig cfg = default_config();
  cfg.devices = devices;
  cfg.irs_elements = n;
  cfg.gamma.resize(0);
  cfg.eh.clear();
  finalize_config(cfg);
  return cfg;
}

// ---------------------------------------------------------------- criterion 1

bool eh_exactness() {
  const EhParams eh;  // (a, b, M) = (150, 0.014, 0.024)
  if (harvested_power(0.0, eh) != 0.0) return false;
  if (!approx(harvested_power(0.014, eh), 0.010531, 1e-4)) return false;  // quoted rounding
  if (!approx(harvested_power(0.014, eh), 0.010530522860964205, 1e-6)) return false;
  if (std::abs(harvested_power(1.0, eh) - eh.saturation) > 1e-9) return false;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double phi = u(rng) * eh.saturation * (1.0 - 1e-5);
    if (!approx(harvested_power(required_rf_power(phi, eh), eh), phi, 1e-9)) return false;
  }
  return true;
}

// ---------------------------------------------------------------- criterion 2

double bisect_tau0(const ResourceProblem& p) {
  auto feasible = [&](double tau0) {
    const double tau1 = p.t_max - tau0;
    if (tau1 <= 0.0) return false;
    const double f = tau0 * p.eh_powers[0];
    return tau1 * std::log2(1.0 + p.gains[0] * f / (p.sigma2 * tau1)) >= p.gamma[0];
  };
  double first = -1.0;
  for (int i = 1; i <= 8192; ++i) {
    const double t = p.t_max * i / 8192.0;
    if (feasible(t)) {
      first = t;
      break;
    }
  }
  if (first < 0.0) return -1.0;
  double lo = 0.0, hi = first;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

bool resource_oracles() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  ScaOptions tight;  // run out the slow geometric tail for the comparison
  tight.tau0_tol = 1e-10;
  tight.max_rounds = 5000;

  int checked = 0;
  for (int attempt = 0; attempt < 200 && checked < 50; ++attempt) {
    ResourceProblem p;
    p.gains = Eigen::VectorXd::Constant(1, 1e-8 * u(rng));
    p.eh_powers = Eigen::VectorXd::Constant(1, 8e-3 * u(rng));
    p.gamma = Eigen::VectorXd::Constant(1, 0.3 * u(rng));
    p.sigma2 = 1e-12;
    p.t_max = 1.0;
    const double oracle = bisect_tau0(p);
    if (oracle < 0.0) continue;
    const ScaResult res = sca_solve(p, default_sca_start(p), tight);
    if (res.status != SolveStatus::optimal) return false;
    if (!approx(res.alloc.tau0, oracle, 1e-4)) return false;
    ++checked;
  }
  if (checked < 50) return false;

  // Harvest rates and targets sized so the optimum sits well inside (0, t_max)
  // and the grid resolution is meaningful against it.
  const int g = 50;
  int grid_checked = 0;
  for (int inst = 0; inst < 40 && grid_checked < 10; ++inst) {
    ResourceProblem p;
    p.gains = Eigen::VectorXd(2);
    p.gains << 1e-8 * (1.0 + u(rng)), 1e-8 * u(rng);
    p.eh_powers = Eigen::VectorXd(2);
    p.eh_powers << 3e-4 * u(rng), 2e-4 * u(rng);
    p.gamma = Eigen::VectorXd::Constant(2, 0.2 + 0.2 * u(rng));
    p.sigma2 = 1e-12;
    p.t_max = 1.0;

    double grid_best = std::numeric_limits<double>::infinity();
    for (int a = 1; a < g && grid_best == std::numeric_limits<double>::infinity(); ++a) {
      const double tau0 = p.t_max * a / g;
      const double tau1 = p.t_max - tau0;
      Eigen::VectorXd f(2);
      for (int b = 0; b <= g; ++b) {
        f[0] = tau0 * p.eh_powers[0] * b / g;
        for (int c = 0; c <= g; ++c) {
          f[1] = tau0 * p.eh_powers[1] * c / g;
          bool ok = true;
          for (int k = 0; k < 2 && ok; ++k)
            ok = rate_from_energies(k, f, tau1, p.gains, p.sigma2) >= p.gamma[k];
          if (ok) {
            grid_best = tau0;
            break;
          }
        }
        if (grid_best == tau0) break;
      }
    }
    if (grid_best == std::numeric_limits<double>::infinity()) continue;
    const ScaResult res = sca_solve(p, default_sca_start(p), tight);
    if (res.status != SolveStatus::optimal) return false;
    if (std::abs(res.alloc.tau0 - grid_best) > p.t_max / g) return false;
    ++grid_checked;
  }
  return grid_checked >= 10;
}

// ---------------------------------------------------------------- criterion 3

bool beamforming_oracle() {
  for (int inst = 0; inst < 20; ++inst) {
    const SystemConfig cfg = make_cfg(1, 2);
    const ChannelSet cs = channels_for(cfg, 500 + inst);
    TraceConstraint tc;
    tc.A = cs.H[0];
    double grid_abs = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < 360; ++a)
      for (int b = 0; b < 360; ++b) {
        Eigen::VectorXcd v(2);
        v[0] = std::polar(1.0, 2.0 * M_PI * a / 360.0);
        v[1] = std::polar(1.0, 2.0 * M_PI * b / 360.0);
        grid_abs = std::max(grid_abs, (tc.A * lift(v).V).trace().real());
      }
    tc.beta = 0.95 * grid_abs;
    const PenaltyResult res = penalty_solve({tc}, lift(Eigen::VectorXcd::Ones(2)));
    if (res.status != SolveStatus::optimal) return false;
    const double achieved = (tc.A * lift(res.phase.v).V).trace().real();
    if (achieved < 0.99 * grid_abs) return false;
  }
  return true;
}

// ---------------------------------------------------------------- criterion 4

bool rank_one_closure() {
  const int n_values[4] = {4, 8, 12, 16};
  int checked = 0;
  for (int attempt = 0; attempt < 150 && checked < 50; ++attempt) {
    const SystemConfig cfg = make_cfg(2, n_values[attempt % 4]);
    const ChannelSet cs = channels_for(cfg, 700 + attempt);
    const AoResult res = ao_optimize(cs, cfg, Scheme::ao_dynamic, 700 + attempt);
    if (res.status != SolveStatus::optimal) continue;
    const double tr0 = res.phases.V0.trace().real();
    const double tr1 = res.phases.V1.trace().real();
    if (rank_gap(res.phases.V0) > 1e-6 * tr0) return false;
    if (rank_gap(res.phases.V1) > 1e-6 * tr1) return false;
    // the returned allocation is expressed in decoding order
    const ChannelSet ordered = reorder_devices(cs, sic_order(cs));
    if (check_solution(ordered, cfg, res.alloc, res.phases) > 1e-6) return false;
    ++checked;
  }
  return checked >= 50;
}

// ---------------------------------------------------------------- criterion 5

bool ao_monotonicity() {
  const SystemConfig cfg = make_cfg(3, 12);
  for (int inst = 0; inst < 100; ++inst) {
    const ChannelSet cs = channels_for(cfg, 900 + inst);
    const AoResult res = ao_optimize(cs, cfg, Scheme::ao_dynamic, 900 + inst);
    const auto& iters = res.trace.iterations;
    if (iters.size() > 30) return false;
    for (std::size_t i = 1; i < iters.size(); ++i)
      if (iters[i].tau0 > iters[i - 1].tau0 + 1e-9) return false;
    if (res.status == SolveStatus::optimal && res.trace.final_violation > 1e-6) return false;
  }
  return true;
}

// ------------------------------------------------------------- criteria 6/7/8

std::map<std::pair<std::string, std::string>, std::vector<double>> index_rows(const Table& t) {
  std::map<std::pair<std::string, std::string>, std::vector<double>> out;
  for (const auto& row : t.rows) {
    std::vector<double> vals;
    for (std::size_t i = 2; i < row.size(); ++i) vals.push_back(std::stod(row[i]));
    out[{row[0], row[1]}] = vals;
  }
  return out;
}

bool scheme_ordering() {
  const SystemConfig cfg = default_config();  // 20 trials
  const Table t = run_sweep_n(cfg, {4, 8, 12, 16},
                              {Scheme::no_irs, Scheme::fixed_phase, Scheme::ao_static,
                               Scheme::ao_dynamic, Scheme::gr_dynamic, Scheme::eta_dynamic});
  const auto rows = index_rows(t);
  auto mean = [&](const char* scheme, int n) {
    return rows.at({scheme, std::to_string(n)})[0];
  };
  double prev_ao = std::numeric_limits<double>::infinity();
  for (int n : {4, 8, 12, 16}) {
    const double ao = mean("ao-dynamic", n);
    if (!(mean("no-irs", n) >= mean("fixed-phase", n))) return false;
    if (!(mean("fixed-phase", n) >= mean("ao-static", n))) return false;
    if (!(mean("ao-static", n) >= ao)) return false;
    if (!(mean("gr-dynamic", n) >= ao)) return false;
    if (!(mean("eta-dynamic", n) >= ao)) return false;
    if (!(ao < prev_ao)) return false;  // strictly decreasing in n
    prev_ao = ao;
  }
  return true;
}

bool power_sweep_trends() {
  // Rate target and harvester curve matched to the link budget of this
  // geometry so the lowest power level still has feasible trials: the sigmoid
  // mid-point sits at the ~10 uW received power of the 30 dBm point and the
  // top level drives the harvesters toward saturation.
  SystemConfig cfg = default_config();
  cfg.gamma.setConstant(0.02);
  for (EhParams& e : cfg.eh) {
    e.a = 2e5;
    e.b = 1e-5;
    e.saturation = 2.4e-5;
  }
  const Table t = run_sweep_pe(cfg, {30.0, 35.0, 40.0}, {Scheme::ao_dynamic});
  if (t.rows.size() != 3) return false;
  double prev_tau0 = std::numeric_limits<double>::infinity();
  double prev_energy = 0.0;
  for (const auto& row : t.rows) {
    const double tau0 = std::stod(row[2]);
    const double energy = std::stod(row[4]);
    if (!(tau0 < prev_tau0)) return false;
    if (!(energy > prev_energy)) return false;
    prev_tau0 = tau0;
    prev_energy = energy;
  }
  return true;
}

bool csi_trends() {
  const SystemConfig cfg = default_config();
  const Table t = run_csi_study(cfg, {0.0, 0.01, 0.05, 0.1}, {8, 16});
  // degradation = worst-case shortfall of the true rate below its target,
  // i.e. minus the mean rate margin, indexed by (epsilon, n)
  std::map<std::pair<std::string, std::string>, double> deg;
  for (const auto& row : t.rows) deg[{row[1], row[2]}] = -std::stod(row[3]);
  const char* eps_keys[4] = {"0", "0.01", "0.05", "0.1"};
  for (const std::string n : {"8", "16"}) {
    double prev = -std::numeric_limits<double>::infinity();
    for (const char* e : eps_keys) {
      const double v = deg.at({e, n});
      if (v < prev - 1e-9) return false;  // degradation non-decreasing in epsilon
      prev = v;
    }
  }
  for (const char* e : {"0.01", "0.05", "0.1"})  // larger surface absorbs the error
    if (!(deg.at({e, "16"}) <= deg.at({e, "8"}) + 1e-9)) return false;
  return true;
}

// ---------------------------------------------------------------- criterion 9

bool property_suites() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // SCA bound validity, tangency, gradients
  const int k_count = 3;
  Eigen::VectorXd gos(k_count);
  for (int i = 0; i < k_count; ++i) gos[i] = 1e4 * u(rng);
  DcPoint pt;
  pt.f_hat = Eigen::VectorXd::Constant(k_count, 2e-3);
  pt.tau1_hat = 0.5;
  for (int k = 0; k < k_count; ++k) {
    const AffineBound bound = taylor_upper_bound(k, pt, gos);
    const double g0 = dc_terms(k, pt.f_hat, pt.tau1_hat, gos).second;
    if (!approx(bound.eval(pt.f_hat, pt.tau1_hat), g0, 1e-12)) return false;
    for (int rep = 0; rep < 1000; ++rep) {
      Eigen::VectorXd f(k_count);
      for (int i = 0; i < k_count; ++i) f[i] = 1e-2 * u(rng);
      const double tau1 = u(rng);
      const double g = dc_terms(k, f, tau1, gos).second;
      if (bound.eval(f, tau1) < g - 1e-10 * std::max(1.0, std::abs(g))) return false;
    }
    const double eps_t = 1e-6 * pt.tau1_hat;
    const double dt = (dc_terms(k, pt.f_hat, pt.tau1_hat + eps_t, gos).second -
                       dc_terms(k, pt.f_hat, pt.tau1_hat - eps_t, gos).second) /
                      (2.0 * eps_t);
    if (!approx(bound.grad_tau1, dt, 1e-6)) return false;
    for (int j = k + 1; j < k_count; ++j) {
      Eigen::VectorXd fp = pt.f_hat, fm = pt.f_hat;
      const double eps_f = 1e-6 * pt.f_hat[j];
      fp[j] += eps_f;
      fm[j] -= eps_f;
      const double df = (dc_terms(k, fp, pt.tau1_hat, gos).second -
                         dc_terms(k, fm, pt.tau1_hat, gos).second) /
                        (2.0 * eps_f);
      if (!approx(bound.grad_f[j], df, 1e-6)) return false;
    }
  }

  // lifting identity
  for (int rep = 0; rep < 20; ++rep) {
    const SystemConfig cfg = make_cfg(2, 5);
    const ChannelSet cs = channels_for(cfg, 1100 + rep);
    Eigen::VectorXcd v(5);
    for (int i = 0; i < 5; ++i) v[i] = std::polar(1.0, ph(rng));
    const Eigen::MatrixXcd V = lift(v).V;
    for (int k = 0; k < 2; ++k) {
      if (!approx((cs.H[k] * V).trace().real(), std::norm(downlink_amplitude(cs, k, v)), 1e-10))
        return false;
      if (!approx((cs.Q[k] * V).trace().real(), std::norm(uplink_amplitude(cs, k, v)), 1e-10))
        return false;
    }
  }

  // NOMA telescoping
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd gains(3), f(3);
    for (int i = 0; i < 3; ++i) {
      gains[i] = 1e-8 * u(rng);
      f[i] = 2e-3 * u(rng);
    }
    const double tau1 = u(rng);
    const double sigma2 = 1e-12;
    double sum = 0.0;
    for (int k = 0; k < 3; ++k) sum += rate_from_energies(k, f, tau1, gains, sigma2);
    if (!approx(sum, tau1 * std::log2(1.0 + gains.dot(f) / (sigma2 * tau1)), 1e-10))
      return false;
  }

  // PSD projection idempotence
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::MatrixXcd M(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) M(i, j) = std::complex<double>(gauss(rng), gauss(rng));
    M = 0.5 * (M + M.adjoint()).eval();
    const Eigen::MatrixXcd P = project_psd(M);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(P);
    if (eig.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, P.norm())) return false;
    if ((project_psd(P) - P).norm() > 1e-10 * std::max(1.0, P.norm())) return false;
  }
  return true;
}

}  // namespace

// Runs every criterion by default; pass indices to run a subset (handy when
// iterating on one of the slow Monte Carlo criteria).
int main(int argc, char** argv) {
  struct Criterion {
    int index;
    const char* name;
    bool (*fn)();
  };
  const Criterion criteria[] = {
      {1, "EH model exactness", eh_exactness},
      {2, "resource allocation matches bisection and grid oracles", resource_oracles},
      {3, "beamforming matches the exhaustive phase grid", beamforming_oracle},
      {4, "rank-one closure and extracted-vector feasibility", rank_one_closure},
      {5, "AO monotone convergence and from-scratch re-check", ao_monotonicity},
      {6, "scheme ordering and decreasing tau0 in N", scheme_ordering},
      {7, "power sweep trends", power_sweep_trends},
      {8, "imperfect-CSI degradation trends", csi_trends},
      {9, "property suites", property_suites},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.index)) continue;
    bool ok = false;
    try {
      ok = c.fn();
    } catch (const std::exception& e) {
      std::printf("criterion %d: exception: %s\n", c.index, e.what());
      ok = false;
    }
    std::printf("criterion %d: %s - %s\n", c.index, ok ? "PASS" : "FAIL", c.name);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
