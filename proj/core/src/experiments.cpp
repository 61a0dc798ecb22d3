#include "wpcn/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "wpcn/resource_alloc.hpp"
#include "wpcn/units.hpp"

namespace wpcn {

namespace {

// Seed stream tags: topology, channels, AO phase inits, CSI noise.
constexpr std::uint64_t kTopoStream = 0x10;
constexpr std::uint64_t kChanStream = 0x11;
constexpr std::uint64_t kPhaseStream = 0x12;
constexpr std::uint64_t kCsiStream = 0x13;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct TrialOutcome {
  double a = 0.0, b = 0.0;
  bool feasible = false;
};

struct Stats {
  double mean_a = 0.0, se_a = 0.0, mean_b = 0.0, se_b = 0.0;
  int infeasible = 0;
};

Stats reduce(const std::vector<TrialOutcome>& outcomes) {
  Stats s;
  std::vector<double> as, bs;
  for (const TrialOutcome& o : outcomes) {
    if (!o.feasible) {
      ++s.infeasible;
      continue;
    }
    as.push_back(o.a);
    bs.push_back(o.b);
  }
  auto mean_se = [](const std::vector<double>& x, double& mean, double& se) {
    if (x.empty()) return;
    mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    if (x.size() < 2) return;
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(x.size() - 1);
    se = std::sqrt(var / static_cast<double>(x.size()));
  };
  mean_se(as, s.mean_a, s.se_a);
  mean_se(bs, s.mean_b, s.se_b);
  return s;
}

// Deterministic fan-out: results land by trial index regardless of which
// worker finishes first.
template <typename Fn>
std::vector<TrialOutcome> run_trials(int trials, Fn fn) {
  std::vector<TrialOutcome> out(trials);
  const int workers =
      std::max(1, std::min<int>(trials, static_cast<int>(std::thread::hardware_concurrency())));
  if (workers == 1) {
    for (int t = 0; t < trials; ++t) out[t] = fn(t);
    return out;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) out[t] = fn(t);
    });
  for (std::thread& th : pool) th.join();
  return out;
}

ChannelSet trial_channels(const SystemConfig& cfg, int n, int trial) {
  const Topology topo =
      make_topology(cfg.devices, n, cfg.ps_pos, cfg.irs_pos, cfg.ds_pos, cfg.cluster_center,
                    cfg.cluster_radius, derive_seed(cfg.base_seed, kTopoStream, trial));
  FadingParams fading = cfg.fading;
  fading.seed = derive_seed(cfg.base_seed, kChanStream, trial);
  return sample_channels(topo, fading);
}

AoResult run_scheme(const ChannelSet& cs, const SystemConfig& cfg, Scheme scheme, int trial,
                    const AoOptions& opts) {
  const std::uint64_t seed = derive_seed(cfg.base_seed, kPhaseStream, trial);
  return ao_optimize(cs, cfg, scheme, seed, opts);
}

void perturb_vector(Eigen::VectorXcd& v, double pl, double epsilon, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  const double sd = epsilon * std::sqrt(pl / 2.0);
  for (int i = 0; i < v.size(); ++i)
    v[i] += std::complex<double>(sd * n01(rng), sd * n01(rng));
}

}  // namespace

Table run_sweep_n(const SystemConfig& cfg, const std::vector<int>& n_values,
                  const std::vector<Scheme>& schemes, const AoOptions& opts) {
  if (n_values.empty()) throw std::invalid_argument("run_sweep_n: empty n_values");
  Table table;
  table.header = {"scheme", "n", "mean_tau0", "stderr_tau0", "infeasible_count", "trials", "seed"};
  for (int n : n_values) {
    SystemConfig point = cfg;
    point.irs_elements = n;
    for (Scheme scheme : schemes) {
      const std::vector<TrialOutcome> outcomes = run_trials(cfg.trials, [&](int trial) {
        const AoResult res = run_scheme(trial_channels(point, n, trial), point, scheme, trial, opts);
        return TrialOutcome{res.alloc.tau0, res.energy, res.status != SolveStatus::infeasible};
      });
      const Stats s = reduce(outcomes);
      table.rows.push_back({scheme_name(scheme), std::to_string(n), fmt(s.mean_a), fmt(s.se_a),
                            std::to_string(s.infeasible), std::to_string(cfg.trials),
                            std::to_string(cfg.base_seed)});
    }
  }
  return table;
}

Table run_sweep_pe(const SystemConfig& cfg, const std::vector<double>& pe_dbm_values,
                   const std::vector<Scheme>& schemes, const AoOptions& opts) {
  if (pe_dbm_values.empty()) throw std::invalid_argument("run_sweep_pe: empty pe values");
  Table table;
  table.header = {"scheme", "pe_dbm", "mean_tau0", "stderr_tau0", "mean_energy",
                  "stderr_energy", "infeasible_count", "trials", "seed"};
  for (double pe_dbm : pe_dbm_values) {
    SystemConfig point = cfg;
    point.pe = dbm_to_watts(pe_dbm);
    for (Scheme scheme : schemes) {
      const std::vector<TrialOutcome> outcomes = run_trials(cfg.trials, [&](int trial) {
        const AoResult res = run_scheme(trial_channels(point, point.irs_elements, trial), point,
                                        scheme, trial, opts);
        return TrialOutcome{res.alloc.tau0, res.energy, res.status != SolveStatus::infeasible};
      });
      const Stats s = reduce(outcomes);
      table.rows.push_back({scheme_name(scheme), fmt(pe_dbm), fmt(s.mean_a), fmt(s.se_a),
                            fmt(s.mean_b), fmt(s.se_b), std::to_string(s.infeasible),
                            std::to_string(cfg.trials), std::to_string(cfg.base_seed)});
    }
  }
  return table;
}

ChannelSet perturb_channels(const ChannelSet& cs, double epsilon, std::uint64_t seed) {
  if (epsilon < 0.0) throw std::invalid_argument("perturb_channels: negative epsilon");
  ChannelSet out = cs;
  std::mt19937_64 rng(seed);
  perturb_vector(out.g_e, cs.pl_g_e, epsilon, rng);
  perturb_vector(out.g_i, cs.pl_g_i, epsilon, rng);
  for (int k = 0; k < cs.device_count(); ++k) {
    perturb_vector(out.h_r[k], cs.pl_h_r[k], epsilon, rng);
    perturb_vector(out.q_r[k], cs.pl_q_r[k], epsilon, rng);
    Eigen::VectorXcd hd = out.h_d.segment(k, 1), qd = out.q_d.segment(k, 1);
    perturb_vector(hd, cs.pl_h_d[k], epsilon, rng);
    perturb_vector(qd, cs.pl_q_d[k], epsilon, rng);
    out.h_d[k] = hd[0];
    out.q_d[k] = qd[0];
  }
  cascade(out);
  return out;
}

Table run_csi_study(const SystemConfig& cfg, const std::vector<double>& epsilons,
                    const std::vector<int>& n_values, const AoOptions& opts) {
  if (epsilons.empty()) throw std::invalid_argument("run_csi_study: empty epsilons");
  Table table;
  table.header = {"scheme",        "epsilon",          "n",
                  "mean_rate_margin", "stderr_rate_margin", "mean_tau0_inflation",
                  "stderr_tau0_inflation", "infeasible_count", "trials", "seed"};
  for (int n : n_values) {
    SystemConfig point = cfg;
    point.irs_elements = n;
    for (double eps : epsilons) {
      const std::vector<TrialOutcome> outcomes = run_trials(cfg.trials, [&](int trial) {
        ChannelSet truth = trial_channels(point, n, trial);
        const ChannelSet perturbed =
            perturb_channels(truth, eps, derive_seed(cfg.base_seed, kCsiStream, trial));
        // Pre-sort both sets by the perturbed SIC order: the optimizer's
        // internal reorder is then the identity and its allocation stays
        // aligned with the true channels. Decoding follows the estimated
        // order, as the DS would under imperfect CSI.
        const std::vector<int> order = sic_order(perturbed);
        truth = reorder_devices(truth, order);
        const AoResult res =
            run_scheme(reorder_devices(perturbed, order), point, Scheme::ao_dynamic, trial, opts);
        if (res.status == SolveStatus::infeasible) return TrialOutcome{};

        double margin = std::numeric_limits<double>::infinity();
        for (int k = 0; k < truth.device_count(); ++k)
          margin = std::min(margin,
                            rate_k(k, res.alloc, truth, res.phases.v1, point.sigma2) - point.gamma[k]);

        // tau0 needed on the true channels at the same phases
        ResourceProblem rp;
        rp.gains.resize(truth.device_count());
        for (int k = 0; k < truth.device_count(); ++k)
          rp.gains[k] = uplink_gain(truth, k, res.phases.v1);
        rp.eh_powers.resize(truth.device_count());
        for (int k = 0; k < truth.device_count(); ++k) {
          const double p_rf =
              received_rf_power(point.pe, truth.h_d[k], truth.h_casc[k], res.phases.v0);
          rp.eh_powers[k] = harvested_power(p_rf, point.eh[k]);
        }
        rp.gamma = point.gamma;
        rp.sigma2 = point.sigma2;
        rp.t_max = point.t_max;
        // Warm-start from the achieved allocation: with exact estimates the
        // re-solve then reproduces tau0 instead of wandering off a cold start.
        const DcPoint warm{res.alloc.f, std::max(res.alloc.tau1, 1e-9)};
        ScaResult truth_alloc = sca_solve(rp, warm, {});
        if (truth_alloc.status == SolveStatus::infeasible)
          truth_alloc = sca_solve(rp, default_sca_start(rp), {});
        if (truth_alloc.status == SolveStatus::infeasible) return TrialOutcome{};
        const double inflation =
            res.alloc.tau0 > 0.0 ? truth_alloc.alloc.tau0 / res.alloc.tau0 - 1.0 : 0.0;
        return TrialOutcome{margin, std::max(inflation, 0.0), true};
      });
      const Stats s = reduce(outcomes);
      table.rows.push_back({"ao-dynamic", fmt(eps), std::to_string(n), fmt(s.mean_a), fmt(s.se_a),
                            fmt(s.mean_b), fmt(s.se_b), std::to_string(s.infeasible),
                            std::to_string(cfg.trials), std::to_string(cfg.base_seed)});
    }
  }
  return table;
}

void emit_csv(const Table& table, std::ostream& os) {
  auto emit_row = [&os](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << row[i];
    }
    os << '\n';
  };
  emit_row(table.header);
  for (const auto& row : table.rows) emit_row(row);
}

void emit_csv_file(const Table& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  emit_csv(table, out);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

Table parse_csv(std::istream& is) {
  Table table;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    if (first) {
      table.header = fields;
      first = false;
    } else {
      table.rows.push_back(fields);
    }
  }
  return table;
}

}  // namespace wpcn
