// Command-line front end: sweeps over the IRS size and the transmit power,
// an imperfect-CSI study, and a single-instance run with a full trace dump.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wpcn/experiments.hpp"
#include "wpcn/units.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int trials = 0;
  std::vector<std::string> schemes;
  bool verbose = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "configuration file (key = value lines)");
  cmd->add_option("--out", args.out_path, "output CSV path (default: stdout)");
  cmd->add_option("--seed", args.seed, "base RNG seed")->each([&](const std::string&) {
    args.seed_set = true;
  });
  cmd->add_option("--trials", args.trials, "Monte Carlo trials per sweep point");
  cmd->add_option("--schemes", args.schemes, "comma-separated scheme list")->delimiter(',');
  cmd->add_flag("--verbose", args.verbose, "per-iteration progress on stderr");
}

wpcn::SystemConfig make_config(const CommonArgs& args) {
  wpcn::SystemConfig cfg =
      args.config_path.empty() ? wpcn::default_config() : wpcn::load_config(args.config_path);
  if (args.seed_set) cfg.base_seed = args.seed;
  if (args.trials > 0) cfg.trials = args.trials;
  return cfg;
}

std::vector<wpcn::Scheme> parse_schemes(const CommonArgs& args,
                                        std::vector<wpcn::Scheme> fallback) {
  if (args.schemes.empty()) return fallback;
  std::vector<wpcn::Scheme> out;
  for (const std::string& name : args.schemes) out.push_back(wpcn::scheme_from_name(name));
  return out;
}

int write_table(const wpcn::Table& table, const CommonArgs& args) {
  if (args.out_path.empty())
    wpcn::emit_csv(table, std::cout);
  else
    wpcn::emit_csv_file(table, args.out_path);
  // Nonzero exit when no sweep point produced a single feasible trial.
  const std::size_t infeasible_col = table.header.size() - 3;  // ..., infeasible_count, trials, seed
  bool any_feasible = table.rows.empty();
  for (const auto& row : table.rows)
    if (std::stoi(row[infeasible_col]) < std::stoi(row[infeasible_col + 1])) any_feasible = true;
  if (!any_feasible) {
    std::cerr << "all trials infeasible\n";
    return 2;
  }
  return 0;
}

int run_single(const CommonArgs& args, const std::string& scheme_name) {
  wpcn::SystemConfig cfg = make_config(args);
  const wpcn::Scheme scheme = wpcn::scheme_from_name(scheme_name);
  const wpcn::Topology topo = wpcn::make_topology(
      cfg.devices, cfg.irs_elements, cfg.ps_pos, cfg.irs_pos, cfg.ds_pos, cfg.cluster_center,
      cfg.cluster_radius, wpcn::derive_seed(cfg.base_seed, 0x10, 0));
  wpcn::FadingParams fading = cfg.fading;
  fading.seed = wpcn::derive_seed(cfg.base_seed, 0x11, 0);
  const wpcn::ChannelSet cs = wpcn::sample_channels(topo, fading);

  wpcn::AoOptions opts;
  opts.verbose = args.verbose;
  const wpcn::AoResult res =
      wpcn::ao_optimize(cs, cfg, scheme, wpcn::derive_seed(cfg.base_seed, 0x12, 0), opts);

  std::ostringstream os;
  os.precision(12);
  os << "scheme " << wpcn::scheme_name(scheme) << '\n'
     << "status " << wpcn::to_string(res.status) << '\n'
     << "tau0 " << res.alloc.tau0 << '\n'
     << "tau1 " << res.alloc.tau1 << '\n'
     << "energy " << res.energy << '\n'
     << "rounds " << res.trace.iterations.size() << '\n'
     << "resource_calls " << res.trace.resource_calls << '\n'
     << "beamforming_calls " << res.trace.beamforming_calls << '\n'
     << "phase_restarts " << res.trace.phase_restarts << '\n'
     << "final_violation " << res.trace.final_violation << '\n';
  for (std::size_t i = 0; i < res.trace.iterations.size(); ++i) {
    const wpcn::AoIterationRecord& it = res.trace.iterations[i];
    os << "iter " << i << " tau0 " << it.tau0 << " tau1 " << it.tau1 << " delta_dl "
       << it.delta_dl << " delta_ul " << it.delta_ul << " rank_gap_dl " << it.rank_gap_dl
       << " rank_gap_ul " << it.rank_gap_ul << " adopted " << it.phases_adopted << " wall_ms "
       << it.wall_ms << '\n';
  }
  os << "channels\n";
  wpcn::dump_channels(cs, os);

  if (args.out_path.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream out(args.out_path);
    if (!out) throw std::runtime_error("cannot open output file '" + args.out_path + "'");
    out << os.str();
  }
  return res.status == wpcn::SolveStatus::infeasible ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IRS-aided WPCN energy-transfer minimization experiments"};
  app.require_subcommand(1);

  CommonArgs sweep_n_args, sweep_pe_args, csi_args, single_args;
  std::vector<int> n_values{4, 8, 12, 16};
  std::vector<double> pe_dbm{30.0, 35.0, 40.0};
  std::vector<double> epsilons{0.0, 0.01, 0.05, 0.1};
  std::vector<int> csi_n{8, 16};
  std::string single_scheme = "ao-dynamic";

  CLI::App* sweep_n = app.add_subcommand("sweep-n", "mean tau0 versus IRS element count");
  add_common(sweep_n, sweep_n_args);
  sweep_n->add_option("--n-values", n_values, "IRS sizes to sweep")->delimiter(',');

  CLI::App* sweep_pe = app.add_subcommand("sweep-pe", "tau0 and energy versus transmit power");
  add_common(sweep_pe, sweep_pe_args);
  sweep_pe->add_option("--pe-dbm", pe_dbm, "transmit powers to sweep, dBm")->delimiter(',');

  CLI::App* csi = app.add_subcommand("csi", "degradation under imperfect CSI");
  add_common(csi, csi_args);
  csi->add_option("--epsilons", epsilons, "relative channel-error levels")->delimiter(',');
  csi->add_option("--n-values", csi_n, "IRS sizes")->delimiter(',');

  CLI::App* single = app.add_subcommand("single", "one instance with a full trace dump");
  add_common(single, single_args);
  single->add_option("--scheme", single_scheme, "scheme to run");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep_n->parsed()) {
      const wpcn::SystemConfig cfg = make_config(sweep_n_args);
      const auto schemes = parse_schemes(
          sweep_n_args, {wpcn::Scheme::ao_dynamic, wpcn::Scheme::ao_static,
                         wpcn::Scheme::fixed_phase, wpcn::Scheme::no_irs});
      wpcn::AoOptions opts;
      opts.verbose = sweep_n_args.verbose;
      return write_table(wpcn::run_sweep_n(cfg, n_values, schemes, opts), sweep_n_args);
    }
    if (sweep_pe->parsed()) {
      const wpcn::SystemConfig cfg = make_config(sweep_pe_args);
      const auto schemes = parse_schemes(sweep_pe_args, {wpcn::Scheme::ao_dynamic});
      wpcn::AoOptions opts;
      opts.verbose = sweep_pe_args.verbose;
      return write_table(wpcn::run_sweep_pe(cfg, pe_dbm, schemes, opts), sweep_pe_args);
    }
    if (csi->parsed()) {
      const wpcn::SystemConfig cfg = make_config(csi_args);
      wpcn::AoOptions opts;
      opts.verbose = csi_args.verbose;
      return write_table(wpcn::run_csi_study(cfg, epsilons, csi_n, opts), csi_args);
    }
    return run_single(single_args, single_scheme);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
