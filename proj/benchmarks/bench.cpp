#include <benchmark/benchmark.h>

#include "wpcn/ao.hpp"
#include "wpcn/beamforming.hpp"
#include "wpcn/experiments.hpp"
#include "wpcn/resource_alloc.hpp"

namespace {

wpcn::SystemConfig bench_config(int n) {
  wpcn::SystemConfig cfg = wpcn::default_config();
  cfg.irs_elements = n;
  return cfg;
}

wpcn::ChannelSet bench_channels(const wpcn::SystemConfig& cfg) {
  const wpcn::Topology topo = wpcn::make_topology(
      cfg.devices, cfg.irs_elements, cfg.ps_pos, cfg.irs_pos, cfg.ds_pos, cfg.cluster_center,
      cfg.cluster_radius, 7);
  wpcn::FadingParams fading = cfg.fading;
  fading.seed = 7;
  return wpcn::sample_channels(topo, fading);
}

void BM_SampleChannels(benchmark::State& state) {
  const wpcn::SystemConfig cfg = bench_config(static_cast<int>(state.range(0)));
  const wpcn::Topology topo = wpcn::make_topology(
      cfg.devices, cfg.irs_elements, cfg.ps_pos, cfg.irs_pos, cfg.ds_pos, cfg.cluster_center,
      cfg.cluster_radius, 7);
  wpcn::FadingParams fading = cfg.fading;
  fading.seed = 7;
  for (auto _ : state) benchmark::DoNotOptimize(wpcn::sample_channels(topo, fading));
}
BENCHMARK(BM_SampleChannels)->Arg(16)->Arg(64);

void BM_ScaSolve(benchmark::State& state) {
  const wpcn::SystemConfig cfg = bench_config(12);
  wpcn::ChannelSet cs = bench_channels(cfg);
  cs = wpcn::reorder_devices(cs, wpcn::sic_order(cs));
  const Eigen::VectorXcd v1 = Eigen::VectorXcd::Ones(cfg.irs_elements);
  wpcn::ResourceProblem rp;
  rp.gains.resize(cfg.devices);
  rp.eh_powers.resize(cfg.devices);
  for (int k = 0; k < cfg.devices; ++k) {
    rp.gains[k] = wpcn::uplink_gain(cs, k, v1);
    const double p_rf = wpcn::received_rf_power(cfg.pe, cs.h_d[k], cs.h_casc[k], v1);
    rp.eh_powers[k] = wpcn::harvested_power(p_rf, cfg.eh[k]);
  }
  rp.gamma = cfg.gamma;
  rp.sigma2 = cfg.sigma2;
  rp.t_max = cfg.t_max;
  for (auto _ : state)
    benchmark::DoNotOptimize(wpcn::sca_solve(rp, wpcn::default_sca_start(rp), {}));
}
BENCHMARK(BM_ScaSolve);

void BM_PenaltySolve(benchmark::State& state) {
  const wpcn::SystemConfig cfg = bench_config(static_cast<int>(state.range(0)));
  wpcn::ChannelSet cs = bench_channels(cfg);
  cs = wpcn::reorder_devices(cs, wpcn::sic_order(cs));
  wpcn::ResourceAllocation alloc;
  alloc.tau0 = 0.5;
  alloc.tau1 = 0.5;
  alloc.p = Eigen::VectorXd::Constant(cfg.devices, 1e-3);
  alloc.f = alloc.p * alloc.tau1;
  const auto cons = wpcn::ul_constraint_matrices(alloc, cs, cfg.gamma, cfg.sigma2);
  const wpcn::LiftedPhase start = wpcn::lift(Eigen::VectorXcd::Ones(cfg.irs_elements));
  for (auto _ : state) benchmark::DoNotOptimize(wpcn::penalty_solve(cons, start, {}));
}
BENCHMARK(BM_PenaltySolve)->Arg(8)->Arg(16);

void BM_AoDynamic(benchmark::State& state) {
  const wpcn::SystemConfig cfg = bench_config(12);
  const wpcn::ChannelSet cs = bench_channels(cfg);
  for (auto _ : state)
    benchmark::DoNotOptimize(wpcn::ao_optimize(cs, cfg, wpcn::Scheme::ao_dynamic, 7));
}
BENCHMARK(BM_AoDynamic)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
