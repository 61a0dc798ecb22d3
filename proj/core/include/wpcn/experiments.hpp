#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wpcn/ao.hpp"
#include "wpcn/config.hpp"
#include "wpcn/rng.hpp"

namespace wpcn {

/// Generic string table; the CSV layer is bit-reproducible for fixed inputs.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  bool operator==(const Table&) const = default;
};

/// Per-entry additive Gaussian error scaled by the link-class average power.
struct CsiErrorModel {
  double epsilon = 0.0;
};

/// Fig.-2(a)-style sweep: mean tau0 per (N, scheme) over paired-seed trials.
Table run_sweep_n(const SystemConfig& cfg, const std::vector<int>& n_values,
                  const std::vector<Scheme>& schemes, const AoOptions& opts = {});

/// Fig.-2(b)/(c)-style sweep: tau0 and tau0*P_E per (P_E, scheme).
Table run_sweep_pe(const SystemConfig& cfg, const std::vector<double>& pe_dbm_values,
                   const std::vector<Scheme>& schemes, const AoOptions& opts = {});

/// Imperfect-CSI study: optimize on perturbed channels, evaluate on the true
/// ones. Two degradation metrics per (epsilon, N): the achieved minimum rate
/// margin and the tau0 inflation needed to restore feasibility.
Table run_csi_study(const SystemConfig& cfg, const std::vector<double>& epsilons,
                    const std::vector<int>& n_values, const AoOptions& opts = {});

/// Perturb every channel entry by zero-mean circular Gaussian noise with
/// variance epsilon^2 times the link-class average power.
ChannelSet perturb_channels(const ChannelSet& cs, double epsilon, std::uint64_t seed);

void emit_csv(const Table& table, std::ostream& os);
void emit_csv_file(const Table& table, const std::string& path);
Table parse_csv(std::istream& is);

}  // namespace wpcn
