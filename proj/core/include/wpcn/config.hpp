#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "wpcn/channel.hpp"
#include "wpcn/eh.hpp"

namespace wpcn {

/// All scalar system parameters. Powers are carried in watts internally;
/// dBm conversion happens exactly once at config ingestion.
struct SystemConfig {
  int devices = 3;        // K
  int irs_elements = 12;  // N (desk-scale default)
  double pe = 10.0;       // W   (40 dBm)
  double sigma2 = 1e-12;  // W   (-90 dBm)
  double t_max = 1.0;     // s
  Eigen::VectorXd gamma;  // bits/Hz, per device
  std::vector<EhParams> eh;

  Eigen::Vector3d ps_pos{-5.0, 0.0, 0.0};
  Eigen::Vector3d irs_pos{0.0, 0.0, 1.0};
  Eigen::Vector3d ds_pos{45.0, 0.0, 0.0};
  Eigen::Vector3d cluster_center{0.0, 0.0, 0.0};
  double cluster_radius = 1.0;

  FadingParams fading;

  int trials = 20;
  std::uint64_t base_seed = 1;
};

/// Paper-style defaults (K = 3, 0.1 bits/Hz targets, logistic EH constants)
/// with sized gamma/eh vectors.
SystemConfig default_config();

/// Make gamma/eh consistent with `devices` (broadcast scalars).
void finalize_config(SystemConfig& cfg);

/// key = value text file; '#' comments; unknown keys are errors.
SystemConfig load_config(const std::string& path);
SystemConfig parse_config(const std::string& text);

}  // namespace wpcn
