#pragma once

#include <Eigen/Dense>
#include <vector>

#include "wpcn/channel.hpp"

namespace wpcn {

/// Time split plus per-device uplink energies f_k = p_k * tau1.
struct ResourceAllocation {
  double tau0 = 0.0;
  double tau1 = 0.0;
  Eigen::VectorXd f;  // J
  Eigen::VectorXd p;  // W
};

/// Decoding order: decreasing |q_d|, ties broken by lower original index.
/// After reorder_devices with this permutation, device k suffers
/// interference only from i > k.
std::vector<int> sic_order(const ChannelSet& cs);

ChannelSet reorder_devices(const ChannelSet& cs, const std::vector<int>& order);

/// |q_d[k] + q_casc[k]^T v1|^2
double uplink_gain(const ChannelSet& cs, int k, const Eigen::VectorXcd& v1);

/// tau1 * log2(1 + G_k p_k / (sum_{i>k} G_i p_i + sigma2)), SIC order applied.
/// Throws ContractViolation when tau1 = 0 with positive power.
double rate_k(int k, const ResourceAllocation& alloc, const ChannelSet& cs,
              const Eigen::VectorXcd& v1, double sigma2);

/// Same rate in the lifted/energy form: gains[i] = Tr(Q_i V1),
/// tau1 * log2(1 + gains[k] f_k / (sum_{i>k} gains[i] f_i + sigma2 tau1)).
double rate_from_energies(int k, const Eigen::VectorXd& f, double tau1,
                          const Eigen::VectorXd& gains, double sigma2);

/// Tr(Q_k V1) for every device (real part; imaginary part is roundoff).
Eigen::VectorXd trace_gains(const ChannelSet& cs, const Eigen::MatrixXcd& V1);

}  // namespace wpcn
