#include "wpcn/noma.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wpcn/errors.hpp"

namespace wpcn {

std::vector<int> sic_order(const ChannelSet& cs) {
  std::vector<int> order(cs.device_count());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(cs.q_d[a]) > std::abs(cs.q_d[b]);
  });
  return order;
}

ChannelSet reorder_devices(const ChannelSet& cs, const std::vector<int>& order) {
  ChannelSet out;
  out.g_e = cs.g_e;
  out.g_i = cs.g_i;
  out.pl_g_e = cs.pl_g_e;
  out.pl_g_i = cs.pl_g_i;
  const int k_count = static_cast<int>(order.size());
  out.h_d.resize(k_count);
  out.q_d.resize(k_count);
  for (int k = 0; k < k_count; ++k) {
    const int src = order[k];
    out.h_r.push_back(cs.h_r[src]);
    out.q_r.push_back(cs.q_r[src]);
    out.h_d[k] = cs.h_d[src];
    out.q_d[k] = cs.q_d[src];
    out.pl_h_r.push_back(cs.pl_h_r[src]);
    out.pl_q_r.push_back(cs.pl_q_r[src]);
    out.pl_h_d.push_back(cs.pl_h_d[src]);
    out.pl_q_d.push_back(cs.pl_q_d[src]);
  }
  cascade(out);
  return out;
}

double uplink_gain(const ChannelSet& cs, int k, const Eigen::VectorXcd& v1) {
  return std::norm(uplink_amplitude(cs, k, v1));
}

double rate_k(int k, const ResourceAllocation& alloc, const ChannelSet& cs,
              const Eigen::VectorXcd& v1, double sigma2) {
  if (alloc.p[k] == 0.0) return 0.0;
  if (alloc.tau1 <= 0.0)
    throw ContractViolation("rate_k: positive power with zero uplink duration");
  double interference = 0.0;
  for (int i = k + 1; i < cs.device_count(); ++i)
    interference += uplink_gain(cs, i, v1) * alloc.p[i];
  const double sinr = uplink_gain(cs, k, v1) * alloc.p[k] / (interference + sigma2);
  return alloc.tau1 * std::log2(1.0 + sinr);
}

double rate_from_energies(int k, const Eigen::VectorXd& f, double tau1,
                          const Eigen::VectorXd& gains, double sigma2) {
  if (f[k] == 0.0) return 0.0;
  if (tau1 <= 0.0)
    throw ContractViolation("rate_from_energies: positive energy with zero uplink duration");
  double interference = 0.0;
  for (int i = k + 1; i < f.size(); ++i) interference += gains[i] * f[i];
  return tau1 * std::log2(1.0 + gains[k] * f[k] / (interference + sigma2 * tau1));
}

Eigen::VectorXd trace_gains(const ChannelSet& cs, const Eigen::MatrixXcd& V1) {
  Eigen::VectorXd gains(cs.device_count());
  for (int k = 0; k < cs.device_count(); ++k)
    gains[k] = (cs.Q[k] * V1).trace().real();
  return gains;
}

}  // namespace wpcn
