#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace wpcn {

/// Node placement for one network realization. N = 0 encodes the
/// "without IRS" baseline: every IRS-side vector is empty and the lifted
/// matrices collapse to 1x1.
struct Topology {
  Eigen::Vector3d ps_pos{-5.0, 0.0, 0.0};
  Eigen::Vector3d irs_pos{0.0, 0.0, 1.0};
  Eigen::Vector3d ds_pos{45.0, 0.0, 0.0};
  std::vector<Eigen::Vector3d> device_pos;
  int irs_elements = 0;

  int device_count() const { return static_cast<int>(device_pos.size()); }
};

struct FadingParams {
  double c0 = 1e-3;         // linear power gain at the reference distance
  double d0 = 1.0;          // reference distance, m
  double alpha_los = 2.2;   // PS-IRS, IRS-DS, IRS-device links
  double alpha_nlos = 2.8;  // PS-device, device-DS links
  double rician_k = 10.0;   // linear Rician factor; 0 degenerates to Rayleigh
  std::uint64_t seed = 1;
};

/// All channels of one realization plus the cascaded/lifted forms consumed by
/// the solvers. Cascade convention: the downlink amplitude at device k is
/// h_d[k] + h_casc[k]^T v0 (plain dot product, no conjugation), with
/// h_casc[k][n] = conj(h_r[k][n]) * g_e[n]; uplink analogous with
/// q_casc[k][n] = conj(g_i[n]) * q_r[k][n].
struct ChannelSet {
  Eigen::VectorXcd g_e;  // PS -> IRS
  Eigen::VectorXcd g_i;  // IRS -> DS
  std::vector<Eigen::VectorXcd> h_r;  // IRS -> device k
  std::vector<Eigen::VectorXcd> q_r;  // device k -> IRS
  Eigen::VectorXcd h_d;  // PS -> device k (direct)
  Eigen::VectorXcd q_d;  // device k -> DS (direct)

  std::vector<Eigen::VectorXcd> h_casc, q_casc;
  // Lifted rank-one forms, (N+1)x(N+1) Hermitian PSD, built from the
  // augmented vectors [h_casc; h_d] / [q_casc; q_d].
  std::vector<Eigen::MatrixXcd> H, Q;

  // Per-link average power (the path-loss value each draw was scaled by);
  // needed by the imperfect-CSI perturbation model.
  double pl_g_e = 0.0, pl_g_i = 0.0;
  std::vector<double> pl_h_r, pl_q_r, pl_h_d, pl_q_d;

  int device_count() const { return static_cast<int>(h_d.size()); }
  int irs_elements() const { return static_cast<int>(g_e.size()); }
};

/// c0 * (d/d0)^(-alpha). Throws std::domain_error for d <= 0.
double path_loss(double d, double alpha, const FadingParams& fading);

/// Devices placed uniformly over a disk of the given radius in the z = 0
/// plane around cluster_center.
Topology make_topology(int devices, int irs_elements,
                       const Eigen::Vector3d& ps_pos, const Eigen::Vector3d& irs_pos,
                       const Eigen::Vector3d& ds_pos, const Eigen::Vector3d& cluster_center,
                       double cluster_radius, std::uint64_t seed);

/// Draw one channel realization. Direct links are Rayleigh (zero-mean
/// circular Gaussian) with alpha_nlos; IRS-side vectors are Rician with
/// alpha_los. The LoS component carries one uniformly random constant phase
/// per vector. Deterministic given fading.seed; cascaded forms are populated.
ChannelSet sample_channels(const Topology& topology, const FadingParams& fading);

/// (Re)populate h_casc/q_casc and the lifted H/Q from the raw fields.
void cascade(ChannelSet& cs);

std::complex<double> downlink_amplitude(const ChannelSet& cs, int k, const Eigen::VectorXcd& v0);
std::complex<double> uplink_amplitude(const ChannelSet& cs, int k, const Eigen::VectorXcd& v1);

/// Drop the IRS-side links (N -> 0) keeping the direct links; the lifted
/// matrices collapse to 1x1 holding |h_d|^2 / |q_d|^2.
ChannelSet strip_irs(const ChannelSet& cs);

/// One record per channel entry: link id, device index, element index
/// (-1 for scalar links), real, imag.
void dump_channels(const ChannelSet& cs, std::ostream& os);

}  // namespace wpcn
