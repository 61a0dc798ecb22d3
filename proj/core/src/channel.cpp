#include "wpcn/channel.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

#include "wpcn/rng.hpp"

namespace wpcn {

namespace {

using cxd = std::complex<double>;

cxd circular_gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  const double re = n01(rng);
  const double im = n01(rng);
  return cxd(re, im) / std::sqrt(2.0);
}

// Rician vector: one uniformly random constant LoS phase per vector,
// i.i.d. circular Gaussian scatter, amplitudes sqrt(K/(1+K)) / sqrt(1/(1+K)).
Eigen::VectorXcd rician_vector(int n, double pl, double rician_k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uphase(0.0, 2.0 * std::numbers::pi);
  const double theta = uphase(rng);
  const cxd los = std::polar(1.0, theta);
  Eigen::VectorXcd out(n);
  const double amp = std::sqrt(pl);
  if (std::isinf(rician_k)) {
    for (int i = 0; i < n; ++i) out[i] = amp * los;
    return out;
  }
  const double w_los = std::sqrt(rician_k / (1.0 + rician_k));
  const double w_sc = std::sqrt(1.0 / (1.0 + rician_k));
  for (int i = 0; i < n; ++i) out[i] = amp * (w_los * los + w_sc * circular_gaussian(rng));
  return out;
}

cxd rayleigh_scalar(double pl, std::mt19937_64& rng) {
  return std::sqrt(pl) * circular_gaussian(rng);
}

void dump_vector(std::ostream& os, const char* id, int device, const Eigen::VectorXcd& v) {
  for (int n = 0; n < v.size(); ++n)
    os << id << ' ' << device << ' ' << n << ' ' << v[n].real() << ' ' << v[n].imag() << '\n';
}

}  // namespace

double path_loss(double d, double alpha, const FadingParams& fading) {
  if (d <= 0.0) throw std::domain_error("path_loss: non-positive distance");
  return fading.c0 * std::pow(d / fading.d0, -alpha);
}

Topology make_topology(int devices, int irs_elements, const Eigen::Vector3d& ps_pos,
                       const Eigen::Vector3d& irs_pos, const Eigen::Vector3d& ds_pos,
                       const Eigen::Vector3d& cluster_center, double cluster_radius,
                       std::uint64_t seed) {
  if (devices < 1) throw std::invalid_argument("make_topology: need at least one device");
  if (irs_elements < 0) throw std::invalid_argument("make_topology: negative element count");
  Topology topo;
  topo.ps_pos = ps_pos;
  topo.irs_pos = irs_pos;
  topo.ds_pos = ds_pos;
  topo.irs_elements = irs_elements;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uphase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  topo.device_pos.reserve(devices);
  for (int k = 0; k < devices; ++k) {
    // uniform over the disk in the z = 0 plane
    const double r = cluster_radius * std::sqrt(u01(rng));
    const double phi = uphase(rng);
    topo.device_pos.push_back(cluster_center +
                              Eigen::Vector3d(r * std::cos(phi), r * std::sin(phi), 0.0));
  }
  return topo;
}

ChannelSet sample_channels(const Topology& topology, const FadingParams& fading) {
  const int k_count = topology.device_count();
  const int n = topology.irs_elements;
  // Independent streams so the direct links do not depend on N; the N = 0
  // realization then shares its direct links with every N > 0 realization of
  // the same seed.
  std::mt19937_64 rng(derive_seed(fading.seed, 0xA0, 0));
  std::mt19937_64 rng_direct(derive_seed(fading.seed, 0xA1, 0));

  ChannelSet cs;
  const double d_ps_irs = (topology.ps_pos - topology.irs_pos).norm();
  const double d_irs_ds = (topology.irs_pos - topology.ds_pos).norm();
  cs.pl_g_e = path_loss(d_ps_irs, fading.alpha_los, fading);
  cs.pl_g_i = path_loss(d_irs_ds, fading.alpha_los, fading);
  cs.g_e = rician_vector(n, cs.pl_g_e, fading.rician_k, rng);
  cs.g_i = rician_vector(n, cs.pl_g_i, fading.rician_k, rng);

  cs.h_d.resize(k_count);
  cs.q_d.resize(k_count);
  for (int k = 0; k < k_count; ++k) {
    const Eigen::Vector3d& dev = topology.device_pos[k];
    const double pl_ird = path_loss((topology.irs_pos - dev).norm(), fading.alpha_los, fading);
    cs.pl_h_r.push_back(pl_ird);
    cs.h_r.push_back(rician_vector(n, pl_ird, fading.rician_k, rng));
    cs.pl_q_r.push_back(pl_ird);
    cs.q_r.push_back(rician_vector(n, pl_ird, fading.rician_k, rng));
    const double pl_psd = path_loss((topology.ps_pos - dev).norm(), fading.alpha_nlos, fading);
    cs.pl_h_d.push_back(pl_psd);
    cs.h_d[k] = rayleigh_scalar(pl_psd, rng_direct);
    const double pl_dds = path_loss((dev - topology.ds_pos).norm(), fading.alpha_nlos, fading);
    cs.pl_q_d.push_back(pl_dds);
    cs.q_d[k] = rayleigh_scalar(pl_dds, rng_direct);
  }
  cascade(cs);
  return cs;
}

void cascade(ChannelSet& cs) {
  const int k_count = cs.device_count();
  const int n = cs.irs_elements();
  cs.h_casc.assign(k_count, Eigen::VectorXcd(n));
  cs.q_casc.assign(k_count, Eigen::VectorXcd(n));
  cs.H.assign(k_count, Eigen::MatrixXcd(n + 1, n + 1));
  cs.Q.assign(k_count, Eigen::MatrixXcd(n + 1, n + 1));
  for (int k = 0; k < k_count; ++k) {
    for (int i = 0; i < n; ++i) {
      cs.h_casc[k][i] = std::conj(cs.h_r[k][i]) * cs.g_e[i];
      cs.q_casc[k][i] = std::conj(cs.g_i[i]) * cs.q_r[k][i];
    }
    // amplitude = aug^T [v;1]; lifting with w = conj(aug) gives
    // |amplitude|^2 = Tr(w w^H V) for V lifted from [v;1].
    Eigen::VectorXcd aug_h(n + 1), aug_q(n + 1);
    aug_h << cs.h_casc[k], cs.h_d[k];
    aug_q << cs.q_casc[k], cs.q_d[k];
    const Eigen::VectorXcd wh = aug_h.conjugate();
    const Eigen::VectorXcd wq = aug_q.conjugate();
    cs.H[k] = wh * wh.adjoint();
    cs.Q[k] = wq * wq.adjoint();
  }
}

std::complex<double> downlink_amplitude(const ChannelSet& cs, int k, const Eigen::VectorXcd& v0) {
  return cs.h_d[k] + cs.h_casc[k].cwiseProduct(v0).sum();
}

std::complex<double> uplink_amplitude(const ChannelSet& cs, int k, const Eigen::VectorXcd& v1) {
  return cs.q_d[k] + cs.q_casc[k].cwiseProduct(v1).sum();
}

ChannelSet strip_irs(const ChannelSet& cs) {
  ChannelSet out;
  const int k_count = cs.device_count();
  out.g_e.resize(0);
  out.g_i.resize(0);
  out.h_r.assign(k_count, Eigen::VectorXcd(0));
  out.q_r.assign(k_count, Eigen::VectorXcd(0));
  out.h_d = cs.h_d;
  out.q_d = cs.q_d;
  out.pl_h_r.assign(k_count, 0.0);
  out.pl_q_r.assign(k_count, 0.0);
  out.pl_h_d = cs.pl_h_d;
  out.pl_q_d = cs.pl_q_d;
  cascade(out);
  return out;
}

void dump_channels(const ChannelSet& cs, std::ostream& os) {
  os.precision(17);
  dump_vector(os, "gE", -1, cs.g_e);
  dump_vector(os, "gI", -1, cs.g_i);
  for (int k = 0; k < cs.device_count(); ++k) {
    dump_vector(os, "hr", k, cs.h_r[k]);
    dump_vector(os, "qr", k, cs.q_r[k]);
    os << "hd " << k << " -1 " << cs.h_d[k].real() << ' ' << cs.h_d[k].imag() << '\n';
    os << "qd " << k << " -1 " << cs.q_d[k].real() << ' ' << cs.q_d[k].imag() << '\n';
  }
}

}  // namespace wpcn
