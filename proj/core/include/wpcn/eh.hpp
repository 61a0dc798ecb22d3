#pragma once

#include <Eigen/Dense>
#include <complex>

namespace wpcn {

/// Parameters of the logistic (non-linear) energy-harvesting curve.
/// omega is always derived from (a, b), never stored.
struct EhParams {
  double a = 150.0;           // 1/W, curve steepness
  double b = 0.014;           // W, turn-on threshold
  double saturation = 0.024;  // W, maximum harvestable power (M)

  double omega() const;  // 1/(1 + e^{a b})
};

/// pe * |hd + h_casc^T v0|^2. Throws ContractViolation if any |v0[n]| != 1.
double received_rf_power(double pe, std::complex<double> hd,
                         const Eigen::VectorXcd& h_casc, const Eigen::VectorXcd& v0);

/// Harvested power Phi = (Psi - M*Omega)/(1 - Omega), Psi the logistic in
/// the received RF power. Phi(0) = 0 exactly; Phi < M for all finite inputs.
double harvested_power(double p_rf, const EhParams& eh);

/// Inverse of harvested_power. Throws UnreachableDemandError when phi is
/// within 1e-6*M of saturation, std::domain_error for phi < 0.
double required_rf_power(double phi, const EhParams& eh);

}  // namespace wpcn
