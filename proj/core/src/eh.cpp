#include "wpcn/eh.hpp"

#include <cmath>
#include <stdexcept>

#include "wpcn/errors.hpp"

namespace wpcn {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

double EhParams::omega() const { return logistic(-a * b); }

double received_rf_power(double pe, std::complex<double> hd, const Eigen::VectorXcd& h_casc,
                         const Eigen::VectorXcd& v0) {
  if (pe < 0.0) throw std::domain_error("received_rf_power: negative transmit power");
  if (h_casc.size() != v0.size())
    throw ContractViolation("received_rf_power: phase vector length mismatch");
  for (int n = 0; n < v0.size(); ++n)
    if (std::abs(std::abs(v0[n]) - 1.0) > 1e-9)
      throw ContractViolation("received_rf_power: non-unit-modulus phase entry");
  const std::complex<double> amp = hd + h_casc.cwiseProduct(v0).sum();
  return pe * std::norm(amp);
}

double harvested_power(double p_rf, const EhParams& eh) {
  if (p_rf < 0.0) throw std::domain_error("harvested_power: negative RF power");
  const double om = eh.omega();
  // Psi - M*Omega written so that p_rf = 0 gives exactly zero.
  return eh.saturation * (logistic(eh.a * (p_rf - eh.b)) - logistic(-eh.a * eh.b)) / (1.0 - om);
}

double required_rf_power(double phi, const EhParams& eh) {
  if (phi < 0.0) throw std::domain_error("required_rf_power: negative demand");
  if (phi == 0.0) return 0.0;
  const double m = eh.saturation;
  if (phi >= m * (1.0 - 1e-6))
    throw UnreachableDemandError("required_rf_power: demand at or above saturation");
  const double om = eh.omega();
  return eh.b - std::log(m / ((1.0 - om) * phi + m * om) - 1.0) / eh.a;
}

}  // namespace wpcn
