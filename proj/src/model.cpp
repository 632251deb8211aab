#include "cavkin/model.hpp"

#include <cmath>
#include <stdexcept>

namespace cavkin {

Real equilibrium_temperature(Real delta, Real kappa) {
  return units::hbar * (kappa * kappa + delta * delta) / (4.0 * std::abs(delta));
}

Real critical_pump_qgaussian(Real delta, Real kappa, Real q) {
  if (!(q < 3.0)) throw std::invalid_argument("critical pump undefined for q >= 3");
  const Real ad = std::abs(delta);
  return (kappa * kappa + delta * delta) / (2.0 * ad) * std::sqrt(2.0 / (3.0 - q));
}

DerivedParams validate_and_derive(const ModelParams& p) {
  if (!std::isfinite(p.U0) || !std::isfinite(p.kappa) || !std::isfinite(p.Delta_c) ||
      !std::isfinite(p.eta))
    throw std::invalid_argument("model parameters must be finite");
  if (p.N < 1) throw std::invalid_argument("particle count N must be >= 1");
  if (!(p.kappa > 0.0)) throw std::invalid_argument("cavity decay rate kappa must be > 0");
  if (p.eta < 0.0) throw std::invalid_argument("pump strength eta must be >= 0");

  DerivedParams d;
  d.delta = p.Delta_c - 0.5 * p.NU0();

  d.weak_coupling_ok =
      std::abs(p.NU0()) < 0.1 * std::min(std::abs(p.Delta_c), p.kappa);
  if (!d.weak_coupling_ok)
    d.warnings.push_back(
        "outside weak-coupling regime: N|U0| >= 0.1 min(|Delta_c|, kappa); "
        "kinetic-theory predictions may be inaccurate");

  if (d.delta < 0.0) {
    const Real ad = -d.delta;
    const Real q = 1.0 + units::omega_R / ad;
    d.q = q;
    d.T_eq = equilibrium_temperature(d.delta, p.kappa);
    if (q < 3.0) d.sqrtN_eta_c = critical_pump_qgaussian(d.delta, p.kappa, q);
    if (ad <= 0.5 * units::omega_R)
      d.normalisability = Normalisability::none;
    else if (ad <= 1.5 * units::omega_R)
      d.normalisability = Normalisability::heavy_tail_no_variance;
    else
      d.normalisability = Normalisability::finite_variance;
  } else {
    // Heating side: simulation is allowed but no homogeneous equilibrium exists.
    d.normalisability = Normalisability::none;
    if (p.eta > 0.0)
      d.warnings.push_back("delta >= 0: heating regime, equilibrium predictions disabled");
  }
  return d;
}

}  // namespace cavkin
