#include "cavkin/organised.hpp"

#include <cmath>
#include <stdexcept>

namespace cavkin {

OrganisedEquilibrium organised_equilibrium(const ModelParams& params) {
  const DerivedParams d = validate_and_derive(params);
  if (!(d.delta < 0.0))
    throw std::invalid_argument("organised equilibrium requires delta < 0");
  if (!d.sqrtN_eta_c)
    throw std::invalid_argument("organised equilibrium requires a finite threshold");
  const Real ratio = params.sqrtN_eta() / *d.sqrtN_eta_c;
  if (!(ratio > 1.0))
    throw std::invalid_argument("organised equilibrium requires eta > eta_c");

  const Real ad = -d.delta;
  OrganisedEquilibrium eq;
  eq.omega0_sq = params.sqrtN_eta() * units::omega_R *
                 (ratio + std::sqrt(ratio * ratio - 1.0));
  eq.T_kin = units::hbar *
             (params.kappa * params.kappa + d.delta * d.delta + 4.0 * eq.omega0_sq) /
             (4.0 * ad);
  eq.theta = 1.0 - eq.T_kin * units::omega_R / (units::hbar * eq.omega0_sq);
  eq.re_alpha_ss = -static_cast<Real>(params.N) * params.eta * ad * eq.theta /
                   (params.kappa * params.kappa + d.delta * d.delta);
  eq.theta_asymptote = 1.0 - units::omega_R / ad;
  eq.spatial_width_ksq = 2.0 * units::omega_R / ad;
  return eq;
}

Real theta_near_threshold(Real eta_ratio) {
  if (!(eta_ratio >= 1.0))
    throw std::invalid_argument("theta_near_threshold requires eta/eta_c >= 1");
  return 2.0 * std::sqrt(eta_ratio - 1.0);
}

CoolingTimeEstimate optimal_cooling_time(const ModelParams& params, Real T0) {
  if (!(T0 > 0.0)) throw std::invalid_argument("T0 must be positive");
  CoolingTimeEstimate est;
  const Real kvT0 = units::k_wave * thermal_velocity(T0);
  est.tau = kvT0 * static_cast<Real>(params.N) /
            (4.0 * std::sqrt(pi) * params.kappa * params.kappa);
  est.validity_warning = !(kvT0 > params.kappa);
  return est;
}

}  // namespace cavkin
