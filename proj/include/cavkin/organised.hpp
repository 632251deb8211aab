#pragma once

#include "cavkin/model.hpp"
#include "cavkin/types.hpp"

namespace cavkin {

// Deep-trapping (harmonic) predictions for the organised phase. Valid for
// eta > eta_c and far-detuned |delta| >> omega_R; near threshold the
// harmonic approximation overestimates the order parameter and
// theta_near_threshold applies instead.
struct OrganisedEquilibrium {
  Real omega0_sq = 0.0;       // trap frequency squared (far-detuned form)
  Real T_kin = 0.0;           // k_B T_kin = hbar (kappa^2+delta^2+4 omega0^2)/(4|delta|)
  Real theta = 0.0;           // |Theta| = 1 - k_B T_kin omega_R / (hbar omega0^2)
  Real re_alpha_ss = 0.0;     // Re<alpha>_inf = -N eta |delta| Theta / (kappa^2+delta^2)
  Real theta_asymptote = 0.0; // eta -> inf limit 1 - omega_R/|delta|
  Real spatial_width_ksq = 0.0;  // k^2 (Delta x)^2 = 2 omega_R / |delta|
};

// Throws when eta <= eta_c or delta >= 0. Theta is reported as a magnitude;
// both signs (even or odd wells) are physical.
OrganisedEquilibrium organised_equilibrium(const ModelParams& params);

// Perturbative order parameter just above threshold,
// |Theta| = 2 sqrt(eta/eta_c - 1); critical exponent 1/2. Throws for ratio < 1.
Real theta_near_threshold(Real eta_ratio);

struct CoolingTimeEstimate {
  Real tau = 0.0;
  bool validity_warning = false;  // formula assumes k v_T0 >> kappa
};

// Optimal cooling time tau ~ k v_T0 N / (4 sqrt(pi) kappa^2) with
// v_T0 = sqrt(2 k_B T0 / m); assumes a Gaussian at delta = -kappa.
CoolingTimeEstimate optimal_cooling_time(const ModelParams& params, Real T0);

}  // namespace cavkin
