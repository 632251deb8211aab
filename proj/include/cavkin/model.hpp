#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cavkin/types.hpp"

namespace cavkin {

// Physical inputs in recoil units (omega_R = hbar = k = 1).
// U0 is the light shift per photon, eta the effective pump strength per
// particle, Delta_c the pump-cavity detuning and kappa the cavity decay rate.
struct ModelParams {
  int N = 1;
  Real U0 = 0.0;
  Real kappa = 1.0;
  Real Delta_c = 0.0;
  Real eta = 0.0;

  Real NU0() const { return static_cast<Real>(N) * U0; }
  Real sqrtN_eta() const { return std::sqrt(static_cast<Real>(N)) * eta; }
};

// Normalisability of the homogeneous equilibrium distribution:
// none for |delta| <= omega_R/2 (or heating-side detuning), heavy tails
// without a finite second moment up to |delta| = 3 omega_R/2, finite
// kinetic energy beyond.
enum class Normalisability { none, heavy_tail_no_variance, finite_variance };

struct DerivedParams {
  Real delta = 0.0;        // effective detuning Delta_c - N U0 / 2
  Real L = units::box_length;
  std::optional<Real> q;                // Tsallis index 1 + omega_R/|delta|, delta < 0 only
  std::optional<Real> T_eq;             // equilibrium temperature parameter (E_R)
  std::optional<Real> sqrtN_eta_c;      // self-consistent critical pump sqrt(N) eta_c
  Normalisability normalisability = Normalisability::none;
  bool weak_coupling_ok = true;         // N|U0| < 0.1 min(|Delta_c|, kappa)
  std::vector<std::string> warnings;
};

// Validates the inputs and populates every derived scalar. Fields that
// require cooling-side detuning (q, T_eq, sqrtN_eta_c) stay empty when
// delta >= 0 or when the equilibrium family is non-normalisable.
// Throws std::invalid_argument for non-finite inputs, kappa <= 0 or N < 1.
DerivedParams validate_and_derive(const ModelParams& params);

// Equilibrium temperature parameter k_B T = hbar (kappa^2 + delta^2) / (4 |delta|),
// minimal (= hbar kappa / 2) at delta = -kappa.
Real equilibrium_temperature(Real delta, Real kappa);

// Self-consistent critical pump sqrt(N) eta_c for the q-Gaussian equilibrium:
// (kappa^2 + delta^2) / (2 |delta|) * sqrt(2 / (3 - q)). Requires q < 3.
Real critical_pump_qgaussian(Real delta, Real kappa, Real q);

}  // namespace cavkin
