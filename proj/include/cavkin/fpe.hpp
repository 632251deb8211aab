#pragma once

#include <utility>
#include <vector>

#include "cavkin/distributions.hpp"
#include "cavkin/kinetic.hpp"
#include "cavkin/model.hpp"

namespace cavkin {

// Nonlinear kinetic layer for the homogeneous (sub-threshold) phase: drift
// and diffusion coefficients evaluated against a frozen velocity
// distribution through |D(i k v)|^2, a Gaussian-closure temperature
// equation, and a conservative grid evolution of F(v, t).

enum class CoefficientMode {
  automatic,  // full dispersion (closed form for Gaussian F)
  full,
  far_below,  // independent-particles reduction D = (i k v + kappa)^2 + delta^2
};

struct FpeCoefficients {
  Real A;  // drift (acceleration units); odd in v
  Real B;  // diffusion (velocity^2 / time); even in v, positive
};

// A = (2 hbar k delta kappa eta^2 / m) k v / |D|^2,
// B = (hbar^2 k^2 eta^2 kappa / 2 m^2) (kappa^2 + delta^2 + k^2 v^2) / |D|^2.
FpeCoefficients fpe_coefficients(Real v, const VelocityDistribution& F,
                                 const ModelParams& params,
                                 CoefficientMode mode = CoefficientMode::automatic);

// Ratio A/B = 2 delta k v / (kappa^2 + delta^2 + k^2 v^2); the dispersion
// factor cancels, so the stationary shape exp(int A/B) is mode-independent.
Real drift_diffusion_ratio(Real v, const ModelParams& params);

struct TemperatureEvolution {
  ArrayX t;
  ArrayX T_kin;
  bool instability_reached = false;
  Real t_instability = 0.0;
};

struct TemperatureOptions {
  CoefficientMode mode = CoefficientMode::automatic;
  int n_output = 200;
  Real rtol = 1e-7;
  bool check_instability = true;  // halt when the momentary Gaussian destabilises
};

// Gaussian-closure evolution of k_B T_kin = m<v^2>:
//   dT/dt = -2m int v (-A <F> + B d_v <F>) dv
// with <F> Gaussian at the momentary T_kin. Valid for |delta| >> omega_R.
TemperatureEvolution evolve_temperature(const ModelParams& params, Real T0,
                                        Real t_final,
                                        const TemperatureOptions& opts = {});

// Right-hand side of the closure equation at temperature T, and its fixed
// point found by bisection (useful as an equilibrium oracle).
Real temperature_rate(const ModelParams& params, Real T,
                      CoefficientMode mode = CoefficientMode::automatic);
Real temperature_fixed_point(const ModelParams& params, Real T_lo, Real T_hi,
                             CoefficientMode mode = CoefficientMode::automatic);

// Uniform symmetric cell-centred velocity grid.
struct FpeGrid {
  Real v_max = 1.0;
  Index n_points = 801;

  Real dv() const { return 2.0 * v_max / static_cast<Real>(n_points); }
  ArrayX centers() const;
  // Extent max(8 v_T, tail-mass cutoff) for the given distribution.
  static FpeGrid for_distribution(const VelocityDistribution& F,
                                  Real tail_mass_tol = 1e-6,
                                  Index n_points = 1201);
};

// Project a distribution onto grid cell centres, renormalised to unit mass.
ArrayX project_to_grid(const VelocityDistribution& F, const FpeGrid& grid);

struct DistributionOptions {
  CoefficientMode mode = CoefficientMode::automatic;
  Real macro_dt = 0.0;     // coefficient refresh step; 0 selects 0.5/kappa
  Real dt_growth = 1.0;    // geometric step ramp for steady-state runs
  Real dt_max = 1e9;
  Real mass_tol = 1e-6;
  std::vector<Real> snapshot_times;
};

struct DistributionEvolution {
  ArrayX v;
  ArrayX F_final;
  std::vector<std::pair<Real, ArrayX>> snapshots;
  ArrayX t_series;
  ArrayX T_kin_series;
  Real mass_error = 0.0;  // max |mass - 1| seen
};

// Conservative finite-volume evolution of d_t F = d_v (B d_v F - A F) with
// positivity-preserving exponential flux weighting, no-flux boundaries and
// implicit stepping; coefficients are refreshed from the current F every
// macro step. Throws on mass drift beyond tolerance or positivity loss.
DistributionEvolution evolve_distribution(const ModelParams& params,
                                          const ArrayX& F0, const FpeGrid& grid,
                                          Real t_final,
                                          const DistributionOptions& opts = {});

// Scale-free stationarity residual of F on the grid: L1 norm of the
// discrete flux divided by the L1 norm of its one-sided parts, so exact
// discrete equilibria give ~1e-16 and O(dv^2) projections stay small.
Real stationarity_residual(const ModelParams& params, const ArrayX& F,
                           const FpeGrid& grid,
                           CoefficientMode mode = CoefficientMode::automatic);

}  // namespace cavkin
