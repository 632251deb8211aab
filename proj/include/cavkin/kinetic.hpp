#pragma once

#include <optional>

#include "cavkin/distributions.hpp"
#include "cavkin/model.hpp"
#include "cavkin/types.hpp"

namespace cavkin {

// Linear response of the coupled particle-field system around a spatially
// homogeneous state with velocity distribution F. Zeros of D(s) with
// Re(s) > 0 are growth rates of the self-organisation instability. In recoil
// units the dispersion function reads
//   D(s) = (s + kappa)^2 + delta^2 - 4 delta N eta^2 I(s),
//   I(s) = integral_0^inf v F'(v) / (s^2 + v^2) dv,
// and on the imaginary axis I is taken as the Landau boundary value
// (principal value plus residue) from the right half plane.

enum class DispersionMethod {
  automatic,    // closed form for Gaussian F on the axis, quadrature otherwise
  quadrature,   // numeric (PV) quadrature
  closed_form,  // Dawson/plasma-function form; Gaussian F on the axis only
};

// D(s) for Re(s) >= 0; s on the imaginary axis is evaluated as the boundary
// value. Throws for Re(s) < 0.
Complex dispersion(Complex s, const VelocityDistribution& F,
                   const ModelParams& params,
                   DispersionMethod method = DispersionMethod::automatic);

// Landau boundary value D(i omega).
Complex dispersion_boundary(Real omega, const VelocityDistribution& F,
                            const ModelParams& params,
                            DispersionMethod method = DispersionMethod::automatic);

// Same with pre-derived scalars, for inner loops that evaluate D(i k v) many
// times (kinetic coefficients, closure integrands).
Complex dispersion_boundary_value(Real omega, const VelocityDistribution& F,
                                  Real delta, Real kappa, Real N_eta_sq,
                                  DispersionMethod method = DispersionMethod::automatic);

// Same with the interaction integral dropped: D(s) = (s + kappa)^2 + delta^2,
// the independent-particles limit valid far below threshold.
Complex dispersion_free(Complex s, const ModelParams& params);

// vp integral of g'(xi) / (-2 xi) over the real line for the shape function
// g of F; equals 1 for a Gaussian and (3 - q)/2 for a q-Gaussian.
// Symmetric-grid trapezoid sum under a sinh substitution, centre cell
// excluded, Richardson-refined in the step size. Throws on non-convergence.
Real pv_shape_integral(const VelocityDistribution& F, Real tol = 1e-10);

struct StabilityResult {
  bool unstable = false;
  Real margin = 0.0;  // LHS/RHS - 1 of the threshold criterion
};

// Threshold criterion for delta < 0:
//   N eta^2 / (k_B T) * pv_shape_integral > (delta^2 + kappa^2) / (hbar |delta|).
// Grid distributions use the equivalent primitive form built directly from
// vp integral of F'(v)/v. Throws for delta >= 0.
StabilityResult is_unstable(const ModelParams& params,
                            const VelocityDistribution& F);

// Critical pump sqrt(N) eta_c for a given equilibrium shape at temperature
// T_eq: the closed q-Gaussian form, or the inverted threshold criterion via
// pv_shape_integral for any other shape.
Real critical_pump(const ModelParams& params, const VelocityDistribution& shape_at_Teq);
Real critical_pump(const ModelParams& params);  // self-consistent q-Gaussian

// Reformulated threshold N |U0| V_opt > hbar kappa^2 with the pump-lattice
// depth V_opt = hbar eta^2 / |U0| (equivalent to sqrt(N) eta > kappa for a
// Gaussian at delta = -kappa).
bool reformulated_threshold_exceeded(const ModelParams& params);

// Smallest N in [1, N_max] whose collective coupling makes the configured
// per-particle eta critical; delta is re-derived at every N since the
// collective shift N U0 / 2 grows with N. Empty when no such N exists.
std::optional<int> critical_particle_number(const ModelParams& params,
                                            int N_max = 1 << 22);

enum class RootStatus { no_root, root_found, search_exhausted };

struct GrowthRateResult {
  RootStatus status = RootStatus::no_root;
  Complex s{};  // valid when status == root_found
};

struct GrowthRateOptions {
  Real s_max_over_kappa = 3.0;   // search rectangle: Re in (0, s_max]
  Real v_max_thermal = 8.0;      // Im in [-k v_max, k v_max], v_max = 8 v_T
  int grid_re = 24;
  int grid_im = 33;
  Real tol = 1e-9;               // Newton |D| tolerance relative to kappa^2
};

// Root of D with the largest positive real part, via real-axis bisection
// (the symmetric-F instability is stationary) backed by a rectangle scan
// seeding damped Newton iterations. search_exhausted is reported when the
// boundary winding of D indicates a zero that no seed converged to.
GrowthRateResult growth_rate(const ModelParams& params,
                             const VelocityDistribution& F,
                             const GrowthRateOptions& opts = {});

}  // namespace cavkin
