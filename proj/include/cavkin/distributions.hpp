#pragma once

#include <cstdint>
#include <optional>

#include "cavkin/types.hpp"

namespace cavkin {

enum class DistFamily { gaussian, q_gaussian, lorentzian, grid };

// Normalised q-Gaussian density in v, parameter temperature T (E_R):
//   f(v) = C_q / v_T * (1 + (q-1) (v/v_T)^2)^(-1/(q-1)),  v_T^2 = 2 k_B T / m.
// Requires 1 < q < 3. The q -> 1 limit is the Maxwellian; q = 2 the Lorentzian.
Real q_gaussian_density(Real v, Real q, Real T);

// log of the density above, stable down to the Gaussian limit q -> 1.
Real q_gaussian_log_density(Real v, Real q, Real T);

// Kinetic temperature m<v^2> = 2 k_B T / (5 - 3q); empty for q >= 5/3 where
// the second moment diverges.
std::optional<Real> q_gaussian_kinetic_temperature(Real q, Real T);

// Draw n samples (Bailey's polar method on the equivalent Student-t).
ArrayX sample_q_gaussian(Index n, Real q, Real T, std::uint64_t seed,
                         std::uint64_t stream_index = 0);

// A symmetric one-dimensional velocity distribution F(v), normalised to 1.
// Either an analytic family or a numeric grid. Grid inputs get a natural
// cubic spline for interpolation plus an algebraic tail attached beyond the
// last grid point so that slowly decaying distributions keep their tails in
// velocity integrals.
class VelocityDistribution {
 public:
  static VelocityDistribution gaussian(Real T);
  static VelocityDistribution q_gaussian(Real q, Real T);
  static VelocityDistribution lorentzian(Real T);  // q = 2
  // v must be uniform, symmetric about 0; F nonnegative, normalised within
  // 1e-8 and symmetric within grid tolerance. Throws otherwise.
  static VelocityDistribution from_grid(const ArrayX& v, const ArrayX& F);

  Real density(Real v) const;
  Real density_derivative(Real v) const;

  DistFamily family() const { return family_; }
  // Temperature parameter of the analytic families; estimated m<v^2>-based
  // scale for grids.
  Real temperature() const { return T_; }
  std::optional<Real> q() const;
  Real thermal_velocity() const { return vT_; }
  // Velocity beyond which the remaining tail mass is below tol.
  Real tail_cutoff(Real tail_mass_tol = 1e-10) const;

  // Shape function g(xi) with F(v) = g(v / v_T) / v_T.
  Real shape(Real xi) const { return vT_ * density(xi * vT_); }
  Real shape_derivative(Real xi) const {
    return vT_ * vT_ * density_derivative(xi * vT_);
  }

 private:
  VelocityDistribution() = default;

  DistFamily family_ = DistFamily::gaussian;
  Real T_ = 1.0;
  Real q_ = 1.0;
  Real vT_ = 2.0;

  // grid data
  ArrayX grid_v_, grid_F_, spline_d2_;
  Real grid_dv_ = 0.0;
  Real tail_amp_ = 0.0, tail_exp_ = 0.0, tail_edge_ = 0.0;

  Real grid_density(Real v) const;
  Real grid_density_derivative(Real v) const;
};

}  // namespace cavkin
