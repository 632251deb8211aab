#pragma once

#include <Eigen/Core>
#include <complex>

namespace cavkin {

using Real = double;
using Complex = std::complex<Real>;
using ArrayX = Eigen::ArrayXd;
using Eigen::Index;

// Recoil unit system: hbar = k = omega_R = k_B = 1, hence m = 1/2,
// recoil velocity hbar*k/m = 2 and energies in units of E_R = hbar*omega_R.
namespace units {
inline constexpr Real hbar = 1.0;
inline constexpr Real k_wave = 1.0;
inline constexpr Real omega_R = 1.0;
inline constexpr Real mass = 0.5;
inline constexpr Real recoil_velocity = 2.0;
// Periodic box of one optical wavelength; every coupling is 2*pi periodic.
inline constexpr Real box_length = 6.283185307179586476925286766559;
}  // namespace units

inline constexpr Real pi = 3.141592653589793238462643383279;

// Thermal velocity v_T = sqrt(2 k_B T / m); in recoil units v_T = 2 sqrt(T).
inline Real thermal_velocity(Real T) { return 2.0 * std::sqrt(T); }

}  // namespace cavkin
