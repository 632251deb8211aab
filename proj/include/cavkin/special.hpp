#pragma once

#include "cavkin/types.hpp"

namespace cavkin {

// Dawson integral D(x) = exp(-x^2) * integral_0^x exp(t^2) dt, accurate to
// ~1e-13 over the real line (Maclaurin series, Rybicki sampling sum and
// asymptotic series by region).
Real dawson(Real x);

// Boundary value of the plasma dispersion function from the upper half
// plane: Z(x + i0) = -2 D(x) + i sqrt(pi) exp(-x^2).
Complex plasma_Z_boundary(Real x);

}  // namespace cavkin
