#include "cavkin/special.hpp"

#include <cmath>

namespace cavkin {

namespace {

const Real sqrt_pi = std::sqrt(pi);

Real dawson_series(Real x) {
  // D(x) = sum_n (-2)^n x^(2n+1) / (2n+1)!!
  const Real x2 = x * x;
  Real term = x;
  Real sum = x;
  for (int n = 0; n < 60; ++n) {
    term *= -2.0 * x2 / (2.0 * n + 3.0);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

Real dawson_rybicki(Real x) {
  // Sampling-theorem sum over odd n; spacing h = 0.2 puts the
  // discretisation error far below double precision.
  constexpr Real h = 0.2;
  const int n_center = static_cast<int>(std::lround(x / h)) | 1;  // odd
  Real sum = 0.0;
  const int span = static_cast<int>(7.0 / h) + 1;
  for (int n = n_center - 2 * span; n <= n_center + 2 * span; n += 2) {
    if (n == 0) continue;
    const Real d = x - n * h;
    if (std::abs(d) > 7.0) continue;
    sum += std::exp(-d * d) / n;
  }
  return sum / sqrt_pi;
}

Real dawson_asymptotic(Real x) {
  // D(x) ~ 1/(2x) * sum_n (2n-1)!! / (2x^2)^n
  const Real inv2x2 = 1.0 / (2.0 * x * x);
  Real term = 1.0 / (2.0 * x);
  Real sum = term;
  for (int n = 1; n < 40; ++n) {
    const Real next = term * (2.0 * n - 1.0) * inv2x2;
    if (std::abs(next) >= std::abs(term)) break;  // asymptotic turning point
    term = next;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

Real dawson(Real x) {
  const Real ax = std::abs(x);
  Real v;
  if (ax < 1.5)
    v = dawson_series(ax);
  else if (ax < 7.0)
    v = dawson_rybicki(ax);
  else
    v = dawson_asymptotic(ax);
  return x < 0.0 ? -v : v;
}

Complex plasma_Z_boundary(Real x) {
  return {-2.0 * dawson(x), sqrt_pi * std::exp(-x * x)};
}

}  // namespace cavkin
