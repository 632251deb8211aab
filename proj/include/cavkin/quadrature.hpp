#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "cavkin/types.hpp"

namespace cavkin {

// Adaptive Gauss-Kronrod (G7, K15) quadrature on finite intervals, a
// semi-infinite wrapper with geometric interval growth, and a Cauchy
// principal-value integral via symmetric-window subtraction.

namespace detail {

// QUADPACK G7K15 nodes/weights, positive half of [-1, 1].
inline constexpr Real gk_nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
inline constexpr Real gk_wk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
// Gauss-7 weights attach to nodes 1, 3, 5, 7 (odd indices).
inline constexpr Real gk_wg[4] = {0.129484966168870, 0.279705391489277,
                                  0.381830050505119, 0.417959183673469};

template <typename T>
inline Real quad_abs(const T& x) {
  if constexpr (std::is_same_v<T, Complex>)
    return std::abs(x);
  else
    return std::abs(static_cast<Real>(x));
}

}  // namespace detail

template <typename F>
struct QuadResult {
  F value;
  Real error;
};

template <typename Func>
auto gk15(Func&& f, Real a, Real b) {
  using T = decltype(f(a));
  const Real c = 0.5 * (a + b);
  const Real h = 0.5 * (b - a);
  T kron{};
  T gauss{};
  for (int i = 0; i < 8; ++i) {
    const Real x = detail::gk_nodes[i] * h;
    T fv = (i == 7) ? f(c) : T(f(c - x) + f(c + x));
    kron += detail::gk_wk[i] * fv;
    if (i % 2 == 1) gauss += detail::gk_wg[i / 2] * fv;
  }
  kron *= h;
  gauss *= h;
  return QuadResult<T>{kron, detail::quad_abs<T>(kron - gauss)};
}

template <typename Func>
auto integrate(Func&& f, Real a, Real b, Real abs_tol = 1e-12,
               Real rel_tol = 1e-10, int max_depth = 40) {
  using T = decltype(f(a));
  struct Segment {
    Real a, b;
    int depth;
  };
  auto whole = gk15(f, a, b);
  const Real scale = detail::quad_abs<T>(whole.value);
  Real tol = std::max(abs_tol, rel_tol * scale);
  if (whole.error <= tol) return whole.value;

  T total{};
  // Explicit stack with a hard work budget; segments at the roundoff floor
  // or past the budget are accepted with their current estimate.
  std::vector<Segment> stack{{a, b, 0}};
  int budget = 20000;
  while (!stack.empty()) {
    const Segment seg = stack.back();
    stack.pop_back();
    auto r = gk15(f, seg.a, seg.b);
    const Real local_tol =
        std::max(abs_tol, rel_tol * std::max(scale, detail::quad_abs<T>(total))) *
        (seg.b - seg.a) / (b - a);
    const Real floor_tol = 8.0 * std::numeric_limits<Real>::epsilon() *
                           detail::quad_abs<T>(r.value);
    if (r.error <= std::max(local_tol, floor_tol) || seg.depth >= max_depth ||
        --budget <= 0) {
      total += r.value;
      continue;
    }
    const Real mid = 0.5 * (seg.a + seg.b);
    stack.push_back({seg.a, mid, seg.depth + 1});
    stack.push_back({mid, seg.b, seg.depth + 1});
  }
  return total;
}

// Integral over [a, infinity) for integrands decaying at least algebraically
// (faster than 1/x^2): geometric intervals until two consecutive
// contributions fall below the tolerance.
template <typename Func>
auto integrate_semiinfinite(Func&& f, Real a, Real tol = 1e-12,
                            Real first_len = 1.0) {
  using T = decltype(f(a));
  T total{};
  Real lo = a;
  Real len = first_len;
  int quiet = 0;
  for (int iter = 0; iter < 200; ++iter) {
    const Real hi = lo + len;
    T part = integrate(f, lo, hi, tol * 0.1, 1e-10);
    total += part;
    if (detail::quad_abs<T>(part) < 0.125 * tol)
      ++quiet;
    else
      quiet = 0;
    if (quiet >= 2) break;
    lo = hi;
    len *= 2.0;
  }
  return total;
}

// Cauchy principal value of integral_a^b f(v) / (v - pole) dv with a simple
// pole strictly inside (a, b). A window symmetric about the pole makes the
// log term vanish; inside it the subtracted integrand is regular.
template <typename Func>
auto pv_integral(Func&& f, Real pole, Real a, Real b, Real tol = 1e-12) {
  using T = decltype(f(a));
  if (!(a < pole && pole < b))
    throw std::invalid_argument("pv_integral: pole must lie inside (a, b)");
  const Real h = std::min(pole - a, b - pole);
  const T f0 = f(pole);
  const Real eps = std::max(1e-9 * h, 1e-300);
  const T fp0 = (f(pole + eps) - f(pole - eps)) / (2.0 * eps);
  auto regular = [&](Real v) -> T {
    const Real d = v - pole;
    if (std::abs(d) < eps) return fp0;
    return (f(v) - f0) / d;
  };
  T result = integrate(regular, pole - h, pole + h, tol, 1e-10);
  if (a < pole - h)
    result += integrate([&](Real v) -> T { return f(v) / (v - pole); }, a,
                        pole - h, tol, 1e-10);
  if (pole + h < b)
    result += integrate([&](Real v) -> T { return f(v) / (v - pole); },
                        pole + h, b, tol, 1e-10);
  return result;
}

}  // namespace cavkin
