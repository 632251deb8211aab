#include "cavkin/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cavkin/quadrature.hpp"
#include "cavkin/special.hpp"

namespace cavkin {

namespace {

Real interaction_strength(const ModelParams& p) {
  return static_cast<Real>(p.N) * p.eta * p.eta;  // N eta^2
}

// I(s) = integral_0^inf v F'(v) / (s^2 + v^2) dv for Re(s) > 0.
Complex interaction_integral(Complex s, const VelocityDistribution& F) {
  const Real v_cut = std::max(F.tail_cutoff(1e-12), 8.0 * F.thermal_velocity());
  const Complex s2 = s * s;
  auto integrand = [&](Real v) -> Complex {
    return v * F.density_derivative(v) / (s2 + v * v);
  };
  // The integrand peaks near v = |Im s| with width Re(s); split there.
  const Real vp = std::abs(s.imag());
  const Real w = std::max(10.0 * std::abs(s.real()), 1e-3 * F.thermal_velocity());
  Complex result{};
  if (vp > 0.0 && vp < v_cut && w < vp) {
    result += integrate(integrand, 0.0, vp - w, 1e-13, 1e-11);
    result += integrate(integrand, vp - w, std::min(vp + w, v_cut), 1e-13, 1e-11);
    if (vp + w < v_cut) result += integrate(integrand, vp + w, v_cut, 1e-13, 1e-11);
  } else {
    result += integrate(integrand, 0.0, std::min(v_cut, 4.0 * F.thermal_velocity()),
                        1e-13, 1e-11);
    result += integrate(integrand, std::min(v_cut, 4.0 * F.thermal_velocity()),
                        v_cut, 1e-13, 1e-11);
  }
  return result;
}

// Boundary value of I at s = i omega: vp integral plus (-i pi / 2) F'(omega).
Complex interaction_integral_boundary(Real omega, const VelocityDistribution& F) {
  const Real v_cut = std::max(F.tail_cutoff(1e-12), 8.0 * F.thermal_velocity());
  const Real w = std::abs(omega);
  auto phi = [&](Real v) -> Real {
    return v * F.density_derivative(v) / (v + w);
  };
  Real pv;
  if (w < 1e-12 * F.thermal_velocity()) {
    // F'(v)/v is regular at v = 0 for smooth symmetric F.
    pv = integrate([&](Real v) -> Real {
      if (v < 1e-12 * F.thermal_velocity()) v = 1e-12 * F.thermal_velocity();
      return F.density_derivative(v) / v;
    }, 0.0, v_cut, 1e-13, 1e-11);
  } else if (w >= v_cut) {
    pv = integrate([&](Real v) -> Real {
      return v * F.density_derivative(v) / (v * v - w * w);
    }, 0.0, v_cut, 1e-13, 1e-11);
  } else {
    pv = pv_integral(phi, w, 0.0, v_cut, 1e-13);
  }
  const Real residue = F.density_derivative(omega);
  return Complex(pv, -0.5 * pi * residue);
}

Complex dispersion_gaussian_boundary(Real omega, const VelocityDistribution& F,
                                     Real neta2, Real delta, Real kappa) {
  const Real vT = F.thermal_velocity();
  const Real x = -omega / vT;  // zeta = i s / v_T at s = i omega
  const Complex Z = plasma_Z_boundary(x);
  const Complex s(0.0, omega);
  return (s + kappa) * (s + kappa) + delta * delta +
         4.0 * delta * neta2 / (vT * vT) * (1.0 + x * Z);
}

}  // namespace

Complex dispersion_free(Complex s, const ModelParams& params) {
  const DerivedParams d = validate_and_derive(params);
  return (s + params.kappa) * (s + params.kappa) + d.delta * d.delta;
}

Complex dispersion_boundary_value(Real omega, const VelocityDistribution& F,
                                  Real delta, Real kappa, Real N_eta_sq,
                                  DispersionMethod method) {
  if (method == DispersionMethod::closed_form ||
      (method == DispersionMethod::automatic &&
       F.family() == DistFamily::gaussian)) {
    if (F.family() != DistFamily::gaussian)
      throw std::invalid_argument(
          "closed-form dispersion is available for Gaussian distributions only");
    return dispersion_gaussian_boundary(omega, F, N_eta_sq, delta, kappa);
  }
  const Complex s(0.0, omega);
  return (s + kappa) * (s + kappa) + delta * delta -
         4.0 * delta * N_eta_sq * interaction_integral_boundary(omega, F);
}

Complex dispersion_boundary(Real omega, const VelocityDistribution& F,
                            const ModelParams& params, DispersionMethod method) {
  const DerivedParams d = validate_and_derive(params);
  return dispersion_boundary_value(omega, F, d.delta, params.kappa,
                                   interaction_strength(params), method);
}

Complex dispersion(Complex s, const VelocityDistribution& F,
                   const ModelParams& params, DispersionMethod method) {
  if (s.real() < 0.0)
    throw std::invalid_argument("dispersion is defined for Re(s) >= 0 only");
  if (s.real() == 0.0) return dispersion_boundary(s.imag(), F, params, method);
  if (method == DispersionMethod::closed_form)
    throw std::invalid_argument(
        "closed-form dispersion is available on the imaginary axis only");
  const DerivedParams d = validate_and_derive(params);
  const Real neta2 = interaction_strength(params);
  return (s + params.kappa) * (s + params.kappa) + d.delta * d.delta -
         4.0 * d.delta * neta2 * interaction_integral(s, F);
}

Real pv_shape_integral(const VelocityDistribution& F, Real tol) {
  // vp integral of g'(xi)/(-2 xi) over the real line; by symmetry
  //   = - integral_0^inf g'(xi)/xi dxi.
  // Substituting xi = sinh(t) compresses algebraic tails; the trapezoid sum
  // skips the centre cell (where grid inputs cannot resolve g'/xi) and is
  // Richardson-extrapolated in the step size.
  const Real xi_cut = F.tail_cutoff(0.01 * tol) / F.thermal_velocity();
  const Real t_max = std::asinh(std::max(xi_cut, 20.0));

  auto integrand = [&](Real t) -> Real {
    const Real xi = std::sinh(t);
    return -F.shape_derivative(xi) / xi * std::cosh(t);
  };
  auto trapezoid = [&](int n) -> Real {
    // nodes t_j = (j + 1/2) h, j = 0 .. n-1; the j = 0 cell is the excluded
    // symmetric window around xi = 0 (its contribution is restored by the
    // Richardson step).
    const Real h = t_max / n;
    Real sum = 0.0;
    for (int j = 1; j < n; ++j) sum += integrand((j + 0.5) * h);
    return sum * h;
  };

  Real prev2 = trapezoid(512);
  Real prev = trapezoid(1024);
  Real best = 0.0;
  for (int n = 2048; n <= (1 << 20); n *= 2) {
    const Real cur = trapezoid(n);
    // The excluded-window error is O(h); eliminate the leading term.
    const Real rich_prev = 2.0 * prev - prev2;
    const Real rich_cur = 2.0 * cur - prev;
    best = (4.0 * rich_cur - rich_prev) / 3.0;
    if (std::abs(rich_cur - rich_prev) < 0.5 * tol) return best;
    prev2 = prev;
    prev = cur;
  }
  throw std::runtime_error("pv_shape_integral: refinement did not converge");
}

StabilityResult is_unstable(const ModelParams& params,
                            const VelocityDistribution& F) {
  const DerivedParams d = validate_and_derive(params);
  if (d.delta >= 0.0)
    throw std::invalid_argument(
        "instability criterion requires cooling-side detuning delta < 0");
  const Real neta2 = interaction_strength(params);
  const Real rhs =
      (d.delta * d.delta + params.kappa * params.kappa) /
      (units::hbar * std::abs(d.delta));
  Real lhs;
  if (F.family() == DistFamily::grid) {
    // Primitive form: N eta^2 * (-2) vp integral of F'(v)/v dv.
    const Complex I0 = interaction_integral_boundary(0.0, F);
    lhs = -4.0 * neta2 * I0.real();
  } else {
    lhs = neta2 / F.temperature() * pv_shape_integral(F);
  }
  StabilityResult r;
  r.margin = lhs / rhs - 1.0;
  r.unstable = r.margin > 0.0;
  return r;
}

Real critical_pump(const ModelParams& params,
                   const VelocityDistribution& shape_at_Teq) {
  const DerivedParams d = validate_and_derive(params);
  if (!(d.delta < 0.0))
    throw std::invalid_argument("critical pump requires delta < 0");
  if (!d.T_eq)
    throw std::invalid_argument("critical pump requires an equilibrium temperature");
  const Real rhs =
      (d.delta * d.delta + params.kappa * params.kappa) /
      (units::hbar * std::abs(d.delta));
  const Real shape_integral = pv_shape_integral(shape_at_Teq);
  if (!(shape_integral > 0.0))
    throw std::invalid_argument("critical pump: shape integral must be positive");
  return std::sqrt(*d.T_eq * rhs / shape_integral);
}

Real critical_pump(const ModelParams& params) {
  const DerivedParams d = validate_and_derive(params);
  if (!d.sqrtN_eta_c)
    throw std::invalid_argument(
        "self-consistent critical pump undefined (delta >= 0 or q >= 3)");
  return *d.sqrtN_eta_c;
}

bool reformulated_threshold_exceeded(const ModelParams& params) {
  // N |U0| V_opt > hbar kappa^2 with V_opt = hbar eta^2 / |U0|; the U0
  // magnitude cancels, leaving hbar N eta^2 > hbar kappa^2.
  return interaction_strength(params) > params.kappa * params.kappa;
}

std::optional<int> critical_particle_number(const ModelParams& params,
                                            int N_max) {
  if (!(params.eta > 0.0))
    throw std::invalid_argument("critical particle number requires eta > 0");
  auto margin = [&](int n) -> std::optional<Real> {
    ModelParams p = params;
    p.N = n;
    const DerivedParams d = validate_and_derive(p);
    if (!d.sqrtN_eta_c) return std::nullopt;
    return p.sqrtN_eta() - *d.sqrtN_eta_c;
  };
  auto critical = [&](int n) {
    const auto m = margin(n);
    return m && *m >= 0.0;
  };
  if (critical(1)) return 1;
  // Exponential bracket, then bisection; sqrt(N) eta grows with N while the
  // critical value varies only through the collective shift in delta.
  int lo = 1, hi = 2;
  while (hi <= N_max && !critical(hi)) {
    lo = hi;
    hi *= 2;
  }
  if (hi > N_max) return std::nullopt;
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (critical(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

GrowthRateResult growth_rate(const ModelParams& params,
                             const VelocityDistribution& F,
                             const GrowthRateOptions& opts) {
  const DerivedParams d = validate_and_derive(params);
  const Real kappa = params.kappa;
  const Real scale = kappa * kappa + d.delta * d.delta;
  const Real tol_D = opts.tol * scale;
  const Real s_max = opts.s_max_over_kappa * kappa;
  const Real v_max = opts.v_max_thermal * F.thermal_velocity();

  auto D = [&](Complex s) { return dispersion(s, F, params); };

  GrowthRateResult result;

  // Stationary branch first: D is real on the real axis for symmetric F and
  // crosses zero there when the homogeneous state destabilises.
  const Real D0 = dispersion_boundary(0.0, F, params).real();
  const Real Dmax = D(Complex(s_max, 0.0)).real();
  if (D0 < 0.0 && Dmax > 0.0) {
    Real lo = 0.0, hi = s_max;
    for (int it = 0; it < 200; ++it) {
      const Real mid = 0.5 * (lo + hi);
      const Real val = (mid == 0.0) ? D0 : D(Complex(mid, 0.0)).real();
      if (val < 0.0)
        lo = mid;
      else
        hi = mid;
      if (hi - lo < 1e-14 * kappa) break;
    }
    result.status = RootStatus::root_found;
    result.s = Complex(0.5 * (lo + hi), 0.0);
    return result;
  }
  if (std::abs(D0) <= tol_D) {
    // Marginal: the root sits at the origin within tolerance.
    result.status = RootStatus::root_found;
    result.s = Complex(0.0, 0.0);
    return result;
  }

  // Rectangle scan seeding damped Newton with a differenced derivative.
  struct Seed {
    Complex s;
    Real absD;
  };
  std::vector<Seed> seeds;
  for (int i = 1; i <= opts.grid_re; ++i) {
    const Real re = s_max * i / opts.grid_re;
    for (int j = 0; j < opts.grid_im; ++j) {
      const Real im = -v_max + 2.0 * v_max * j / (opts.grid_im - 1);
      const Complex s(re, im);
      seeds.push_back({s, std::abs(D(s))});
    }
  }
  std::sort(seeds.begin(), seeds.end(),
            [](const Seed& a, const Seed& b) { return a.absD < b.absD; });

  auto newton = [&](Complex s0) -> std::optional<Complex> {
    Complex s = s0;
    for (int it = 0; it < 60; ++it) {
      if (s.real() < 1e-12 * kappa) s = Complex(1e-12 * kappa, s.imag());
      const Complex f = D(s);
      if (std::abs(f) < tol_D) return s;
      const Real h = std::max(1e-7 * std::abs(s), 1e-9 * kappa);
      const Complex df =
          (s.real() - h > 0.0)
              ? (D(s + Complex(h, 0)) - D(s - Complex(h, 0))) / (2.0 * h)
              : (D(s + Complex(h, 0)) - f) / h;
      if (std::abs(df) == 0.0) return std::nullopt;
      Complex step = f / df;
      // Damp steps that would leave the search region.
      for (int cut = 0; cut < 8 && std::abs(step) > 0.5 * kappa; ++cut)
        step *= 0.5;
      s -= step;
      if (std::abs(s) > 10.0 * (s_max + v_max)) return std::nullopt;
    }
    return std::nullopt;
  };

  std::optional<Complex> best;
  const int n_try = std::min<std::size_t>(8, seeds.size());
  for (int i = 0; i < n_try; ++i) {
    const auto root = newton(seeds[i].s);
    if (root && root->real() > -1e-9 * kappa) {
      if (!best || root->real() > best->real()) best = root;
    }
  }
  if (best) {
    result.status = RootStatus::root_found;
    result.s = Complex(std::max(best->real(), 0.0), best->imag());
    return result;
  }

  // Winding number of D around the rectangle boundary distinguishes a
  // genuinely root-free region from a failed search.
  const Real re_lo = 1e-6 * kappa;
  std::vector<Complex> path;
  const int m = 64;
  for (int i = 0; i <= m; ++i)
    path.emplace_back(re_lo + (s_max - re_lo) * i / m, -v_max);
  for (int i = 1; i <= m; ++i)
    path.emplace_back(s_max, -v_max + 2.0 * v_max * i / m);
  for (int i = 1; i <= m; ++i)
    path.emplace_back(s_max - (s_max - re_lo) * i / m, v_max);
  for (int i = 1; i <= m; ++i)
    path.emplace_back(re_lo, v_max - 2.0 * v_max * i / m);
  Real winding = 0.0;
  Complex prev = D(path.front());
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Complex cur = D(path[i]);
    winding += std::arg(cur / prev);
    prev = cur;
  }
  winding /= 2.0 * pi;
  result.status =
      std::abs(winding) > 0.5 ? RootStatus::search_exhausted : RootStatus::no_root;
  return result;
}

}  // namespace cavkin
