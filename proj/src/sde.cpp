#include "cavkin/sde.hpp"

#include <cmath>

namespace cavkin {

namespace {

constexpr Real half_pi = 1.5707963267948966192313216916398;
constexpr Real two_pi = 2.0 * pi;

// Taylor kernels on [-pi/4, pi/4]; remainder below double rounding.
template <typename A>
auto sin_kernel(const A& r, const A& r2) {
  return r * (1.0 +
              r2 * (-1.0 / 6.0 +
                    r2 * (1.0 / 120.0 +
                          r2 * (-1.0 / 5040.0 +
                                r2 * (1.0 / 362880.0 +
                                      r2 * (-1.0 / 39916800.0 +
                                            r2 * (1.0 / 6227020800.0 +
                                                  r2 * (-1.0 / 1307674368000.0))))))));
}

template <typename A>
auto cos_kernel(const A& r2) {
  return 1.0 +
         r2 * (-0.5 +
               r2 * (1.0 / 24.0 +
                     r2 * (-1.0 / 720.0 +
                           r2 * (1.0 / 40320.0 +
                                 r2 * (-1.0 / 3628800.0 +
                                       r2 * (1.0 / 479001600.0 +
                                             r2 * (-1.0 / 87178291200.0 +
                                                   r2 * (1.0 / 20922789888000.0))))))));
}

inline void wrap_positions(ArrayX& x) {
  x -= two_pi * (x * (1.0 / two_pi)).floor();
}

}  // namespace

void sincos_wrapped(const ArrayX& x, ArrayX& s, ArrayX& c) {
  // Quadrant index q in {0..4}, residual r in [-pi/4, pi/4].
  ArrayX q = (x * (1.0 / half_pi) + 0.5).floor();
  ArrayX r = x - q * half_pi;
  ArrayX r2 = r.square();
  ArrayX sr = sin_kernel(r, r2);
  ArrayX cr = cos_kernel(r2);
  q = q - 4.0 * (q * 0.25).floor();  // mod 4
  s = (q < 0.5).select(sr, (q < 1.5).select(cr, (q < 2.5).select(-sr, -cr)));
  c = (q < 0.5).select(cr, (q < 1.5).select(-sr, (q < 2.5).select(-cr, sr)));
}

ArrayX force(const ArrayX& x, Complex alpha, const ModelParams& params) {
  // -(1/m)[hbar U0 |a|^2 k sin(2kx) + 2 hbar eta Re(a) k cos(kx)], m = 1/2.
  const Real n_photon = std::norm(alpha);
  const Real c1 = -2.0 * params.U0 * n_photon;      // times sin(2x)
  const Real c2 = -4.0 * params.eta * alpha.real(); // times cos(x)
  return c1 * (2.0 * x.sin() * x.cos()) + c2 * x.cos();
}

Real force(Real x, Complex alpha, const ModelParams& params) {
  const Real n_photon = std::norm(alpha);
  return -2.0 * params.U0 * n_photon * std::sin(2.0 * x) -
         4.0 * params.eta * alpha.real() * std::cos(x);
}

Complex field_drift(Complex alpha, const ArrayX& x, const ModelParams& params) {
  const Real S1 = x.sin().sum();
  const Real S2 = x.sin().square().sum();
  return (Complex(0.0, params.Delta_c - params.U0 * S2) - params.kappa) * alpha -
         Complex(0.0, params.eta) * S1;
}

SimState sample_initial(const ModelParams& params, Real T0, const RngStream& rng) {
  if (!(T0 > 0.0)) throw std::invalid_argument("initial temperature must be > 0");
  const Index n = params.N;
  SimState st;
  st.t = 0.0;
  st.x.resize(n);
  st.v.resize(n);
  const Real sigma_v = std::sqrt(2.0 * T0);  // m <v^2> = k_B T0, m = 1/2
  for (Index j = 0; j < n; ++j)
    st.x[j] = two_pi * rng.uniform01(static_cast<std::uint64_t>(j));
  for (Index j = 0; j < n; j += 2) {
    const auto z = rng.normal_pair(static_cast<std::uint64_t>(n + j / 2));
    st.v[j] = sigma_v * z.z1;
    if (j + 1 < n) st.v[j + 1] = sigma_v * z.z2;
  }
  st.alpha = Complex(0.0, 0.0);
  return st;
}

Integrator::Integrator(const ModelParams& params, const StepSettings& settings)
    : p_(params), set_(settings) {
  if (!(set_.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  exp_kdt_ = std::exp(-p_.kappa * set_.dt);
  noise_std_ = 0.5 * std::sqrt(1.0 - exp_kdt_ * exp_kdt_);
  inv_sqrt_dt_ = 1.0 / std::sqrt(set_.dt);
  s_.resize(p_.N);
  c_.resize(p_.N);
}

void Integrator::prime(const SimState& state) {
  sincos_wrapped(state.x, s_, c_);
}

void Integrator::step(SimState& state, const NoisePair& noise) {
  const Real dt = set_.dt;
  const Real half_dt = 0.5 * dt;

  // half kick at the current positions and field
  {
    const Real c1 = -2.0 * p_.U0 * std::norm(state.alpha);
    const Real c2 = -4.0 * p_.eta * state.alpha.real();
    state.v += half_dt * (c1 * (2.0 * s_ * c_) + c2 * c_);
  }

  // drift and wrap
  state.x += dt * state.v;
  wrap_positions(state.x);
  sincos_wrapped(state.x, s_, c_);

  // field: exact exponential update with coefficients frozen at the new
  // positions; noise enters with its exactly integrated variance
  {
    const Real S1 = s_.sum();
    const Real S2 = s_.square().sum();
    const Real rot = p_.Delta_c - p_.U0 * S2;
    const Complex lambda(-p_.kappa, rot);
    const Complex E = exp_kdt_ * Complex(std::cos(rot * dt), std::sin(rot * dt));
    const Complex pump(0.0, -p_.eta * S1);
    state.alpha = E * state.alpha + (E - 1.0) / lambda * pump;
    if (set_.field_noise) {
      state.alpha += noise_std_ * Complex(noise.dW1 * inv_sqrt_dt_,
                                          noise.dW2 * inv_sqrt_dt_);
    }
  }

  // half kick with the updated field
  {
    const Real c1 = -2.0 * p_.U0 * std::norm(state.alpha);
    const Real c2 = -4.0 * p_.eta * state.alpha.real();
    state.v += half_dt * (c1 * (2.0 * s_ * c_) + c2 * c_);
  }

  state.t += dt;

  const Real guard_alpha =
      set_.guard_alpha_factor * std::sqrt(static_cast<Real>(p_.N));
  if (!(std::abs(state.alpha) <= guard_alpha) ||
      !(state.v.abs().maxCoeff() <= set_.guard_v))
    throw DivergenceError(state.t);
}

SimState step(const SimState& state, Real dt, const NoisePair& noise,
              const ModelParams& params, const StepSettings& settings) {
  StepSettings st = settings;
  st.dt = dt;
  Integrator itg(params, st);
  SimState next = state;
  itg.prime(next);
  itg.step(next, noise);
  return next;
}

Real stability_dt_bound(const ModelParams& params) {
  const DerivedParams d = validate_and_derive(params);
  return 0.2 / std::sqrt(params.kappa * params.kappa + d.delta * d.delta);
}

Real default_dt(const ModelParams& params, Real guard_v) {
  const DerivedParams d = validate_and_derive(params);
  const Real stiff = 0.1 / std::sqrt(params.kappa * params.kappa + d.delta * d.delta);
  const Real kinematic = 0.05 / (units::k_wave * guard_v);
  return std::min(stiff, kinematic);
}

}  // namespace cavkin
