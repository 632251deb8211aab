#include "cavkin/fpe.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cavkin/quadrature.hpp"

namespace cavkin {

namespace {

struct CoeffContext {
  Real delta;
  Real kappa;
  Real neta2;    // N eta^2
  Real eta2;     // per-particle eta^2
  CoefficientMode mode;
};

CoeffContext make_context(const ModelParams& p, CoefficientMode mode) {
  const DerivedParams d = validate_and_derive(p);
  return {d.delta, p.kappa, static_cast<Real>(p.N) * p.eta * p.eta,
          p.eta * p.eta, mode};
}

Real abs_D_squared(Real v, const VelocityDistribution& F, const CoeffContext& c) {
  if (c.mode == CoefficientMode::far_below) {
    const Real m = c.kappa * c.kappa + c.delta * c.delta - v * v;
    return m * m + 4.0 * c.kappa * c.kappa * v * v;
  }
  return std::norm(dispersion_boundary_value(v, F, c.delta, c.kappa, c.neta2));
}

FpeCoefficients coefficients_at(Real v, const VelocityDistribution& F,
                                const CoeffContext& c) {
  // Recoil units: hbar = k = 1, m = 1/2.
  const Real D2 = abs_D_squared(v, F, c);
  FpeCoefficients out;
  out.A = 4.0 * c.delta * c.kappa * c.eta2 * v / D2;
  out.B = 2.0 * c.kappa * c.eta2 *
          (c.kappa * c.kappa + c.delta * c.delta + v * v) / D2;
  return out;
}

// dT/dt for the Gaussian closure at temperature T.
Real closure_rate(Real T, const CoeffContext& c) {
  const VelocityDistribution G = VelocityDistribution::gaussian(T);
  const Real vT = G.thermal_velocity();
  auto integrand = [&](Real v) -> Real {
    const FpeCoefficients ab = coefficients_at(v, G, c);
    const Real Fv = G.density(v);
    const Real dFv = -2.0 * v / (vT * vT) * Fv;
    return v * (-ab.A * Fv + ab.B * dFv);
  };
  // Even integrand: integrate the half line and double; -2m prefactor.
  const Real vmax = 10.0 * vT;
  const Real half = integrate(integrand, 0.0, 0.5 * vmax, 1e-13, 1e-9) +
                    integrate(integrand, 0.5 * vmax, vmax, 1e-13, 1e-9);
  return -4.0 * units::mass * half;
}

}  // namespace

FpeCoefficients fpe_coefficients(Real v, const VelocityDistribution& F,
                                 const ModelParams& params, CoefficientMode mode) {
  return coefficients_at(v, F, make_context(params, mode));
}

Real drift_diffusion_ratio(Real v, const ModelParams& params) {
  const DerivedParams d = validate_and_derive(params);
  return 2.0 * d.delta * v /
         (params.kappa * params.kappa + d.delta * d.delta + v * v);
}

Real temperature_rate(const ModelParams& params, Real T, CoefficientMode mode) {
  return closure_rate(T, make_context(params, mode));
}

Real temperature_fixed_point(const ModelParams& params, Real T_lo, Real T_hi,
                             CoefficientMode mode) {
  const CoeffContext c = make_context(params, mode);
  Real f_lo = closure_rate(T_lo, c);
  Real f_hi = closure_rate(T_hi, c);
  if (f_lo * f_hi > 0.0)
    throw std::invalid_argument("temperature_fixed_point: no sign change in bracket");
  for (int it = 0; it < 100; ++it) {
    const Real mid = 0.5 * (T_lo + T_hi);
    const Real f_mid = closure_rate(mid, c);
    if (f_lo * f_mid <= 0.0) {
      T_hi = mid;
      f_hi = f_mid;
    } else {
      T_lo = mid;
      f_lo = f_mid;
    }
    if (T_hi - T_lo < 1e-10 * T_hi) break;
  }
  return 0.5 * (T_lo + T_hi);
}

TemperatureEvolution evolve_temperature(const ModelParams& params, Real T0,
                                        Real t_final,
                                        const TemperatureOptions& opts) {
  if (!(T0 > 0.0)) throw std::invalid_argument("T0 must be positive");
  if (!(t_final > 0.0)) throw std::invalid_argument("t_final must be positive");
  const CoeffContext c = make_context(params, opts.mode);

  // Instability threshold of the momentary Gaussian; its shape integral is
  // evaluated once by quadrature.
  Real shape_integral = 0.0;
  Real rhs_threshold = 0.0;
  const bool check = opts.check_instability && c.delta < 0.0;
  if (check) {
    shape_integral = pv_shape_integral(VelocityDistribution::gaussian(1.0));
    rhs_threshold = (c.delta * c.delta + c.kappa * c.kappa) /
                    (units::hbar * std::abs(c.delta));
  }
  auto unstable_at = [&](Real T) {
    return check && c.neta2 / T * shape_integral > rhs_threshold;
  };

  TemperatureEvolution out;
  const int n_out = std::max(opts.n_output, 2);
  out.t.resize(n_out);
  out.T_kin.resize(n_out);
  out.t[0] = 0.0;
  out.T_kin[0] = T0;

  if (unstable_at(T0)) {
    out.instability_reached = true;
    out.t_instability = 0.0;
    out.t.conservativeResize(1);
    out.T_kin.conservativeResize(1);
    return out;
  }

  // Dormand-Prince 5(4) with standard step control, integrating segment by
  // segment to each output time.
  auto rhs = [&](Real T) { return closure_rate(std::max(T, 1e-12), c); };
  Real T = T0;
  Real h = t_final / (100.0 * n_out);
  Index row = 1;
  bool halted = false;
  for (int seg = 1; seg < n_out && !halted; ++seg) {
    const Real t_target = t_final * seg / (n_out - 1.0);
    Real t = t_final * (seg - 1) / (n_out - 1.0);
    while (t < t_target) {
      h = std::min(h, t_target - t);
      const Real k1 = rhs(T);
      const Real k2 = rhs(T + h * (k1 / 5.0));
      const Real k3 = rhs(T + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
      const Real k4 =
          rhs(T + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
      const Real k5 = rhs(T + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                                   64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
      const Real k6 = rhs(T + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                                   46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                                   5103.0 / 18656.0 * k5));
      const Real y5 = T + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 +
                               125.0 / 192.0 * k4 - 2187.0 / 6784.0 * k5 +
                               11.0 / 84.0 * k6);
      const Real k7 = rhs(y5);
      const Real y4 = T + h * (5179.0 / 57600.0 * k1 + 7571.0 / 16695.0 * k3 +
                               393.0 / 640.0 * k4 - 92097.0 / 339200.0 * k5 +
                               187.0 / 2100.0 * k6 + 1.0 / 40.0 * k7);
      const Real err = std::abs(y5 - y4);
      const Real tol = opts.rtol * std::max(std::abs(T), std::abs(y5)) + 1e-12;
      if (err <= tol) {
        t += h;
        T = y5;
        if (unstable_at(T)) {
          out.instability_reached = true;
          out.t_instability = t;
          halted = true;
          break;
        }
      }
      const Real fac = 0.9 * std::pow(tol / std::max(err, 1e-300), 0.2);
      h *= std::clamp(fac, 0.2, 5.0);
      h = std::max(h, 1e-12 * t_final);
    }
    out.t[row] = t_target;
    out.T_kin[row] = T;
    ++row;
  }
  if (row < n_out) {
    out.t.conservativeResize(row);
    out.T_kin.conservativeResize(row);
  }
  return out;
}

ArrayX FpeGrid::centers() const {
  ArrayX v(n_points);
  const Real h = dv();
  for (Index i = 0; i < n_points; ++i)
    v[i] = -v_max + (static_cast<Real>(i) + 0.5) * h;
  return v;
}

FpeGrid FpeGrid::for_distribution(const VelocityDistribution& F,
                                  Real tail_mass_tol, Index n_points) {
  FpeGrid g;
  g.v_max = std::max(8.0 * F.thermal_velocity(), F.tail_cutoff(tail_mass_tol));
  g.n_points = n_points;
  return g;
}

ArrayX project_to_grid(const VelocityDistribution& F, const FpeGrid& grid) {
  const ArrayX v = grid.centers();
  ArrayX out(v.size());
  for (Index i = 0; i < v.size(); ++i) out[i] = F.density(v[i]);
  out = out.cwiseMax(0.0);
  const Real mass = out.sum() * grid.dv();
  if (!(mass > 0.0)) throw std::invalid_argument("projection has zero mass");
  return out / mass;
}

namespace {

// Exponential flux weight for J = A[(1-lambda) F_right + lambda F_left]
// - B (F_right - F_left)/dv: lambda(w) = 1 + 1/(e^w - 1) - 1/w with
// w = A dv / B makes the discrete stationary ratio exactly e^w.
Real cc_lambda(Real w) {
  if (std::abs(w) < 1e-4) return 0.5 + w / 12.0 - w * w * w / 720.0;
  return 1.0 + 1.0 / std::expm1(w) - 1.0 / w;
}

struct FaceCoeffs {
  ArrayX P;  // flux contribution of the left cell, >= 0
  ArrayX Q;  // flux contribution of the right cell, >= 0
};

// J_f = P_f F_left - Q_f F_right at every interior face.
FaceCoeffs face_coefficients(const ArrayX& centers, Real dv,
                             const VelocityDistribution& F_frozen,
                             const CoeffContext& c) {
  const Index n = centers.size();
  FaceCoeffs fc;
  fc.P.setZero(n + 1);
  fc.Q.setZero(n + 1);
  for (Index f = 1; f < n; ++f) {
    const Real vf = 0.5 * (centers[f - 1] + centers[f]);
    const FpeCoefficients ab = coefficients_at(vf, F_frozen, c);
    const Real w = ab.A * dv / ab.B;
    const Real lam = cc_lambda(w);
    fc.P[f] = ab.A * lam + ab.B / dv;
    fc.Q[f] = ab.B / dv - ab.A * (1.0 - lam);
  }
  return fc;
}

// Backward-Euler step (I + dt/dv * K) F_new = F_old, tridiagonal Thomas solve.
void implicit_step(ArrayX& F, const FaceCoeffs& fc, Real dt, Real dv) {
  const Index n = F.size();
  const Real r = dt / dv;
  ArrayX a(n), b(n), cc(n);
  for (Index i = 0; i < n; ++i) {
    a[i] = (i > 0) ? -r * fc.P[i] : 0.0;
    cc[i] = (i + 1 < n) ? -r * fc.Q[i + 1] : 0.0;
    b[i] = 1.0 + r * (fc.Q[i] + fc.P[i + 1]);
  }
  // Thomas algorithm
  ArrayX cp(n), dp(n);
  cp[0] = cc[0] / b[0];
  dp[0] = F[0] / b[0];
  for (Index i = 1; i < n; ++i) {
    const Real m = b[i] - a[i] * cp[i - 1];
    cp[i] = cc[i] / m;
    dp[i] = (F[i] - a[i] * dp[i - 1]) / m;
  }
  F[n - 1] = dp[n - 1];
  for (Index i = n - 2; i >= 0; --i) F[i] = dp[i] - cp[i] * F[i + 1];
}

}  // namespace

DistributionEvolution evolve_distribution(const ModelParams& params,
                                          const ArrayX& F0, const FpeGrid& grid,
                                          Real t_final,
                                          const DistributionOptions& opts) {
  const CoeffContext ctx = make_context(params, opts.mode);
  const ArrayX v = grid.centers();
  const Real dv = grid.dv();
  if (F0.size() != v.size())
    throw std::invalid_argument("initial distribution does not match the grid");
  if ((F0 < 0.0).any())
    throw std::invalid_argument("initial distribution must be nonnegative");
  const Real mass0 = F0.sum() * dv;
  if (std::abs(mass0 - 1.0) > 1e-6)
    throw std::invalid_argument("initial distribution must have unit mass");

  DistributionEvolution out;
  out.v = v;
  ArrayX F = F0 / mass0;

  Real dt = opts.macro_dt > 0.0 ? opts.macro_dt : 0.5 / params.kappa;
  Real t = 0.0;
  std::vector<Real> ts, Ts;
  ts.push_back(0.0);
  Ts.push_back(units::mass * (F * v.square()).sum() * dv);

  auto snap_it = opts.snapshot_times.begin();
  const auto take_snapshots_up_to = [&](Real time) {
    while (snap_it != opts.snapshot_times.end() && *snap_it <= time + 1e-12) {
      out.snapshots.emplace_back(*snap_it, F);
      ++snap_it;
    }
  };

  while (t < t_final * (1.0 - 1e-12)) {
    dt = std::min(dt, t_final - t);
    // Freeze the current distribution for the coefficient refresh. The
    // far-below mode has no functional dependence on F, so the projection
    // is skipped there.
    FaceCoeffs fc;
    if (ctx.mode == CoefficientMode::far_below) {
      static const VelocityDistribution dummy = VelocityDistribution::gaussian(1.0);
      fc = face_coefficients(v, dv, dummy, ctx);
    } else {
      const VelocityDistribution frozen = VelocityDistribution::from_grid(v, F);
      fc = face_coefficients(v, dv, frozen, ctx);
    }
    implicit_step(F, fc, dt, dv);
    t += dt;

    const Real mass = F.sum() * dv;
    out.mass_error = std::max(out.mass_error, std::abs(mass - 1.0));
    if (std::abs(mass - 1.0) > opts.mass_tol)
      throw std::runtime_error("mass drift beyond tolerance in grid evolution");
    if ((F < -1e-10).any())
      throw std::runtime_error("positivity violation in grid evolution");
    F = F.cwiseMax(0.0);

    ts.push_back(t);
    Ts.push_back(units::mass * (F * v.square()).sum() * dv);
    take_snapshots_up_to(t);
    dt = std::min(dt * opts.dt_growth, opts.dt_max);
  }

  out.F_final = F;
  out.t_series = Eigen::Map<const ArrayX>(ts.data(), static_cast<Index>(ts.size()));
  out.T_kin_series = Eigen::Map<const ArrayX>(Ts.data(), static_cast<Index>(Ts.size()));
  return out;
}

Real stationarity_residual(const ModelParams& params, const ArrayX& F,
                           const FpeGrid& grid, CoefficientMode mode) {
  const CoeffContext ctx = make_context(params, mode);
  const ArrayX v = grid.centers();
  const Real dv = grid.dv();
  VelocityDistribution frozen =
      (mode == CoefficientMode::far_below) ? VelocityDistribution::gaussian(1.0)
                                           : VelocityDistribution::from_grid(v, F);
  const FaceCoeffs fc = face_coefficients(v, dv, frozen, ctx);
  Real num = 0.0, den = 0.0;
  for (Index f = 1; f < v.size(); ++f) {
    const Real in = fc.P[f] * F[f - 1];
    const Real outp = fc.Q[f] * F[f];
    num += std::abs(in - outp) * dv;
    den += (std::abs(in) + std::abs(outp)) * dv;
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace cavkin
