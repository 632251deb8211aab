#include <doctest.h>

#include <cmath>

#include "cavkin/kinetic.hpp"

using namespace cavkin;

namespace {

// delta = -2.5, kappa = 100, sqrt(N) eta = 1800 configuration
ModelParams qgauss_config() {
  ModelParams p;
  p.N = 500;
  p.U0 = -0.1 / 500.0;
  p.kappa = 100.0;
  p.Delta_c = -2.55;
  p.eta = 1800.0 / std::sqrt(500.0);
  return p;
}

// delta = -kappa family
ModelParams resonant_config(Real sqrtN_eta, int N = 200) {
  ModelParams p;
  p.N = N;
  p.U0 = -1.0 / N;
  p.kappa = 100.0;
  p.Delta_c = 0.5 * p.NU0() - p.kappa;
  p.eta = sqrtN_eta / std::sqrt(static_cast<Real>(N));
  return p;
}

}  // namespace

TEST_CASE("pv shape integral: closed-form families") {
  CHECK(pv_shape_integral(VelocityDistribution::gaussian(3.0)) ==
        doctest::Approx(1.0).epsilon(1e-8));
  for (Real q : {1.1, 1.4, 2.0, 2.5}) {
    CAPTURE(q);
    CHECK(pv_shape_integral(VelocityDistribution::q_gaussian(q, 2.0)) ==
          doctest::Approx(0.5 * (3.0 - q)).epsilon(1e-6));
  }
  CHECK(pv_shape_integral(VelocityDistribution::lorentzian(1.0)) ==
        doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("pv shape integral is T-independent") {
  CHECK(pv_shape_integral(VelocityDistribution::q_gaussian(1.4, 0.3)) ==
        doctest::Approx(
            pv_shape_integral(VelocityDistribution::q_gaussian(1.4, 30.0)))
            .epsilon(1e-8));
}

TEST_CASE("dispersion reduces to the free form at zero pump") {
  ModelParams p = qgauss_config();
  p.eta = 0.0;
  const VelocityDistribution F = VelocityDistribution::gaussian(50.0);
  const DerivedParams d = validate_and_derive(p);

  const Complex D0 = dispersion(Complex(0.0, 0.0), F, p);
  CHECK(D0.real() == doctest::Approx(p.kappa * p.kappa + d.delta * d.delta)
                         .epsilon(1e-10));
  CHECK(std::abs(D0.imag()) < 1e-8);

  const Complex s(3.0, -7.0);
  CHECK(std::abs(dispersion(s, F, p) - dispersion_free(s, p)) < 1e-8);
}

TEST_CASE("dispersion rejects the left half plane") {
  const VelocityDistribution F = VelocityDistribution::gaussian(50.0);
  CHECK_THROWS_AS(dispersion(Complex(-1.0, 0.0), F, qgauss_config()),
                  std::invalid_argument);
}

TEST_CASE("Landau boundary value: quadrature agrees with the closed form") {
  const ModelParams p = resonant_config(80.0);
  const VelocityDistribution F = VelocityDistribution::gaussian(50.0);
  const Real vT = F.thermal_velocity();
  for (Real w : {0.0, 0.31 * vT, 1.7 * vT, 5.0 * vT, -2.2 * vT}) {
    CAPTURE(w / vT);
    const Complex a = dispersion_boundary(w, F, p, DispersionMethod::quadrature);
    const Complex b = dispersion_boundary(w, F, p, DispersionMethod::closed_form);
    CHECK(std::abs(a - b) / std::abs(b) < 1e-8);
  }
}

TEST_CASE("dispersion respects conjugation for symmetric F") {
  const ModelParams p = resonant_config(120.0);
  const VelocityDistribution F = VelocityDistribution::q_gaussian(1.01, 50.0);
  const Complex s(12.0, 31.0);
  const Complex a = dispersion(s, F, p);
  const Complex b = dispersion(std::conj(s), F, p);
  CHECK(std::abs(b - std::conj(a)) < 1e-9 * std::abs(a));
}

TEST_CASE("instability criterion: sub-threshold q-Gaussian is stable") {
  const ModelParams p = qgauss_config();
  const DerivedParams d = validate_and_derive(p);
  REQUIRE(d.T_eq.has_value());
  const VelocityDistribution F = VelocityDistribution::q_gaussian(1.4, *d.T_eq);
  const StabilityResult st = is_unstable(p, F);
  CHECK_FALSE(st.unstable);
  // margin = (sqrtN eta / sqrtN eta_c)^2 - 1 for the self-consistent family
  const Real expected = std::pow(1800.0 / *d.sqrtN_eta_c, 2) - 1.0;
  CHECK(st.margin == doctest::Approx(expected).epsilon(1e-4));
}

TEST_CASE("instability criterion: zero pump is always stable") {
  ModelParams p = qgauss_config();
  p.eta = 0.0;
  const StabilityResult st =
      is_unstable(p, VelocityDistribution::gaussian(10.0));
  CHECK_FALSE(st.unstable);
  CHECK(st.margin == doctest::Approx(-1.0));
}

TEST_CASE("instability criterion: twice-critical Gaussian is unstable") {
  // Gaussian at T_eq for delta = -kappa destabilises at sqrt(N) eta = kappa
  const ModelParams p = resonant_config(200.0);
  const StabilityResult st = is_unstable(p, VelocityDistribution::gaussian(50.0));
  CHECK(st.unstable);
  CHECK(st.margin == doctest::Approx(3.0).epsilon(1e-4));  // (2)^2 - 1
}

TEST_CASE("instability criterion rejects heating-side detuning") {
  ModelParams p = qgauss_config();
  p.Delta_c = 3.0;
  CHECK_THROWS_AS(is_unstable(p, VelocityDistribution::gaussian(10.0)),
                  std::invalid_argument);
}

TEST_CASE("grid distributions use the primitive criterion") {
  const ModelParams p = qgauss_config();
  const DerivedParams d = validate_and_derive(p);
  const VelocityDistribution ref =
      VelocityDistribution::q_gaussian(1.4, *d.T_eq);
  const Index n = 4001;
  const Real vmax = ref.tail_cutoff(1e-9);
  ArrayX v(n), F(n);
  for (Index i = 0; i < n; ++i) {
    v[i] = -vmax + 2.0 * vmax * static_cast<Real>(i) / (n - 1.0);
    F[i] = ref.density(v[i]);
  }
  F /= (F.sum() - 0.5 * (F[0] + F[n - 1])) * (v[1] - v[0]);
  const VelocityDistribution G = VelocityDistribution::from_grid(v, F);
  const StabilityResult a = is_unstable(p, ref);
  const StabilityResult b = is_unstable(p, G);
  CHECK(a.unstable == b.unstable);
  CHECK(b.margin == doctest::Approx(a.margin).epsilon(0.02));
}

TEST_CASE("critical pump closed forms") {
  // q -> 1 and delta = -kappa gives sqrt(N) eta_c -> kappa
  CHECK(critical_pump_qgaussian(-100.0, 100.0, 1.0) ==
        doctest::Approx(100.0).epsilon(1e-12));

  const ModelParams p5 = resonant_config(80.0, 100);
  const DerivedParams d5 = validate_and_derive(p5);
  REQUIRE(d5.sqrtN_eta_c.has_value());
  CHECK(*d5.sqrtN_eta_c == doctest::Approx(100.0 * std::sqrt(2.0 / 1.99))
                               .epsilon(1e-10));
  // the 0.8 sqrt(N) eta_c = 80 convention holds to half a percent
  CHECK(0.8 * *d5.sqrtN_eta_c == doctest::Approx(80.0).epsilon(5e-3));

  const ModelParams p2 = qgauss_config();
  const DerivedParams d2 = validate_and_derive(p2);
  CHECK(*d2.sqrtN_eta_c ==
        doctest::Approx(2001.25 * std::sqrt(1.25)).epsilon(1e-10));
}

TEST_CASE("critical pump via the generic shape route matches the closed form") {
  const ModelParams p = qgauss_config();
  const DerivedParams d = validate_and_derive(p);
  const VelocityDistribution shape =
      VelocityDistribution::q_gaussian(*d.q, *d.T_eq);
  CHECK(critical_pump(p, shape) == doctest::Approx(*d.sqrtN_eta_c).epsilon(1e-5));

  // Gaussian shape at T_eq for delta = -kappa: sqrt(T_eq (kappa^2+delta^2)/|delta|)
  const ModelParams pr = resonant_config(80.0);
  CHECK(critical_pump(pr, VelocityDistribution::gaussian(50.0)) ==
        doctest::Approx(100.0).epsilon(1e-6));
}

TEST_CASE("reformulated threshold check") {
  CHECK_FALSE(reformulated_threshold_exceeded(resonant_config(99.0)));
  CHECK(reformulated_threshold_exceeded(resonant_config(101.0)));
}

TEST_CASE("critical particle number") {
  ModelParams p;
  p.N = 1;
  p.U0 = -1e-6;
  p.kappa = 100.0;
  p.Delta_c = -100.0;
  p.eta = 28.0;
  const auto nc = critical_particle_number(p);
  REQUIRE(nc.has_value());
  CHECK(*nc == 13);

  p.eta = 56.0;  // doubling eta quarters the critical number
  const auto nc2 = critical_particle_number(p);
  REQUIRE(nc2.has_value());
  CHECK(*nc2 == 4);

  // eta exactly critical for a single particle
  ModelParams one = p;
  one.N = 1;
  const DerivedParams d1 = validate_and_derive(one);
  one.eta = *d1.sqrtN_eta_c;
  CHECK(*critical_particle_number(one) == 1);

  // hopeless pump never becomes critical
  p.eta = 1e-9;
  CHECK_FALSE(critical_particle_number(p, 1 << 16).has_value());
}

TEST_CASE("growth rate: stable, marginal and unstable Gaussians") {
  const VelocityDistribution F = VelocityDistribution::gaussian(50.0);

  const GrowthRateResult below = growth_rate(resonant_config(50.0), F);
  CHECK(below.status == RootStatus::no_root);

  const GrowthRateResult marginal = growth_rate(resonant_config(100.0), F);
  REQUIRE(marginal.status == RootStatus::root_found);
  CHECK(std::abs(marginal.s) < 1e-6 * 100.0);

  const GrowthRateResult above = growth_rate(resonant_config(200.0), F);
  REQUIRE(above.status == RootStatus::root_found);
  CHECK(above.s.real() > 0.0);
  CHECK(std::abs(above.s.imag()) < 1e-8 * 100.0);

  // growth rate and threshold margin agree in sign
  CHECK(is_unstable(resonant_config(200.0), F).unstable);
  CHECK_FALSE(is_unstable(resonant_config(50.0), F).unstable);
}

TEST_CASE("root of D actually zeroes D") {
  const ModelParams p = resonant_config(170.0);
  const VelocityDistribution F = VelocityDistribution::gaussian(50.0);
  const GrowthRateResult r = growth_rate(p, F);
  REQUIRE(r.status == RootStatus::root_found);
  const Complex val = dispersion(r.s, F, p);
  CHECK(std::abs(val) < 1e-6 * (p.kappa * p.kappa));
}

TEST_CASE("marginal-stability boundary matches critical_pump by bisection") {
  const VelocityDistribution F = VelocityDistribution::gaussian(50.0);
  Real lo = 0.9, hi = 1.1;  // in units of the critical pump
  const Real etac = critical_pump(resonant_config(100.0),
                                  VelocityDistribution::gaussian(50.0));
  for (int it = 0; it < 14; ++it) {
    const Real mid = 0.5 * (lo + hi);
    const GrowthRateResult r = growth_rate(resonant_config(mid * etac), F);
    const bool has_positive_root =
        r.status == RootStatus::root_found && r.s.real() > 1e-7 * 100.0;
    if (has_positive_root)
      hi = mid;
    else
      lo = mid;
  }
  CHECK(0.5 * (lo + hi) == doctest::Approx(1.0).epsilon(1e-4));
}
