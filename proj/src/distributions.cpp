#include "cavkin/distributions.hpp"

#include <cmath>
#include <stdexcept>

#include "cavkin/quadrature.hpp"
#include "cavkin/rng.hpp"

namespace cavkin {

namespace {

const Real sqrt_pi = std::sqrt(pi);

// log of Gamma(a) / Gamma(a - 1/2), stable for large a.
Real log_gamma_ratio_half(Real a) {
  if (a < 150.0) return std::lgamma(a) - std::lgamma(a - 0.5);
  // Gamma(z + 1/2)/Gamma(z) = sqrt(z) (1 - 1/(8z) + 1/(128 z^2) + ...)
  const Real z = a - 0.5;
  return 0.5 * std::log(z) + std::log1p(-1.0 / (8.0 * z) + 1.0 / (128.0 * z * z));
}

// Normalisation of the shape (1 + (q-1) xi^2)^(-1/(q-1)) over xi.
Real q_shape_norm(Real q) {
  const Real a = 1.0 / (q - 1.0);
  // integral = sqrt(pi / (q-1)) Gamma(a - 1/2) / Gamma(a)
  const Real log_integral =
      0.5 * std::log(pi / (q - 1.0)) - log_gamma_ratio_half(a);
  return std::exp(-log_integral);  // C_q = 1 / integral
}

void check_q(Real q) {
  if (!(q > 1.0 && q < 3.0))
    throw std::invalid_argument("q-Gaussian index must satisfy 1 < q < 3");
}

}  // namespace

Real q_gaussian_density(Real v, Real q, Real T) {
  check_q(q);
  if (!(T > 0.0)) throw std::invalid_argument("temperature must be positive");
  const Real vT = cavkin::thermal_velocity(T);
  const Real xi = v / vT;
  const Real a = 1.0 / (q - 1.0);
  return q_shape_norm(q) / vT * std::pow(1.0 + (q - 1.0) * xi * xi, -a);
}

Real q_gaussian_log_density(Real v, Real q, Real T) {
  check_q(q);
  if (!(T > 0.0)) throw std::invalid_argument("temperature must be positive");
  const Real vT = cavkin::thermal_velocity(T);
  const Real a = q - 1.0;
  const Real xi2 = v * v / (vT * vT);
  const Real log_cq =
      log_gamma_ratio_half(1.0 / a) - 0.5 * std::log(pi / a);
  return log_cq - std::log(vT) - std::log1p(a * xi2) / a;
}

std::optional<Real> q_gaussian_kinetic_temperature(Real q, Real T) {
  check_q(q);
  if (q >= 5.0 / 3.0) return std::nullopt;
  return 2.0 * T / (5.0 - 3.0 * q);
}

ArrayX sample_q_gaussian(Index n, Real q, Real T, std::uint64_t seed,
                         std::uint64_t stream_index) {
  check_q(q);
  const Real vT = cavkin::thermal_velocity(T);
  // Student-t with nu = (3-q)/(q-1) degrees of freedom, scaled by
  // v_T / sqrt(3 - q); Bailey's polar-free form from two uniforms.
  const Real nu = (3.0 - q) / (q - 1.0);
  ArrayX out(n);
  RngStream rng(seed, Stream::sampling, stream_index);
  for (Index i = 0; i < n; ++i) {
    const Real u =
        std::max(rng.uniform01(2 * static_cast<std::uint64_t>(i)), 1e-300);
    const Real w = rng.uniform01(2 * static_cast<std::uint64_t>(i) + 1);
    const Real t =
        std::sqrt(nu * (std::pow(u, -2.0 / nu) - 1.0)) * std::cos(2.0 * pi * w);
    out[i] = vT / std::sqrt(3.0 - q) * t;
  }
  return out;
}

VelocityDistribution VelocityDistribution::gaussian(Real T) {
  if (!(T > 0.0)) throw std::invalid_argument("temperature must be positive");
  VelocityDistribution d;
  d.family_ = DistFamily::gaussian;
  d.T_ = T;
  d.q_ = 1.0;
  d.vT_ = cavkin::thermal_velocity(T);
  return d;
}

VelocityDistribution VelocityDistribution::q_gaussian(Real q, Real T) {
  check_q(q);
  if (!(T > 0.0)) throw std::invalid_argument("temperature must be positive");
  VelocityDistribution d;
  d.family_ = DistFamily::q_gaussian;
  d.T_ = T;
  d.q_ = q;
  d.vT_ = cavkin::thermal_velocity(T);
  return d;
}

VelocityDistribution VelocityDistribution::lorentzian(Real T) {
  VelocityDistribution d = q_gaussian(2.0, T);
  d.family_ = DistFamily::lorentzian;
  return d;
}

VelocityDistribution VelocityDistribution::from_grid(const ArrayX& v,
                                                     const ArrayX& F) {
  const Index n = v.size();
  if (n < 9 || F.size() != n)
    throw std::invalid_argument("grid distribution needs matching arrays, n >= 9");
  const Real dv = v[1] - v[0];
  if (!(dv > 0.0)) throw std::invalid_argument("grid must be increasing");
  for (Index i = 1; i < n; ++i)
    if (std::abs((v[i] - v[i - 1]) - dv) > 1e-9 * dv)
      throw std::invalid_argument("grid must be uniform");
  if (std::abs(v[0] + v[n - 1]) > 1e-9 * dv * n)
    throw std::invalid_argument("grid must be symmetric about v = 0");
  if ((F < -1e-12 * F.maxCoeff()).any())
    throw std::invalid_argument("grid density must be nonnegative");

  const Real mass = (F.sum() - 0.5 * (F[0] + F[n - 1])) * dv;
  if (std::abs(mass - 1.0) > 1e-8)
    throw std::invalid_argument("grid density must be normalised to 1 within 1e-8");
  // Symmetric distributions only; the kinetic equations are stated for them.
  const Real scale = F.maxCoeff();
  for (Index i = 0; i < n / 2; ++i)
    if (std::abs(F[i] - F[n - 1 - i]) > 1e-6 * scale)
      throw std::invalid_argument("grid density must be symmetric in v");

  VelocityDistribution d;
  d.family_ = DistFamily::grid;
  d.grid_v_ = v;
  d.grid_F_ = F.cwiseMax(0.0);
  d.grid_dv_ = dv;

  const Real vsq = (d.grid_F_ * v.square()).sum() * dv;
  d.T_ = units::mass * vsq;  // m<v^2>, finite on the truncated grid
  d.vT_ = cavkin::thermal_velocity(std::max(d.T_, 1e-12));

  // Natural cubic spline second derivatives (Thomas algorithm).
  ArrayX d2 = ArrayX::Zero(n), u = ArrayX::Zero(n);
  for (Index i = 1; i < n - 1; ++i) {
    const Real sig = 0.5;
    const Real p = sig * d2[i - 1] + 2.0;
    d2[i] = (sig - 1.0) / p;
    const Real rhs = (F[i + 1] - 2.0 * F[i] + F[i - 1]) * 3.0 / (dv * dv);
    u[i] = (rhs - sig * u[i - 1]) / p;
  }
  for (Index i = n - 2; i >= 0; --i) d2[i] = d2[i] * d2[i + 1] + u[i];
  d.spline_d2_ = d2;

  // Algebraic tail F ~ amp * v^(-p) matched to the outer decade of the grid.
  d.tail_edge_ = v[n - 1];
  const Index i_hi = n - 1;
  Index i_lo = i_hi;
  while (i_lo > n / 2 && v[i_lo] > 0.8 * v[i_hi]) --i_lo;
  if (F[i_hi] > 0.0 && F[i_lo] > 0.0 && v[i_lo] > 0.0) {
    const Real p = std::log(F[i_lo] / F[i_hi]) / std::log(v[i_hi] / v[i_lo]);
    if (p > 1.5 && std::isfinite(p)) {
      d.tail_exp_ = p;
      d.tail_amp_ = F[i_hi] * std::pow(v[i_hi], p);
    }
  }
  return d;
}

std::optional<Real> VelocityDistribution::q() const {
  if (family_ == DistFamily::gaussian) return 1.0;
  if (family_ == DistFamily::grid) return std::nullopt;
  return q_;
}

Real VelocityDistribution::grid_density(Real v) const {
  const Real av = std::abs(v);
  if (av > tail_edge_)
    return tail_exp_ > 0.0 ? tail_amp_ * std::pow(av, -tail_exp_) : 0.0;
  const Index n = grid_v_.size();
  Real s = (v - grid_v_[0]) / grid_dv_;
  Index i = std::min<Index>(std::max<Index>(static_cast<Index>(s), 0), n - 2);
  const Real a = (grid_v_[i + 1] - v) / grid_dv_;
  const Real b = 1.0 - a;
  return a * grid_F_[i] + b * grid_F_[i + 1] +
         ((a * a * a - a) * spline_d2_[i] + (b * b * b - b) * spline_d2_[i + 1]) *
             grid_dv_ * grid_dv_ / 6.0;
}

Real VelocityDistribution::grid_density_derivative(Real v) const {
  const Real av = std::abs(v);
  if (av > tail_edge_) {
    if (tail_exp_ <= 0.0) return 0.0;
    const Real mag = -tail_exp_ * tail_amp_ * std::pow(av, -tail_exp_ - 1.0);
    return v > 0.0 ? mag : -mag;
  }
  const Index n = grid_v_.size();
  Real s = (v - grid_v_[0]) / grid_dv_;
  Index i = std::min<Index>(std::max<Index>(static_cast<Index>(s), 0), n - 2);
  const Real a = (grid_v_[i + 1] - v) / grid_dv_;
  const Real b = 1.0 - a;
  return (grid_F_[i + 1] - grid_F_[i]) / grid_dv_ +
         ((1.0 - 3.0 * a * a) * spline_d2_[i] +
          (3.0 * b * b - 1.0) * spline_d2_[i + 1]) *
             grid_dv_ / 6.0;
}

Real VelocityDistribution::density(Real v) const {
  switch (family_) {
    case DistFamily::gaussian: {
      const Real xi = v / vT_;
      return std::exp(-xi * xi) / (sqrt_pi * vT_);
    }
    case DistFamily::q_gaussian:
    case DistFamily::lorentzian:
      return q_gaussian_density(v, q_, T_);
    case DistFamily::grid:
      return grid_density(v);
  }
  return 0.0;
}

Real VelocityDistribution::density_derivative(Real v) const {
  switch (family_) {
    case DistFamily::gaussian: {
      const Real xi = v / vT_;
      return -2.0 * xi * std::exp(-xi * xi) / (sqrt_pi * vT_ * vT_);
    }
    case DistFamily::q_gaussian:
    case DistFamily::lorentzian: {
      const Real xi = v / vT_;
      const Real a = 1.0 / (q_ - 1.0);
      const Real base = 1.0 + (q_ - 1.0) * xi * xi;
      return q_shape_norm(q_) / (vT_ * vT_) * (-2.0 * xi) *
             std::pow(base, -a - 1.0);
    }
    case DistFamily::grid:
      return grid_density_derivative(v);
  }
  return 0.0;
}

Real VelocityDistribution::tail_cutoff(Real tol) const {
  switch (family_) {
    case DistFamily::gaussian:
      return vT_ * (std::sqrt(std::log(1.0 / tol)) + 2.0);
    case DistFamily::q_gaussian:
    case DistFamily::lorentzian: {
      // tail mass(xi0) ~ C_q (q-1)^(-a) xi0^(1-2a) / (2a - 1); solved in
      // logs so q near 1 cannot overflow
      const Real a = 1.0 / (q_ - 1.0);
      const Real cq = q_shape_norm(q_);
      const Real log_xi0 =
          (std::log(cq) - a * std::log(q_ - 1.0) -
           std::log((2.0 * a - 1.0) * 0.5 * tol)) /
          (2.0 * a - 1.0);
      const Real xi0 = std::exp(std::min(log_xi0, 300.0));
      return vT_ * std::max(xi0, 8.0);
    }
    case DistFamily::grid: {
      if (tail_exp_ > 1.0) {
        const Real from_tail =
            std::pow(2.0 * tail_amp_ / ((tail_exp_ - 1.0) * tol),
                     1.0 / (tail_exp_ - 1.0));
        return std::max(tail_edge_, from_tail);
      }
      return tail_edge_;
    }
  }
  return vT_ * 10.0;
}

}  // namespace cavkin
