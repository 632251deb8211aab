#include "cavkin/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "cavkin/distributions.hpp"

namespace cavkin {

Estimate kinetic_temperature(const ArrayX& velocities) {
  if (velocities.size() == 0)
    throw std::invalid_argument("kinetic_temperature: empty sample");
  const Index n = velocities.size();
  const ArrayX v2 = velocities.square();
  Estimate e;
  e.value = units::mass * v2.mean();
  if (n > 1) {
    const Real var = (v2 - v2.mean()).square().sum() / (n - 1.0);
    e.stderr_ = units::mass * std::sqrt(var / n);
  }
  return e;
}

Real order_parameter(const ArrayX& positions) {
  if (positions.size() == 0)
    throw std::invalid_argument("order_parameter: empty sample");
  return positions.sin().mean();
}

namespace {

struct NmPoint {
  Real u1, u2;  // log(q - 1), log T
  Real f;
};

Real neg_log_likelihood(const ArrayX& v2, Real u1, Real u2, Index n) {
  const Real a = std::exp(u1);
  if (a < 1e-3 || a > 1.999) return 1e100;
  const Real T = std::exp(u2);
  const Real q = 1.0 + a;
  // mean log density; the v-independent part comes from one evaluation.
  const Real vT2 = 4.0 * T;
  const Real log_const = q_gaussian_log_density(0.0, q, T);
  const Real mean_tail = ((1.0 + (a / vT2) * v2).log()).mean() / a;
  return -(log_const - mean_tail) * static_cast<Real>(n);
}

}  // namespace

QFit fit_q_gaussian(const ArrayX& velocities) {
  const Index n = velocities.size();
  if (n < 100) throw std::invalid_argument("fit_q_gaussian: sample too small");
  const ArrayX v2 = velocities.square();

  // Moment-based start: kurtosis fixes q, the second moment fixes T.
  const Real m2 = v2.mean();
  const Real m4 = v2.square().mean();
  const Real kurt = m4 / (m2 * m2);
  Real q0 = 1.2;
  if (kurt > 3.05 && kurt < 20.0) {
    const Real nu = (4.0 * kurt - 6.0) / (kurt - 3.0);  // Student-t kurtosis
    q0 = std::clamp((nu + 3.0) / (nu + 1.0), 1.02, 1.9);
  } else if (kurt <= 3.05) {
    q0 = 1.01;
  }
  Real T0 = units::mass * m2 * std::max(0.05, (5.0 - 3.0 * q0) / 2.0);

  auto f = [&](Real u1, Real u2) { return neg_log_likelihood(v2, u1, u2, n); };

  // Nelder-Mead in (log(q-1), log T).
  std::array<NmPoint, 3> simplex;
  simplex[0] = {std::log(q0 - 1.0), std::log(T0), 0.0};
  simplex[1] = {simplex[0].u1 + 0.4, simplex[0].u2, 0.0};
  simplex[2] = {simplex[0].u1, simplex[0].u2 + 0.3, 0.0};
  for (auto& p : simplex) p.f = f(p.u1, p.u2);

  int it = 0;
  const int max_it = 400;
  for (; it < max_it; ++it) {
    std::sort(simplex.begin(), simplex.end(),
              [](const NmPoint& a, const NmPoint& b) { return a.f < b.f; });
    if (std::abs(simplex[2].f - simplex[0].f) <
        1e-10 * (std::abs(simplex[0].f) + 1.0))
      break;
    const Real cu1 = 0.5 * (simplex[0].u1 + simplex[1].u1);
    const Real cu2 = 0.5 * (simplex[0].u2 + simplex[1].u2);
    const Real ru1 = cu1 + (cu1 - simplex[2].u1);
    const Real ru2 = cu2 + (cu2 - simplex[2].u2);
    const Real fr = f(ru1, ru2);
    if (fr < simplex[0].f) {
      const Real eu1 = cu1 + 2.0 * (cu1 - simplex[2].u1);
      const Real eu2 = cu2 + 2.0 * (cu2 - simplex[2].u2);
      const Real fe = f(eu1, eu2);
      simplex[2] = fe < fr ? NmPoint{eu1, eu2, fe} : NmPoint{ru1, ru2, fr};
    } else if (fr < simplex[1].f) {
      simplex[2] = {ru1, ru2, fr};
    } else {
      const Real ku1 = cu1 + 0.5 * (simplex[2].u1 - cu1);
      const Real ku2 = cu2 + 0.5 * (simplex[2].u2 - cu2);
      const Real fk = f(ku1, ku2);
      if (fk < simplex[2].f) {
        simplex[2] = {ku1, ku2, fk};
      } else {
        for (int i = 1; i < 3; ++i) {
          simplex[i].u1 = 0.5 * (simplex[i].u1 + simplex[0].u1);
          simplex[i].u2 = 0.5 * (simplex[i].u2 + simplex[0].u2);
          simplex[i].f = f(simplex[i].u1, simplex[i].u2);
        }
      }
    }
  }
  if (it >= max_it)
    throw std::runtime_error("fit_q_gaussian: optimiser did not converge");

  std::sort(simplex.begin(), simplex.end(),
            [](const NmPoint& a, const NmPoint& b) { return a.f < b.f; });
  QFit fit;
  fit.q_hat = 1.0 + std::exp(simplex[0].u1);
  fit.T_hat = std::exp(simplex[0].u2);
  fit.log_likelihood = -simplex[0].f;
  fit.iterations = it;

  // Standard errors from the numeric Hessian at the optimum (in q, T).
  auto nll_qt = [&](Real q, Real T) {
    return neg_log_likelihood(v2, std::log(std::max(q - 1.0, 1e-4)),
                              std::log(std::max(T, 1e-300)), n);
  };
  const Real hq = std::max(1e-4, 1e-3 * (fit.q_hat - 1.0));
  const Real hT = 1e-3 * fit.T_hat;
  const Real f0 = nll_qt(fit.q_hat, fit.T_hat);
  const Real fqq = (nll_qt(fit.q_hat + hq, fit.T_hat) - 2.0 * f0 +
                    nll_qt(fit.q_hat - hq, fit.T_hat)) / (hq * hq);
  const Real fTT = (nll_qt(fit.q_hat, fit.T_hat + hT) - 2.0 * f0 +
                    nll_qt(fit.q_hat, fit.T_hat - hT)) / (hT * hT);
  const Real fqT = (nll_qt(fit.q_hat + hq, fit.T_hat + hT) -
                    nll_qt(fit.q_hat + hq, fit.T_hat - hT) -
                    nll_qt(fit.q_hat - hq, fit.T_hat + hT) +
                    nll_qt(fit.q_hat - hq, fit.T_hat - hT)) / (4.0 * hq * hT);
  const Real det = fqq * fTT - fqT * fqT;
  if (det > 0.0 && fqq > 0.0) {
    fit.q_se = std::sqrt(fTT / det);
    fit.T_se = std::sqrt(fqq / det);
  } else {
    fit.q_se = hq;
    fit.T_se = hT;
  }
  fit.q_ci_low = std::max(1.0, fit.q_hat - 1.96 * fit.q_se);
  fit.q_ci_high = std::min(3.0, fit.q_hat + 1.96 * fit.q_se);
  return fit;
}

Real window_mean(const ArrayX& series, Real window_fraction) {
  const Index n = series.size();
  const Index start = std::min<Index>(
      n - 1, static_cast<Index>(std::ceil((1.0 - window_fraction) * n)));
  return series.segment(start, n - start).mean();
}

SweepResult sweep_statistics(const std::vector<Real>& sqrtN_eta,
                             const std::vector<EnsembleRecord>& records,
                             Real window_fraction, int n_blocks) {
  if (sqrtN_eta.size() != records.size() || records.empty())
    throw std::invalid_argument("sweep_statistics: mismatched inputs");

  SweepResult out;
  for (std::size_t p = 0; p < records.size(); ++p) {
    const EnsembleRecord& rec = records[p];
    SweepPoint pt;
    pt.sqrtN_eta = sqrtN_eta[p];
    const auto n_traj = rec.trajectories.size();
    // |Theta| per trajectory: the final window split into blocks, averaging
    // |block mean|. Near threshold the ordered episodes flip wells, so a
    // single window mean would cancel across episodes.
    std::vector<Real> abs_theta(n_traj);
    for (std::size_t j = 0; j < n_traj; ++j) {
      const ArrayX& th = rec.trajectories[j].theta;
      const Index n = th.size();
      const Index start = static_cast<Index>((1.0 - window_fraction) * n);
      const Index len = (n - start) / n_blocks;
      if (len < 1) {
        abs_theta[j] = std::abs(window_mean(th, window_fraction));
        continue;
      }
      Real acc = 0.0;
      for (int b = 0; b < n_blocks; ++b)
        acc += std::abs(th.segment(start + b * len, len).mean());
      abs_theta[j] = acc / n_blocks;
    }
    Real mean = 0.0;
    for (Real a : abs_theta) mean += a;
    mean /= static_cast<Real>(n_traj);
    pt.theta_abs = mean;
    if (n_traj > 1) {
      Real var = 0.0;
      for (Real a : abs_theta) var += (a - mean) * (a - mean);
      pt.theta_se = std::sqrt(var / (n_traj * (n_traj - 1.0)));
    } else {
      // single trajectory: error bar across its blocks
      const ArrayX& th = rec.trajectories[0].theta;
      const Index n = th.size();
      const Index start = static_cast<Index>((1.0 - window_fraction) * n);
      const Index len = (n - start) / n_blocks;
      if (len > 0) {
        Real bv = 0.0;
        for (int b = 0; b < n_blocks; ++b) {
          const Real bm = std::abs(th.segment(start + b * len, len).mean());
          bv += (bm - mean) * (bm - mean);
        }
        pt.theta_se = std::sqrt(bv / (n_blocks * (n_blocks - 1.0)));
      }
    }
    pt.n_photon = window_mean(rec.n_photon_mean, window_fraction);
    out.points.push_back(pt);
  }

  // Branch point and critical exponent, fitted sequentially over the
  // power-law window. Points below |Theta| ~ 0.2 sit inside the finite-N
  // rounding of the transition at desk-scale ensembles; points above ~ 0.7
  // have crossed over towards the saturated trapped branch. In between,
  // |Theta|^2 rises linearly for a square-root law, so its extrapolated
  // zero locates the branch without degenerate joint optimisation; the
  // exponent is then the log-log slope at that fixed branch.
  Real floor_theta = out.points.front().theta_abs;
  for (const auto& pt : out.points) floor_theta = std::min(floor_theta, pt.theta_abs);
  const Real y_min = std::max(3.0 * floor_theta, 0.2);
  const Real y_max = 0.70;

  std::vector<const SweepPoint*> window;
  for (const auto& pt : out.points)
    if (pt.theta_abs > y_min && pt.theta_abs < y_max) window.push_back(&pt);
  if (window.size() < 3) return out;

  {
    const auto m = static_cast<Real>(window.size());
    Real sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto* pt : window) {
      const Real x = pt->sqrtN_eta;
      const Real y = pt->theta_abs * pt->theta_abs;
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const Real denom = m * sxx - sx * sx;
    const Real slope = (m * sxy - sx * sy) / denom;
    if (!(slope > 0.0)) return out;
    out.branch_point = sx / m - (sy / m) / slope;
  }

  {
    const Real b = *out.branch_point;
    std::vector<Real> lx, ly;
    for (const auto* pt : window) {
      if (pt->sqrtN_eta <= b * (1.0 + 1e-9)) continue;
      lx.push_back(std::log(pt->sqrtN_eta / b - 1.0));
      ly.push_back(std::log(pt->theta_abs));
    }
    if (lx.size() < 3) return out;
    const auto m = static_cast<Real>(lx.size());
    Real sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sx += lx[i];
      sy += ly[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * ly[i];
    }
    const Real denom = m * sxx - sx * sx;
    if (std::abs(denom) < 1e-12) return out;
    const Real slope = (m * sxy - sx * sy) / denom;
    const Real icept = (sy - slope * sx) / m;
    Real sse = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      const Real r = ly[i] - (icept + slope * lx[i]);
      sse += r * r;
    }
    out.exponent = slope;
    out.exponent_se =
        std::sqrt(std::max(sse / std::max(m - 2.0, 1.0), 1e-30) * m / denom);
  }
  return out;
}

}  // namespace cavkin
