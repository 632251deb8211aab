#pragma once

#include <optional>
#include <vector>

#include "cavkin/ensemble.hpp"
#include "cavkin/types.hpp"

namespace cavkin {

struct Estimate {
  Real value = 0.0;
  Real stderr_ = 0.0;
};

// k_B T_kin = m <v^2> with the standard error of the mean.
Estimate kinetic_temperature(const ArrayX& velocities);

// Signed order parameter: mean of sin(k x) over the sample.
Real order_parameter(const ArrayX& positions);

struct QFit {
  Real q_hat = 1.0;
  Real T_hat = 1.0;
  Real q_se = 0.0;
  Real T_se = 0.0;
  Real q_ci_low = 1.0, q_ci_high = 3.0;  // 95% interval
  Real log_likelihood = 0.0;
  int iterations = 0;
};

// Maximum-likelihood fit of the two-parameter q-Gaussian family, q in
// (1, 3); the Gaussian limit is reported as q_hat at the lower edge of the
// search range. Throws for samples below 100 points or on non-convergence.
QFit fit_q_gaussian(const ArrayX& velocities);

struct SweepPoint {
  Real sqrtN_eta = 0.0;
  Real theta_abs = 0.0;  // long-time |Theta|
  Real theta_se = 0.0;
  Real n_photon = 0.0;   // long-time mean photon number
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::optional<Real> branch_point;  // estimated critical sqrt(N) eta
  std::optional<Real> exponent;      // power-law exponent of |Theta| above it
  Real exponent_se = 0.0;
};

// Long-time statistics over a pump sweep: |Theta| per pump value from the
// final window of each trajectory (block error bars when the ensemble has a
// single trajectory), a branch-point estimate and a power-law fit of
// |Theta| against eta/eta_b - 1 near the branch.
SweepResult sweep_statistics(const std::vector<Real>& sqrtN_eta,
                             const std::vector<EnsembleRecord>& records,
                             Real window_fraction = 0.25, int n_blocks = 10);

// Mean of an observable over the final window of an ensemble record.
Real window_mean(const ArrayX& series, Real window_fraction = 0.25);

}  // namespace cavkin
