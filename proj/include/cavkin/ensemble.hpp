#pragma once

#include <cstdint>
#include <vector>

#include "cavkin/sde.hpp"

namespace cavkin {

// Ensemble protocol: I initial conditions, R noise realisations per initial
// condition. Trajectory (i, r) draws its initial state from the stream keyed
// by i and its field noise from the stream keyed by the flat index i*R + r,
// so results are bit-reproducible for any scheduling.
struct EnsemblePlan {
  int n_initial_conditions = 1;
  int n_noise_realisations = 1;
  Real T0 = 1.0;            // initial kinetic temperature (E_R)
  Real t_final = 1.0;
  Real dt = 0.0;            // <= 0 selects the default rule
  int output_stride = 1;    // steps between recorded rows
  std::uint64_t master_seed = 0;
  bool field_noise = true;
  bool record_final = false;
  int snapshot_stride = 0;  // full (x, v) snapshots every k-th output row
  Real guard_v = 1e3;
  Real guard_alpha_factor = 1e3;

  int total_trajectories() const {
    return n_initial_conditions * n_noise_realisations;
  }
};

// Resolves dt (default rule when unset) and validates the stability bound.
// Throws std::invalid_argument on violations.
EnsemblePlan validate_plan(const ModelParams& params, const EnsemblePlan& plan);

struct TrajectoryRecord {
  ArrayX t;
  ArrayX T_kin;      // m <v^2> over the N particles
  ArrayX theta;      // mean sin(k x)
  ArrayX n_photon;   // |alpha|^2
  ArrayX re_alpha;
  ArrayX im_alpha;
  ArrayX final_x, final_v;  // only when the plan requests them
  std::vector<Real> snapshot_t;  // full phase-space snapshots (optional)
  std::vector<ArrayX> snapshot_x, snapshot_v;
};

struct EnsembleRecord {
  ArrayX t;
  ArrayX T_kin_mean, T_kin_se;
  ArrayX theta_mean, theta_se;
  ArrayX n_photon_mean, n_photon_se;
  ArrayX re_alpha_mean, re_alpha_se;
  ArrayX im_alpha_mean, im_alpha_se;
  std::vector<TrajectoryRecord> trajectories;
  ArrayX pooled_final_v;  // concatenated final velocities (record_final)
};

// Integrates one trajectory from the given initial state; bit-reproducible
// given (master_seed, trajectory_index). Propagates DivergenceError.
TrajectoryRecord run_trajectory(const ModelParams& params, const SimState& init,
                                const EnsemblePlan& plan,
                                std::uint64_t trajectory_index);

// Runs the I x R ensemble, optionally across threads; the merge is by
// trajectory index so worker count never changes the result. Throws if any
// trajectory fails, reporting every failure.
EnsembleRecord run_ensemble(const ModelParams& params, const EnsemblePlan& plan,
                            int n_workers = 1);

}  // namespace cavkin
