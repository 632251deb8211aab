#include <doctest.h>

#include <cmath>

#include "cavkin/ensemble.hpp"

using namespace cavkin;

namespace {
ModelParams params() {
  ModelParams p;
  p.N = 12;
  p.U0 = -0.05;
  p.kappa = 20.0;
  p.Delta_c = -21.0;
  p.eta = 3.0;
  return p;
}

EnsemblePlan plan() {
  EnsemblePlan pl;
  pl.T0 = 5.0;
  pl.t_final = 1.0;
  pl.dt = 0.002;
  pl.output_stride = 25;
  pl.master_seed = 4242;
  return pl;
}
}  // namespace

TEST_CASE("single-trajectory ensemble equals run_trajectory") {
  const ModelParams p = params();
  EnsemblePlan pl = plan();
  pl.n_initial_conditions = 1;
  pl.n_noise_realisations = 1;

  const EnsembleRecord ens = run_ensemble(p, pl, 1);
  const RngStream ic(pl.master_seed, Stream::initial_conditions, 0);
  const SimState init = sample_initial(p, pl.T0, ic);
  const TrajectoryRecord tr = run_trajectory(p, init, validate_plan(p, pl), 0);

  REQUIRE(ens.t.size() == tr.t.size());
  CHECK((ens.T_kin_mean == tr.T_kin).all());
  CHECK((ens.theta_mean == tr.theta).all());
  CHECK((ens.n_photon_mean == tr.n_photon).all());
  CHECK((ens.T_kin_se == 0.0).all());
}

TEST_CASE("worker count never changes the result") {
  const ModelParams p = params();
  EnsemblePlan pl = plan();
  pl.n_initial_conditions = 3;
  pl.n_noise_realisations = 2;

  const EnsembleRecord a = run_ensemble(p, pl, 1);
  const EnsembleRecord b = run_ensemble(p, pl, 4);
  const EnsembleRecord c = run_ensemble(p, pl, 8);
  CHECK((a.T_kin_mean == b.T_kin_mean).all());
  CHECK((a.T_kin_mean == c.T_kin_mean).all());
  CHECK((a.theta_se == b.theta_se).all());
  CHECK((a.re_alpha_mean == c.re_alpha_mean).all());
}

TEST_CASE("noise realisations share the initial condition") {
  const ModelParams p = params();
  EnsemblePlan pl = plan();
  pl.n_initial_conditions = 2;
  pl.n_noise_realisations = 2;
  const EnsembleRecord ens = run_ensemble(p, pl, 1);
  REQUIRE(ens.trajectories.size() == 4);
  // same initial condition -> identical first row, different later rows
  CHECK(ens.trajectories[0].T_kin[0] == ens.trajectories[1].T_kin[0]);
  CHECK(ens.trajectories[2].T_kin[0] == ens.trajectories[3].T_kin[0]);
  CHECK(ens.trajectories[0].T_kin[0] != ens.trajectories[2].T_kin[0]);
  const Index last = ens.t.size() - 1;
  CHECK(ens.trajectories[0].n_photon[last] != ens.trajectories[1].n_photon[last]);
}

TEST_CASE("zero pump leaves the kinetic temperature constant") {
  ModelParams p = params();
  p.eta = 0.0;
  p.U0 = 0.0;
  EnsemblePlan pl = plan();
  const EnsembleRecord ens = run_ensemble(p, pl, 1);
  for (Index i = 0; i < ens.t.size(); ++i)
    CHECK(ens.T_kin_mean[i] == ens.T_kin_mean[0]);
}

TEST_CASE("trajectory failures are aggregated") {
  const ModelParams p = params();
  EnsemblePlan pl = plan();
  pl.guard_v = 1e-6;  // every trajectory trips the guard
  pl.n_initial_conditions = 2;
  CHECK_THROWS_WITH_AS(run_ensemble(p, pl, 2),
                       doctest::Contains("trajectory"), std::runtime_error);
}

TEST_CASE("plan validation") {
  const ModelParams p = params();
  EnsemblePlan pl = plan();
  pl.dt = 1.0;  // far beyond the stability bound
  CHECK_THROWS_AS(validate_plan(p, pl), std::invalid_argument);
  pl = plan();
  pl.n_noise_realisations = 0;
  CHECK_THROWS_AS(validate_plan(p, pl), std::invalid_argument);
  pl = plan();
  pl.dt = 0.0;  // resolves to the default rule
  CHECK(validate_plan(p, pl).dt > 0.0);
}

TEST_CASE("phase-space snapshots follow the requested stride") {
  const ModelParams p = params();
  EnsemblePlan pl = plan();
  pl.snapshot_stride = 4;
  const EnsembleRecord ens = run_ensemble(p, pl, 1);
  const TrajectoryRecord& tr = ens.trajectories[0];
  REQUIRE_FALSE(tr.snapshot_t.empty());
  CHECK(tr.snapshot_t.size() == (tr.t.size() + 3) / 4);
  CHECK(tr.snapshot_t[0] == 0.0);
  for (const auto& x : tr.snapshot_x) CHECK(x.size() == p.N);
  for (std::size_t k = 0; k < tr.snapshot_t.size(); ++k)
    CHECK(tr.snapshot_t[k] == tr.t[4 * k]);
}

TEST_CASE("record_final pools final velocities") {
  const ModelParams p = params();
  EnsemblePlan pl = plan();
  pl.record_final = true;
  pl.n_initial_conditions = 2;
  pl.n_noise_realisations = 2;
  const EnsembleRecord ens = run_ensemble(p, pl, 2);
  CHECK(ens.pooled_final_v.size() == 4 * p.N);
  CHECK(ens.pooled_final_v.segment(0, p.N).matrix() ==
        ens.trajectories[0].final_v.matrix());
}
