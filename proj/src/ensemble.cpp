#include "cavkin/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

namespace cavkin {

EnsemblePlan validate_plan(const ModelParams& params, const EnsemblePlan& plan) {
  EnsemblePlan p = plan;
  if (p.n_initial_conditions < 1 || p.n_noise_realisations < 1)
    throw std::invalid_argument("ensemble needs I >= 1 and R >= 1");
  if (!(p.T0 > 0.0)) throw std::invalid_argument("T0 must be positive");
  if (!(p.t_final > 0.0)) throw std::invalid_argument("t_final must be positive");
  if (p.output_stride < 1) throw std::invalid_argument("output_stride must be >= 1");
  if (p.dt <= 0.0) p.dt = default_dt(params, p.guard_v);
  if (p.dt > stability_dt_bound(params))
    throw std::invalid_argument(
        "dt violates the field stability bound dt*sqrt(kappa^2+delta^2) <= 0.2");
  return p;
}

TrajectoryRecord run_trajectory(const ModelParams& params, const SimState& init,
                                const EnsemblePlan& plan,
                                std::uint64_t trajectory_index) {
  const auto n_steps = static_cast<std::int64_t>(
      std::llround(plan.t_final / plan.dt));
  const std::int64_t stride = plan.output_stride;
  const std::int64_t n_rows = n_steps / stride + 1 + (n_steps % stride != 0);

  StepSettings settings;
  settings.dt = plan.dt;
  settings.field_noise = plan.field_noise;
  settings.guard_v = plan.guard_v;
  settings.guard_alpha_factor = plan.guard_alpha_factor;

  Integrator itg(params, settings);
  SimState state = init;
  itg.prime(state);

  TrajectoryRecord rec;
  rec.t.resize(n_rows);
  rec.T_kin.resize(n_rows);
  rec.theta.resize(n_rows);
  rec.n_photon.resize(n_rows);
  rec.re_alpha.resize(n_rows);
  rec.im_alpha.resize(n_rows);

  Index row = 0;
  auto record = [&](const SimState& st) {
    rec.t[row] = st.t;
    rec.T_kin[row] = units::mass * st.v.square().mean();
    rec.theta[row] = itg.sin_x().mean();
    rec.n_photon[row] = std::norm(st.alpha);
    rec.re_alpha[row] = st.alpha.real();
    rec.im_alpha[row] = st.alpha.imag();
    if (plan.snapshot_stride > 0 && row % plan.snapshot_stride == 0) {
      rec.snapshot_t.push_back(st.t);
      rec.snapshot_x.push_back(st.x);
      rec.snapshot_v.push_back(st.v);
    }
    ++row;
  };
  record(state);

  RngStream noise(plan.master_seed, Stream::field_noise, trajectory_index);
  const Real sqrt_dt = std::sqrt(plan.dt);
  for (std::int64_t k = 0; k < n_steps; ++k) {
    const auto z = noise.normal_pair(static_cast<std::uint64_t>(k));
    itg.step(state, NoisePair{sqrt_dt * z.z1, sqrt_dt * z.z2});
    if ((k + 1) % stride == 0 || k + 1 == n_steps) record(state);
  }

  if (plan.record_final) {
    rec.final_x = state.x;
    rec.final_v = state.v;
  }
  return rec;
}

EnsembleRecord run_ensemble(const ModelParams& params, const EnsemblePlan& raw_plan,
                            int n_workers) {
  const EnsemblePlan plan = validate_plan(params, raw_plan);
  const int total = plan.total_trajectories();
  const int R = plan.n_noise_realisations;

  std::vector<TrajectoryRecord> records(total);
  std::vector<std::string> failures(total);

  auto work = [&](int idx) {
    const int i = idx / R;
    try {
      const RngStream ic(plan.master_seed, Stream::initial_conditions,
                         static_cast<std::uint64_t>(i));
      const SimState init = sample_initial(params, plan.T0, ic);
      records[idx] = run_trajectory(params, init, plan,
                                    static_cast<std::uint64_t>(idx));
    } catch (const std::exception& e) {
      failures[idx] = e.what();
    }
  };

  if (n_workers <= 1 || total == 1) {
    for (int idx = 0; idx < total; ++idx) work(idx);
  } else {
    std::atomic<int> next{0};
    auto runner = [&]() {
      for (;;) {
        const int idx = next.fetch_add(1);
        if (idx >= total) return;
        work(idx);
      }
    };
    std::vector<std::thread> pool;
    const int n = std::min(n_workers, total);
    pool.reserve(n);
    for (int w = 0; w < n; ++w) pool.emplace_back(runner);
    for (auto& th : pool) th.join();
  }

  std::string all_failures;
  for (int idx = 0; idx < total; ++idx)
    if (!failures[idx].empty())
      all_failures += "trajectory " + std::to_string(idx) + ": " +
                      failures[idx] + "; ";
  if (!all_failures.empty())
    throw std::runtime_error("ensemble failed: " + all_failures);

  EnsembleRecord out;
  out.t = records[0].t;
  const Index n_rows = out.t.size();
  auto reduce = [&](auto member, ArrayX& mean, ArrayX& se) {
    mean.setZero(n_rows);
    se.setZero(n_rows);
    for (int idx = 0; idx < total; ++idx) mean += records[idx].*member;
    mean /= static_cast<Real>(total);
    if (total > 1) {
      for (int idx = 0; idx < total; ++idx)
        se += (records[idx].*member - mean).square();
      se = (se / (static_cast<Real>(total) * (total - 1.0))).sqrt();
    }
  };
  reduce(&TrajectoryRecord::T_kin, out.T_kin_mean, out.T_kin_se);
  reduce(&TrajectoryRecord::theta, out.theta_mean, out.theta_se);
  reduce(&TrajectoryRecord::n_photon, out.n_photon_mean, out.n_photon_se);
  reduce(&TrajectoryRecord::re_alpha, out.re_alpha_mean, out.re_alpha_se);
  reduce(&TrajectoryRecord::im_alpha, out.im_alpha_mean, out.im_alpha_se);

  if (plan.record_final) {
    out.pooled_final_v.resize(static_cast<Index>(total) * params.N);
    for (int idx = 0; idx < total; ++idx)
      out.pooled_final_v.segment(static_cast<Index>(idx) * params.N, params.N) =
          records[idx].final_v;
  }
  out.trajectories = std::move(records);
  return out;
}

}  // namespace cavkin
