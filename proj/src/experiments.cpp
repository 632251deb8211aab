#include "cavkin/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "cavkin/analysis.hpp"
#include "cavkin/io.hpp"
#include "cavkin/kinetic.hpp"
#include "cavkin/organised.hpp"

namespace fs = std::filesystem;

namespace cavkin {

namespace {

const char* to_string(Normalisability n) {
  switch (n) {
    case Normalisability::none: return "none";
    case Normalisability::heavy_tail_no_variance: return "heavy_tail_no_variance";
    case Normalisability::finite_variance: return "finite_variance";
  }
  return "?";
}

void add_model_block(Manifest& m, const ExperimentConfig& cfg,
                     const DerivedParams& d) {
  m.add("version", tool_version);
  m.add("mode", to_string(cfg.mode));
  m.add("seed", static_cast<std::int64_t>(cfg.seed));
  m.add("model.N", static_cast<std::int64_t>(cfg.model.N));
  m.add("model.U0", cfg.model.U0);
  m.add("model.NU0", cfg.model.NU0());
  m.add("model.kappa", cfg.model.kappa);
  m.add("model.Delta_c", cfg.model.Delta_c);
  m.add("model.eta", cfg.model.eta);
  m.add("model.sqrtN_eta", cfg.model.sqrtN_eta());
  m.add("derived.delta", d.delta);
  m.add("derived.L", d.L);
  m.add("derived.weak_coupling_ok", d.weak_coupling_ok ? "true" : "false");
  m.add("derived.normalisability", to_string(d.normalisability));
  if (d.q) m.add("derived.q", *d.q);
  if (d.T_eq) m.add("derived.T_eq", *d.T_eq);
  if (d.sqrtN_eta_c) m.add("derived.sqrtN_eta_c", *d.sqrtN_eta_c);
  for (std::size_t i = 0; i < d.warnings.size(); ++i)
    m.add("warning." + std::to_string(i), d.warnings[i]);
}

void add_plan_block(Manifest& m, const EnsemblePlan& plan) {
  m.add("plan.T0", plan.T0);
  m.add("plan.t_final", plan.t_final);
  m.add("plan.dt", plan.dt);
  m.add("plan.output_stride", static_cast<std::int64_t>(plan.output_stride));
  m.add("plan.n_initial", static_cast<std::int64_t>(plan.n_initial_conditions));
  m.add("plan.n_noise", static_cast<std::int64_t>(plan.n_noise_realisations));
  m.add("plan.field_noise", plan.field_noise ? "true" : "false");
  m.add("plan.record_final", plan.record_final ? "true" : "false");
}

void write_timeseries(const std::string& path, const EnsembleRecord& rec,
                      int precision) {
  TableWriter table(path,
                    {"t", "T_kin", "T_kin_stderr", "theta", "theta_stderr",
                     "n_photon", "re_alpha", "im_alpha"},
                    precision);
  for (Index i = 0; i < rec.t.size(); ++i)
    table.row({rec.t[i], rec.T_kin_mean[i], rec.T_kin_se[i], rec.theta_mean[i],
               rec.theta_se[i], rec.n_photon_mean[i], rec.re_alpha_mean[i],
               rec.im_alpha_mean[i]});
  table.close();
}

struct OutputTracker {
  std::vector<std::string> files;
  std::string track(const std::string& path) {
    files.push_back(path);
    return path;
  }
  void discard_all() {
    for (const auto& f : files) {
      std::error_code ec;
      fs::remove(f, ec);
    }
  }
};

void run_simulate(const ExperimentConfig& cfg, const DerivedParams& d,
                  OutputTracker& out) {
  EnsemblePlan plan = validate_plan(cfg.model, cfg.plan);
  const EnsembleRecord rec = run_ensemble(cfg.model, plan, cfg.workers);

  Manifest m;
  add_model_block(m, cfg, d);
  add_plan_block(m, plan);
  m.add("result.rows", static_cast<std::int64_t>(rec.t.size()));
  m.add("result.final_T_kin", window_mean(rec.T_kin_mean));
  m.add("result.final_theta_abs", std::abs(window_mean(rec.theta_mean)));
  m.add("result.final_n_photon", window_mean(rec.n_photon_mean));

  write_timeseries(out.track(cfg.out_dir + "/timeseries.tsv"), rec, cfg.precision);

  if (plan.record_final) {
    TableWriter table(out.track(cfg.out_dir + "/final_velocities.tsv"), {"v"},
                      cfg.precision);
    for (Index i = 0; i < rec.pooled_final_v.size(); ++i)
      table.row({rec.pooled_final_v[i]});
    table.close();
    if (cfg.fit_q) {
      const QFit fit = fit_q_gaussian(rec.pooled_final_v);
      m.add("fit.q_hat", fit.q_hat);
      m.add("fit.q_se", fit.q_se);
      m.add("fit.T_hat", fit.T_hat);
      m.add("fit.T_se", fit.T_se);
      m.add("fit.log_likelihood", fit.log_likelihood);
    }
  }
  m.write(out.track(cfg.out_dir + "/manifest.txt"));
}

void run_sweep(const ExperimentConfig& cfg, const DerivedParams& d,
               OutputTracker& out) {
  std::vector<EnsembleRecord> records;
  std::vector<Real> values = cfg.sweep.sqrtN_eta_values;
  for (std::size_t p = 0; p < values.size(); ++p) {
    ExperimentConfig point = cfg;
    point.model.eta = values[p] / std::sqrt(static_cast<Real>(cfg.model.N));
    EnsemblePlan plan = validate_plan(point.model, point.plan);
    // Decorrelate the points while keeping the whole sweep reproducible.
    plan.master_seed = cfg.seed + 1000003ull * p;
    records.push_back(run_ensemble(point.model, plan, cfg.workers));
  }
  const SweepResult sw = sweep_statistics(values, records);

  Manifest m;
  add_model_block(m, cfg, d);
  add_plan_block(m, cfg.plan);
  m.add("sweep.n_points", static_cast<std::int64_t>(values.size()));
  if (sw.branch_point) m.add("sweep.branch_point", *sw.branch_point);
  if (sw.exponent) {
    m.add("sweep.exponent", *sw.exponent);
    m.add("sweep.exponent_se", sw.exponent_se);
  }
  if (d.sqrtN_eta_c) m.add("sweep.theory_sqrtN_eta_c", *d.sqrtN_eta_c);

  TableWriter branch(out.track(cfg.out_dir + "/branch.tsv"),
                     {"sqrtN_eta", "theta_abs", "theta_stderr", "n_photon"},
                     cfg.precision);
  for (const auto& pt : sw.points)
    branch.row({pt.sqrtN_eta, pt.theta_abs, pt.theta_se, pt.n_photon});
  branch.close();

  for (std::size_t p = 0; p < records.size(); ++p) {
    char name[64];
    std::snprintf(name, sizeof(name), "/point_%02zu.tsv", p);
    write_timeseries(out.track(cfg.out_dir + name), records[p], cfg.precision);
  }
  m.write(out.track(cfg.out_dir + "/manifest.txt"));
}

void run_kinetic(const ExperimentConfig& cfg, const DerivedParams& d,
                 OutputTracker& out) {
  Manifest m;
  add_model_block(m, cfg, d);

  std::vector<std::pair<std::string, Real>> rows;

  if (d.q) rows.emplace_back("q", *d.q);
  if (d.T_eq) rows.emplace_back("T_eq", *d.T_eq);
  if (d.sqrtN_eta_c) {
    rows.emplace_back("sqrtN_eta_c", *d.sqrtN_eta_c);
    rows.emplace_back("eta_ratio", cfg.model.sqrtN_eta() / *d.sqrtN_eta_c);
  }
  if (d.q && d.T_eq) {
    if (const auto tk = q_gaussian_kinetic_temperature(
            std::min(*d.q, 2.999), *d.T_eq);
        *d.q < 5.0 / 3.0 && tk)
      rows.emplace_back("T_kin_homogeneous", *tk);
  }

  // Stability of the configured probe distribution.
  if (d.delta < 0.0 && d.T_eq) {
    const Real T = cfg.kinetic.T > 0.0 ? cfg.kinetic.T : *d.T_eq;
    rows.emplace_back("probe_T", T);
    std::optional<VelocityDistribution> F;
    if (cfg.kinetic.distribution == "gaussian")
      F = VelocityDistribution::gaussian(T);
    else if (d.q && *d.q < 3.0)
      F = VelocityDistribution::q_gaussian(*d.q, T);
    if (F) {
      const StabilityResult st = is_unstable(cfg.model, *F);
      rows.emplace_back("probe_unstable", st.unstable ? 1.0 : 0.0);
      rows.emplace_back("probe_margin", st.margin);
      const GrowthRateResult gr = growth_rate(cfg.model, *F);
      if (gr.status == RootStatus::root_found) {
        rows.emplace_back("growth_rate_re", gr.s.real());
        rows.emplace_back("growth_rate_im", gr.s.imag());
      }
    }
  }

  if (d.delta < 0.0 && d.sqrtN_eta_c &&
      cfg.model.sqrtN_eta() > *d.sqrtN_eta_c) {
    const OrganisedEquilibrium eq = organised_equilibrium(cfg.model);
    rows.emplace_back("omega0_sq", eq.omega0_sq);
    rows.emplace_back("omega0", std::sqrt(eq.omega0_sq));
    rows.emplace_back("T_kin_organised", eq.T_kin);
    rows.emplace_back("T_kin_organised_over_kappa", eq.T_kin / cfg.model.kappa);
    rows.emplace_back("theta_strong", eq.theta);
    rows.emplace_back("theta_near",
                      theta_near_threshold(cfg.model.sqrtN_eta() / *d.sqrtN_eta_c));
    rows.emplace_back("re_alpha_ss", eq.re_alpha_ss);
    rows.emplace_back("theta_asymptote", eq.theta_asymptote);
    rows.emplace_back("spatial_width_ksq", eq.spatial_width_ksq);
  }

  rows.emplace_back("reformulated_threshold_exceeded",
                    reformulated_threshold_exceeded(cfg.model) ? 1.0 : 0.0);

  if (cfg.kinetic.T0 > 0.0) {
    const CoolingTimeEstimate ct = optimal_cooling_time(cfg.model, cfg.kinetic.T0);
    rows.emplace_back("tau_opt", ct.tau);
    rows.emplace_back("tau_opt_validity_warning", ct.validity_warning ? 1.0 : 0.0);
  }

  if (cfg.model.eta > 0.0) {
    if (const auto nc = critical_particle_number(cfg.model))
      rows.emplace_back("N_c", static_cast<Real>(*nc));
  }

  // name/value prediction table
  {
    std::ofstream pred(out.track(cfg.out_dir + "/predictions.tsv"),
                       std::ios::binary);
    if (!pred) throw std::runtime_error("cannot write predictions table");
    pred << "name\tvalue\n";
    for (const auto& [k, v] : rows)
      pred << k << '\t' << format_real(v, cfg.precision) << '\n';
  }

  m.add("kinetic.rows", static_cast<std::int64_t>(rows.size()));
  m.write(out.track(cfg.out_dir + "/manifest.txt"));
}

void run_fpe(const ExperimentConfig& cfg, const DerivedParams& d,
             OutputTracker& out) {
  Manifest m;
  add_model_block(m, cfg, d);

  if (cfg.fpe.kind == FpeKind::temperature) {
    TemperatureOptions opts;
    opts.mode = cfg.fpe.mode;
    const TemperatureEvolution ev =
        evolve_temperature(cfg.model, cfg.fpe.T0, cfg.fpe.t_final, opts);
    TableWriter table(out.track(cfg.out_dir + "/fpe_temperature.tsv"),
                      {"t", "T_kin"}, cfg.precision);
    for (Index i = 0; i < ev.t.size(); ++i) table.row({ev.t[i], ev.T_kin[i]});
    table.close();
    m.add("fpe.kind", "temperature");
    m.add("fpe.T0", cfg.fpe.T0);
    m.add("fpe.instability_reached", ev.instability_reached ? "true" : "false");
    if (ev.instability_reached) m.add("fpe.t_instability", ev.t_instability);
    m.add("fpe.final_T_kin", ev.T_kin[ev.T_kin.size() - 1]);
  } else {
    if (!d.T_eq || !d.q)
      throw ConfigError("fpe distribution mode needs delta < 0");
    const Real Tinit = cfg.fpe.initial_T > 0.0 ? cfg.fpe.initial_T : *d.T_eq;
    std::optional<VelocityDistribution> F0;
    if (cfg.fpe.initial == "gaussian")
      F0 = VelocityDistribution::gaussian(Tinit);
    else
      F0 = VelocityDistribution::q_gaussian(std::min(*d.q, 2.999), Tinit);

    const VelocityDistribution target =
        VelocityDistribution::q_gaussian(std::min(*d.q, 2.999), *d.T_eq);
    FpeGrid grid = FpeGrid::for_distribution(target, 1e-6, cfg.fpe.n_points);
    grid.v_max = std::max(grid.v_max,
                          cfg.fpe.v_max_thermal * F0->thermal_velocity());

    DistributionOptions opts;
    opts.mode = cfg.fpe.mode;
    opts.dt_growth = cfg.fpe.dt_growth;
    opts.dt_max = cfg.fpe.dt_max;
    opts.snapshot_times = cfg.fpe.snapshot_times;

    const DistributionEvolution ev = evolve_distribution(
        cfg.model, project_to_grid(*F0, grid), grid, cfg.fpe.t_final, opts);

    TableWriter dist(out.track(cfg.out_dir + "/fpe_distribution.tsv"),
                     {"v", "F_final", "F_target"}, cfg.precision);
    Real l1 = 0.0;
    for (Index i = 0; i < ev.v.size(); ++i) {
      const Real ft = target.density(ev.v[i]);
      l1 += std::abs(ev.F_final[i] - ft) * grid.dv();
      dist.row({ev.v[i], ev.F_final[i], ft});
    }
    dist.close();

    TableWriter series(out.track(cfg.out_dir + "/fpe_summary.tsv"),
                       {"t", "T_kin"}, cfg.precision);
    for (Index i = 0; i < ev.t_series.size(); ++i)
      series.row({ev.t_series[i], ev.T_kin_series[i]});
    series.close();

    for (std::size_t s = 0; s < ev.snapshots.size(); ++s) {
      char name[64];
      std::snprintf(name, sizeof(name), "/fpe_snapshot_%02zu.tsv", s);
      TableWriter snap(out.track(cfg.out_dir + name), {"v", "F"}, cfg.precision);
      for (Index i = 0; i < ev.v.size(); ++i)
        snap.row({ev.v[i], ev.snapshots[s].second[i]});
      snap.close();
    }
    m.add("fpe.kind", "distribution");
    m.add("fpe.initial", cfg.fpe.initial);
    m.add("fpe.initial_T", Tinit);
    m.add("fpe.l1_to_equilibrium", l1);
    m.add("fpe.mass_error", ev.mass_error);
  }
  m.write(out.track(cfg.out_dir + "/manifest.txt"));
}

void run_collapse(const ExperimentConfig& cfg, const DerivedParams& d,
                  OutputTracker& out) {
  if (cfg.collapse.N_values.empty())
    throw ConfigError("collapse needs at least one N value");
  const Real sqrtN_eta = cfg.model.sqrtN_eta();
  const Real NU0 = cfg.model.NU0();
  const Real delta = d.delta;

  std::vector<EnsembleRecord> records;
  std::vector<EnsemblePlan> plans;
  for (std::size_t j = 0; j < cfg.collapse.N_values.size(); ++j) {
    const int N = cfg.collapse.N_values[j];
    ModelParams model = cfg.model;
    model.N = N;
    // Fixed sqrt(N) eta, fixed N U0 and fixed delta across the family.
    model.eta = sqrtN_eta / std::sqrt(static_cast<Real>(N));
    model.U0 = NU0 / static_cast<Real>(N);
    model.Delta_c = delta + 0.5 * NU0;
    EnsemblePlan plan = cfg.plan;
    plan.t_final = cfg.collapse.t_final_per_N * N;
    plan = validate_plan(model, plan);
    // Common tau = t/N output grid across ensemble members.
    plan.output_stride = std::max<int>(
        1, static_cast<int>(std::llround(cfg.collapse.t_final_per_N * N /
                                         (plan.dt * 200.0))));
    plan.master_seed = cfg.seed + 7919ull * j;
    records.push_back(run_ensemble(model, plan, cfg.workers));
    plans.push_back(plan);

    char name[64];
    std::snprintf(name, sizeof(name), "/timeseries_N%d.tsv", N);
    write_timeseries(out.track(cfg.out_dir + name), records.back(), cfg.precision);
  }

  // Combined table on the common tau grid (records share 201 rows).
  std::vector<std::string> cols{"t_over_N"};
  for (int N : cfg.collapse.N_values) {
    cols.push_back("T_kin_N" + std::to_string(N));
    cols.push_back("T_kin_stderr_N" + std::to_string(N));
  }
  TableWriter table(out.track(cfg.out_dir + "/collapse.tsv"), cols, cfg.precision);
  Index n_rows = records.front().t.size();
  for (const auto& r : records) n_rows = std::min(n_rows, r.t.size());
  for (Index i = 0; i < n_rows; ++i) {
    std::vector<Real> row{records[0].t[i] / cfg.collapse.N_values[0]};
    for (std::size_t j = 0; j < records.size(); ++j) {
      row.push_back(records[j].T_kin_mean[i]);
      row.push_back(records[j].T_kin_se[i]);
    }
    table.row(row);
  }
  table.close();

  Manifest m;
  add_model_block(m, cfg, d);
  add_plan_block(m, cfg.plan);
  m.add("collapse.t_final_per_N", cfg.collapse.t_final_per_N);

  if (cfg.collapse.include_ode) {
    // Gaussian-closure curve for the smallest N; with sqrt(N) eta fixed the
    // closure collapses exactly in t/N, so one curve serves every member.
    ModelParams model = cfg.model;
    const int N0 = cfg.collapse.N_values.front();
    model.N = N0;
    model.eta = sqrtN_eta / std::sqrt(static_cast<Real>(N0));
    model.U0 = NU0 / static_cast<Real>(N0);
    model.Delta_c = delta + 0.5 * NU0;
    TemperatureOptions topts;
    topts.n_output = 201;
    const TemperatureEvolution ev = evolve_temperature(
        model, cfg.plan.T0, cfg.collapse.t_final_per_N * N0, topts);
    TableWriter ode(out.track(cfg.out_dir + "/ode.tsv"),
                    {"t_over_N", "T_kin_closure"}, cfg.precision);
    for (Index i = 0; i < ev.t.size(); ++i)
      ode.row({ev.t[i] / N0, ev.T_kin[i]});
    ode.close();
    m.add("collapse.ode_instability_reached",
          ev.instability_reached ? "true" : "false");
  }
  m.write(out.track(cfg.out_dir + "/manifest.txt"));
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  const DerivedParams d = validate_and_derive(cfg.model);
  OutputTracker out;
  try {
    switch (cfg.mode) {
      case ExperimentMode::simulate: run_simulate(cfg, d, out); break;
      case ExperimentMode::sweep: run_sweep(cfg, d, out); break;
      case ExperimentMode::kinetic: run_kinetic(cfg, d, out); break;
      case ExperimentMode::fpe: run_fpe(cfg, d, out); break;
      case ExperimentMode::collapse: run_collapse(cfg, d, out); break;
    }
  } catch (...) {
    out.discard_all();
    throw;
  }
  ExperimentResult res;
  res.written_files = out.files;
  return res;
}

}  // namespace cavkin
