// Acceptance suite: runs every acceptance criterion end to end and prints
// one PASS/FAIL line per criterion. Usage: acceptance <cli-binary> <workdir>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cavkin/analysis.hpp"
#include "cavkin/ensemble.hpp"
#include "cavkin/experiments.hpp"
#include "cavkin/fpe.hpp"
#include "cavkin/kinetic.hpp"
#include "cavkin/organised.hpp"
#include "cavkin/quadrature.hpp"

namespace fs = std::filesystem;
using namespace cavkin;

namespace {

int g_workers = 2;
int g_failures = 0;

void report(int id, const std::string& label, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s — %s\n", pass ? "PASS" : "FAIL", id,
              label.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

ModelParams make_params(int N, Real NU0, Real delta, Real kappa, Real sqrtN_eta) {
  ModelParams p;
  p.N = N;
  p.U0 = NU0 / N;
  p.kappa = kappa;
  p.Delta_c = delta + 0.5 * NU0;
  p.eta = sqrtN_eta / std::sqrt(static_cast<Real>(N));
  return p;
}

// ---------------------------------------------------------------------------
// 1. q-Gaussian steady state
void criterion_1() {
  const ModelParams p = make_params(500, -0.1, -2.5, 100.0, 1800.0);
  const DerivedParams d = validate_and_derive(p);
  EnsemblePlan plan;
  plan.T0 = 2000.0;
  plan.t_final = 5.0 * p.N;
  plan.dt = 1e-3;
  plan.output_stride = 1000;
  plan.n_initial_conditions = 5;
  plan.n_noise_realisations = 4;
  plan.record_final = true;
  plan.master_seed = 101;
  const EnsembleRecord rec = run_ensemble(p, plan, g_workers);

  const QFit fit = fit_q_gaussian(rec.pooled_final_v);
  const Real Tkin = window_mean(rec.T_kin_mean);
  const Real ratio = Tkin / *d.T_eq;

  const bool ok_q = std::abs(fit.q_hat - 1.4) <= 0.15;
  const bool ok_T = ratio >= 2.0 && ratio <= 3.0;
  report(1, "q-Gaussian steady state", ok_q && ok_T,
         fmt("q_hat=%.3f (1.4+-0.15), T_kin/T_eq=%.3f (2.5+-20%%)", fit.q_hat,
             ratio));
}

// ---------------------------------------------------------------------------
// 2. organised-phase temperature and photon-number scaling
void criterion_2() {
  auto run_leg = [&](int N, Real t_per_N, int n_ic, std::uint64_t seed) {
    const ModelParams p = make_params(N, -1.0, -100.0, 100.0, 200.0);
    EnsemblePlan plan;
    plan.T0 = 250.0;
    plan.t_final = t_per_N * N;
    plan.dt = 5e-4;
    plan.output_stride = 4000;
    plan.n_initial_conditions = n_ic;
    plan.n_noise_realisations = 2;
    plan.master_seed = seed;
    return run_ensemble(p, plan, g_workers);
  };
  const EnsembleRecord rec250 = run_leg(250, 40.0, 4, 202);
  const EnsembleRecord rec500 = run_leg(500, 10.0, 2, 203);

  const Real Tkin = window_mean(rec250.T_kin_mean);
  const Real over_kappa = Tkin / 100.0;
  const bool ok_T = std::abs(over_kappa - 0.57) <= 0.057;

  const Real n250 = window_mean(rec250.n_photon_mean);
  const Real n500 = window_mean(rec500.n_photon_mean);
  const Real ratio = n500 / n250;
  const bool ok_scaling = std::abs(ratio - 2.0) <= 0.5;

  report(2, "organised-phase temperature and photon scaling", ok_T && ok_scaling,
         fmt("T_kin/kappa=%.3f (0.57+-10%%), photon ratio N=500/250: %.2f "
             "(2.0+-25%%)",
             over_kappa, ratio));
}

// ---------------------------------------------------------------------------
// 3. threshold sweep: branch point and critical exponent
void criterion_3() {
  const Real kappa = 100.0;
  const ModelParams base = make_params(200, -1.0, -100.0, kappa, 100.0);
  const DerivedParams d = validate_and_derive(base);
  const Real etac = *d.sqrtN_eta_c;

  std::vector<Real> ratios{0.80, 0.92, 1.04, 1.07, 1.10, 1.14, 1.18, 1.30};
  std::vector<Real> pumps;
  std::vector<EnsembleRecord> records;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const Real se = ratios[i] * etac;
    pumps.push_back(se);
    const ModelParams p = make_params(200, -1.0, -100.0, kappa, se);
    EnsemblePlan plan;
    plan.T0 = 110.0;
    plan.t_final = 50.0 * p.N;
    plan.dt = 1e-3;
    plan.output_stride = 2000;
    plan.n_initial_conditions = 1;
    // intermittent well-hopping near threshold needs more noise histories
    plan.n_noise_realisations = ratios[i] > 1.0 && ratios[i] < 1.25 ? 10 : 4;
    plan.master_seed = 301 + 13 * i;
    records.push_back(run_ensemble(p, plan, g_workers));
  }
  const SweepResult sw = sweep_statistics(pumps, records);

  const bool has = sw.branch_point.has_value() && sw.exponent.has_value();
  const Real branch_err = has ? std::abs(*sw.branch_point / etac - 1.0) : 1.0;
  const Real expn = has ? *sw.exponent : 0.0;
  const bool ok = has && branch_err <= 0.10 && std::abs(expn - 0.5) <= 0.1;
  report(3, "threshold location and critical exponent", ok,
         fmt("branch=%.1f vs theory %.1f (|err|=%.1f%%, tol 10%%), exponent=%.3f "
             "(0.5+-0.1)",
             has ? *sw.branch_point : 0.0, etac, 100.0 * branch_err, expn));
}

// ---------------------------------------------------------------------------
// 4 & 5. N-collapse of cooling curves and the closure comparison
void criteria_4_and_5() {
  const Real sqrtN_eta = 80.0;
  const Real t_per_N = 5.0;
  auto run_leg = [&](int N, int stride, std::uint64_t seed) {
    const ModelParams p = make_params(N, -0.01, -100.0, 100.0, sqrtN_eta);
    EnsemblePlan plan;
    plan.T0 = 110.0;
    plan.t_final = t_per_N * N;
    plan.dt = 5e-4;
    plan.output_stride = stride;
    // independent initial conditions keep the pointwise errors honest
    plan.n_initial_conditions = 12;
    plan.n_noise_realisations = 1;
    plan.master_seed = seed;
    return run_ensemble(p, plan, g_workers);
  };
  // common tau = t/N grid with step 0.05
  const EnsembleRecord a = run_leg(100, 10000, 404);
  const EnsembleRecord b = run_leg(400, 40000, 405);

  const Index rows = std::min(a.t.size(), b.t.size());
  Real max_z = 0.0, max_rel = 0.0, tau_worst = 0.0;
  bool grid_ok = true;
  for (Index i = 0; i < rows; ++i) {
    const Real tau_a = a.t[i] / 100.0;
    const Real tau_b = b.t[i] / 400.0;
    if (std::abs(tau_a - tau_b) > 1e-9) grid_ok = false;
    const Real diff = std::abs(a.T_kin_mean[i] - b.T_kin_mean[i]);
    const Real sigma = std::hypot(a.T_kin_se[i], b.T_kin_se[i]);
    if (sigma > 0.0 && diff / sigma > max_z) {
      max_z = diff / sigma;
      tau_worst = tau_a;
    }
    max_rel = std::max(max_rel, diff / b.T_kin_mean[i]);
  }
  const bool ok4 = grid_ok && max_z <= 3.0;
  report(4, "collapse of T_kin(t/N) at fixed sqrt(N) eta", ok4,
         fmt("max |Delta T| / sigma_combined = %.2f at t/N = %.2f (tol 3), "
             "max rel diff %.1f%%",
             max_z, tau_worst, 100.0 * max_rel));

  // closure equation against both ensembles until any instability flag
  const ModelParams p100 = make_params(100, -0.01, -100.0, 100.0, sqrtN_eta);
  TemperatureOptions topts;
  topts.n_output = static_cast<int>(rows);
  const TemperatureEvolution ode =
      evolve_temperature(p100, 110.0, t_per_N * 100.0, topts);

  Real worst = 0.0, tau_worst5 = 0.0;
  const Index n_cmp = std::min<Index>(ode.T_kin.size(), rows);
  for (Index i = 0; i < n_cmp; ++i) {
    for (const auto* leg : {&a, &b}) {
      const Real rel =
          std::abs(ode.T_kin[i] - leg->T_kin_mean[i]) / leg->T_kin_mean[i];
      if (rel > worst) {
        worst = rel;
        tau_worst5 = ode.t[i] / 100.0;
      }
    }
  }
  const bool ok5 = !ode.instability_reached && worst <= 0.15;
  report(5, "Gaussian-closure equation tracks the ensembles", ok5,
         fmt("max |T_closure - T_sde| / T_sde = %.1f%% at t/N = %.2f (tol 15%%)%s",
             100.0 * worst, tau_worst5,
             ode.instability_reached ? ", closure halted early" : ""));
}

// ---------------------------------------------------------------------------
// 6. analytic stationarity of the grid solver + closed-form drift/diffusion
void criterion_6() {
  bool ok = true;
  std::string detail;
  for (Real delta : {-2.5, -20.0, -100.0}) {
    const ModelParams p = make_params(1000, -0.01, delta, 100.0, 40.0);
    const DerivedParams d = validate_and_derive(p);
    const VelocityDistribution target =
        VelocityDistribution::q_gaussian(*d.q, *d.T_eq);
    const Index n_points = delta == -2.5 ? 4001 : 2001;
    const FpeGrid grid = FpeGrid::for_distribution(target, 1e-6, n_points);
    const ArrayX F0 =
        project_to_grid(VelocityDistribution::gaussian(*d.T_eq), grid);
    DistributionOptions opts;
    opts.mode = CoefficientMode::far_below;
    opts.dt_growth = 1.5;
    opts.dt_max = 1e7;
    const DistributionEvolution ev = evolve_distribution(p, F0, grid, 1e9, opts);
    Real l1 = 0.0;
    for (Index i = 0; i < ev.v.size(); ++i)
      l1 += std::abs(ev.F_final[i] - target.density(ev.v[i])) * grid.dv();
    detail += fmt("L1(delta=%g)=%.2e ", delta, l1);
    ok = ok && l1 < 1e-3;
  }

  // closed-form integral of A/B reproduces the equilibrium exponent and
  // temperature to 1e-10
  Real worst = 0.0;
  for (Real delta : {-2.5, -20.0, -100.0}) {
    const ModelParams p = make_params(1000, -0.01, delta, 100.0, 40.0);
    const DerivedParams d = validate_and_derive(p);
    const Real M = 100.0 * 100.0 + delta * delta;
    const Real vT = thermal_velocity(*d.T_eq);
    for (Real v : {0.4 * vT, 1.7 * vT, 4.0 * vT}) {
      const Real numeric = integrate(
          [&](Real u) { return drift_diffusion_ratio(u, p); }, 0.0, v, 1e-14,
          1e-13);
      const Real family = q_gaussian_log_density(v, *d.q, *d.T_eq) -
                          q_gaussian_log_density(0.0, *d.q, *d.T_eq);
      worst = std::max(worst, std::abs(numeric - family) /
                                  std::max(1.0, std::abs(family)));
    }
  }
  ok = ok && worst < 1e-10;
  detail += fmt("; A/B exponent residual %.1e (tol 1e-10)", worst);
  report(6, "grid solver reaches the analytic equilibrium", ok, detail);
}

// ---------------------------------------------------------------------------
// 7. principal-value shape integrals
void criterion_7() {
  const Real g = pv_shape_integral(VelocityDistribution::gaussian(3.0));
  bool ok = std::abs(g - 1.0) <= 1e-8;
  std::string detail = fmt("gaussian=%.10f (1 +- 1e-8)", g);
  for (Real q : {1.1, 1.4, 2.0}) {
    const Real val = pv_shape_integral(VelocityDistribution::q_gaussian(q, 2.0));
    ok = ok && std::abs(val - 0.5 * (3.0 - q)) <= 1e-6;
    detail += fmt(", q=%.1f: %.8f", q, val);
  }
  report(7, "principal-value shape integrals", ok, detail);
}

// ---------------------------------------------------------------------------
// 8. marginal-root consistency of the dispersion relation
void criterion_8() {
  const Real kappa = 100.0;
  const VelocityDistribution F = VelocityDistribution::gaussian(50.0);
  const ModelParams probe = make_params(200, -1.0, -100.0, kappa, 100.0);
  const Real etac = critical_pump(probe, F);

  const GrowthRateResult at_c =
      growth_rate(make_params(200, -1.0, -100.0, kappa, etac), F);
  const bool ok_marginal =
      at_c.status == RootStatus::root_found && std::abs(at_c.s) < 1e-4 * kappa;

  const GrowthRateResult above =
      growth_rate(make_params(200, -1.0, -100.0, kappa, 2.0 * etac), F);
  const bool ok_above = above.status == RootStatus::root_found && above.s.real() > 0.0;

  const GrowthRateResult below =
      growth_rate(make_params(200, -1.0, -100.0, kappa, 0.5 * etac), F);
  const bool ok_below = below.status == RootStatus::no_root;

  report(8, "marginal-root consistency", ok_marginal && ok_above && ok_below,
         fmt("|s(eta_c)|=%.2e (tol 1e-2), Re s(2 eta_c)=%.2f, below: %s",
             ok_marginal ? std::abs(at_c.s) : -1.0,
             ok_above ? above.s.real() : -1.0,
             ok_below ? "no root" : "unexpected root"));
}

// ---------------------------------------------------------------------------
// 9. field-noise calibration
void criterion_9() {
  ModelParams p;
  p.N = 1;
  p.U0 = 0.0;
  p.kappa = 100.0;
  p.Delta_c = -100.0;
  p.eta = 0.0;
  EnsemblePlan plan;
  plan.T0 = 1.0;
  plan.t_final = 50.0;
  plan.dt = 1e-3;
  plan.output_stride = 10;
  plan.n_initial_conditions = 4;
  plan.n_noise_realisations = 4;
  plan.master_seed = 909;
  const EnsembleRecord rec = run_ensemble(p, plan, g_workers);

  std::vector<Real> means;
  for (const auto& tr : rec.trajectories)
    means.push_back(window_mean(tr.n_photon, 0.75));
  Real mean = 0.0;
  for (Real m : means) mean += m;
  mean /= means.size();
  Real var = 0.0;
  for (Real m : means) var += (m - mean) * (m - mean);
  const Real se = std::sqrt(var / (means.size() * (means.size() - 1.0)));

  const bool ok = std::abs(mean - 0.5) <= 3.0 * se;
  report(9, "field-noise calibration <|alpha|^2> = 1/2", ok,
         fmt("mean=%.4f, se=%.4f, |dev|/se=%.2f (tol 3)", mean, se,
             std::abs(mean - 0.5) / se));
}

// ---------------------------------------------------------------------------
// 10. byte-identical CLI output across worker counts
void criterion_10(const std::string& cli, const std::string& work) {
  const std::string cfg_path = work + "/determinism.cfg";
  {
    std::ofstream cfg(cfg_path);
    cfg << "mode = simulate\nseed = 777\n"
           "[model]\nN = 16\nNU0 = -0.08\nkappa = 20\ndelta = -21\n"
           "sqrtN_eta = 10\n"
           "[plan]\nT0 = 5\nt_final = 2\ndt = 0.002\noutput_stride = 50\n"
           "n_initial = 2\nn_noise = 2\nrecord_final = true\n";
  }
  auto run = [&](const std::string& out, int workers) {
    const std::string cmd = cli + " simulate --config " + cfg_path + " --out " +
                            out + " --workers " + std::to_string(workers) +
                            " > /dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
  };
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string d1 = work + "/det_w1";
  const std::string d8 = work + "/det_w8";
  const std::string d1b = work + "/det_w1_rerun";
  bool ok = run(d1, 1) && run(d8, 8) && run(d1b, 1);
  int compared = 0;
  if (ok) {
    for (const char* f :
         {"/timeseries.tsv", "/final_velocities.tsv", "/manifest.txt"}) {
      const std::string ref = slurp(d1 + f);
      ok = ok && !ref.empty() && ref == slurp(d8 + f) && ref == slurp(d1b + f);
      ++compared;
    }
  }
  report(10, "byte-identical tables across runs and worker counts", ok,
         fmt("%d files compared across workers {1, 8} and a rerun", compared));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: acceptance <cli-binary> <workdir>\n");
    return 2;
  }
  const std::string cli = argv[1];
  const std::string work = argv[2];
  fs::create_directories(work);
  g_workers = std::max(2u, std::thread::hardware_concurrency());

  criterion_7();   // cheap analytic checks first
  criterion_8();
  criterion_6();
  criterion_9();
  criterion_10(cli, work);
  criterion_1();
  criteria_4_and_5();
  criterion_2();
  criterion_3();

  std::printf("acceptance: %d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
