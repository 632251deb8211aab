#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cavkin/experiments.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  int workers = 1;
  std::vector<std::string> overrides;
  std::int64_t seed = -1;
};

void attach_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_path, "experiment config file")
      ->required();
  sub->add_option("--out", args.out_dir, "output directory");
  sub->add_option("--workers", args.workers,
                  "worker threads (affects speed only, never results)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--set", args.overrides,
                  "override a config field, e.g. --set model.kappa=50");
  sub->add_option("--seed", args.seed, "master seed (overrides config)");
}

int run_mode(cavkin::ExperimentMode mode, CommonArgs& args) {
  using namespace cavkin;
  try {
    KeyValueFile kv = KeyValueFile::parse_file(args.config_path);
    for (const auto& o : args.overrides) kv.set_override(o);
    if (args.seed >= 0) kv.set_override("seed=" + std::to_string(args.seed));
    ExperimentConfig cfg = resolve_config(kv, mode);
    cfg.out_dir = args.out_dir;
    cfg.workers = args.workers;
    run_experiment(cfg);
    return 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: config: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: run: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "cavkin: coupled particle-cavity stochastic simulation and kinetic "
      "theory toolkit"};
  app.require_subcommand(1);

  struct ModeBinding {
    cavkin::ExperimentMode mode;
    CommonArgs args;
    CLI::App* sub;
  };
  std::vector<ModeBinding> bindings;
  bindings.push_back({cavkin::ExperimentMode::simulate, {}, nullptr});
  bindings.push_back({cavkin::ExperimentMode::sweep, {}, nullptr});
  bindings.push_back({cavkin::ExperimentMode::kinetic, {}, nullptr});
  bindings.push_back({cavkin::ExperimentMode::fpe, {}, nullptr});
  bindings.push_back({cavkin::ExperimentMode::collapse, {}, nullptr});

  const char* help[] = {
      "integrate a seeded trajectory ensemble and write time-series tables",
      "sweep the pump strength and fit the order-parameter branch",
      "write the analytic prediction table for a parameter set",
      "evolve the kinetic (velocity-space) equations",
      "run the fixed sqrt(N) eta family at several N and compare",
  };
  for (std::size_t i = 0; i < bindings.size(); ++i) {
    bindings[i].sub =
        app.add_subcommand(cavkin::to_string(bindings[i].mode), help[i]);
    attach_common(bindings[i].sub, bindings[i].args);
  }

  CLI11_PARSE(app, argc, argv);

  for (auto& b : bindings)
    if (b.sub->parsed()) return run_mode(b.mode, b.args);
  return 2;
}
