#include "cavkin/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace cavkin {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string qualified(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

}  // namespace

const char* to_string(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::simulate: return "simulate";
    case ExperimentMode::sweep: return "sweep";
    case ExperimentMode::kinetic: return "kinetic";
    case ExperimentMode::fpe: return "fpe";
    case ExperimentMode::collapse: return "collapse";
  }
  return "?";
}

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

KeyValueFile KeyValueFile::parse_text(const std::string& text) {
  KeyValueFile kv;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("malformed section header at line " +
                          std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value' at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key at line " + std::to_string(lineno));
    kv.sections_[section][key] = value;
  }
  return kv;
}

void KeyValueFile::set_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must look like section.key=value: '" +
                      assignment + "'");
  std::string path = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  std::string section;
  const auto dot = path.find('.');
  if (dot != std::string::npos) {
    section = path.substr(0, dot);
    path = path.substr(dot + 1);
  }
  if (path.empty()) throw ConfigError("override has an empty key");
  sections_[section][path] = value;
}

bool KeyValueFile::has(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::string KeyValueFile::get(const std::string& section,
                              const std::string& key) const {
  const auto v = try_get(section, key);
  if (!v) throw ConfigError("missing field '" + qualified(section, key) + "'");
  return *v;
}

std::optional<std::string> KeyValueFile::try_get(const std::string& section,
                                                 const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return std::nullopt;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

Real KeyValueFile::get_real(const std::string& section,
                            const std::string& key) const {
  const std::string v = get(section, key);
  try {
    std::size_t pos = 0;
    const Real x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    if (!std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("field '" + qualified(section, key) +
                      "' is not a finite number: '" + v + "'");
  }
}

std::optional<Real> KeyValueFile::try_get_real(const std::string& section,
                                               const std::string& key) const {
  if (!has(section, key)) return std::nullopt;
  return get_real(section, key);
}

int KeyValueFile::get_int(const std::string& section, const std::string& key) const {
  const Real x = get_real(section, key);
  const int i = static_cast<int>(std::llround(x));
  if (std::abs(x - i) > 1e-9)
    throw ConfigError("field '" + qualified(section, key) + "' must be an integer");
  return i;
}

bool KeyValueFile::get_bool(const std::string& section, const std::string& key,
                            bool fallback) const {
  const auto v = try_get(section, key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError("field '" + qualified(section, key) + "' must be a boolean");
}

std::vector<Real> KeyValueFile::get_real_list(const std::string& section,
                                              const std::string& key) const {
  const std::string v = get(section, key);
  std::vector<Real> out;
  std::istringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("field '" + qualified(section, key) +
                        "' has a non-numeric entry: '" + item + "'");
    }
  }
  if (out.empty())
    throw ConfigError("field '" + qualified(section, key) + "' is empty");
  return out;
}

namespace {

ModelParams resolve_model(const KeyValueFile& kv) {
  ModelParams m;
  m.N = kv.get_int("model", "N");
  if (m.N < 1) throw ConfigError("field 'model.N' must be >= 1");
  m.kappa = kv.get_real("model", "kappa");

  const bool has_U0 = kv.has("model", "U0");
  const bool has_NU0 = kv.has("model", "NU0");
  if (has_U0 == has_NU0)
    throw ConfigError("exactly one of 'model.U0' or 'model.NU0' is required");
  m.U0 = has_U0 ? kv.get_real("model", "U0")
                : kv.get_real("model", "NU0") / static_cast<Real>(m.N);

  const bool has_Dc = kv.has("model", "Delta_c");
  const bool has_delta = kv.has("model", "delta");
  if (has_Dc == has_delta)
    throw ConfigError("exactly one of 'model.Delta_c' or 'model.delta' is required");
  m.Delta_c = has_Dc ? kv.get_real("model", "Delta_c")
                     : kv.get_real("model", "delta") + 0.5 * m.NU0();

  const bool has_eta = kv.has("model", "eta");
  const bool has_se = kv.has("model", "sqrtN_eta");
  if (has_eta == has_se)
    throw ConfigError("exactly one of 'model.eta' or 'model.sqrtN_eta' is required");
  m.eta = has_eta ? kv.get_real("model", "eta")
                  : kv.get_real("model", "sqrtN_eta") /
                        std::sqrt(static_cast<Real>(m.N));
  return m;
}

CoefficientMode parse_mode(const std::string& s, const std::string& field) {
  if (s == "auto" || s == "automatic") return CoefficientMode::automatic;
  if (s == "full") return CoefficientMode::full;
  if (s == "far_below") return CoefficientMode::far_below;
  throw ConfigError("field '" + field + "' must be auto, full or far_below");
}

}  // namespace

ExperimentConfig resolve_config(const KeyValueFile& kv,
                                std::optional<ExperimentMode> forced_mode) {
  ExperimentConfig cfg;

  std::optional<ExperimentMode> file_mode;
  if (kv.has("", "mode")) {
    const std::string s = kv.get("", "mode");
    for (auto m : {ExperimentMode::simulate, ExperimentMode::sweep,
                   ExperimentMode::kinetic, ExperimentMode::fpe,
                   ExperimentMode::collapse})
      if (s == to_string(m)) file_mode = m;
    if (!file_mode) throw ConfigError("unknown mode '" + s + "'");
  }
  if (forced_mode && file_mode && *forced_mode != *file_mode)
    throw ConfigError(std::string("config mode '") + to_string(*file_mode) +
                      "' conflicts with subcommand '" + to_string(*forced_mode) + "'");
  if (forced_mode)
    cfg.mode = *forced_mode;
  else if (file_mode)
    cfg.mode = *file_mode;
  else
    throw ConfigError("missing field 'mode'");

  cfg.model = resolve_model(kv);

  if (!kv.has("", "seed"))
    throw ConfigError("missing field 'seed' (wall-clock seeding is not supported)");
  cfg.seed = static_cast<std::uint64_t>(
      std::llround(kv.get_real("", "seed")));

  const bool needs_plan = cfg.mode == ExperimentMode::simulate ||
                          cfg.mode == ExperimentMode::sweep ||
                          cfg.mode == ExperimentMode::collapse;
  if (needs_plan) {
    cfg.plan.T0 = kv.get_real("plan", "T0");
    if (cfg.mode != ExperimentMode::collapse)
      cfg.plan.t_final = kv.get_real("plan", "t_final");
    cfg.plan.dt = kv.try_get_real("plan", "dt").value_or(0.0);
    cfg.plan.output_stride = kv.has("plan", "output_stride")
                                 ? kv.get_int("plan", "output_stride")
                                 : 100;
    cfg.plan.n_initial_conditions =
        kv.has("plan", "n_initial") ? kv.get_int("plan", "n_initial") : 1;
    cfg.plan.n_noise_realisations =
        kv.has("plan", "n_noise") ? kv.get_int("plan", "n_noise") : 1;
    cfg.plan.field_noise = kv.get_bool("plan", "field_noise", true);
    cfg.plan.record_final = kv.get_bool("plan", "record_final", false);
    if (const auto g = kv.try_get_real("plan", "guard_v")) cfg.plan.guard_v = *g;
    cfg.plan.master_seed = cfg.seed;
    cfg.fit_q = kv.get_bool("plan", "fit_q", false);
  }

  if (cfg.mode == ExperimentMode::sweep) {
    const bool has_abs = kv.has("sweep", "values");
    const bool has_rel = kv.has("sweep", "values_rel_critical");
    if (has_abs == has_rel)
      throw ConfigError(
          "exactly one of 'sweep.values' or 'sweep.values_rel_critical' is required");
    if (has_abs) {
      cfg.sweep.sqrtN_eta_values = kv.get_real_list("sweep", "values");
    } else {
      const DerivedParams d = validate_and_derive(cfg.model);
      if (!d.sqrtN_eta_c)
        throw ConfigError(
            "sweep.values_rel_critical needs a finite critical pump (delta < 0)");
      for (Real r : kv.get_real_list("sweep", "values_rel_critical"))
        cfg.sweep.sqrtN_eta_values.push_back(r * *d.sqrtN_eta_c);
      cfg.sweep.relative_to_critical = true;
    }
  }

  if (cfg.mode == ExperimentMode::collapse) {
    for (Real x : kv.get_real_list("collapse", "N_values")) {
      const int n = static_cast<int>(std::llround(x));
      if (n < 1) throw ConfigError("field 'collapse.N_values' must be positive");
      cfg.collapse.N_values.push_back(n);
    }
    cfg.collapse.t_final_per_N =
        kv.try_get_real("collapse", "t_final_per_N").value_or(5.0);
    cfg.collapse.include_ode = kv.get_bool("collapse", "include_ode", true);
  }

  if (cfg.mode == ExperimentMode::fpe) {
    const std::string kind = kv.get("fpe", "kind");
    if (kind == "temperature")
      cfg.fpe.kind = FpeKind::temperature;
    else if (kind == "distribution")
      cfg.fpe.kind = FpeKind::distribution;
    else
      throw ConfigError("field 'fpe.kind' must be temperature or distribution");
    cfg.fpe.mode = parse_mode(kv.try_get("fpe", "mode").value_or("auto"), "fpe.mode");
    cfg.fpe.t_final = kv.get_real("fpe", "t_final");
    if (cfg.fpe.kind == FpeKind::temperature)
      cfg.fpe.T0 = kv.get_real("fpe", "T0");
    else {
      cfg.fpe.initial = kv.try_get("fpe", "initial").value_or("gaussian");
      if (cfg.fpe.initial != "gaussian" && cfg.fpe.initial != "qgaussian")
        throw ConfigError("field 'fpe.initial' must be gaussian or qgaussian");
      cfg.fpe.initial_T = kv.try_get_real("fpe", "initial_T").value_or(0.0);
      cfg.fpe.n_points = kv.has("fpe", "n_points") ? kv.get_int("fpe", "n_points") : 1201;
      cfg.fpe.v_max_thermal = kv.try_get_real("fpe", "v_max_thermal").value_or(8.0);
      cfg.fpe.dt_growth = kv.try_get_real("fpe", "dt_growth").value_or(1.0);
      cfg.fpe.dt_max = kv.try_get_real("fpe", "dt_max").value_or(1e9);
      if (kv.has("fpe", "snapshot_times"))
        cfg.fpe.snapshot_times = kv.get_real_list("fpe", "snapshot_times");
    }
  }

  if (cfg.mode == ExperimentMode::kinetic) {
    cfg.kinetic.distribution = kv.try_get("kinetic", "distribution").value_or("qgaussian");
    if (cfg.kinetic.distribution != "qgaussian" &&
        cfg.kinetic.distribution != "gaussian")
      throw ConfigError("field 'kinetic.distribution' must be gaussian or qgaussian");
    cfg.kinetic.T = kv.try_get_real("kinetic", "T").value_or(0.0);
    cfg.kinetic.T0 = kv.try_get_real("kinetic", "T0").value_or(0.0);
  }

  if (const auto p = kv.try_get_real("output", "precision"))
    cfg.precision = static_cast<int>(*p);
  return cfg;
}

}  // namespace cavkin
