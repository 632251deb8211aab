#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cavkin/ensemble.hpp"
#include "cavkin/fpe.hpp"
#include "cavkin/model.hpp"

namespace cavkin {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExperimentMode { simulate, sweep, kinetic, fpe, collapse };

const char* to_string(ExperimentMode mode);

// Raw key-value file: '[section]' headers, 'key = value' lines, '#' comments.
class KeyValueFile {
 public:
  static KeyValueFile parse_file(const std::string& path);
  static KeyValueFile parse_text(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key) const;
  std::optional<std::string> try_get(const std::string& section,
                                     const std::string& key) const;
  // "section.key=value" (top-level keys use just "key=value")
  void set_override(const std::string& assignment);

  Real get_real(const std::string& section, const std::string& key) const;
  std::optional<Real> try_get_real(const std::string& section,
                                   const std::string& key) const;
  int get_int(const std::string& section, const std::string& key) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;
  std::vector<Real> get_real_list(const std::string& section,
                                  const std::string& key) const;

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

struct SweepSpec {
  std::vector<Real> sqrtN_eta_values;  // resolved absolute pump values
  bool relative_to_critical = false;
};

struct CollapseSpec {
  std::vector<int> N_values;
  Real t_final_per_N = 5.0;
  bool include_ode = true;
};

enum class FpeKind { temperature, distribution };

struct FpeSpec {
  FpeKind kind = FpeKind::temperature;
  CoefficientMode mode = CoefficientMode::automatic;
  Real T0 = 0.0;           // temperature evolution start
  Real t_final = 0.0;
  Real initial_T = 0.0;    // distribution evolution: initial Gaussian T (0 -> T_eq)
  std::string initial = "gaussian";  // or "qgaussian"
  Index n_points = 1201;
  Real v_max_thermal = 8.0;
  Real dt_growth = 1.0;
  Real dt_max = 1e9;
  std::vector<Real> snapshot_times;
};

struct KineticSpec {
  std::string distribution = "qgaussian";  // stability probe family
  Real T = 0.0;                            // 0 -> T_eq
  Real T0 = 0.0;                           // cooling-time estimate input
};

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::simulate;
  ModelParams model;
  EnsemblePlan plan;
  std::uint64_t seed = 0;
  bool fit_q = false;
  SweepSpec sweep;
  CollapseSpec collapse;
  FpeSpec fpe;
  KineticSpec kinetic;
  std::string out_dir = ".";
  int workers = 1;
  int precision = 12;
};

// Resolves a parsed file into a validated configuration. Caption-style
// aliases are accepted: NU0 for U0, delta for Delta_c, sqrtN_eta for eta
// (each exclusive with its direct counterpart). Throws ConfigError with a
// single-line message naming the offending field.
ExperimentConfig resolve_config(const KeyValueFile& kv,
                                std::optional<ExperimentMode> forced_mode = {});

}  // namespace cavkin
