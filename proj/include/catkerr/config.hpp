#pragma once

// Flat key = value experiment configuration (a TOML subset: numbers,
// quoted strings, booleans, # comments). Unset keys fall back to the
// per-subcommand defaults when the run is resolved.

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace catkerr {

struct ExperimentConfig {
  std::string subcommand;
  std::string output_dir = "out";

  // model
  std::optional<double> K, kappa, Ep, Ep_im, Ez, delta_x, Ezz;
  std::optional<int> N, n_drive;

  // envelopes, timing and protocol choices
  std::optional<double> tau, t_final, theta, time_override, time_factor, alpha, t_max;
  std::optional<int> t_points, series_points;
  std::optional<std::string> initial, cd_variant, timing, method, mode, gate, strengths, state, criteria;

  // Wigner grid
  std::optional<double> x_min, x_max, p_min, p_max;
  std::optional<int> nx, np;

  // tolerances
  std::optional<double> rel_tol, abs_tol, convergence_eps, max_time;

  /// Physical size of K/2pi in Hz; recorded in the summary only.
  std::optional<double> K_over_2pi_hz;

  bool operator==(const ExperimentConfig&) const = default;
};

using ConfigValue = std::variant<double, int, std::string>;

enum class FieldKind { Real, Integer, Text };

struct ConfigField {
  std::string key;
  FieldKind kind;
  std::string help;
};

/// Every key accepted by parse_config, in render order.
const std::vector<ConfigField>& config_fields();

/// Sets one key from its textual value. Throws ConfigError on unknown keys
/// or values of the wrong type.
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Value of a key, empty if unset.
std::optional<ConfigValue> get_config_value(const ExperimentConfig& cfg, const std::string& key);

/// Throws ConfigError with the offending line number.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text; parse_config(render_config(c)) == c.
std::string render_config(const ExperimentConfig& cfg);

}  // namespace catkerr
