#include "catkerr/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "catkerr/errors.hpp"

namespace catkerr {

namespace {

using RealMember = std::optional<double> ExperimentConfig::*;
using IntMember = std::optional<int> ExperimentConfig::*;
using TextMember = std::optional<std::string> ExperimentConfig::*;

struct Binding {
  ConfigField field;
  std::variant<RealMember, IntMember, TextMember> member;
};

Binding real(const char* key, RealMember m, const char* help) { return {{key, FieldKind::Real, help}, m}; }
Binding integer(const char* key, IntMember m, const char* help) { return {{key, FieldKind::Integer, help}, m}; }
Binding text(const char* key, TextMember m, const char* help) { return {{key, FieldKind::Text, help}, m}; }

const std::vector<Binding>& bindings() {
  using C = ExperimentConfig;
  static const std::vector<Binding> b = {
      real("K", &C::K, "Kerr amplitude"),
      real("kappa", &C::kappa, "single-photon loss rate"),
      real("Ep", &C::Ep, "two-photon drive (real part; Ep0 for ramps)"),
      real("Ep_im", &C::Ep_im, "two-photon drive, imaginary part"),
      real("Ez", &C::Ez, "single-photon drive of the Z gate"),
      real("delta_x", &C::delta_x, "detuning of the X gate"),
      real("Ezz", &C::Ezz, "exchange coupling of the ZZ gate"),
      integer("N", &C::N, "Fock truncation per mode"),
      integer("n_drive", &C::n_drive, "photon order of the drive (nphoton-check)"),
      real("tau", &C::tau, "ramp time constant"),
      real("t_final", &C::t_final, "final time of a ramp"),
      real("theta", &C::theta, "gate rotation angle"),
      real("time_override", &C::time_override, "explicit gate time"),
      real("time_factor", &C::time_factor, "ZZ gate time in units of pi/(2 delta_zz)"),
      real("alpha", &C::alpha, "cat or coherent amplitude (stabilize, wigner)"),
      real("t_max", &C::t_max, "last stabilisation time"),
      integer("t_points", &C::t_points, "number of stabilisation times"),
      integer("series_points", &C::series_points, "time-series samples"),
      text("initial", &C::initial, "even | odd"),
      text("cd_variant", &C::cd_variant, "over-norm | times-norm | none"),
      text("timing", &C::timing, "gate-z: pi-over-delta | inverse-delta; gate-x: calibrated | formula"),
      text("method", &C::method, "long-time | null-space"),
      text("mode", &C::mode, "all | driven-knr | undriven-knr | linear"),
      text("gate", &C::gate, "z | x | zz (sweep)"),
      text("strengths", &C::strengths, "comma-separated sweep strengths"),
      text("state", &C::state, "vacuum | coherent | cat-even | cat-odd (wigner)"),
      text("criteria", &C::criteria, "comma-separated criterion numbers (reproduce-paper)"),
      real("x_min", &C::x_min, "Wigner grid"),
      real("x_max", &C::x_max, "Wigner grid"),
      real("p_min", &C::p_min, "Wigner grid"),
      real("p_max", &C::p_max, "Wigner grid"),
      integer("nx", &C::nx, "Wigner grid points along x"),
      integer("np", &C::np, "Wigner grid points along p"),
      real("rel_tol", &C::rel_tol, "integrator relative tolerance"),
      real("abs_tol", &C::abs_tol, "integrator absolute tolerance"),
      real("convergence_eps", &C::convergence_eps, "steady-state residual threshold"),
      real("max_time", &C::max_time, "steady-state time limit"),
      real("K_over_2pi_hz", &C::K_over_2pi_hz, "physical K/2pi in Hz, documentation only"),
  };
  return b;
}

const Binding* find(const std::string& key) {
  for (const auto& b : bindings()) {
    if (b.field.key == key) return &b;
  }
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

// Value text up to an unquoted '#'; quoted strings are unescaped.
std::string value_text(const std::string& raw, bool& quoted) {
  const std::string v = trim(raw);
  quoted = !v.empty() && v.front() == '"';
  if (!quoted) return trim(v.substr(0, v.find('#')));
  std::string out;
  std::size_t i = 1;
  for (; i < v.size(); ++i) {
    if (v[i] == '\\' && i + 1 < v.size()) {
      ++i;
      out += v[i] == 'n' ? '\n' : v[i];
    } else if (v[i] == '"') {
      break;
    } else {
      out += v[i];
    }
  }
  if (i >= v.size()) throw ConfigError("unterminated string");
  const std::string rest = trim(v.substr(i + 1));
  if (!rest.empty() && rest.front() != '#') throw ConfigError("trailing characters after string");
  return out;
}

}  // namespace

const std::vector<ConfigField>& config_fields() {
  static const std::vector<ConfigField> f = [] {
    std::vector<ConfigField> out{{"subcommand", FieldKind::Text, "experiment to run"},
                                 {"output_dir", FieldKind::Text, "directory for artifacts"}};
    for (const auto& b : bindings()) out.push_back(b.field);
    return out;
  }();
  return f;
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "subcommand") {
    cfg.subcommand = value;
    return;
  }
  if (key == "output_dir") {
    if (value.empty()) throw ConfigError("output_dir must not be empty");
    cfg.output_dir = value;
    return;
  }
  const Binding* b = find(key);
  if (!b) throw ConfigError("unknown key '" + key + "'");
  std::visit(
      [&](auto m) {
        using M = decltype(m);
        if constexpr (std::is_same_v<M, RealMember>) {
          cfg.*m = to_real(key, value);
        } else if constexpr (std::is_same_v<M, IntMember>) {
          cfg.*m = to_int(key, value);
        } else {
          cfg.*m = value;
        }
      },
      b->member);
}

std::optional<ConfigValue> get_config_value(const ExperimentConfig& cfg, const std::string& key) {
  if (key == "subcommand") return cfg.subcommand.empty() ? std::nullopt : std::optional<ConfigValue>(cfg.subcommand);
  if (key == "output_dir") return ConfigValue(cfg.output_dir);
  const Binding* b = find(key);
  if (!b) throw ConfigError("unknown key '" + key + "'");
  return std::visit(
      [&](auto m) -> std::optional<ConfigValue> {
        if (!(cfg.*m)) return std::nullopt;
        return ConfigValue(*(cfg.*m));
      },
      b->member);
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    try {
      bool quoted = false;
      std::string value = value_text(t.substr(eq + 1), quoted);
      const auto* field = find(key);
      const bool textual = key == "subcommand" || key == "output_dir" || (field && field->field.kind == FieldKind::Text);
      if (textual && !quoted) throw ConfigError(key + ": string values must be quoted");
      if (!textual && quoted) throw ConfigError(key + ": expected an unquoted number");
      if (value == "true" || value == "false") throw ConfigError(key + ": booleans are not accepted here");
      set_config_value(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return parse_config(s.str());
}

std::string render_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  for (const auto& field : config_fields()) {
    const auto v = get_config_value(cfg, field.key);
    if (!v) continue;
    out << field.key << " = ";
    if (const auto* d = std::get_if<double>(&*v)) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", *d);
      std::string s = buf;
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      out << s;
    } else if (const auto* i = std::get_if<int>(&*v)) {
      out << *i;
    } else {
      out << quote(std::get<std::string>(*v));
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace catkerr
