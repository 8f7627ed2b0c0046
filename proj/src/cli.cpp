#include "catkerr/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "catkerr/acceptance.hpp"
#include "catkerr/config.hpp"
#include "catkerr/parallel.hpp"
#include "catkerr/protocols.hpp"

namespace catkerr {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr const char* kSubcommands[][2] = {
    {"steady-state", "steady state of the lossy two-photon driven resonator"},
    {"adiabatic-init", "cat preparation by a slow drive turn-on"},
    {"ta-init", "fast cat preparation with a counterdiabatic drive"},
    {"stabilize", "cat lifetime: driven vs undriven Kerr vs linear resonator"},
    {"gate-z", "Z rotation from a single-photon drive"},
    {"gate-x", "X rotation from a drive detuning"},
    {"gate-zz", "two-resonator ZZ rotation from an exchange coupling"},
    {"nphoton-check", "coherent multiplet of the n-photon driven resonator"},
    {"wigner", "Wigner function of a reference state"},
    {"sweep", "gate fidelity across drive or coupling strengths"},
    {"reproduce-paper", "run the reference-number acceptance suite"},
};

class Run {
 public:
  Run(const ExperimentConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out) {}

  void execute();

 private:
  template <typename T>
  T get(const std::optional<T>& v, T fallback) const {
    return v ? *v : fallback;
  }

  cd ep(cd fallback) const {
    if (!cfg_.Ep && !cfg_.Ep_im) return fallback;
    return {get(cfg_.Ep, fallback.real()), get(cfg_.Ep_im, 0.0)};
  }

  IntegratorOptions integrator() const {
    IntegratorOptions o;
    o.rel_tol = get(cfg_.rel_tol, o.rel_tol);
    o.abs_tol = get(cfg_.abs_tol, o.abs_tol);
    return o;
  }

  RunOptions run_options(int series_default = 51) const {
    RunOptions o;
    o.integrator = integrator();
    o.series_points = get(cfg_.series_points, series_default);
    if (o.series_points < 2) throw ConfigError("series_points must be at least 2");
    return o;
  }

  GridSpec grid(cd alpha0) const {
    GridSpec g = default_grid(alpha0);
    g.x_min = get(cfg_.x_min, g.x_min);
    g.x_max = get(cfg_.x_max, g.x_max);
    g.p_min = get(cfg_.p_min, g.p_min);
    g.p_max = get(cfg_.p_max, g.p_max);
    g.nx = get(cfg_.nx, g.nx);
    g.np = get(cfg_.np, g.np);
    if (g.nx < 1 || g.np < 1 || !(g.x_max >= g.x_min) || !(g.p_max >= g.p_min)) {
      throw ConfigError("invalid Wigner grid");
    }
    return g;
  }

  Parity parity() const {
    const std::string s = get<std::string>(cfg_.initial, "even");
    if (s == "even") return Parity::Even;
    if (s == "odd") return Parity::Odd;
    throw ConfigError("initial must be even or odd, got '" + s + "'");
  }

  void record_model(double K, cd Ep, double kappa, int N, double Ez = 0, double dx = 0, double Ezz = 0,
                    int n_drive = 2) {
    ModelSpec s;
    s.K = K;
    s.Ep = Ep;
    s.kappa = kappa;
    s.Ez = Ez;
    s.delta_x = dx;
    s.Ezz = Ezz;
    s.n_drive = n_drive;
    s.N = N;
    s.validate();
    summary_["model"] = {{"K", s.K},         {"Ep", {{"re", s.Ep.real()}, {"im", s.Ep.imag()}}},
                         {"kappa", s.kappa}, {"Ez", s.Ez},
                         {"delta_x", s.delta_x}, {"Ezz", s.Ezz},
                         {"n_drive", s.n_drive}, {"N", s.N}};
  }

  void record(const ProtocolReport& r, const std::string& prefix = "") {
    json j;
    j["protocol"] = r.protocol;
    j["target"] = r.target;
    j["fidelity"] = r.fidelity;
    j["fidelity_squared"] = r.fidelity_squared;
    j["final_time"] = r.final_time;
    j["params"] = r.params;
    j["metrics"] = r.metrics;
    j["conventions"] = r.conventions;
    j["notes"] = r.notes;
    j["warnings"] = r.warnings;
    if (prefix.empty() && summary_.contains("warnings")) {
      for (const auto& w : summary_["warnings"]) j["warnings"].push_back(w);
    }
    j["integrator"] = {{"accepted_steps", r.stats.accepted}, {"rejected_steps", r.stats.rejected},
                       {"rhs_evaluations", r.stats.rhs_evaluations}};
    for (const auto& w : r.warnings) out_ << "warning: " << w << '\n';
    if (prefix.empty()) {
      for (auto& [k, v] : j.items()) summary_[k] = v;
    } else {
      summary_["runs"][prefix] = j;
    }
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path dir(cfg_.output_dir);
    fs::create_directories(dir);
    const fs::path final_path = dir / name;
    const fs::path tmp = dir / (name + ".tmp");
    {
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      if (!f) throw std::runtime_error("cannot write " + tmp.string());
      f << content;
      f.flush();
      if (!f) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, final_path);
    files_.push_back(name);
  }

  static std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
    return buf;
  }

  void write_wigner(const std::string& name, const DensityMatrix& rho, const GridSpec& g) {
    std::optional<WignerGrid> maybe;
    try {
      maybe = wigner(rho, g);
    } catch (const TruncationInadequate& e) {
      const std::string msg = "wigner_" + name + ".csv skipped: " + e.what();
      out_ << "warning: " << msg << '\n';
      summary_["warnings"].push_back(msg);
      return;
    }
    const auto& w = *maybe;
    std::string s = "x,p,w\n";
    s.reserve(s.size() + w.x.size() * w.p.size() * 40);
    for (std::size_t i = 0; i < w.p.size(); ++i) {
      for (std::size_t j = 0; j < w.x.size(); ++j) {
        s += number(w.x[j]) + ',' + number(w.p[i]) + ',' + number(w.values(Eigen::Index(i), Eigen::Index(j))) + '\n';
      }
    }
    write("wigner_" + name + ".csv", s);
    summary_["wigner"][name] = {{"x_min", g.x_min}, {"x_max", g.x_max}, {"p_min", g.p_min}, {"p_max", g.p_max},
                                {"nx", g.nx},       {"np", g.np},       {"integral", w.integral()}};
  }

  void write_series(const std::string& name, const std::vector<TimePoint>& series) {
    std::string s = "t,fidelity,parity,mean_n,purity\n";
    for (const auto& p : series) {
      s += number(p.t) + ',' + number(p.fidelity) + ',' + number(p.parity) + ',' + number(p.mean_n) + ',' +
           number(p.purity) + '\n';
    }
    write(name, s);
  }

  void steady();
  void init(bool transitionless);
  void stabilize();
  void gate_z();
  void gate_x();
  void gate_zz();
  void nphoton();
  void wigner_state();
  void sweep();
  void reproduce();

  const ExperimentConfig& cfg_;
  std::ostream& out_;
  json summary_;
  std::vector<std::string> files_;
};

void Run::steady() {
  SteadyStateParams p;
  p.K = get(cfg_.K, p.K);
  p.kappa = get(cfg_.kappa, p.kappa);
  p.Ep = ep(p.Ep);
  p.N = get(cfg_.N, p.N);
  const std::string m = get<std::string>(cfg_.method, "long-time");
  if (m == "null-space") {
    p.method = SteadyStateMethod::NullSpace;
  } else if (m != "long-time") {
    throw ConfigError("method must be long-time or null-space");
  }
  record_model(p.K, p.Ep, p.kappa, p.N);
  SteadyStateOptions ss;
  ss.integrator = integrator();
  ss.convergence_eps = get(cfg_.convergence_eps, ss.convergence_eps);
  ss.max_time = get(cfg_.max_time, ss.max_time);
  const auto r = run_steady_state(p, ss);
  record(r);
  write_series("timeseries.csv", r.series);
  const cd a0(r.metrics.at("alpha0_re"), r.metrics.at("alpha0_im"));
  write_wigner("steady", *r.final_state, grid(a0));
  summary_["overlay_alpha0"] = {{{"x", a0.real()}, {"p", a0.imag()}}, {{"x", -a0.real()}, {"p", -a0.imag()}}};
}

void Run::init(bool transitionless) {
  TransitionlessParams p;
  if (!transitionless) static_cast<InitParams&>(p) = InitParams{};
  p.K = get(cfg_.K, p.K);
  p.kappa = get(cfg_.kappa, p.kappa);
  p.Ep0 = ep(p.Ep0);
  p.tau = get(cfg_.tau, p.tau);
  p.t_final = get(cfg_.t_final, p.t_final);
  p.N = get(cfg_.N, p.N);
  p.initial = parity();
  record_model(p.K, p.Ep0, p.kappa, p.N);
  summary_["envelope"] = {{"kind", "smooth-turn-on"}, {"Ep0", {{"re", p.Ep0.real()}, {"im", p.Ep0.imag()}}},
                          {"tau", p.tau}, {"t_final", p.t_final}};
  ProtocolReport r;
  if (transitionless) {
    const std::string v = get<std::string>(cfg_.cd_variant, to_string(default_cd_variant()));
    if (v == "none") {
      p.variant.reset();
    } else if (v == "over-norm") {
      p.variant = CdVariant::OverNorm;
    } else if (v == "times-norm") {
      p.variant = CdVariant::TimesNorm;
    } else {
      throw ConfigError("cd_variant must be over-norm, times-norm or none");
    }
    r = run_transitionless_init(p, run_options());
  } else {
    r = run_adiabatic_init(p, run_options());
    const double c = analytic_init_dephasing(p.kappa, DriveEnvelope::smooth_turn_on(p.Ep0, p.tau), p.K, p.t_final);
    r.metrics["analytic_coherence"] = c;
    r.metrics["analytic_phase_error"] = cat_phase_error(c);
  }
  record(r);
  write_series("timeseries.csv", r.series);
  write_wigner("final", *r.final_state, grid(std::sqrt(p.Ep0 / p.K)));
}

void Run::stabilize() {
  StabilizationParams p;
  p.K = get(cfg_.K, p.K);
  p.kappa = get(cfg_.kappa, p.kappa);
  p.alpha = get(cfg_.alpha, p.alpha);
  p.N = get(cfg_.N, p.N);
  const int n = get(cfg_.t_points, 40);
  if (n < 1) throw ConfigError("t_points must be positive");
  if (!cfg_.t_max && p.kappa <= 0.0) throw ConfigError("stabilize with kappa = 0 needs t_max");
  const double t_max = get(cfg_.t_max, 2.0 / p.kappa);
  if (!(t_max > 0.0)) throw ConfigError("t_max must be positive");
  for (int i = 0; i <= n; ++i) p.t_points.push_back(t_max * i / n);
  record_model(p.K, stabilizing_drive(p.K, p.kappa, p.alpha), p.kappa, p.N);

  const std::string sel = get<std::string>(cfg_.mode, "all");
  std::vector<StabilizationMode> modes;
  for (auto m : {StabilizationMode::DrivenKnr, StabilizationMode::UndrivenKnr, StabilizationMode::Linear}) {
    if (sel == "all" || sel == to_string(m)) modes.push_back(m);
  }
  if (modes.empty()) throw ConfigError("mode must be all, driven-knr, undriven-knr or linear");
  RunOptions o = run_options();
  for (auto m : modes) {
    p.mode = m;
    const auto reports = run_stabilization(p, o);
    std::vector<TimePoint> series;
    for (const auto& r : reports) series.push_back(r.series.front());
    const std::string name = to_string(m);
    write_series("timeseries_" + name + ".csv", series);
    record(reports.back(), name);
    write_wigner(name + "_final", *reports.back().final_state, grid(cd(p.alpha)));
  }
  summary_["drive_Ep"] = stabilizing_drive(p.K, p.kappa, p.alpha);
}

void Run::gate_z() {
  GateZParams p;
  p.K = get(cfg_.K, p.K);
  p.kappa = get(cfg_.kappa, p.kappa);
  p.Ep = ep(p.Ep);
  p.Ez = get(cfg_.Ez, p.Ez);
  p.theta = get(cfg_.theta, p.theta);
  p.N = get(cfg_.N, p.N);
  p.time_override = cfg_.time_override;
  const std::string t = get<std::string>(cfg_.timing, "pi-over-delta");
  if (t == "inverse-delta") {
    p.timing = GateZTiming::InverseDelta;
  } else if (t != "pi-over-delta") {
    throw ConfigError("gate-z timing must be pi-over-delta or inverse-delta");
  }
  record_model(p.K, p.Ep, p.kappa, p.N, p.Ez);
  const auto r = run_gate_z(p, run_options());
  record(r);
  write_series("timeseries.csv", r.series);
  write_wigner("final", *r.final_state, grid(std::sqrt(p.Ep / p.K)));
}

void Run::gate_x() {
  GateXParams p;
  p.K = get(cfg_.K, p.K);
  p.kappa = get(cfg_.kappa, p.kappa);
  p.Ep = ep(p.Ep);
  p.delta_x = get(cfg_.delta_x, p.delta_x);
  p.theta = get(cfg_.theta, p.theta);
  p.N = get(cfg_.N, p.N);
  p.time_override = cfg_.time_override;
  const std::string t = get<std::string>(cfg_.timing, "calibrated");
  if (t == "formula") {
    p.timing = GateXTiming::Formula;
  } else if (t != "calibrated") {
    throw ConfigError("gate-x timing must be calibrated or formula");
  }
  record_model(p.K, p.Ep, p.kappa, p.N, 0.0, p.delta_x);
  const auto r = run_gate_x(p, run_options());
  record(r);
  write_series("timeseries.csv", r.series);
  write_wigner("final", *r.final_state, grid(std::sqrt(p.Ep / p.K)));
}

void Run::gate_zz() {
  GateZZParams p;
  p.K = get(cfg_.K, p.K);
  p.kappa = get(cfg_.kappa, p.kappa);
  p.Ep = ep(p.Ep);
  p.Ezz = get(cfg_.Ezz, p.Ezz);
  p.time_factor = get(cfg_.time_factor, p.time_factor);
  p.N = get(cfg_.N, p.N);
  record_model(p.K, p.Ep, p.kappa, p.N, 0.0, 0.0, p.Ezz);
  RunOptions o = run_options(21);
  o.keep_final_state = false;
  const auto r = run_gate_zz(p, o);
  record(r);
  write_series("timeseries.csv", r.series);
}

void Run::nphoton() {
  ModelSpec s;
  s.K = get(cfg_.K, 1.0);
  s.Ep = ep(1.0);
  s.n_drive = get(cfg_.n_drive, 3);
  s.N = get(cfg_.N, 40);
  record_model(s.K, s.Ep, 0.0, s.N, 0.0, 0.0, 0.0, s.n_drive);
  const auto c = nphoton_check(s);
  double worst = 0.0;
  for (double x : c.residuals) worst = std::max(worst, x);
  summary_["n"] = c.n;
  summary_["radius"] = c.radius;
  summary_["residuals"] = c.residuals;
  summary_["max_residual"] = worst;
  summary_["multiplet_spread"] = c.multiplet_spread;
  summary_["gap"] = c.gap;
  summary_["subspace_overlap"] = c.subspace_overlap;
  summary_["near_degenerate"] = c.multiplet_spread < 0.5 * c.gap;
  out_ << "n=" << c.n << " max residual " << worst << ", spread " << c.multiplet_spread << ", gap " << c.gap << '\n';
}

void Run::wigner_state() {
  const std::string st = get<std::string>(cfg_.state, "vacuum");
  const int N = get(cfg_.N, 30);
  const cd alpha(get(cfg_.alpha, 2.0), 0.0);
  std::optional<PureState> psi;
  if (st == "vacuum") psi = fock_state(N, 0);
  if (st == "coherent") psi = coherent_state(alpha, N);
  if (st == "cat-even") psi = cat_state(alpha, Parity::Even, N);
  if (st == "cat-odd") psi = cat_state(alpha, Parity::Odd, N);
  if (!psi) throw ConfigError("state must be vacuum, coherent, cat-even or cat-odd");
  record_model(get(cfg_.K, 1.0), 0.0, 0.0, N);
  const GridSpec g = grid(st == "vacuum" ? cd(0.0) : alpha);
  const auto w = wigner(DensityMatrix(*psi), g);
  Eigen::Index pi = 0, xi = 0;
  const double peak = w.values.maxCoeff(&pi, &xi);
  summary_["state"] = st;
  summary_["alpha"] = alpha.real();
  summary_["peak"] = {{"w", peak}, {"x", w.x[std::size_t(xi)]}, {"p", w.p[std::size_t(pi)]}};
  summary_["min_w"] = w.values.minCoeff();
  write_wigner(st, DensityMatrix(*psi), g);
}

void Run::sweep() {
  const std::string g = get<std::string>(cfg_.gate, "z");
  SweepGate gate;
  std::vector<double> strengths;
  if (g == "z") {
    gate = SweepGate::Z;
    strengths = {0.2, 0.4, 0.8, 1.6, 3.2};
  } else if (g == "x") {
    gate = SweepGate::X;
    strengths = {1.0 / 6, 1.0 / 3, 2.0 / 3, 1.0, 1.5, 2.0};
  } else if (g == "zz") {
    gate = SweepGate::ZZ;
    strengths = {0.05, 0.1, 0.2, 0.4, 0.8};
  } else {
    throw ConfigError("gate must be z, x or zz");
  }
  if (cfg_.strengths) {
    strengths.clear();
    std::stringstream ss(*cfg_.strengths);
    std::string item;
    while (std::getline(ss, item, ',')) {
      ExperimentConfig tmp;
      set_config_value(tmp, "alpha", item.substr(item.find_first_not_of(' ')));
      strengths.push_back(*tmp.alpha);
    }
    if (strengths.empty()) throw ConfigError("strengths is empty");
  }
  SweepBase base;
  for (auto* params : {&base.z.K, &base.x.K, &base.zz.K}) *params = get(cfg_.K, 1.0);
  for (auto* params : {&base.z.kappa, &base.x.kappa, &base.zz.kappa}) *params = get(cfg_.kappa, 0.0);
  base.z.Ep = ep(base.z.Ep);
  base.x.Ep = ep(base.x.Ep);
  base.zz.Ep = ep(base.zz.Ep);
  if (cfg_.N) base.z.N = base.x.N = base.zz.N = *cfg_.N;
  if (cfg_.theta) base.z.theta = base.x.theta = *cfg_.theta;
  const int N = gate == SweepGate::Z ? base.z.N : gate == SweepGate::X ? base.x.N : base.zz.N;
  const cd E = gate == SweepGate::Z ? base.z.Ep : gate == SweepGate::X ? base.x.Ep : base.zz.Ep;
  record_model(base.z.K, E, base.z.kappa, N);
  RunOptions o = run_options(2);
  o.keep_final_state = false;
  const auto rows = condition_sweep(gate, strengths, base, o);
  std::string s = "strength,fidelity,fidelity_squared,gate_time\n";
  json jr = json::array();
  for (const auto& r : rows) {
    s += number(r.strength) + ',' + number(r.fidelity) + ',' + number(r.fidelity_squared) + ',' + number(r.gate_time) + '\n';
    jr.push_back({{"strength", r.strength}, {"fidelity", r.fidelity}, {"gate_time", r.gate_time}});
  }
  write("sweep.csv", s);
  summary_["gate"] = g;
  summary_["rows"] = jr;
}

void Run::reproduce() {
  AcceptanceOptions opts;
  if (cfg_.criteria) {
    std::stringstream ss(*cfg_.criteria);
    std::string item;
    while (std::getline(ss, item, ',')) {
      ExperimentConfig tmp;
      set_config_value(tmp, "N", item.substr(item.find_first_not_of(' ')));
      if (*tmp.N < 1 || *tmp.N > kCriterionCount) throw ConfigError("criteria must lie in 1.." + std::to_string(kCriterionCount));
      opts.only.insert(*tmp.N);
    }
  }
  opts.on_result = [&](const CriterionResult& r) { out_ << format_result(r) << std::endl; };
  json rows = json::array();
  int passed = 0;
  const auto results = run_acceptance(opts);
  for (const auto& r : results) {
    passed += r.pass;
    rows.push_back({{"criterion", r.id}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}, {"seconds", r.seconds}});
  }
  out_ << passed << "/" << results.size() << " criteria pass\n";
  summary_["criteria"] = rows;
  summary_["passed"] = passed;
  summary_["total"] = results.size();
}

void Run::execute() {
  const auto t0 = std::chrono::steady_clock::now();
  summary_["subcommand"] = cfg_.subcommand;
  const std::string& c = cfg_.subcommand;
  if (c == "steady-state") steady();
  else if (c == "adiabatic-init") init(false);
  else if (c == "ta-init") init(true);
  else if (c == "stabilize") stabilize();
  else if (c == "gate-z") gate_z();
  else if (c == "gate-x") gate_x();
  else if (c == "gate-zz") gate_zz();
  else if (c == "nphoton-check") nphoton();
  else if (c == "wigner") wigner_state();
  else if (c == "sweep") sweep();
  else if (c == "reproduce-paper") reproduce();
  else throw ConfigError("unknown subcommand '" + c + "'");

  json cfgj = json::object();
  for (const auto& f : config_fields()) {
    const auto v = get_config_value(cfg_, f.key);
    if (v) std::visit([&](const auto& x) { cfgj[f.key] = x; }, *v);
  }
  summary_["config"] = cfgj;
  json units = {{"rates", "K"}, {"time", "1/K"}};
  if (cfg_.K_over_2pi_hz) {
    units["K_over_2pi_hz"] = *cfg_.K_over_2pi_hz;
    units["time_unit_seconds"] = 1.0 / (2.0 * std::numbers::pi * *cfg_.K_over_2pi_hz);
    units["note"] = "documentation only; all computation is in units of K";
  }
  summary_["units"] = units;
  summary_["threads"] = worker_count();
  summary_["timings"] = {{"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
  auto listed = files_;
  listed.push_back("summary.json");
  summary_["files"] = listed;
  write("summary.json", summary_.dump(2) + "\n");
  if (summary_.contains("fidelity")) out_ << c << ": fidelity " << summary_["fidelity"].get<double>() << '\n';
  out_ << "wrote " << listed.size() << " file(s) to " << cfg_.output_dir << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-photon driven Kerr resonator cat-state toolkit", "catkerr"};
  app.require_subcommand(0, 1);
  std::string config_path;
  std::map<std::string, std::string> flags;
  app.add_option("--config", config_path, "flat key = value config file; flags override it");
  app.add_option("--out", flags["output_dir"], "output directory (default: out)");
  for (const auto& f : config_fields()) {
    if (f.key == "subcommand" || f.key == "output_dir") continue;
    app.add_option("--" + f.key, flags[f.key], f.help);
  }
  for (const auto& [name, desc] : kSubcommands) app.add_subcommand(name, desc)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    if (!app.get_subcommands().empty()) cfg.subcommand = app.get_subcommands().front()->get_name();
    for (const auto& [k, v] : flags) {
      if (!v.empty()) set_config_value(cfg, k, v);
    }
    if (cfg.subcommand.empty()) throw ConfigError("no subcommand given");
    bool known = false;
    for (const auto& [name, desc] : kSubcommands) known = known || cfg.subcommand == name;
    if (!known) throw ConfigError("unknown subcommand '" + cfg.subcommand + "'");
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    Run(cfg, out).execute();
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace catkerr
