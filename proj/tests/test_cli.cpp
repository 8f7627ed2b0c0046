#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "catkerr/cli.hpp"
#include "catkerr/config.hpp"
#include "catkerr/errors.hpp"

using namespace catkerr;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "catkerr");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("catkerr_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

nlohmann::json summary(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "summary.json")); }

}  // namespace

TEST_CASE("config round trip") {
  ExperimentConfig c;
  c.subcommand = "gate-x";
  c.output_dir = "runs/x \"quoted\"";
  c.K = -1.0;
  c.kappa = 1.0 / 250;
  c.Ep = 0.1 + 0.2;
  c.Ep_im = -3e-17;
  c.N = 15;
  c.theta = std::numbers::pi / 2;
  c.timing = "formula";
  c.strengths = "0.2, 0.4";
  c.nx = 11;
  c.rel_tol = 1e-10;
  c.K_over_2pi_hz = 750e3;
  CHECK(parse_config(render_config(c)) == c);
  CHECK(parse_config(render_config(ExperimentConfig{})) == ExperimentConfig{});
  CHECK(render_config(parse_config(render_config(c))) == render_config(c));

  SUBCASE("every field survives") {
    ExperimentConfig all;
    all.subcommand = "sweep";
    double v = 0.5;
    int k = 3;
    for (const auto& f : config_fields()) {
      if (f.key == "subcommand" || f.key == "output_dir") continue;
      if (f.kind == FieldKind::Real) set_config_value(all, f.key, std::to_string(v += 0.25));
      if (f.kind == FieldKind::Integer) set_config_value(all, f.key, std::to_string(++k));
      if (f.kind == FieldKind::Text) set_config_value(all, f.key, f.key + " text");
    }
    CHECK(parse_config(render_config(all)) == all);
  }
}

TEST_CASE("config parsing") {
  const auto c = parse_config(
      "# comment\n"
      "subcommand = \"steady-state\"\n"
      "\n"
      "  kappa = 8   # trailing\n"
      "Ep=16\n"
      "N = 50\n"
      "method = \"null-space\" # choice\n");
  CHECK(c.subcommand == "steady-state");
  CHECK(*c.kappa == 8.0);
  CHECK(*c.Ep == 16.0);
  CHECK(*c.N == 50);
  CHECK(*c.method == "null-space");
  CHECK_FALSE(c.K);

  CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("N = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("K = \"1\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("method = null-space\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("kappa\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("method = \"open\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("K = true\n"), ConfigError);
  try {
    parse_config("K = 1\nkappa = x\n");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("exit codes and usage") {
  const auto bad = cli({"frobnicate"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("steady-state") != std::string::npos);
  CHECK(bad.err.find("reproduce-paper") != std::string::npos);

  CHECK(cli({}).code == 2);
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"gate-z", "--Ez", "abc"}).code == 2);
  CHECK(cli({"gate-z", "--no-such-flag", "1"}).code == 2);
  CHECK(cli({"gate-z", "--N", "3", "--out", scratch("small").string()}).code == 2);
  CHECK(cli({"adiabatic-init", "--initial", "sideways", "--out", scratch("side").string()}).code == 2);
  CHECK(cli({"gate-z", "--config", "/nonexistent/file.toml"}).code == 2);

  const auto conv = cli({"steady-state", "--kappa", "2", "--Ep", "4", "--N", "20", "--max_time", "0.5", "--out",
                         scratch("conv").string()});
  CHECK(conv.code == 3);
  CHECK(conv.err.find("numerical") != std::string::npos);
}

TEST_CASE("wigner subcommand on the vacuum") {
  const auto dir = scratch("vac");
  const auto r = cli({"wigner", "--state", "vacuum", "--nx", "21", "--np", "11", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto rows = lines(slurp(dir / "wigner_vacuum.csv"));
  REQUIRE(rows.size() == 1 + 21 * 11);
  CHECK(rows[0] == "x,p,w");
  // row-major over p, then x
  CHECK(rows[1].rfind("-4,-4,", 0) == 0);
  CHECK(rows[2].rfind("-3.6,-4,", 0) == 0);
  CHECK(rows[22].rfind("-4,-3.2,", 0) == 0);
  const auto s = summary(dir);
  CHECK(s["peak"]["w"].get<double>() == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-12));
  CHECK(s["peak"]["x"].get<double>() == 0.0);
  CHECK(s["peak"]["p"].get<double>() == 0.0);
  CHECK(s["model"]["N"] == 30);
  for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("gate-z artifacts are deterministic") {
  const auto a = scratch("za"), b = scratch("zb");
  ::setenv("CATKERR_THREADS", "1", 1);
  REQUIRE(cli({"gate-z", "--nx", "41", "--np", "41", "--out", a.string()}).code == 0);
  ::setenv("CATKERR_THREADS", "4", 1);
  REQUIRE(cli({"gate-z", "--nx", "41", "--np", "41", "--out", b.string()}).code == 0);
  ::unsetenv("CATKERR_THREADS");
  for (const char* f : {"timeseries.csv", "wigner_final.csv"}) CHECK(slurp(a / f) == slurp(b / f));
  CHECK(lines(slurp(a / "timeseries.csv"))[0] == "t,fidelity,parity,mean_n,purity");
  CHECK(lines(slurp(a / "timeseries.csv")).size() == 52);

  const auto s = summary(a);
  CHECK(s["threads"] == 1);
  CHECK(s["fidelity"].get<double>() == doctest::Approx(0.999).epsilon(0.002));
  CHECK(s["model"]["Ez"].get<double>() == 0.8);
  CHECK(s["model"]["kappa"].get<double>() == 0.0);
  CHECK(s["units"]["time"] == "1/K");
  CHECK(s.contains("timings"));
}

TEST_CASE("flags override the config file") {
  const auto dir = scratch("cfg");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "run.toml");
    f << "subcommand = \"gate-x\"\nEp = 1\ndelta_x = 0.25\nN = 15\nK_over_2pi_hz = 750000\n";
  }
  const auto out = dir / "out";
  const auto r = cli({"--config", (dir / "run.toml").string(), "--delta_x", "0.3333333333333333", "--out", out.string()});
  REQUIRE(r.code == 0);
  const auto s = summary(out);
  CHECK(s["subcommand"] == "gate-x");
  CHECK(s["model"]["delta_x"].get<double>() == doctest::Approx(1.0 / 3.0));
  CHECK(s["config"]["K_over_2pi_hz"].get<double>() == 750000.0);
  CHECK(s["units"]["time_unit_seconds"].get<double>() == doctest::Approx(1.0 / (2 * std::numbers::pi * 750e3)));
  CHECK(s["conventions"]["timing"].get<std::string>().rfind("calibrated", 0) == 0);
  CHECK(s["metrics"].contains("formula_time"));
}

TEST_CASE("steady-state summary") {
  const auto dir = scratch("ss");
  const auto r = cli({"steady-state", "--K", "1", "--kappa", "8", "--Ep", "16", "--nx", "61", "--np", "61", "--out",
                      dir.string()});
  REQUIRE(r.code == 0);
  const auto s = summary(dir);
  CHECK(s["fidelity"].get<double>() == doctest::Approx(0.9991).epsilon(0.003));
  CHECK(s["model"]["N"] == 70);
  CHECK(s["model"]["n_drive"] == 2);
  CHECK(s["conventions"]["theta0_branch"] == "-");
  CHECK(s["overlay_alpha0"].size() == 2);
  const auto rows = lines(slurp(dir / "wigner_steady.csv"));
  CHECK(rows.size() == 1 + 61 * 61);
}

TEST_CASE("sweep and reproduce-paper tables") {
  const auto dir = scratch("sweep");
  REQUIRE(cli({"sweep", "--gate", "z", "--strengths", "0.8, 3.2", "--out", dir.string()}).code == 0);
  const auto rows = lines(slurp(dir / "sweep.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "strength,fidelity,fidelity_squared,gate_time");
  CHECK(rows[1].rfind("0.8,", 0) == 0);

  const auto acc = scratch("acc");
  const auto r = cli({"reproduce-paper", "--criteria", "10,11", "--out", acc.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("criterion 10  PASS") != std::string::npos);
  CHECK(r.out.find("criterion 11  PASS") != std::string::npos);
  CHECK(summary(acc)["total"] == 2);
  CHECK(cli({"reproduce-paper", "--criteria", "12"}).code == 2);
}

TEST_CASE("stabilize writes one series per mode") {
  const auto dir = scratch("stab");
  REQUIRE(cli({"stabilize", "--t_points", "4", "--nx", "11", "--np", "11", "--out", dir.string()}).code == 0);
  for (const char* m : {"driven-knr", "undriven-knr", "linear"}) {
    const auto rows = lines(slurp(dir / (std::string("timeseries_") + m + ".csv")));
    CHECK(rows.size() == 6);
    CHECK(rows[1].rfind("0,1,", 0) == 0);
  }
}
