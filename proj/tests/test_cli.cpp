#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "qcalab/commands.hpp"
#include "qcalab/config.hpp"

using namespace qcalab;
namespace fs = std::filesystem;

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : fallback;
}

std::string config_path(const std::string& name) { return env_or("QCALAB_CONFIGS", "configs") + "/" + name; }

fs::path scratch() {
  fs::path p = fs::temp_directory_path() / "qcalab_cli_test";
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Runs the CLI binary and returns its exit status; stdout goes to `out`.
int run_binary(const std::string& args, const fs::path& out) {
  const std::string cmd = env_or("QCALAB_CLI", "qcalab-cli") + " " + args + " > " + out.string() + " 2>/dev/null";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

struct InProcess {
  int code;
  std::string out, err;
};

InProcess run_inproc(const std::string& command, const std::string& cfg) {
  CliOptions opt;
  opt.command = command;
  opt.config_path = config_path(cfg);
  std::ostringstream o, e;
  const int code = run_cli(opt, o, e);
  return {code, o.str(), e.str()};
}

fs::path write_config(const std::string& name, const std::string& body) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("index report layout and values") {
  const InProcess r = run_inproc("index", "index_shift.json");
  REQUIRE(r.code == 0);
  const ojson j = ojson::parse(r.out);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  REQUIRE(keys.size() >= 5);
  CHECK(keys[0] == "version");
  CHECK(keys[1] == "experiment");
  CHECK(keys[2] == "config");
  CHECK(keys[3] == "tolerances");
  CHECK(keys[4] == "warnings");
  CHECK(j["version"] == kVersion);
  CHECK(j["config"]["model"]["kind"] == "shift");
  CHECK(j["tolerances"]["residual"].get<double>() == doctest::Approx(1e-8));
  const double l2 = std::log(2.0);
  CHECK(j["methods"]["dimension"]["rounded"].get<double>() == doctest::Approx(l2));
  CHECK(j["methods"]["mi_von_neumann"]["raw"].get<double>() == doctest::Approx(l2));
  CHECK(j["methods"]["mi_renyi2"]["raw"].get<double>() == doctest::Approx(l2));
  CHECK(j["per_cut_spread"].get<double>() < 1e-9);
  CHECK(r.out.find("time") == std::string::npos);
}

TEST_CASE("reports are deterministic") {
  const InProcess a = run_inproc("synthesize", "synthesize_circuit.json");
  const InProcess b = run_inproc("synthesize", "synthesize_circuit.json");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const ojson j = ojson::parse(a.out);
  CHECK(j["within_tolerance"] == true);
  CHECK(j["config"]["seed"] == 5);
}

TEST_CASE("config errors map to exit code 2") {
  CHECK(run_inproc("tails", "index_shift.json").code == kExitConfig);
  const fs::path unknown = write_config("unknown.json", R"({"experiment": "index", "colour": 1})");
  CliOptions opt{"index", unknown.string(), std::nullopt, std::nullopt, std::nullopt, std::nullopt};
  std::ostringstream o, e;
  CHECK(run_cli(opt, o, e) == kExitConfig);
  CHECK(e.str().find("colour") != std::string::npos);

  const fs::path noseed = write_config("noseed.json", R"({"experiment": "approximate"})");
  opt = CliOptions{"approximate", noseed.string(), std::nullopt, std::nullopt, std::nullopt, std::nullopt};
  CHECK(run_cli(opt, o, e) == kExitConfig);

  const fs::path broken = write_config("broken.json", "{\"experiment\": ");
  opt = CliOptions{"index", broken.string(), std::nullopt, std::nullopt, std::nullopt, std::nullopt};
  CHECK(run_cli(opt, o, e) == kExitConfig);
}

TEST_CASE("exit codes from the binary") {
  const fs::path out = scratch() / "stdout.txt";
  CHECK(run_binary("index --config " + config_path("index_shift.json"), out) == 0);
  CHECK(ojson::parse(slurp(out))["experiment"] == "index");
  CHECK(run_binary("index --config /nonexistent.json", out) == 2);
  CHECK(run_binary("frobnicate", out) == 2);
  CHECK(run_binary("index --config " + config_path("index_heisenberg.json") + " --max-dim 512", out) == 3);
  CHECK(run_binary("synthesize --config " + config_path("synthesize_shift.json"), out) == 5);
}

TEST_CASE("flags override the config and are echoed") {
  CliOptions opt{"synthesize", config_path("synthesize_circuit.json"), 9, std::nullopt, std::nullopt, 1e-7};
  std::ostringstream o, e;
  REQUIRE(run_cli(opt, o, e) == 0);
  const ojson j = ojson::parse(o.str());
  CHECK(j["config"]["seed"] == 9);
  CHECK(j["tolerances"]["residual"].get<double>() == doctest::Approx(1e-7));
}

TEST_CASE("tails write a CSV profile and a JSON report") {
  const fs::path csv = scratch() / "tails.csv";
  fs::remove(csv);
  CliOptions opt{"tails", config_path("tails_qca.json"), std::nullopt, csv.string(), std::nullopt, std::nullopt};
  std::ostringstream o, e;
  REQUIRE(run_cli(opt, o, e) == 0);
  std::istringstream lines(slurp(csv));
  std::string line;
  std::getline(lines, line);
  CHECK(line == "r,f_hat,raw,method");
  int rows = 0;
  while (std::getline(lines, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 4);
  const ojson j = ojson::parse(slurp(csv.string() + ".json"));
  CHECK(j["tails"]["certified_radius"].get<int>() <= 2);
  CHECK(j["tails"]["profile"][3]["f_hat"].get<double>() == 0.0);
}

TEST_CASE("identity synthesis has an empty schedule") {
  const InProcess r = run_inproc("synthesize", "synthesize_identity.json");
  REQUIRE(r.code == 0);
  const ojson j = ojson::parse(r.out);
  CHECK(j["model"]["terms"].empty());
  CHECK(j["model"]["schedule"].empty());
}
