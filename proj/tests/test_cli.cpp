#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "porofix/errors.hpp"
#include "porofix/output.hpp"
#include "porofix/scenario.hpp"

using namespace porofix;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json base_config() {
  return json::parse(R"({
    "mesh": {"nx": 3, "ny": 3, "Lx": 1.0, "Ly": 1.0},
    "orders": {"s": 0, "r": 0},
    "physics": {"mu": 1.0, "lambda": 2.0, "b": 1.0, "c0": 1.0, "K": [[1.0, 0.0], [0.0, 1.0]], "rho_b": 1.0},
    "sip": {"delta0": "auto", "beta_exp": 1.0},
    "split": {"L": "auto", "tol": 1e-10, "max_iter": 200, "warm_start": true, "cold_start_diagnostics": false},
    "time": {"T": 1.0, "N": 2},
    "sources": "unit_source",
    "mode": "split",
    "output": {"directory": "unused", "write_vtk": true, "write_csv": true}
  })");
}

fs::path scratch(const std::string& name) {
  static const std::string tag = std::to_string(std::random_device{}());
  const fs::path p = fs::temp_directory_path() / ("porofix_cli_" + tag) / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string parse_error(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

// Minimal legacy-VTK reader: point count, cell pressure and point displacement.
struct VtkData {
  int points = 0;
  int cells = 0;
  std::vector<double> pressure;
  std::vector<double> displacement;
};

VtkData read_vtk(const fs::path& p) {
  std::ifstream in(p);
  VtkData d;
  std::string tok;
  while (in >> tok) {
    if (tok == "POINTS") {
      in >> d.points >> tok;
      for (int i = 0; i < 3 * d.points; ++i) in >> tok;
    } else if (tok == "CELL_TYPES") {
      in >> d.cells;
      for (int i = 0; i < d.cells; ++i) {
        int t;
        in >> t;
        CHECK(t == 9);
      }
    } else if (tok == "SCALARS") {
      in >> tok >> tok >> tok >> tok >> tok;  // name type ncomp LOOKUP_TABLE default
      d.pressure.resize(d.cells);
      for (double& v : d.pressure) in >> v;
    } else if (tok == "VECTORS") {
      in >> tok >> tok;
      d.displacement.resize(3 * d.points);
      for (double& v : d.displacement) in >> v;
    }
  }
  return d;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(POROFIX_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing errors name the field") {
  json j = base_config();
  j["physics"]["lambda"] = 0.0;
  CHECK(parse_error(j).find("physics.lambda") != std::string::npos);

  j = base_config();
  j["split"]["Lstab"] = 1.0;
  CHECK(parse_error(j).find("split.Lstab") != std::string::npos);

  j = base_config();
  j["orders"]["r"] = 2;
  CHECK(parse_error(j).find("orders.r") != std::string::npos);

  j = base_config();
  j["mesh"]["nx"] = 0;
  CHECK(parse_error(j).find("mesh.nx") != std::string::npos);

  j = base_config();
  j["sources"] = "bogus";
  CHECK(parse_error(j).find("sources") != std::string::npos);

  j = base_config();
  j["physics"]["K"] = json::array({json::array({1.0, 2.0}), json::array({2.0, 1.0})});
  CHECK(parse_error(j).find("physics.K") != std::string::npos);

  CHECK(parse_error(json::array()).find("config") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/porofix.json"), ConfigError);
}

TEST_CASE("auto values resolve") {
  const ScenarioConfig c = parse_config(base_config());
  CHECK(c.resolved_L() == doctest::Approx(1.0 / 4.0));
  CHECK(c.resolved_delta0() == doctest::Approx(10.0 * 4.0 * 4.0));
  json j = base_config();
  j["split"]["L"] = 0.75;
  j["sip"]["delta0"] = 30.0;
  const ScenarioConfig d = parse_config(j);
  CHECK(d.resolved_L() == 0.75);
  CHECK(d.resolved_delta0() == 30.0);
  // round trip through the serialized form
  const ScenarioConfig e = parse_config(d.to_json());
  CHECK(e.to_json() == d.to_json());
}

TEST_CASE("run writes manifest, iteration log and fields") {
  json j = base_config();
  j["sources"] = "zero";
  j["mode"] = "both";
  const fs::path out = scratch("zero");
  run_scenario(parse_config(j), out);

  const json m = json::parse(slurp(out / "manifest.json"));
  CHECK(m["resolved"]["L"].get<double>() == doctest::Approx(0.25));
  CHECK(m["slabs"].size() == 2);
  for (const auto& s : m["slabs"]) CHECK(s["iterations"].get<int>() == 1);

  const auto it = lines_of(out / "iterations.csv");
  CHECK(it.at(0) == join(kIterationHeader));
  CHECK(it.size() == 3);
  CHECK(lines_of(out / "traces.csv").at(0) == join(kTracesHeader));

  for (int n = 1; n <= 2; ++n) {
    const VtkData v = read_vtk(out / ("fields_slab" + std::to_string(n) + ".vtk"));
    CHECK(v.cells == 9);
    CHECK(v.points == 36);
    for (double p : v.pressure) CHECK(p == 0.0);
  }
}

TEST_CASE("VTK fields reload with the written values") {
  const ScenarioConfig c = parse_config(base_config());
  const fs::path out = scratch("unit");
  run_scenario(c, out);
  const ScenarioResult res = simulate(c);
  const SlabRecord& last = res.slabs.back().record;
  const VtkData v = read_vtk(out / "fields_slab2.vtk");
  REQUIRE(v.pressure.size() == 9);
  // s = 0: the cell mean is the coefficient
  double sum_file = 0.0, sum_mem = 0.0;
  for (int k = 0; k < 9; ++k) {
    CHECK(v.pressure[k] == doctest::Approx(last.p_end[k]).epsilon(1e-15));
    sum_file += v.pressure[k];
    sum_mem += last.p_end[k];
  }
  CHECK(sum_file == doctest::Approx(sum_mem).epsilon(1e-15));
  // displacement vanishes at the corners of boundary cells on the boundary
  CHECK(v.displacement[0] == 0.0);
  CHECK(v.displacement[1] == 0.0);
  double unorm = 0.0;
  for (double d : v.displacement) unorm += d * d;
  CHECK(unorm > 0.0);
}

TEST_CASE("run output is deterministic") {
  json j = base_config();
  j["mode"] = "both";
  const ScenarioConfig c = parse_config(j);
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  run_scenario(c, a);
  run_scenario(c, b);
  for (const char* f : {"iterations.csv", "traces.csv", "fields_slab1.vtk", "fields_slab2.vtk"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
}

TEST_CASE("L sweep has one row per value, slab and iteration") {
  json j = base_config();
  j["study"] = {{"kind", "l_sweep"}, {"values", {0.25, 1.0}}};
  const ScenarioConfig c = parse_config(j);
  const std::vector<SweepRow> rows = l_sweep(c);
  const fs::path out = scratch("sweep");
  run_study(c, out);
  const auto lines = lines_of(out / "lsweep.csv");
  CHECK(lines.at(0) == "L," + join(kIterationHeader));
  CHECK(lines.size() == rows.size() + 1);
  int last_rows = 0;
  for (const SweepRow& r : rows) last_rows += r.last ? 1 : 0;
  CHECK(last_rows == 2 * 2);
}

TEST_CASE("rates study header") {
  json j = base_config();
  j["mesh"]["nx"] = 2;
  j["mesh"]["ny"] = 2;
  j["sources"] = "mms:coupled";
  j["time"]["N"] = 1;
  j["study"] = {{"kind", "h_refine"}, {"levels", 2}};
  const fs::path out = scratch("rates");
  run_study(parse_config(j), out);
  const auto lines = lines_of(out / "rates.csv");
  CHECK(lines.at(0) == join(kRatesHeader));
  CHECK(lines.size() == 3);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.5) == "5.0000000000000000e-01");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(std::optional<double>{}).empty());
  CHECK_THROWS(write_csv(scratch("x.csv"), {"a", "b"}, {{"1"}}));
}

TEST_CASE("command-line exit codes") {
  const std::string dir = POROFIX_CONFIG_DIR;
  CHECK(run_cli("check --config " + dir + "/desk.json") == 0);
  CHECK(run_cli("check --config /nonexistent.json") == 2);
  CHECK(run_cli("frobnicate") != 0);

  json bad = base_config();
  bad["physics"]["mu"] = -1.0;
  const fs::path p = scratch("bad.json");
  fs::create_directories(p.parent_path());
  std::ofstream(p) << bad.dump();
  CHECK(run_cli("run --config " + p.string()) == 2);

  const fs::path out = scratch("cli_run");
  CHECK(run_cli("run --config " + dir + "/desk.json --out " + out.string()) == 0);
  CHECK(fs::exists(out / "manifest.json"));

  json stall = base_config();
  stall["split"]["max_iter"] = 1;
  const fs::path q = scratch("stall.json");
  std::ofstream(q) << stall.dump();
  CHECK(run_cli("run --config " + q.string() + " --out " + scratch("stall").string()) == 3);
}
