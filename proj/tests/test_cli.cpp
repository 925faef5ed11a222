#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "sgsurf/config.hpp"
#include "sgsurf/quadrature.hpp"
#include "sgsurf/report.hpp"
#include "support/generators.hpp"

using namespace sgsurf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("sgsurf_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(SGSURF_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("config defaults and a full file") {
  const RunConfig d = parse_config("{}");
  CHECK(d.lattice == LatticeSpec{1, {4}});
  CHECK(d.k == 2);
  CHECK(d.gl_order == 16);
  CHECK(std::holds_alternative<McAveraging>(d.averaging));

  const RunConfig c = parse_config(R"(lattice:
  dim: 2
  sides: [3, 4]
bc: [free, antiperiodic]
beta: [0.5, 1.0]
k: 3
engine: mc
averaging:
  method: gauss_hermite
  nodes: 6
  designated_nodes: 40
gl_order: 24
mc:
  sweeps: 1000
  burn_in: 100
  rungs: 8
)");
  CHECK(c.lattice == LatticeSpec{2, {3, 4}});
  CHECK(c.bcs == std::vector<BoundaryCondition>{BoundaryCondition::Free, BoundaryCondition::Antiperiodic});
  CHECK(c.betas == std::vector<double>{0.5, 1.0});
  CHECK(c.k == 3);
  CHECK(c.engine.selector == EngineConfig::Selector::Mc);
  const auto& gh = std::get<GaussHermiteAveraging>(c.averaging);
  CHECK(gh.nodes == 6);
  CHECK(gh.designated_nodes == 40);
  CHECK(c.gl_order == 24);
  CHECK(c.engine.mc.sweeps == 1000);
  CHECK(c.engine.mc.rungs == 8);
}

TEST_CASE("config errors carry the line") {
  CHECK(error_line("k: 2\nbogus: 1\n") == 2);
  CHECK(error_line("lattice:\n  dim: 1\n  sidez: [4]\n") == 3);
  CHECK(error_line("k: 2\ngl_order: many\n") == 2);
  CHECK(error_line("averaging:\n  method: trapezoid\n") == 2);
  try {
    parse_config("k: 2\nbogus: 1\n");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "bogus");
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("validation rejects inconsistent configs") {
  auto bad = [](const std::string& text) {
    bool threw = false;
    try {
      validate_config(parse_config(text));
    } catch (const ConfigError&) {
      threw = true;
    }
    return threw;
  };
  CHECK(bad("beta: -1\n"));
  CHECK(bad("gl_order: 1\n"));
  CHECK(bad("k: 0\n"));
  CHECK(bad("lattice:\n  dim: 2\n  sides: [3]\n"));
  CHECK(bad("lattice:\n  dim: 2\n  sides: [3, 3]\nengine: chain\n"));
  CHECK(bad("averaging:\n  samples: 1\n"));
  CHECK(bad("mc:\n  burn_in: 5000\n  sweeps: 100\n"));
  CHECK_FALSE(bad("lattice:\n  dim: 2\n  sides: [3, 3]\n"));
  CHECK_THROWS(parse_boundary("twisted"));
  CHECK(parse_beta_list("0.5, 1,2") == std::vector<double>{0.5, 1.0, 2.0});
  CHECK_THROWS(parse_beta_list("0.5,,1"));
}

TEST_CASE("property: config JSON round-trips") {
  gen::Source src(41);
  for (int trial = 0; trial < 40; ++trial) {
    RunConfig c;
    c.lattice = src.spec(3, 3, 64);
    c.k = src.integer(1, 4);
    c.betas = {src.uniform(0.01, 2.0), src.uniform(0.01, 2.0)};
    c.gl_order = src.integer(2, 64);
    c.mc_averaging = McAveraging{static_cast<std::size_t>(src.integer(2, 5000)),
                                 static_cast<std::uint64_t>(src.integer(0, 1 << 30))};
    c.gh_averaging = GaussHermiteAveraging{src.integer(2, 40), src.integer(2, 120)};
    c.averaging = src.coin() ? AveragingMethod{c.mc_averaging} : AveragingMethod{c.gh_averaging};
    c.engine.mc.sweeps = static_cast<std::size_t>(src.integer(500, 9000));
    c.engine.mc.ladder_span = src.uniform(1.5, 10.0);
    const std::string text = config_json(c);
    CHECK(config_json(parse_config(text)) == text);
  }
}

TEST_CASE("curve CSV round-trips exactly") {
  gen::Source src(42);
  for (int n : {2, 5, 16, 32}) {
    const auto& rule = legendre_unit(n);
    IntegrandCurve c;
    c.t_nodes = rule.nodes;
    c.weights = rule.weights;
    for (int i = 0; i < n; ++i) {
      c.values.push_back(src.uniform(0.0, 1.0) / 3.0);
      c.errors.push_back(src.coin() ? 0.0 : src.uniform(0.0, 1e-3));
    }
    c.designated_count = static_cast<std::size_t>(src.integer(1, 12));
    const std::string text = write_curve_csv(c);
    CHECK(text.rfind("t,value,std_error,designated_count\n", 0) == 0);
    CHECK(parse_curve_csv(text) == c);
  }
  CHECK_THROWS(parse_curve_csv("t,value\n0.5,1\n"));
  CHECK_THROWS(parse_curve_csv("t,value,std_error,designated_count\n0.5,x,0,1\n"));
}

TEST_CASE("dump never prints negative zero") {
  QuenchedEstimate e;
  e.mean = -0.0;
  const std::string s = dump(to_json(e));
  CHECK(s.find("-0") == std::string::npos);
  CHECK(s.back() == '\n');
}

TEST_CASE("write_outputs is all or nothing") {
  const auto dir = scratch("outputs");
  write_outputs(dir.string(), {{"a.txt", "1"}, {"b.txt", "2"}});
  CHECK(slurp(dir / "a.txt") == "1");
  CHECK(slurp(dir / "b.txt") == "2");
  write_outputs((dir / "nested" / "deeper").string(), {{"c.txt", "3"}});
  CHECK(slurp(dir / "nested" / "deeper" / "c.txt") == "3");
  CHECK_THROWS(write_outputs(dir.string(), {{"d.txt", "4"}, {"no/such/e.txt", "5"}}));
  CHECK_FALSE(fs::exists(dir / "d.txt"));
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir)) files += entry.is_regular_file();
  CHECK(files == 2);
}

TEST_CASE("exit codes") {
  CHECK(run("geometry --k 2") == 0);
  CHECK(run("--help") == 0);
  CHECK(run("") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("pressure --no-such-flag") == 1);
  CHECK(run("pressure --beta -1") == 1);
  CHECK(run("pressure --samples 10 --gh-nodes 4") == 1);
  CHECK(run("pressure --bc sideways") == 1);
  CHECK(run("surface --k 0") == 1);
  CHECK(run("verify nonsense") == 1);
  CHECK(run("scan --beta 0,0.2 --gh-nodes 3") == 1);
  const auto dir = scratch("missing_config");
  CHECK(run("pressure --config " + (dir / "nope.yaml").string()) == 1);
  spit(dir / "bad.yaml", "k: 2\nbogus: 1\n");
  CHECK(run("pressure --config " + (dir / "bad.yaml").string()) == 1);
}

TEST_CASE("quadrature cap refusal writes nothing") {
  const auto dir = scratch("cap");
  spit(dir / "big.yaml", "lattice:\n  dim: 2\n  sides: [3, 3]\n");
  CHECK(run("surface --config " + (dir / "big.yaml").string() + " --gh-nodes 20 --out " +
            (dir / "out").string()) == 1);
  fs::create_directories(dir / "out");
  CHECK(run("surface --config " + (dir / "big.yaml").string() + " --gh-nodes 20 --out " +
            (dir / "out").string()) == 1);
  CHECK(fs::is_empty(dir / "out"));
}

TEST_CASE("beta = 0 surface report is zero and curves parse back") {
  const auto dir = scratch("cold");
  spit(dir / "small.yaml", "averaging:\n  method: gauss_hermite\n  nodes: 3\n  designated_nodes: 6\n");
  REQUIRE(run("surface --beta 0 --k 2 --config " + (dir / "small.yaml").string() + " --out " +
              (dir / "out").string()) == 0);
  const Json j = Json::parse(slurp(dir / "out" / "surface.json"));
  const auto& r = j["reports"][0];
  for (const char* key : {"phi", "phi_integral", "pi", "pi_integral", "pi_antiperiodic"}) {
    CAPTURE(key);
    CHECK(r["tau"][key]["by_faces"]["value"].get<double>() == 0.0);
    CHECK(r["tau"][key]["by_cut"]["value"].get<double>() == 0.0);
  }
  CHECK(r["all_bounds_pass"].get<bool>());
  CHECK(r["pressure"]["free"]["mean"].get<double>() == 4 * std::log(2.0));
  const auto curve = parse_curve_csv(slurp(dir / "out" / "curve_free_surface.csv"));
  CHECK(curve.t_nodes.size() == 16);
  CHECK(curve.designated_count == 2);
  for (double v : curve.values) CHECK(std::abs(v - 1.0) < 1e-14);
  CHECK(j["config"]["gl_order"].get<int>() == 16);
  CHECK(j.contains("version"));
}

TEST_CASE("reruns are byte identical") {
  const auto a = scratch("rerun_a");
  const auto b = scratch("rerun_b");
  const std::string args = "surface --beta 0.7,1.1 --samples 12 --seed 5 --k 2 --bc periodic --out ";
  REQUIRE(run(args + a.string()) == 0);
  REQUIRE(run(args + b.string() + " --threads 2") == 0);
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    CAPTURE(entry.path().filename().string());
    CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
    ++compared;
  }
  CHECK(compared == 5);
  const auto p = scratch("pressure");
  REQUIRE(run("pressure --gh-nodes 6 --beta 0.5 --out " + p.string()) == 0);
  const Json j = Json::parse(slurp(p / "pressure.json"));
  CHECK(j["command"] == "pressure");
}

TEST_CASE("scan writes a table and the fit") {
  const auto dir = scratch("scan");
  spit(dir / "small.yaml", "averaging:\n  method: gauss_hermite\n  nodes: 3\n  designated_nodes: 6\n");
  REQUIRE(run("scan --beta 0.3,0.2 --k 2 --config " + (dir / "small.yaml").string() + " --out " +
              (dir / "out").string()) == 0);
  const Json j = Json::parse(slurp(dir / "out" / "scan.json"));
  CHECK(j["scan"]["rows"].size() == 2);
  CHECK(j["scan"]["rows"][0]["beta"].get<double>() == 0.2);
  CHECK(slurp(dir / "out" / "scan.csv").find("beta,") == 0);
}
