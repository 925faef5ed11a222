#include "sgsurf/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace sgsurf {

ConfigError::ConfigError(std::string field, std::string message, int line)
    : std::runtime_error(
          (line > 0 ? "line " + std::to_string(line) + ", " : std::string()) + "field '" + field +
          "': " + message),
      field_(std::move(field)),
      line_(line) {}

SurfaceMethods RunConfig::methods() const {
  SurfaceMethods m;
  m.averaging = averaging;
  m.engine = engine;
  m.gl_order = gl_order;
  return m;
}

BoundaryCondition parse_boundary(const std::string& name) {
  if (name == "free") return BoundaryCondition::Free;
  if (name == "periodic") return BoundaryCondition::Periodic;
  if (name == "antiperiodic") return BoundaryCondition::Antiperiodic;
  throw ConfigError("bc", "expected free, periodic or antiperiodic, got '" + name + "'");
}

std::vector<double> parse_beta_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ConfigError("beta", "'" + item + "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("beta", "empty list");
  return out;
}

namespace {

int line_of(const YAML::Node& node) { return node.Mark().line >= 0 ? node.Mark().line + 1 : 0; }

template <typename T>
T scalar(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) throw ConfigError(field, "expected a scalar", line_of(node));
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field, "cannot read '" + node.Scalar() + "'", line_of(node));
  }
}

template <typename T>
T unsigned_scalar(const YAML::Node& node, const std::string& field) {
  const auto v = scalar<long long>(node, field);
  if (v < 0) throw ConfigError(field, "must be non-negative", line_of(node));
  return static_cast<T>(v);
}

template <typename T>
std::vector<T> list(const YAML::Node& node, const std::string& field) {
  std::vector<T> out;
  if (node.IsSequence()) {
    for (const auto& item : node) out.push_back(scalar<T>(item, field));
  } else {
    out.push_back(scalar<T>(node, field));
  }
  return out;
}

void check_keys(const YAML::Node& node, const std::string& prefix,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(prefix.empty() ? "<root>" : prefix, "expected a mapping",
                                       line_of(node));
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      throw ConfigError(prefix.empty() ? key : prefix + "." + key, "unknown key", line_of(kv.first));
    }
  }
}

EngineConfig::Selector parse_selector(const YAML::Node& node) {
  const auto name = scalar<std::string>(node, "engine");
  if (name == "auto") return EngineConfig::Selector::Auto;
  if (name == "enumerate") return EngineConfig::Selector::Enumerate;
  if (name == "chain") return EngineConfig::Selector::Chain;
  if (name == "mc") return EngineConfig::Selector::Mc;
  throw ConfigError("engine", "expected auto, enumerate, chain or mc, got '" + name + "'",
                    line_of(node));
}

KernelIsa parse_isa(const YAML::Node& node) {
  const auto name = scalar<std::string>(node, "enumeration.isa");
  if (name == "auto") return KernelIsa::Auto;
  if (name == "scalar") return KernelIsa::Scalar;
  if (name == "avx2") return KernelIsa::Avx2;
  throw ConfigError("enumeration.isa", "expected auto, scalar or avx2, got '" + name + "'",
                    line_of(node));
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("<root>", e.msg, e.mark.line + 1);
  }
  RunConfig c;
  if (root.IsNull()) return c;
  check_keys(root, "", {"lattice", "bc", "beta", "k", "engine", "averaging", "gl_order", "mc",
                        "enumeration", "threads", "out"});

  if (const auto n = root["lattice"]) {
    check_keys(n, "lattice", {"dim", "sides"});
    if (n["sides"]) c.lattice.sides = list<int>(n["sides"], "lattice.sides");
    c.lattice.dim = n["dim"] ? scalar<int>(n["dim"], "lattice.dim")
                             : static_cast<int>(c.lattice.sides.size());
    if (c.lattice.dim < 1) throw ConfigError("lattice.dim", "must be >= 1", line_of(n["dim"]));
    if (c.lattice.sides.size() != static_cast<std::size_t>(c.lattice.dim)) {
      throw ConfigError("lattice.sides", "expected " + std::to_string(c.lattice.dim) + " sides",
                        line_of(n));
    }
  }
  if (const auto n = root["bc"]) {
    c.bcs.clear();
    for (const auto& name : list<std::string>(n, "bc")) {
      try {
        c.bcs.push_back(parse_boundary(name));
      } catch (const ConfigError& e) {
        throw ConfigError("bc", e.what(), line_of(n));
      }
    }
  }
  if (const auto n = root["beta"]) c.betas = list<double>(n, "beta");
  if (const auto n = root["k"]) c.k = scalar<int>(n, "k");
  if (const auto n = root["engine"]) c.engine.selector = parse_selector(n);
  if (const auto n = root["gl_order"]) c.gl_order = scalar<int>(n, "gl_order");
  if (const auto n = root["threads"]) c.threads = unsigned_scalar<unsigned>(n, "threads");
  if (const auto n = root["out"]) c.out = scalar<std::string>(n, "out");

  bool use_gh = false;
  if (const auto n = root["averaging"]) {
    check_keys(n, "averaging", {"method", "samples", "seed", "nodes", "designated_nodes", "cap"});
    if (n["method"]) {
      const auto m = scalar<std::string>(n["method"], "averaging.method");
      if (m == "gauss_hermite") {
        use_gh = true;
      } else if (m != "mc") {
        throw ConfigError("averaging.method", "expected mc or gauss_hermite, got '" + m + "'",
                          line_of(n["method"]));
      }
    }
    if (n["samples"]) c.mc_averaging.samples = unsigned_scalar<std::size_t>(n["samples"], "averaging.samples");
    if (n["seed"]) c.mc_averaging.seed = unsigned_scalar<std::uint64_t>(n["seed"], "averaging.seed");
    if (n["nodes"]) c.gh_averaging.nodes = scalar<int>(n["nodes"], "averaging.nodes");
    if (n["designated_nodes"]) {
      c.gh_averaging.designated_nodes = scalar<int>(n["designated_nodes"], "averaging.designated_nodes");
    }
    if (n["cap"]) c.gh_averaging.cap = unsigned_scalar<std::size_t>(n["cap"], "averaging.cap");
  }
  if (use_gh) {
    c.averaging = c.gh_averaging;
  } else {
    c.averaging = c.mc_averaging;
  }

  if (const auto n = root["mc"]) {
    check_keys(n, "mc", {"sweeps", "burn_in", "thin", "rungs", "ladder_span", "swap_interval",
                         "chain_seed", "batches", "ti_nodes"});
    auto& p = c.engine.mc;
    if (n["sweeps"]) p.sweeps = unsigned_scalar<std::size_t>(n["sweeps"], "mc.sweeps");
    if (n["burn_in"]) p.burn_in = unsigned_scalar<std::size_t>(n["burn_in"], "mc.burn_in");
    if (n["thin"]) p.thin = unsigned_scalar<std::size_t>(n["thin"], "mc.thin");
    if (n["rungs"]) p.rungs = scalar<int>(n["rungs"], "mc.rungs");
    if (n["ladder_span"]) p.ladder_span = scalar<double>(n["ladder_span"], "mc.ladder_span");
    if (n["swap_interval"]) p.swap_interval = unsigned_scalar<std::size_t>(n["swap_interval"], "mc.swap_interval");
    if (n["chain_seed"]) p.chain_seed = unsigned_scalar<std::uint64_t>(n["chain_seed"], "mc.chain_seed");
    if (n["batches"]) p.batches = unsigned_scalar<std::size_t>(n["batches"], "mc.batches");
    if (n["ti_nodes"]) p.ti_nodes = scalar<int>(n["ti_nodes"], "mc.ti_nodes");
  }
  if (const auto n = root["enumeration"]) {
    check_keys(n, "enumeration", {"cap", "isa"});
    if (n["cap"]) c.engine.enumeration.cap = unsigned_scalar<std::size_t>(n["cap"], "enumeration.cap");
    if (n["isa"]) c.engine.enumeration.isa = parse_isa(n["isa"]);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const RunConfig& c) {
  if (c.lattice.dim < 1 || c.lattice.sides.size() != static_cast<std::size_t>(c.lattice.dim)) {
    throw ConfigError("lattice.sides", "expected " + std::to_string(c.lattice.dim) + " sides");
  }
  for (int side : c.lattice.sides) {
    if (side < 2) throw ConfigError("lattice.sides", "every side must be >= 2");
  }
  if (c.bcs.empty()) throw ConfigError("bc", "at least one boundary condition is required");
  if (c.betas.empty()) throw ConfigError("beta", "at least one beta is required");
  for (double b : c.betas) {
    if (!(b >= 0.0) || !std::isfinite(b)) throw ConfigError("beta", "every beta must be finite and >= 0");
  }
  if (c.k < 1) throw ConfigError("k", "must be >= 1");
  if (c.gl_order < 2 || c.gl_order > 256) throw ConfigError("gl_order", "must lie in [2, 256]");
  if (c.engine.selector == EngineConfig::Selector::Chain && c.lattice.dim != 1) {
    throw ConfigError("engine", "the chain engine requires dim = 1");
  }
  if (c.engine.enumeration.cap < 2 || c.engine.enumeration.cap > 40) {
    throw ConfigError("enumeration.cap", "must lie in [2, 40]");
  }
  if (const auto* mc = std::get_if<McAveraging>(&c.averaging)) {
    if (mc->samples < 2) throw ConfigError("averaging.samples", "must be >= 2");
  } else {
    const auto& gh = std::get<GaussHermiteAveraging>(c.averaging);
    if (gh.nodes < 2 || gh.nodes > 200) throw ConfigError("averaging.nodes", "must lie in [2, 200]");
    if (gh.designated_nodes < 2 || gh.designated_nodes > 200) {
      throw ConfigError("averaging.designated_nodes", "must lie in [2, 200]");
    }
  }
  for (double b : c.betas) {
    try {
      validate(c.engine.mc, b);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("mc", e.what());
    }
  }
}

std::string config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["lattice"] = {{"dim", c.lattice.dim}, {"sides", c.lattice.sides}};
  std::vector<std::string> bcs;
  for (auto bc : c.bcs) bcs.push_back(to_string(bc));
  j["bc"] = bcs;
  j["beta"] = c.betas;
  j["k"] = c.k;
  j["engine"] = to_string(c.engine.selector);
  const bool gh = is_quadrature(c.averaging);
  const McAveraging mc = gh ? c.mc_averaging : std::get<McAveraging>(c.averaging);
  const GaussHermiteAveraging quad = gh ? std::get<GaussHermiteAveraging>(c.averaging) : c.gh_averaging;
  j["averaging"] = {{"method", gh ? "gauss_hermite" : "mc"},
                    {"samples", mc.samples},
                    {"seed", mc.seed},
                    {"nodes", quad.nodes},
                    {"designated_nodes", quad.designated_nodes},
                    {"cap", quad.cap}};
  j["gl_order"] = c.gl_order;
  const auto& p = c.engine.mc;
  j["mc"] = {{"sweeps", p.sweeps},         {"burn_in", p.burn_in},
             {"thin", p.thin},             {"rungs", p.rungs},
             {"ladder_span", p.ladder_span}, {"swap_interval", p.swap_interval},
             {"chain_seed", p.chain_seed}, {"batches", p.batches},
             {"ti_nodes", p.ti_nodes}};
  j["enumeration"] = {{"cap", c.engine.enumeration.cap},
                      {"isa", to_string(c.engine.enumeration.isa)}};
  return j.dump(2);
}

}  // namespace sgsurf
