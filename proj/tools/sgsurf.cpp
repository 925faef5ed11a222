#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sgsurf/config.hpp"
#include "sgsurf/report.hpp"
#include "sgsurf/surface.hpp"
#include "sgsurf/verify.hpp"

using namespace sgsurf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitCheckFailed = 2;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<int> gh_nodes;
  std::optional<int> gl_order;
  std::optional<int> k;
  std::optional<std::string> beta;
  std::optional<std::string> bc;
  std::optional<std::string> engine;
  std::optional<unsigned> threads;
  std::string out;
};

void add_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "YAML or JSON run config");
  cmd->add_option("--seed", o.seed, "disorder seed (MC averaging)");
  cmd->add_option("--samples", o.samples, "disorder samples; selects MC averaging");
  cmd->add_option("--gh-nodes", o.gh_nodes, "Gauss-Hermite nodes per bond; selects quadrature");
  cmd->add_option("--gl-order", o.gl_order, "Gauss-Legendre order of the t integral");
  cmd->add_option("--k", o.k, "magnification factor");
  cmd->add_option("--beta", o.beta, "inverse temperature(s), comma separated");
  cmd->add_option("--bc", o.bc, "free, periodic or antiperiodic");
  cmd->add_option("--engine", o.engine, "auto, enumerate, chain or mc");
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  cmd->add_option("--out", o.out, "output directory");
}

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (o.samples && o.gh_nodes) throw ConfigError("--samples/--gh-nodes", "choose one averaging method");
  if (o.seed) c.mc_averaging.seed = *o.seed;
  if (o.samples) {
    c.mc_averaging.samples = *o.samples;
    c.averaging = c.mc_averaging;
  } else if (o.gh_nodes) {
    c.gh_averaging.nodes = *o.gh_nodes;
    c.averaging = c.gh_averaging;
  } else if (auto* mc = std::get_if<McAveraging>(&c.averaging)) {
    mc->seed = c.mc_averaging.seed;
  }
  if (o.gl_order) c.gl_order = *o.gl_order;
  if (o.k) c.k = *o.k;
  if (o.beta) c.betas = parse_beta_list(*o.beta);
  if (o.bc) c.bcs = {parse_boundary(*o.bc)};
  if (o.engine) {
    const std::string yaml = "engine: " + *o.engine;
    c.engine.selector = parse_config(yaml).engine.selector;
  }
  if (o.threads) c.threads = *o.threads;
  if (!o.out.empty()) c.out = o.out;
  validate_config(c);
  return c;
}

/// Fails early on anything the computation would reject later (grid cap,
/// engine capacity, lattice sides), so no output is ever half written.
void preflight(const RunConfig& c, bool surface) {
  auto check_grid = [&](const LatticeGeometry& g, const std::vector<std::size_t>& designated) {
    if (const auto* gh = std::get_if<GaussHermiteAveraging>(&c.averaging)) {
      try {
        GaussHermiteGrid grid(grid_orders(*gh, g.bond_count(), designated), gh->cap);
      } catch (const std::exception& e) {
        throw ConfigError("averaging.nodes", e.what());
      }
    }
    try {
      uses_exact_engine(g, c.engine);
    } catch (const std::exception& e) {
      throw ConfigError("engine", e.what());
    }
  };
  try {
    if (surface) {
      const auto torus = build_geometry(c.lattice, GeometryKind::Torus);
      const auto magnified = magnified_partition(c.lattice, c.k);
      check_grid(torus, torus.bonds_with_role(RoleKind::Cut));
      check_grid(magnified, magnified.bonds_with_role(RoleKind::Corridor));
    } else {
      for (auto bc : c.bcs) {
        const auto g = boundary_geometry(c.lattice, bc);
        check_grid(g, g.bonds_with_role(RoleKind::Cut));
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("lattice", e.what());
  }
}

int cmd_geometry(const RunConfig& c, const Overrides& o) {
  Json j = report_envelope("geometry", config_json(c));
  Json census;
  for (auto kind : {GeometryKind::FreeBlock, GeometryKind::Torus}) {
    try {
      census[to_string(kind)] = to_json(bond_census(build_geometry(c.lattice, kind)));
    } catch (const std::invalid_argument& e) {
      census[to_string(kind)] = {{"error", e.what()}};
    }
  }
  census["magnified"] = to_json(bond_census(magnified_partition(c.lattice, c.k)));
  j["census"] = census;
  const auto text = dump(j);
  std::cout << text;
  if (!o.out.empty()) write_outputs(c.out, {{"geometry.json", text}});
  return kExitOk;
}

int cmd_pressure(const RunConfig& c) {
  preflight(c, false);
  Json j = report_envelope("pressure", config_json(c));
  Json rows = Json::array();
  for (auto bc : c.bcs) {
    const auto g = boundary_geometry(c.lattice, bc);
    for (double beta : c.betas) {
      const auto p = quenched_pressure(c.lattice, bc, beta, c.methods());
      rows.push_back({{"bc", to_string(bc)},
                      {"beta", beta},
                      {"engine", engine_label(g, c.engine)},
                      {"pressure", to_json(p)},
                      {"per_site", unsigned_zero(p.mean / static_cast<double>(g.site_count()))}});
      std::printf("%-12s beta %-8g P = %.12g +- %.3g\n", to_string(bc).c_str(), beta, p.mean, p.std_error);
    }
  }
  j["results"] = rows;
  write_outputs(c.out, {{"pressure.json", dump(j)}});
  return kExitOk;
}

int cmd_surface(const RunConfig& c) {
  preflight(c, true);
  Json j = report_envelope("surface", config_json(c));
  Json reports = Json::array();
  std::vector<std::pair<std::string, std::string>> files;
  for (std::size_t i = 0; i < c.betas.size(); ++i) {
    const auto r = tau_report(c.lattice, c.k, c.betas[i], c.methods());
    reports.push_back(to_json(r));
    const std::string suffix = c.betas.size() == 1 ? "" : "_" + std::to_string(i);
    files.emplace_back("curve_free_surface" + suffix + ".csv", write_curve_csv(r.free_surface.curve));
    files.emplace_back("curve_periodic_shift" + suffix + ".csv", write_curve_csv(r.periodic_shift.curve));
    std::printf("beta %g: tau_phi faces %.6g +- %.3g, cut %.6g; tau_pi faces %.6g +- %.3g, cut %.6g\n",
                r.beta, r.tau_phi.by_faces, r.tau_phi.by_faces_error, r.tau_phi.by_cut,
                r.tau_pi.by_faces, r.tau_pi.by_faces_error, r.tau_pi.by_cut);
    for (const auto& b : r.bounds) {
      std::printf("  [%s] %s: %.6g +- %.3g vs %.6g\n", b.pass ? "ok" : "VIOLATED", b.name.c_str(),
                  b.value, b.std_error, b.bound);
    }
  }
  j["reports"] = reports;
  files.insert(files.begin(), {"surface.json", dump(j)});
  write_outputs(c.out, files);
  return kExitOk;
}

int cmd_scan(const RunConfig& c) {
  preflight(c, true);
  for (double b : c.betas) {
    if (!(b > 0.0)) throw ConfigError("beta", "scan requires every beta > 0");
  }
  const auto table = beta_scan(c.lattice, c.k, c.betas, c.methods());
  Json j = report_envelope("scan", config_json(c));
  j["scan"] = to_json(table);
  std::fputs(write_scan_csv(table).c_str(), stdout);
  std::printf("tau_pi_faces/beta^2 intercept %.5g +- %.3g (claimed %.2f, expansion %.2f)\n",
              table.tau_pi_faces.intercept, table.tau_pi_faces.intercept_error, kClaimedTauPiLimit,
              kExpansionTauPiLimit);
  write_outputs(c.out, {{"scan.json", dump(j)}, {"scan.csv", write_scan_csv(table)}});
  return kExitOk;
}

int cmd_verify(const std::string& suite_name, const Overrides& o) {
  const Suite suite = parse_suite(suite_name);
  VerifySession session;
  Json j = report_envelope("verify", "");
  j["suite"] = to_string(suite);
  Json results = Json::array();
  bool all = true;
  for (int id : suite_criteria(suite)) {
    const auto r = session.run(id);
    std::printf("criterion %d: %s  %s\n", id, r.pass() ? "PASS" : "FAIL", r.title.c_str());
    for (const auto& check : r.checks) std::printf("  %s\n", format_check(check).c_str());
    std::fflush(stdout);
    all = all && r.pass();
    results.push_back(to_json(r));
  }
  j["results"] = results;
  j["pass"] = all;
  if (!o.out.empty()) write_outputs(o.out, {{"verify.json", dump(j)}});
  std::printf("%s\n", all ? "all checks passed" : "some checks failed");
  return all ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edwards-Anderson surface-pressure laboratory"};
  app.set_version_flag("--version", std::string(SGSURF_VERSION));
  app.require_subcommand(1);
  Overrides o;
  std::string suite = "all";
  auto* geometry = app.add_subcommand("geometry", "print the bond census");
  auto* pressure = app.add_subcommand("pressure", "quenched pressure per boundary condition");
  auto* surface = app.add_subcommand("surface", "surface pressures, bounds and integrand curves");
  auto* scan = app.add_subcommand("scan", "tau / beta^2 over a beta list");
  auto* verify = app.add_subcommand("verify", "run a built-in check suite");
  for (auto* cmd : {geometry, pressure, surface, scan, verify}) add_flags(cmd, o);
  verify->add_option("suite", suite, "identities, bounds, hightemp or all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (verify->parsed()) {
      if (o.threads) set_worker_threads(*o.threads);
      return cmd_verify(suite, o);
    }
    const RunConfig c = resolve(o);
    set_worker_threads(c.threads);
    if (geometry->parsed()) return cmd_geometry(c, o);
    if (pressure->parsed()) return cmd_pressure(c);
    if (surface->parsed()) return cmd_surface(c);
    if (scan->parsed()) return cmd_scan(c);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  }
  return kExitInvalid;
}
