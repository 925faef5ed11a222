#include "sgsurf/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sgsurf/quadrature.hpp"

namespace sgsurf {

double unsigned_zero(double x) { return x == 0.0 ? 0.0 : x; }

Json to_json(const QuenchedEstimate& e) {
  Json j;
  j["mean"] = unsigned_zero(e.mean);
  j["std_error"] = unsigned_zero(e.std_error);
  j["count"] = e.count;
  j["method"] = describe(e.method);
  return j;
}

Json to_json(const BondCensus& c) {
  Json j;
  j["k"] = c.k;
  j["blocks"] = c.blocks;
  j["interior_per_block"] = c.interior_per_block;
  j["interior"] = c.interior;
  j["cut"] = c.cut;
  j["corridor"] = c.corridor;
  j["surface_faces"] = c.surface_faces;
  j["cross_sections"] = c.cross_sections;
  j["corridor_identity_holds"] = c.corridor_identity_holds();
  return j;
}

Json to_json(const LatticeSpec& spec) {
  return Json{{"dim", spec.dim}, {"sides", spec.sides}, {"volume", spec.volume()}};
}

namespace {

std::vector<double> cleaned(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = unsigned_zero(v[i]);
  return out;
}

Json tau_json(const TauPair& t) {
  Json j;
  j["raw"] = to_json(t.raw);
  j["by_faces"] = {{"value", unsigned_zero(t.by_faces)}, {"std_error", t.by_faces_error}};
  j["by_cut"] = {{"value", unsigned_zero(t.by_cut)}, {"std_error", t.by_cut_error}};
  return j;
}

Json surface_json(const SurfaceEstimate& s) {
  Json j;
  j["engine"] = s.engine;
  j["direct"] = to_json(s.direct);
  j["integral"] = to_json(s.integral);
  j["route_difference"] = to_json(s.route_difference);
  j["curve"] = to_json(s.curve);
  return j;
}

Json extrapolation_json(const Extrapolation& e) {
  return Json{{"intercept", unsigned_zero(e.intercept)},
              {"intercept_error", e.intercept_error},
              {"slope", unsigned_zero(e.slope)},
              {"slope_error", e.slope_error}};
}

}  // namespace

Json to_json(const IntegrandCurve& curve) {
  Json j;
  j["designated_count"] = curve.designated_count;
  j["t"] = curve.t_nodes;
  j["value"] = cleaned(curve.values);
  j["std_error"] = cleaned(curve.errors);
  j["weight"] = curve.weights;
  return j;
}

Json to_json(const SurfacePressureReport& r) {
  Json j;
  j["lattice"] = to_json(r.spec);
  j["k"] = r.k;
  j["beta"] = r.beta;
  j["averaging"] = r.averaging;
  j["engine"] = {{"torus", r.engine_torus}, {"magnified", r.engine_magnified}};
  j["gl_order"] = r.gl_order;
  j["census"] = {{"torus", to_json(r.census_torus)}, {"magnified", to_json(r.census_magnified)}};
  j["normalization"] = {{"faces", r.spec.surface_faces()}, {"cut", r.spec.cross_section_sum()}};
  j["pressure"] = {{"free", to_json(r.p_phi)},
                   {"periodic", to_json(r.p_pi)},
                   {"antiperiodic", to_json(r.p_pi_star)},
                   {"per_site_reference", to_json(r.p_per_site_ref)},
                   {"per_site_reference_k", r.p_ref_k}};

  Json fs = surface_json(r.free_surface);
  fs["block_pressure"] = to_json(r.free_surface.block_pressure);
  fs["torus_pressure"] = to_json(r.free_surface.torus_pressure);
  j["free_surface"] = fs;

  Json ps = surface_json(r.periodic_shift);
  ps["periodic_minus_antiperiodic"] = to_json(r.periodic_shift.pi_minus_pi_star);
  j["periodic_shift"] = ps;

  j["tau"] = {{"phi", tau_json(r.tau_phi)},
              {"phi_integral", tau_json(r.tau_phi_integral)},
              {"pi", tau_json(r.tau_pi)},
              {"pi_integral", tau_json(r.tau_pi_integral)},
              {"pi_antiperiodic", tau_json(r.tau_pi_star)}};
  Json bounds = Json::array();
  for (const auto& b : r.bounds) {
    bounds.push_back({{"name", b.name},
                      {"value", unsigned_zero(b.value)},
                      {"std_error", b.std_error},
                      {"bound", unsigned_zero(b.bound)},
                      {"relation", b.upper ? "<=" : ">="},
                      {"sigmas", kBoundSigmas},
                      {"pass", b.pass}});
  }
  j["bounds"] = bounds;
  j["all_bounds_pass"] = r.all_bounds_pass();
  return j;
}

Json to_json(const ScanTable& t) {
  Json j;
  j["lattice"] = to_json(t.spec);
  j["k"] = t.k;
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"beta", r.beta},
                    {"tau_phi_faces", unsigned_zero(r.tau_phi_faces)},
                    {"tau_phi_faces_error", r.tau_phi_faces_error},
                    {"tau_phi_cut", unsigned_zero(r.tau_phi_cut)},
                    {"tau_phi_cut_error", r.tau_phi_cut_error},
                    {"tau_pi_faces", unsigned_zero(r.tau_pi_faces)},
                    {"tau_pi_faces_error", r.tau_pi_faces_error},
                    {"tau_pi_cut", unsigned_zero(r.tau_pi_cut)},
                    {"tau_pi_cut_error", r.tau_pi_cut_error}});
  }
  j["columns_are_divided_by_beta_squared"] = true;
  j["rows"] = rows;
  j["small_beta_fit"] = {{"model", "value = intercept + slope * beta^2"},
                         {"tau_phi_faces", extrapolation_json(t.tau_phi_faces)},
                         {"tau_phi_cut", extrapolation_json(t.tau_phi_cut)},
                         {"tau_pi_faces", extrapolation_json(t.tau_pi_faces)},
                         {"tau_pi_cut", extrapolation_json(t.tau_pi_cut)}};
  j["tau_pi_faces_limit"] = {{"measured", unsigned_zero(t.tau_pi_faces.intercept)},
                             {"measured_error", t.tau_pi_faces.intercept_error},
                             {"claimed", kClaimedTauPiLimit},
                             {"expansion", kExpansionTauPiLimit}};
  j["tau_phi_faces_limit"] = {{"measured", unsigned_zero(t.tau_phi_faces.intercept)},
                              {"measured_error", t.tau_phi_faces.intercept_error},
                              {"expansion", kExpansionTauPhiLimit}};
  j["max_adjacent_tau_pi_faces"] = t.max_adjacent_tau_pi_faces;
  return j;
}

Json report_envelope(const std::string& command, const std::string& config_json) {
  Json j;
  j["software"] = "sgsurf";
  j["version"] = SGSURF_VERSION;
  j["command"] = command;
  j["config"] = config_json.empty() ? Json::object() : Json::parse(config_json);
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

namespace {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", unsigned_zero(x));
  return buf;
}

double parse_double(const std::string& cell, std::size_t row) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size()) {
    throw std::invalid_argument("curve csv: row " + std::to_string(row) + ": bad number '" + cell + "'");
  }
  return v;
}

}  // namespace

std::string write_curve_csv(const IntegrandCurve& curve) {
  std::string out = "t,value,std_error,designated_count\n";
  for (std::size_t i = 0; i < curve.t_nodes.size(); ++i) {
    out += g17(curve.t_nodes[i]) + "," + g17(curve.values[i]) + "," + g17(curve.errors[i]) + "," +
           std::to_string(curve.designated_count) + "\n";
  }
  return out;
}

IntegrandCurve parse_curve_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "t,value,std_error,designated_count") {
    throw std::invalid_argument("curve csv: missing header");
  }
  IntegrandCurve curve;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4) {
      throw std::invalid_argument("curve csv: row " + std::to_string(row) + ": expected 4 columns");
    }
    curve.t_nodes.push_back(parse_double(cells[0], row));
    curve.values.push_back(parse_double(cells[1], row));
    curve.errors.push_back(parse_double(cells[2], row));
    const auto count = static_cast<std::size_t>(parse_double(cells[3], row));
    if (row > 1 && count != curve.designated_count) {
      throw std::invalid_argument("curve csv: designated_count changes between rows");
    }
    curve.designated_count = count;
  }
  if (!curve.t_nodes.empty()) {
    curve.weights = legendre_unit(static_cast<int>(curve.t_nodes.size())).weights;
  }
  return curve;
}

std::string write_scan_csv(const ScanTable& table) {
  std::string out =
      "beta,tau_phi_faces,tau_phi_faces_error,tau_phi_cut,tau_phi_cut_error,"
      "tau_pi_faces,tau_pi_faces_error,tau_pi_cut,tau_pi_cut_error\n";
  for (const auto& r : table.rows) {
    out += g17(r.beta) + "," + g17(r.tau_phi_faces) + "," + g17(r.tau_phi_faces_error) + "," +
           g17(r.tau_phi_cut) + "," + g17(r.tau_phi_cut_error) + "," + g17(r.tau_pi_faces) + "," +
           g17(r.tau_pi_faces_error) + "," + g17(r.tau_pi_cut) + "," + g17(r.tau_pi_cut_error) + "\n";
  }
  return out;
}

void write_outputs(const std::string& dir,
                   const std::vector<std::pair<std::string, std::string>>& files) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
  std::vector<std::pair<fs::path, fs::path>> staged;
  auto discard = [&] {
    for (const auto& [tmp, final_path] : staged) fs::remove(tmp, ec);
  };
  for (const auto& [name, content] : files) {
    const fs::path final_path = fs::path(dir) / name;
    const fs::path tmp = fs::path(dir) / ("." + name + ".partial");
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    staged.emplace_back(tmp, final_path);
    out << content;
    out.close();
    if (!out) {
      discard();
      throw std::runtime_error("cannot write '" + final_path.string() + "'");
    }
  }
  for (const auto& [tmp, final_path] : staged) fs::rename(tmp, final_path);
}

}  // namespace sgsurf
