#include "sgsurf/surface.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sgsurf {

std::string to_string(BoundaryCondition bc) {
  switch (bc) {
    case BoundaryCondition::Free: return "free";
    case BoundaryCondition::Periodic: return "periodic";
    case BoundaryCondition::Antiperiodic: return "antiperiodic";
  }
  return "unknown";
}

LatticeGeometry boundary_geometry(const LatticeSpec& spec, BoundaryCondition bc) {
  return build_geometry(spec, bc == BoundaryCondition::Free ? GeometryKind::FreeBlock
                                                            : GeometryKind::Torus);
}

CouplingAssignment with_antiperiodic_signs(const LatticeGeometry& torus, CouplingAssignment c) {
  const auto& bonds = torus.bonds();
  for (std::size_t b = 0; b < bonds.size(); ++b) c.signs[b] = bonds[b].wrap ? -1 : 1;
  return c;
}

CouplingAssignment restrict_couplings(const CouplingAssignment& c,
                                      const std::vector<std::size_t>& bonds) {
  CouplingAssignment out;
  out.values.reserve(bonds.size());
  out.signs.reserve(bonds.size());
  for (std::size_t b : bonds) {
    out.values.push_back(c.values[b]);
    out.signs.push_back(c.signs[b]);
  }
  out.weight = c.weight;
  return out;
}

namespace {

double ln2_volume(std::size_t sites) { return static_cast<double>(sites) * std::numbers::ln2; }

// Turns -0.0 into +0.0 so reports never print a signed zero.
double clean(double x) { return x + 0.0; }

QuenchedEstimate shifted(QuenchedEstimate e, double offset) {
  e.mean = clean(e.mean + offset);
  return e;
}

QuenchedEstimate scaled(QuenchedEstimate e, double factor) {
  e.mean = clean(e.mean * factor);
  e.std_error = e.std_error * std::abs(factor);
  return e;
}

QuenchedEstimate sum_independent(const QuenchedEstimate& a, const QuenchedEstimate& b,
                                 double sign = 1.0) {
  QuenchedEstimate out = a;
  out.mean = clean(a.mean + sign * b.mean);
  out.std_error = std::hypot(a.std_error, b.std_error);
  out.count = std::min(a.count, b.count);
  return out;
}

std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& removed) {
  std::vector<char> drop(n, 0);
  for (std::size_t b : removed) drop[b] = 1;
  std::vector<std::size_t> keep;
  for (std::size_t b = 0; b < n; ++b) {
    if (!drop[b]) keep.push_back(b);
  }
  return keep;
}

// Stream tags keep the thermal chains of different quantities apart.
enum : std::uint64_t { kStreamBlock = 0x100, kStreamTorus = 0x200, kStreamPath = 0x300,
                       kStreamSign = 0x400, kStreamFree = 0x500 };

}  // namespace

QuenchedEstimate quenched_pressure(const LatticeSpec& spec, BoundaryCondition bc, double beta,
                                   const SurfaceMethods& methods) {
  if (!(beta >= 0.0)) throw std::invalid_argument("quenched_pressure: beta must be >= 0");
  const LatticeGeometry geometry = boundary_geometry(spec, bc);
  const Schedule schedule = Schedule::plain(geometry.bond_count(), beta);
  const auto designated = geometry.bonds_with_role(RoleKind::Cut);
  const double offset = ln2_volume(geometry.site_count());
  auto functional = [&](const CouplingAssignment& c, std::size_t index, std::span<double> out) {
    const CouplingAssignment signed_c =
        bc == BoundaryCondition::Antiperiodic ? with_antiperiodic_signs(geometry, c) : c;
    out[0] = realization_log_z(geometry, signed_c, schedule, methods.engine, index) - offset;
  };
  const auto est = quenched_average(functional, 1, geometry.bond_count(), methods.averaging,
                                    designated);
  return shifted(est.front(), offset);
}

namespace {

struct FreeSurfaceSystem {
  LatticeGeometry magnified;
  LatticeGeometry block;
  std::vector<std::vector<std::size_t>> block_bonds;
  Schedule full;
  Schedule block_schedule;
  Schedule decoupled;
  bool torus_exact;
  double inv_blocks;
  double block_offset;
  double torus_offset;

  FreeSurfaceSystem(const LatticeSpec& spec, int k, double beta, const EngineConfig& engine)
      : magnified(magnified_partition(spec, k)),
        block(build_geometry(spec, GeometryKind::FreeBlock)),
        block_bonds(magnified.block_count()),
        full(Schedule::plain(magnified.bond_count(), beta)),
        block_schedule(Schedule::plain(block.bond_count(), beta)),
        decoupled(make_schedule(magnified, Designation::Corridor, 0.0, beta)),
        torus_exact(uses_exact_engine(magnified, engine)),
        inv_blocks(1.0 / static_cast<double>(magnified.block_count())),
        block_offset(ln2_volume(block.site_count())),
        torus_offset(ln2_volume(magnified.site_count())) {
    for (std::size_t s = 0; s < block_bonds.size(); ++s) {
      block_bonds[s] = magnified.block_bonds(static_cast<int>(s));
    }
  }

  // {torus excess, summed block excess}
  std::array<double, 2> excess(const CouplingAssignment& c, std::size_t index,
                               const EngineConfig& engine) const {
    double block_excess = 0.0;
    for (std::size_t s = 0; s < block_bonds.size(); ++s) {
      const auto cs = restrict_couplings(c, block_bonds[s]);
      block_excess += realization_log_z(block, cs, block_schedule, engine,
                                        derive_seed(index, kStreamBlock + s)) -
                      block_offset;
    }
    double torus_excess = 0.0;
    if (torus_exact) {
      torus_excess = realization_log_z(magnified, c, full, engine, index) - torus_offset;
    } else {
      McParams params = engine.mc;
      params.chain_seed = derive_seed(engine.mc.chain_seed, index, kStreamPath);
      torus_excess =
          block_excess +
          mc_log_partition_difference(magnified, c, full, decoupled, params).difference.mean;
    }
    return {torus_excess, block_excess};
  }
};

}  // namespace

FreeSurface t_phi(const LatticeSpec& spec, int k, double beta, const SurfaceMethods& methods) {
  if (!(beta >= 0.0)) throw std::invalid_argument("t_phi: beta must be >= 0");
  const FreeSurfaceSystem sys(spec, k, beta, methods.engine);
  const IntegrandRequest request{sys.magnified, Designation::Corridor, beta, methods.averaging,
                                 methods.engine};

  auto extra = [&](const CouplingAssignment& c, std::size_t index, double integral,
                   std::span<double> out) {
    const auto [torus_excess, block_excess] = sys.excess(c, index, methods.engine);
    const double direct = (block_excess - torus_excess) * sys.inv_blocks;
    out[0] = torus_excess;
    out[1] = block_excess * sys.inv_blocks;
    out[2] = direct;
    out[3] = direct + integral * sys.inv_blocks;
  };
  const auto result = integrate_t_with(request, methods.gl_order, 4, extra);

  FreeSurface fs;
  fs.torus_pressure = shifted(result.extras[0], sys.torus_offset);
  fs.block_pressure = shifted(result.extras[1], sys.block_offset);
  fs.direct = shifted(result.extras[2], 0.0);
  fs.route_difference = shifted(result.extras[3], 0.0);
  fs.integral = scaled(result.value, -sys.inv_blocks);
  fs.curve = result.curve;
  fs.engine = engine_label(sys.magnified, methods.engine);
  return fs;
}

QuenchedEstimate t_phi_direct(const LatticeSpec& spec, int k, double beta,
                              const SurfaceMethods& methods) {
  if (!(beta >= 0.0)) throw std::invalid_argument("t_phi: beta must be >= 0");
  const FreeSurfaceSystem sys(spec, k, beta, methods.engine);
  auto functional = [&](const CouplingAssignment& c, std::size_t index, std::span<double> out) {
    const auto [torus_excess, block_excess] = sys.excess(c, index, methods.engine);
    out[0] = (block_excess - torus_excess) * sys.inv_blocks;
  };
  const auto designated = sys.magnified.bonds_with_role(RoleKind::Corridor);
  const auto est = quenched_average(functional, 1, sys.magnified.bond_count(), methods.averaging,
                                    designated);
  return shifted(est.front(), 0.0);
}

SurfaceEstimate t_phi_integral(const LatticeSpec& spec, int k, double beta,
                               const SurfaceMethods& methods) {
  return t_phi(spec, k, beta, methods);
}

PeriodicShift delta_pi_phi(const LatticeSpec& spec, double beta, const SurfaceMethods& methods) {
  if (!(beta >= 0.0)) throw std::invalid_argument("delta_pi_phi: beta must be >= 0");
  const LatticeGeometry torus = build_geometry(spec, GeometryKind::Torus);
  const LatticeGeometry free = build_geometry(spec, GeometryKind::FreeBlock);
  const auto cut = torus.bonds_with_role(RoleKind::Cut);
  const auto inner = complement(torus.bond_count(), cut);
  const IntegrandRequest request{torus, Designation::Cut, beta, methods.averaging, methods.engine};
  const Schedule full = Schedule::plain(torus.bond_count(), beta);
  const Schedule free_schedule = Schedule::plain(free.bond_count(), beta);
  const Schedule unfolded = make_schedule(torus, Designation::Cut, 0.0, beta);
  const bool torus_exact = uses_exact_engine(torus, methods.engine);
  const double offset = ln2_volume(torus.site_count());

  auto extra = [&](const CouplingAssignment& c, std::size_t index, double integral,
                   std::span<double> out) {
    const CouplingAssignment c_star = with_antiperiodic_signs(torus, c);
    const double phi = realization_log_z(free, restrict_couplings(c, inner), free_schedule,
                                         methods.engine, derive_seed(index, kStreamFree)) -
                       offset;
    double pi = 0.0;
    double pi_star = 0.0;
    if (torus_exact) {
      pi = realization_log_z(torus, c, full, methods.engine, index) - offset;
      pi_star = realization_log_z(torus, c_star, full, methods.engine, index) - offset;
    } else {
      McParams params = methods.engine.mc;
      params.chain_seed = derive_seed(methods.engine.mc.chain_seed, index, kStreamTorus);
      pi = phi + mc_log_partition_difference(torus, c, full, unfolded, params).difference.mean;
      Schedule unit = full;
      unit.beta = 1.0;
      const auto k_pi = bond_weights(c, unit);
      const auto k_star = bond_weights(c_star, unit);
      params.chain_seed = derive_seed(methods.engine.mc.chain_seed, index, kStreamSign);
      pi_star = pi - mc_coupling_path_difference(torus, k_pi, k_star, beta, params).difference.mean;
    }
    out[0] = pi;
    out[1] = phi;
    out[2] = pi_star;
    out[3] = pi - phi;
    out[4] = (pi - phi) - integral;
    out[5] = pi - pi_star;
  };
  const auto result = integrate_t_with(request, methods.gl_order, 6, extra);

  PeriodicShift ps;
  ps.p_pi = shifted(result.extras[0], offset);
  ps.p_phi = shifted(result.extras[1], offset);
  ps.p_pi_star = shifted(result.extras[2], offset);
  ps.direct = shifted(result.extras[3], 0.0);
  ps.route_difference = shifted(result.extras[4], 0.0);
  ps.pi_minus_pi_star = shifted(result.extras[5], 0.0);
  ps.integral = shifted(result.value, 0.0);
  ps.curve = result.curve;
  ps.engine = engine_label(torus, methods.engine);
  return ps;
}

bool SurfacePressureReport::all_bounds_pass() const {
  return std::all_of(bounds.begin(), bounds.end(), [](const BoundCheck& b) { return b.pass; });
}

namespace {

TauPair normalize(const QuenchedEstimate& raw, const LatticeSpec& spec) {
  const double faces = static_cast<double>(spec.surface_faces());
  const double cut = static_cast<double>(spec.cross_section_sum());
  return {raw, clean(raw.mean / faces), raw.std_error / faces, clean(raw.mean / cut),
          raw.std_error / cut};
}

BoundCheck check(std::string name, double value, double error, double bound, bool upper) {
  BoundCheck c{std::move(name), clean(value), error, clean(bound), upper, false};
  const double slack = kBoundSigmas * error + 1e-12 * std::max(1.0, std::abs(bound));
  c.pass = upper ? value <= bound + slack : value >= bound - slack;
  return c;
}

}  // namespace

SurfacePressureReport tau_report(const LatticeSpec& spec, int k, double beta,
                                 const SurfaceMethods& methods) {
  SurfacePressureReport r;
  r.spec = spec;
  r.k = k;
  r.beta = beta;
  r.averaging = describe(methods.averaging);
  r.gl_order = methods.gl_order;
  const LatticeGeometry magnified = magnified_partition(spec, k);
  const LatticeGeometry torus = build_geometry(spec, GeometryKind::Torus);
  r.census_magnified = bond_census(magnified);
  r.census_torus = bond_census(torus);
  r.engine_magnified = engine_label(magnified, methods.engine);
  r.engine_torus = engine_label(torus, methods.engine);

  r.free_surface = t_phi(spec, k, beta, methods);
  r.periodic_shift = delta_pi_phi(spec, beta, methods);
  const auto& fs = r.free_surface;
  const auto& ps = r.periodic_shift;

  r.p_phi = ps.p_phi;
  r.p_pi = ps.p_pi;
  r.p_pi_star = ps.p_pi_star;
  r.p_per_site_ref = scaled(fs.torus_pressure, 1.0 / static_cast<double>(magnified.site_count()));
  r.p_ref_k = k;

  const QuenchedEstimate delta_star = sum_independent(ps.direct, ps.pi_minus_pi_star, -1.0);
  r.tau_phi = normalize(fs.direct, spec);
  r.tau_phi_integral = normalize(fs.integral, spec);
  r.tau_pi = normalize(sum_independent(fs.direct, ps.direct), spec);
  r.tau_pi_integral = normalize(sum_independent(fs.integral, ps.integral), spec);
  r.tau_pi_star = normalize(sum_independent(fs.direct, delta_star), spec);

  const double b2 = beta * beta;
  const TauPair shift = normalize(ps.direct, spec);
  r.bounds.push_back(check("tau_phi_faces <= 0", r.tau_phi.by_faces, r.tau_phi.by_faces_error,
                           0.0, true));
  r.bounds.push_back(check("tau_phi_faces >= -beta^2/4", r.tau_phi.by_faces,
                           r.tau_phi.by_faces_error, -0.25 * b2, false));
  r.bounds.push_back(check("tau_pi_faces - tau_phi_faces >= 0", shift.by_faces,
                           shift.by_faces_error, 0.0, false));
  r.bounds.push_back(check("tau_pi_cut - tau_phi_cut >= 0", shift.by_cut, shift.by_cut_error,
                           0.0, false));
  r.bounds.push_back(check("tau_pi_faces <= beta^2/2", r.tau_pi.by_faces,
                           r.tau_pi.by_faces_error, 0.5 * b2, true));
  r.bounds.push_back(check("tau_pi_cut <= beta^2/2", r.tau_pi.by_cut, r.tau_pi.by_cut_error,
                           0.5 * b2, true));
  return r;
}

Extrapolation extrapolate_small_beta(const std::vector<double>& betas,
                                     const std::vector<double>& values,
                                     const std::vector<double>& errors) {
  Extrapolation out;
  const std::size_t n = betas.size();
  if (n == 0) return out;
  if (n == 1) {
    out.intercept = values[0];
    out.intercept_error = errors[0];
    return out;
  }
  const bool weighted = std::all_of(errors.begin(), errors.end(), [](double e) { return e > 0.0; });
  double s = 0.0, sx = 0.0, sxx = 0.0, sy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weighted ? 1.0 / (errors[i] * errors[i]) : 1.0;
    const double x = betas[i] * betas[i];
    s += w;
    sx += w * x;
    sxx += w * x * x;
    sy += w * values[i];
    sxy += w * x * values[i];
  }
  const double det = s * sxx - sx * sx;
  if (det == 0.0) {
    out.intercept = sy / s;
    return out;
  }
  out.intercept = (sxx * sy - sx * sxy) / det;
  out.slope = (s * sxy - sx * sy) / det;
  if (weighted) {
    out.intercept_error = std::sqrt(sxx / det);
    out.slope_error = std::sqrt(s / det);
  }
  return out;
}

ScanTable beta_scan(const LatticeSpec& spec, int k, const std::vector<double>& betas,
                    const SurfaceMethods& methods) {
  if (betas.empty()) throw std::invalid_argument("beta_scan: beta list is empty");
  for (double b : betas) {
    if (!(b > 0.0)) throw std::invalid_argument("beta_scan: every beta must be positive");
  }
  ScanTable table;
  table.spec = spec;
  table.k = k;
  std::vector<double> sorted = betas;
  std::sort(sorted.begin(), sorted.end());
  for (double beta : sorted) {
    const auto report = tau_report(spec, k, beta, methods);
    const double b2 = beta * beta;
    ScanRow row;
    row.beta = beta;
    row.tau_phi_faces = report.tau_phi.by_faces / b2;
    row.tau_phi_faces_error = report.tau_phi.by_faces_error / b2;
    row.tau_phi_cut = report.tau_phi.by_cut / b2;
    row.tau_phi_cut_error = report.tau_phi.by_cut_error / b2;
    row.tau_pi_faces = report.tau_pi.by_faces / b2;
    row.tau_pi_faces_error = report.tau_pi.by_faces_error / b2;
    row.tau_pi_cut = report.tau_pi.by_cut / b2;
    row.tau_pi_cut_error = report.tau_pi.by_cut_error / b2;
    table.rows.push_back(row);
  }
  auto column = [&](auto value, auto error) {
    std::vector<double> bs, vs, es;
    for (const auto& row : table.rows) {
      bs.push_back(row.beta);
      vs.push_back(value(row));
      es.push_back(error(row));
    }
    return extrapolate_small_beta(bs, vs, es);
  };
  table.tau_phi_faces = column([](const ScanRow& r) { return r.tau_phi_faces; },
                               [](const ScanRow& r) { return r.tau_phi_faces_error; });
  table.tau_phi_cut = column([](const ScanRow& r) { return r.tau_phi_cut; },
                             [](const ScanRow& r) { return r.tau_phi_cut_error; });
  table.tau_pi_faces = column([](const ScanRow& r) { return r.tau_pi_faces; },
                              [](const ScanRow& r) { return r.tau_pi_faces_error; });
  table.tau_pi_cut = column([](const ScanRow& r) { return r.tau_pi_cut; },
                            [](const ScanRow& r) { return r.tau_pi_cut_error; });
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    table.max_adjacent_tau_pi_faces =
        std::max(table.max_adjacent_tau_pi_faces,
                 std::abs(table.rows[i].tau_pi_faces - table.rows[i - 1].tau_pi_faces));
  }
  return table;
}

}  // namespace sgsurf
