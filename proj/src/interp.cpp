#include "sgsurf/interp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sgsurf/quadrature.hpp"

namespace sgsurf {

std::string to_string(EngineConfig::Selector selector) {
  switch (selector) {
    case EngineConfig::Selector::Auto: return "auto";
    case EngineConfig::Selector::Enumerate: return "enumerate";
    case EngineConfig::Selector::Chain: return "chain";
    case EngineConfig::Selector::Mc: return "mc";
  }
  return "unknown";
}

namespace {

ExactEngine exact_kind(EngineConfig::Selector selector) {
  switch (selector) {
    case EngineConfig::Selector::Enumerate: return ExactEngine::Enumerate;
    case EngineConfig::Selector::Chain: return ExactEngine::Chain;
    default: return ExactEngine::Auto;
  }
}

}  // namespace

bool uses_exact_engine(const LatticeGeometry& geometry, const EngineConfig& config) {
  if (config.selector == EngineConfig::Selector::Mc) return false;
  const bool ok = exactly_solvable(geometry, exact_kind(config.selector), config.enumeration);
  if (!ok && config.selector != EngineConfig::Selector::Auto) {
    throw std::invalid_argument("engine '" + to_string(config.selector) + "' cannot handle a " +
                                std::to_string(geometry.dim()) + "D geometry with " +
                                std::to_string(geometry.site_count()) + " sites");
  }
  return ok;
}

std::string engine_label(const LatticeGeometry& geometry, const EngineConfig& config) {
  if (!uses_exact_engine(geometry, config)) return "mc:replica-exchange";
  const bool chain = config.selector == EngineConfig::Selector::Chain ||
                     (config.selector == EngineConfig::Selector::Auto && geometry.dim() == 1);
  if (chain) return "exact:chain";
  return "exact:enumerate(" + to_string(resolve_isa(config.enumeration.isa)) + ")";
}

std::vector<double> realization_overlaps(const LatticeGeometry& geometry,
                                         const CouplingAssignment& couplings,
                                         const Schedule& schedule,
                                         std::span<const std::size_t> bonds,
                                         const EngineConfig& config, std::uint64_t stream) {
  std::vector<double> q(bonds.size());
  if (uses_exact_engine(geometry, config)) {
    const auto report =
        exact_gibbs(geometry, couplings, schedule, exact_kind(config.selector), config.enumeration);
    for (std::size_t k = 0; k < bonds.size(); ++k) q[k] = report.omega[bonds[k]] * report.omega[bonds[k]];
    return q;
  }
  McParams params = config.mc;
  params.chain_seed = derive_seed(config.mc.chain_seed, stream, 0x71);
  const auto result = mc_bond_overlap(geometry, couplings, schedule, bonds, params);
  for (std::size_t k = 0; k < bonds.size(); ++k) q[k] = result.overlaps[k].mean;
  return q;
}

double realization_log_z(const LatticeGeometry& geometry, const CouplingAssignment& couplings,
                         const Schedule& schedule, const EngineConfig& config,
                         std::uint64_t stream) {
  if (uses_exact_engine(geometry, config)) {
    return exact_gibbs(geometry, couplings, schedule, exact_kind(config.selector),
                       config.enumeration)
        .log_z;
  }
  Schedule decoupled = schedule;
  decoupled.t_values.assign(schedule.t_values.size(), 0.0);
  McParams params = config.mc;
  params.chain_seed = derive_seed(config.mc.chain_seed, stream, 0x6c7a);
  const auto diff = mc_log_partition_difference(geometry, couplings, schedule, decoupled, params);
  return static_cast<double>(geometry.site_count()) * std::numbers::ln2 + diff.difference.mean;
}

std::string to_string(Designation designation) {
  return designation == Designation::Corridor ? "corridor" : "cut";
}

std::vector<std::size_t> designated_bonds(const LatticeGeometry& geometry, Designation designation) {
  return geometry.bonds_with_role(designation == Designation::Corridor ? RoleKind::Corridor
                                                                       : RoleKind::Cut);
}

Schedule make_schedule(const LatticeGeometry& geometry, Designation designation, double t,
                       double beta) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("make_schedule: t must lie in [0, 1]");
  if (!(beta >= 0.0)) throw std::invalid_argument("make_schedule: beta must be >= 0");
  Schedule s = Schedule::plain(geometry.bond_count(), beta);
  s.designated = designated_bonds(geometry, designation);
  if (s.designated.empty()) {
    throw std::invalid_argument("make_schedule: geometry has no " + to_string(designation) +
                                " bonds");
  }
  return s.with_t(t);
}

namespace {

// Per realization: curve value at each node, then the weighted integral.
std::vector<QuenchedEstimate> curve_average(const IntegrandRequest& request,
                                            std::span<const double> nodes,
                                            std::span<const double> weights,
                                            std::size_t extra_width = 0,
                                            const ExtraColumns& extra = {}) {
  const Schedule base = make_schedule(request.geometry, request.designation, 1.0, request.beta);
  const auto& bonds = base.designated;
  const double scale = 0.5 * request.beta * request.beta * static_cast<double>(bonds.size());
  const std::size_t width = nodes.size() + 1 + extra_width;
  auto functional = [&](const CouplingAssignment& c, std::size_t index, std::span<double> out) {
    double integral = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const Schedule s = base.with_t(nodes[i]);
      const auto q = realization_overlaps(request.geometry, c, s, bonds, request.engine,
                                          derive_seed(index, i));
      double acc = 0.0;
      for (double qb : q) acc += 1.0 - qb;
      out[i] = acc / static_cast<double>(bonds.size());
      integral += weights[i] * out[i];
    }
    out[nodes.size()] = scale * integral;
    if (extra_width > 0) extra(c, index, scale * integral, out.subspan(nodes.size() + 1));
  };
  return quenched_average(functional, width, request.geometry.bond_count(), request.averaging,
                          bonds);
}

}  // namespace

IntegrandValue integrand(const IntegrandRequest& request, double t) {
  const double node[] = {t};
  const double weight[] = {1.0};
  const auto est = curve_average(request, node, weight);
  return {est[1], est[0]};
}

IntegralResult integrate_t(const IntegrandRequest& request, int gl_order) {
  return integrate_t_with(request, gl_order, 0, {});
}

IntegralWithExtras integrate_t_with(const IntegrandRequest& request, int gl_order,
                                    std::size_t extra_width, const ExtraColumns& extra) {
  if (gl_order < 2) throw std::invalid_argument("integrate_t: gl_order must be >= 2");
  const auto rule = legendre_unit(gl_order);
  const auto est = curve_average(request, rule.nodes, rule.weights, extra_width, extra);
  IntegralWithExtras result;
  result.value = est[rule.nodes.size()];
  result.extras.assign(est.begin() + static_cast<std::ptrdiff_t>(rule.nodes.size() + 1), est.end());
  result.curve.t_nodes = rule.nodes;
  result.curve.weights = rule.weights;
  result.curve.designated_count = designated_bonds(request.geometry, request.designation).size();
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    result.curve.values.push_back(est[i].mean);
    result.curve.errors.push_back(est[i].std_error);
  }
  return result;
}

QuenchedEstimate interpolated_pressure(const IntegrandRequest& request, double t) {
  const Schedule s = make_schedule(request.geometry, request.designation, t, request.beta);
  auto functional = [&](const CouplingAssignment& c, std::size_t index, std::span<double> out) {
    out[0] = realization_log_z(request.geometry, c, s, request.engine, index);
  };
  return quenched_average(functional, 1, request.geometry.bond_count(), request.averaging,
                          s.designated)
      .front();
}

}  // namespace sgsurf
