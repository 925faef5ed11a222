#include "sgsurf/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sgsurf {

Schedule Schedule::plain(std::size_t bond_count, double beta) {
  Schedule s;
  s.t_values.assign(bond_count, 1.0);
  s.beta = beta;
  return s;
}

double Schedule::amplitude(std::size_t bond) const { return beta * std::sqrt(t_values[bond]); }

Schedule Schedule::with_t(double new_t) const {
  Schedule s = *this;
  s.t = new_t;
  for (std::size_t b : s.designated) s.t_values[b] = new_t;
  return s;
}

std::vector<double> bond_weights(const CouplingAssignment& couplings, const Schedule& schedule) {
  if (couplings.values.size() != schedule.t_values.size()) {
    throw std::invalid_argument("bond_weights: coupling count " +
                                std::to_string(couplings.values.size()) +
                                " does not match schedule size " +
                                std::to_string(schedule.t_values.size()));
  }
  std::vector<double> w(couplings.values.size());
  for (std::size_t b = 0; b < w.size(); ++b) {
    w[b] = couplings.signs[b] * schedule.amplitude(b) * couplings.values[b];
  }
  return w;
}

std::vector<Edge> edge_list(const LatticeGeometry& geometry) {
  std::vector<Edge> edges;
  edges.reserve(geometry.bond_count());
  for (const Bond& b : geometry.bonds()) {
    edges.emplace_back(static_cast<std::uint32_t>(b.site_a), static_cast<std::uint32_t>(b.site_b));
  }
  return edges;
}

GibbsReport log_partition(const LatticeGeometry& geometry, const CouplingAssignment& couplings,
                          const Schedule& schedule, const EnumerationOptions& options) {
  const std::size_t n = geometry.site_count();
  if (n > options.cap) {
    throw std::length_error("log_partition: " + std::to_string(n) +
                            " sites exceed the enumeration cap of " + std::to_string(options.cap) +
                            "; use the MC engine");
  }
  const auto weights = bond_weights(couplings, schedule);
  const auto edges = edge_list(geometry);
  auto result = enumerate(n, edges, weights, options.site_means, options.isa);
  return {result.log_z, std::move(result.bond_means), std::move(result.site_means)};
}

namespace {

inline double log_cosh(double w) {
  const double a = std::abs(w);
  if (a < 1.0) {
    const double sh = std::sinh(0.5 * a);
    return std::log1p(2.0 * sh * sh);
  }
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

inline double log_abs_tanh(double w) {
  const double a = std::abs(w);
  if (a == 0.0) return -std::numeric_limits<double>::infinity();
  const double e = std::exp(-2.0 * a);
  return std::log(-std::expm1(-2.0 * a)) - std::log1p(e);
}

// ln(1 + prod tanh w_b) without forming the product directly.
double log_one_plus_tanh_product(std::span<const double> weights) {
  double log_abs = 0.0;
  int sign = 1;
  for (double w : weights) {
    if (w == 0.0) return 0.0;
    log_abs += log_abs_tanh(w);
    if (w < 0.0) sign = -sign;
  }
  return sign > 0 ? std::log1p(std::exp(log_abs)) : std::log(-std::expm1(log_abs));
}

void check_chain_shape(std::size_t bonds, std::size_t sites, bool periodic) {
  const std::size_t expected = periodic ? sites : sites - 1;
  if (sites < 2 || bonds != expected) {
    throw std::invalid_argument("chain: " + std::to_string(sites) + " sites need " +
                                std::to_string(expected) + " bonds, got " + std::to_string(bonds));
  }
}

}  // namespace

double chain_log_z(std::span<const double> weights, std::size_t sites, bool periodic) {
  check_chain_shape(weights.size(), sites, periodic);
  double acc = static_cast<double>(sites) * std::numbers::ln2;
  for (double w : weights) acc += log_cosh(w);
  if (periodic) acc += log_one_plus_tanh_product(weights);
  return acc;
}

GibbsReport chain_gibbs(std::span<const double> weights, std::size_t sites, bool periodic) {
  GibbsReport out;
  out.log_z = chain_log_z(weights, sites, periodic);
  out.site_means.assign(sites, 0.0);
  const std::size_t nb = weights.size();
  out.omega.resize(nb);
  if (!periodic) {
    for (std::size_t b = 0; b < nb; ++b) out.omega[b] = std::tanh(weights[b]);
    return out;
  }
  // omega_b = (tanh w_b + prod_{c != b} tanh w_c) / (1 + prod_c tanh w_c)
  std::vector<double> th(nb), prefix(nb + 1, 1.0), suffix(nb + 1, 1.0);
  for (std::size_t b = 0; b < nb; ++b) th[b] = std::tanh(weights[b]);
  for (std::size_t b = 0; b < nb; ++b) prefix[b + 1] = prefix[b] * th[b];
  for (std::size_t b = nb; b-- > 0;) suffix[b] = suffix[b + 1] * th[b];
  const double one_plus = std::exp(log_one_plus_tanh_product(weights));
  for (std::size_t b = 0; b < nb; ++b) {
    out.omega[b] = (th[b] + prefix[b] * suffix[b + 1]) / one_plus;
  }
  return out;
}

double chain_closed_form(const LatticeGeometry& geometry, const CouplingAssignment& couplings,
                         const Schedule& schedule) {
  if (geometry.dim() != 1) {
    throw std::invalid_argument("chain_closed_form: requires d = 1, got d = " +
                                std::to_string(geometry.dim()));
  }
  const auto w = bond_weights(couplings, schedule);
  return chain_log_z(w, geometry.site_count(), geometry.kind() != GeometryKind::FreeBlock);
}

bool exactly_solvable(const LatticeGeometry& geometry, ExactEngine engine,
                      const EnumerationOptions& options) {
  switch (engine) {
    case ExactEngine::Chain: return geometry.dim() == 1;
    case ExactEngine::Enumerate: return geometry.site_count() <= options.cap;
    case ExactEngine::Auto:
      return geometry.dim() == 1 || geometry.site_count() <= options.cap;
  }
  return false;
}

GibbsReport exact_gibbs(const LatticeGeometry& geometry, const CouplingAssignment& couplings,
                        const Schedule& schedule, ExactEngine engine,
                        const EnumerationOptions& options) {
  const bool chain = engine == ExactEngine::Chain ||
                     (engine == ExactEngine::Auto && geometry.dim() == 1);
  if (chain) {
    if (geometry.dim() != 1) {
      throw std::invalid_argument("chain engine requires d = 1, got d = " +
                                  std::to_string(geometry.dim()));
    }
    const auto w = bond_weights(couplings, schedule);
    return chain_gibbs(w, geometry.site_count(), geometry.kind() != GeometryKind::FreeBlock);
  }
  return log_partition(geometry, couplings, schedule, options);
}

double two_replica_overlap(const LatticeGeometry& geometry, const CouplingAssignment& couplings,
                           const Schedule& schedule, std::size_t bond, OverlapRoute route,
                           const EnumerationOptions& options) {
  if (bond >= geometry.bond_count()) throw std::out_of_range("two_replica_overlap: bad bond");
  if (route == OverlapRoute::Factorized) {
    const double w = log_partition(geometry, couplings, schedule, options).omega[bond];
    return w * w;
  }
  const std::size_t n = geometry.site_count();
  if (n > kExplicitReplicaCap) {
    throw std::length_error("two_replica_overlap: explicit replica sum limited to " +
                            std::to_string(kExplicitReplicaCap) + " sites");
  }
  const auto weights = bond_weights(couplings, schedule);
  const auto& bonds = geometry.bonds();
  const std::size_t configs = std::size_t{1} << n;
  std::vector<double> energy(configs, 0.0);
  std::vector<int> sb(configs);
  for (std::size_t c = 0; c < configs; ++c) {
    auto s = [c](std::size_t i) { return ((c >> i) & 1u) ? -1 : 1; };
    double e = 0.0;
    for (std::size_t b = 0; b < bonds.size(); ++b) e += weights[b] * s(bonds[b].site_a) * s(bonds[b].site_b);
    energy[c] = e;
    sb[c] = s(bonds[bond].site_a) * s(bonds[bond].site_b);
  }
  const double emax = *std::max_element(energy.begin(), energy.end());
  double num = 0.0;
  double den = 0.0;
  for (std::size_t a = 0; a < configs; ++a) {
    for (std::size_t c = 0; c < configs; ++c) {
      const double p = std::exp(energy[a] + energy[c] - 2.0 * emax);
      num += sb[a] * sb[c] * p;
      den += p;
    }
  }
  return num / den;
}

double bond_overlap(const LatticeGeometry& geometry, const SpinConfiguration& sigma,
                    const SpinConfiguration& tau, std::span<const std::size_t> subset) {
  if (sigma.size() != geometry.site_count() || tau.size() != geometry.site_count()) {
    throw std::invalid_argument("bond_overlap: configuration size mismatch");
  }
  const auto& bonds = geometry.bonds();
  auto q = [&](std::size_t b) {
    const Bond& bd = bonds[b];
    return static_cast<double>(sigma[bd.site_a] * sigma[bd.site_b] * tau[bd.site_a] *
                               tau[bd.site_b]);
  };
  double sum = 0.0;
  if (subset.empty()) {
    for (std::size_t b = 0; b < bonds.size(); ++b) sum += q(b);
    return sum / static_cast<double>(bonds.size());
  }
  for (std::size_t b : subset) sum += q(b);
  return sum / static_cast<double>(subset.size());
}

QuenchedEstimate covariance_probe(const LatticeGeometry& geometry, const SpinConfiguration& sigma,
                                  const SpinConfiguration& tau, const AveragingMethod& method) {
  if (sigma.size() != geometry.site_count() || tau.size() != geometry.site_count()) {
    throw std::invalid_argument("covariance_probe: configuration size mismatch");
  }
  const auto& bonds = geometry.bonds();
  std::vector<double> s_b(bonds.size()), t_b(bonds.size());
  for (std::size_t b = 0; b < bonds.size(); ++b) {
    s_b[b] = sigma[bonds[b].site_a] * sigma[bonds[b].site_b];
    t_b[b] = tau[bonds[b].site_a] * tau[bonds[b].site_b];
  }
  auto product = [&](const CouplingAssignment& c) {
    double u_sigma = 0.0;
    double u_tau = 0.0;
    for (std::size_t b = 0; b < c.values.size(); ++b) {
      u_sigma += c.values[b] * s_b[b];
      u_tau += c.values[b] * t_b[b];
    }
    return u_sigma * u_tau;
  };
  return quenched_average(product, bonds.size(), method);
}

}  // namespace sgsurf
