#include "sgsurf/mc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sgsurf/quadrature.hpp"

namespace sgsurf {

std::vector<double> default_ladder(double beta, int rungs, double span) {
  if (beta == 0.0 || rungs <= 1) return {beta};
  std::vector<double> ladder(static_cast<std::size_t>(rungs));
  const double low = beta / span;
  for (int r = 0; r < rungs; ++r) {
    ladder[static_cast<std::size_t>(r)] = low * std::pow(span, static_cast<double>(r) / (rungs - 1));
  }
  ladder.back() = beta;
  return ladder;
}

void validate(const McParams& params, double target_beta) {
  if (params.sweeps == 0) throw std::invalid_argument("mc: sweeps must be positive");
  if (params.burn_in >= params.sweeps) throw std::invalid_argument("mc: burn_in must be < sweeps");
  if (params.thin == 0) throw std::invalid_argument("mc: thin must be positive");
  if (params.swap_interval == 0) throw std::invalid_argument("mc: swap_interval must be positive");
  if (params.batches < 2) throw std::invalid_argument("mc: batches must be >= 2");
  if ((params.sweeps - params.burn_in) / params.thin < params.batches) {
    throw std::invalid_argument("mc: fewer measurements than batches");
  }
  if (params.ti_nodes < 1) throw std::invalid_argument("mc: ti_nodes must be >= 1");
  if (params.replica_streams[0] == params.replica_streams[1]) {
    throw std::invalid_argument("mc: replica_streams must differ");
  }
  if (!params.ladder.empty()) {
    for (std::size_t i = 1; i < params.ladder.size(); ++i) {
      if (!(params.ladder[i] > params.ladder[i - 1])) {
        throw std::invalid_argument("mc: temperature_ladder must be strictly increasing");
      }
    }
    if (params.ladder.back() != target_beta) {
      throw std::invalid_argument("mc: temperature_ladder must end at the target beta");
    }
  } else if (params.rungs < 1 || !(params.ladder_span >= 1.0)) {
    throw std::invalid_argument("mc: rungs must be >= 1 and ladder_span >= 1");
  }
}

McEstimate batch_means(std::span<const double> series, std::size_t batches) {
  if (series.empty()) return {};
  batches = std::min(batches, series.size());
  const std::size_t size = series.size() / batches;
  // Drop the oldest remainder so every batch has the same length.
  const std::size_t start = series.size() - size * batches;
  std::vector<double> means(batches, 0.0);
  for (std::size_t k = 0; k < batches; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < size; ++i) acc += series[start + k * size + i];
    means[k] = acc / static_cast<double>(size);
  }
  double mean = 0.0;
  for (double m : means) mean += m;
  mean /= static_cast<double>(batches);
  if (batches < 2) return {mean, 0.0};
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  var /= static_cast<double>(batches - 1);
  return {mean, std::sqrt(var / static_cast<double>(batches))};
}

SpinSystem::SpinSystem(const LatticeGeometry& geometry, const CouplingAssignment& couplings,
                       const Schedule& schedule)
    : edges_(edge_list(geometry)) {
  Schedule unit = schedule;
  unit.beta = 1.0;
  couplings_ = bond_weights(couplings, unit);
  build(geometry.site_count());
}

SpinSystem::SpinSystem(std::size_t sites, std::span<const Edge> edges,
                       std::span<const double> couplings)
    : edges_(edges.begin(), edges.end()), couplings_(couplings.begin(), couplings.end()) {
  if (edges_.size() != couplings_.size()) {
    throw std::invalid_argument("SpinSystem: edge and coupling counts differ");
  }
  build(sites);
}

void SpinSystem::build(std::size_t sites) {
  std::vector<std::size_t> degree(sites, 0);
  for (const Edge& e : edges_) {
    ++degree[e.first];
    ++degree[e.second];
  }
  offsets_.assign(sites + 1, 0);
  for (std::size_t i = 0; i < sites; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
  neighbours_.resize(offsets_.back());
  neighbour_couplings_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t b = 0; b < edges_.size(); ++b) {
    const auto [a, c] = edges_[b];
    neighbours_[fill[a]] = c;
    neighbour_couplings_[fill[a]++] = couplings_[b];
    neighbours_[fill[c]] = a;
    neighbour_couplings_[fill[c]++] = couplings_[b];
  }
}

double SpinSystem::local_field(const std::vector<std::int8_t>& spins, std::size_t site) const {
  double h = 0.0;
  for (std::size_t k = offsets_[site]; k < offsets_[site + 1]; ++k) {
    h += neighbour_couplings_[k] * spins[neighbours_[k]];
  }
  return h;
}

double SpinSystem::energy(const std::vector<std::int8_t>& spins) const {
  double e = 0.0;
  for (std::size_t b = 0; b < edges_.size(); ++b) {
    e += couplings_[b] * spins[edges_[b].first] * spins[edges_[b].second];
  }
  return e;
}

ReplicaExchange::ReplicaExchange(const SpinSystem& system, std::vector<double> ladder,
                                 std::uint64_t seed, std::uint64_t stream_id)
    : system_(&system),
      ladder_(std::move(ladder)),
      configs_(ladder_.size(), std::vector<std::int8_t>(system.sites(), 1)),
      energies_(ladder_.size(), 0.0),
      slot_of_rung_(ladder_.size()),
      moves_(seed, StreamTag::Chain, stream_id),
      swaps_(seed, StreamTag::Swap, stream_id),
      swap_attempts_(ladder_.size() > 1 ? ladder_.size() - 1 : 0, 0),
      swap_accepts_(swap_attempts_.size(), 0) {
  for (std::size_t r = 0; r < ladder_.size(); ++r) {
    slot_of_rung_[r] = r;
    for (auto& s : configs_[r]) s = moves_.uniform() < 0.5 ? std::int8_t{-1} : std::int8_t{1};
    energies_[r] = system.energy(configs_[r]);
  }
}

void ReplicaExchange::sweep() {
  const std::size_t n = system_->sites();
  for (std::size_t r = 0; r < ladder_.size(); ++r) {
    const double beta = ladder_[r];
    auto& spins = configs_[slot_of_rung_[r]];
    double& energy = energies_[slot_of_rung_[r]];
    for (std::size_t step = 0; step < n; ++step) {
      const auto i = std::min(n - 1, static_cast<std::size_t>(moves_.uniform() * static_cast<double>(n)));
      const double delta = -2.0 * spins[i] * system_->local_field(spins, i);
      const double log_ratio = beta * delta;
      const double u = moves_.uniform();
      if (log_ratio >= 0.0 || u < std::exp(log_ratio)) {
        spins[i] = static_cast<std::int8_t>(-spins[i]);
        energy += delta;
      }
    }
  }
}

void ReplicaExchange::attempt_swaps() {
  for (std::size_t r = 0; r + 1 < ladder_.size(); ++r) {
    const std::size_t lo = slot_of_rung_[r];
    const std::size_t hi = slot_of_rung_[r + 1];
    const double log_ratio = (ladder_[r + 1] - ladder_[r]) * (energies_[lo] - energies_[hi]);
    ++swap_attempts_[r];
    const double u = swaps_.uniform();
    if (log_ratio >= 0.0 || u < std::exp(log_ratio)) {
      std::swap(slot_of_rung_[r], slot_of_rung_[r + 1]);
      ++swap_accepts_[r];
    }
  }
}

const std::vector<std::int8_t>& ReplicaExchange::configuration(std::size_t rung) const {
  return configs_[slot_of_rung_[rung]];
}

std::vector<double> ReplicaExchange::swap_acceptance() const {
  std::vector<double> out(swap_attempts_.size(), 0.0);
  for (std::size_t r = 0; r < out.size(); ++r) {
    if (swap_attempts_[r] > 0) {
      out[r] = static_cast<double>(swap_accepts_[r]) / static_cast<double>(swap_attempts_[r]);
    }
  }
  return out;
}

namespace {

std::vector<double> resolve_ladder(const McParams& params, double beta) {
  return params.ladder.empty() ? default_ladder(beta, params.rungs, params.ladder_span)
                               : params.ladder;
}

void swap_warnings(const std::vector<double>& acceptance, std::vector<std::string>& warnings) {
  for (std::size_t r = 0; r < acceptance.size(); ++r) {
    if (acceptance[r] < 0.05) {
      std::ostringstream os;
      os << "swap acceptance " << acceptance[r] << " < 0.05 between rungs " << r << " and "
         << r + 1;
      warnings.push_back(os.str());
    }
  }
}

// Runs both replicas and hands each recorded pair of target configurations to `record`.
template <class Record>
std::vector<double> run_pair(const SpinSystem& system, const std::vector<double>& ladder,
                             const McParams& params, std::uint64_t seed, Record&& record) {
  ReplicaExchange first(system, ladder, seed, params.replica_streams[0]);
  ReplicaExchange second(system, ladder, seed, params.replica_streams[1]);
  for (std::size_t sweep = 1; sweep <= params.sweeps; ++sweep) {
    first.sweep();
    second.sweep();
    if (sweep % params.swap_interval == 0) {
      first.attempt_swaps();
      second.attempt_swaps();
    }
    if (sweep > params.burn_in && (sweep - params.burn_in) % params.thin == 0) {
      record(first.target(), second.target());
    }
  }
  auto acc = first.swap_acceptance();
  const auto acc2 = second.swap_acceptance();
  for (std::size_t r = 0; r < acc.size(); ++r) acc[r] = 0.5 * (acc[r] + acc2[r]);
  return acc;
}

}  // namespace

McOverlapResult mc_bond_overlap(const LatticeGeometry& geometry, const CouplingAssignment& couplings,
                                const Schedule& schedule, std::span<const std::size_t> bonds,
                                const McParams& params) {
  validate(params, schedule.beta);
  for (std::size_t b : bonds) {
    if (b >= geometry.bond_count()) throw std::out_of_range("mc_bond_overlap: bad bond index");
  }
  const SpinSystem system(geometry, couplings, schedule);
  const auto ladder = resolve_ladder(params, schedule.beta);
  const auto& all = geometry.bonds();
  std::vector<std::vector<double>> series(bonds.size());
  McOverlapResult result;
  result.swap_acceptance =
      run_pair(system, ladder, params, params.chain_seed,
               [&](const std::vector<std::int8_t>& s1, const std::vector<std::int8_t>& s2) {
                 for (std::size_t k = 0; k < bonds.size(); ++k) {
                   const Bond& bd = all[bonds[k]];
                   series[k].push_back(
                       static_cast<double>(s1[bd.site_a] * s1[bd.site_b] * s2[bd.site_a] * s2[bd.site_b]));
                 }
               });
  result.overlaps.reserve(bonds.size());
  for (const auto& s : series) result.overlaps.push_back(batch_means(s, params.batches));
  swap_warnings(result.swap_acceptance, result.warnings);
  return result;
}

McDifferenceResult mc_coupling_path_difference(const LatticeGeometry& geometry,
                                               std::span<const double> couplings_a,
                                               std::span<const double> couplings_b, double beta,
                                               const McParams& params) {
  const std::size_t nb = geometry.bond_count();
  if (couplings_a.size() != nb || couplings_b.size() != nb) {
    throw std::invalid_argument("mc_coupling_path_difference: coupling count mismatch");
  }
  validate(params, beta);
  std::vector<double> slope(nb);
  bool any = false;
  for (std::size_t b = 0; b < nb; ++b) {
    slope[b] = beta * (couplings_a[b] - couplings_b[b]);
    any = any || slope[b] != 0.0;
  }
  McDifferenceResult result;
  if (!any) return result;

  const auto rule = legendre_unit(params.ti_nodes);
  const auto ladder = resolve_ladder(params, beta);
  const auto edges = edge_list(geometry);
  double total = 0.0;
  double variance = 0.0;
  for (std::size_t node = 0; node < rule.nodes.size(); ++node) {
    const double s = rule.nodes[node];
    std::vector<double> k(nb);
    for (std::size_t b = 0; b < nb; ++b) k[b] = (1.0 - s) * couplings_b[b] + s * couplings_a[b];
    const SpinSystem system(geometry.site_count(), edges, k);
    std::vector<double> series;
    const auto acc = run_pair(
        system, ladder, params, derive_seed(params.chain_seed, node, 0x7469),
        [&](const std::vector<std::int8_t>& s1, const std::vector<std::int8_t>& s2) {
          double o = 0.0;
          for (std::size_t b = 0; b < nb; ++b) {
            if (slope[b] == 0.0) continue;
            const auto [x, y] = edges[b];
            o += slope[b] * 0.5 * (s1[x] * s1[y] + s2[x] * s2[y]);
          }
          series.push_back(o);
        });
    const McEstimate est = batch_means(series, params.batches);
    total += rule.weights[node] * est.mean;
    variance += rule.weights[node] * rule.weights[node] * est.std_error * est.std_error;
    swap_warnings(acc, result.warnings);
  }
  result.difference = {total, std::sqrt(variance)};
  return result;
}

McDifferenceResult mc_log_partition_difference(const LatticeGeometry& geometry,
                                               const CouplingAssignment& couplings,
                                               const Schedule& schedule_a,
                                               const Schedule& schedule_b, const McParams& params) {
  if (schedule_a.beta != schedule_b.beta ||
      schedule_a.t_values.size() != geometry.bond_count() ||
      schedule_b.t_values.size() != geometry.bond_count()) {
    throw std::invalid_argument(
        "mc_log_partition_difference: schedules must share beta and bond count");
  }
  Schedule unit_a = schedule_a;
  Schedule unit_b = schedule_b;
  unit_a.beta = 1.0;
  unit_b.beta = 1.0;
  const auto k_a = bond_weights(couplings, unit_a);
  const auto k_b = bond_weights(couplings, unit_b);
  return mc_coupling_path_difference(geometry, k_a, k_b, schedule_a.beta, params);
}

}  // namespace sgsurf
