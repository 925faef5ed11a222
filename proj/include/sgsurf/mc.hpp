#ifndef SGSURF_MC_HPP
#define SGSURF_MC_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sgsurf/disorder.hpp"
#include "sgsurf/engine.hpp"
#include "sgsurf/lattice.hpp"
#include "sgsurf/rng.hpp"

namespace sgsurf {

struct McParams {
  std::size_t sweeps = 4000;
  std::size_t burn_in = 500;
  std::size_t thin = 1;
  /// Strictly increasing inverse temperatures ending at the target beta.
  /// Empty means default_ladder(schedule.beta, rungs, ladder_span).
  std::vector<double> ladder;
  int rungs = 12;
  double ladder_span = 8.0;
  std::size_t swap_interval = 1;
  std::uint64_t chain_seed = 7;
  std::size_t batches = 20;
  /// Thermodynamic-integration nodes for log-partition differences.
  int ti_nodes = 16;
  /// Stream ids of the two replicas; exchanging them must not change results.
  std::array<std::uint64_t, 2> replica_streams{0, 1};
};

/// Geometric ladder from beta/span up to beta; a single rung at beta = 0.
std::vector<double> default_ladder(double beta, int rungs, double span);

/// Throws std::invalid_argument naming the offending field.
void validate(const McParams& params, double target_beta);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Batch-means estimate (mean, standard error) of a correlated time series.
McEstimate batch_means(std::span<const double> series, std::size_t batches);

/// Nearest-neighbour structure with base couplings K_b = alpha_b sqrt(t_b) J_b;
/// rung r of a ladder uses beta_r * K_b.
class SpinSystem {
 public:
  SpinSystem(const LatticeGeometry& geometry, const CouplingAssignment& couplings,
             const Schedule& schedule);
  SpinSystem(std::size_t sites, std::span<const Edge> edges, std::span<const double> couplings);

  std::size_t sites() const { return offsets_.size() - 1; }
  std::size_t bonds() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  double local_field(const std::vector<std::int8_t>& spins, std::size_t site) const;
  double energy(const std::vector<std::int8_t>& spins) const;

 private:
  void build(std::size_t sites);

  std::vector<Edge> edges_;
  std::vector<double> couplings_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> neighbours_;
  std::vector<double> neighbour_couplings_;
};

/// Metropolis replicas on a temperature ladder with adjacent-rung swaps.
class ReplicaExchange {
 public:
  ReplicaExchange(const SpinSystem& system, std::vector<double> ladder, std::uint64_t seed,
                  std::uint64_t stream_id);

  void sweep();
  void attempt_swaps();
  const std::vector<std::int8_t>& configuration(std::size_t rung) const;
  const std::vector<std::int8_t>& target() const { return configuration(ladder_.size() - 1); }
  std::vector<double> swap_acceptance() const;

 private:
  const SpinSystem* system_;
  std::vector<double> ladder_;
  std::vector<std::vector<std::int8_t>> configs_;
  std::vector<double> energies_;
  std::vector<std::size_t> slot_of_rung_;
  CounterStream moves_;
  CounterStream swaps_;
  std::vector<std::size_t> swap_attempts_;
  std::vector<std::size_t> swap_accepts_;
};

struct McOverlapResult {
  std::vector<McEstimate> overlaps;  // omega(q_b) per requested bond
  std::vector<double> swap_acceptance;
  std::vector<std::string> warnings;
};

/// Two independent replica-exchange chains sharing the disorder; the estimator
/// is the time average of sigma_b^(1) sigma_b^(2) at the target rung.
McOverlapResult mc_bond_overlap(const LatticeGeometry& geometry, const CouplingAssignment& couplings,
                                const Schedule& schedule, std::span<const std::size_t> bonds,
                                const McParams& params);

struct McDifferenceResult {
  McEstimate difference;
  std::vector<std::string> warnings;
};

/// ln Z_a(J) - ln Z_b(J) by thermodynamic integration along the amplitude path
/// sqrt(t_b(s)) = (1-s) sqrt(t_b^b) + s sqrt(t_b^a); the integrand
/// sum_b beta alpha_b J_b (sqrt(t^a_b) - sqrt(t^b_b)) omega_b(s) is sampled at
/// Gauss-Legendre nodes in s.
McDifferenceResult mc_log_partition_difference(const LatticeGeometry& geometry,
                                               const CouplingAssignment& couplings,
                                               const Schedule& schedule_a,
                                               const Schedule& schedule_b, const McParams& params);

/// ln Z_a - ln Z_b for two base-coupling vectors on the same bonds, integrated
/// along the straight path K(s) = (1-s) K_b + s K_a at inverse temperature beta.
McDifferenceResult mc_coupling_path_difference(const LatticeGeometry& geometry,
                                               std::span<const double> couplings_a,
                                               std::span<const double> couplings_b, double beta,
                                               const McParams& params);

}  // namespace sgsurf

#endif  // SGSURF_MC_HPP
