#ifndef SGSURF_ENGINE_HPP
#define SGSURF_ENGINE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sgsurf/disorder.hpp"
#include "sgsurf/kernels.hpp"
#include "sgsurf/lattice.hpp"

namespace sgsurf {

/// Per-bond variance multipliers. Bond b carries the coupling
/// alpha_b * beta * sqrt(t_b) * J_b, i.e. variance beta^2 t_b.
struct Schedule {
  std::vector<double> t_values;
  std::vector<std::size_t> designated;  // bonds carrying the shared parameter t
  double t = 1.0;
  double beta = 1.0;

  /// Un-interpolated model: every t_b = 1.
  static Schedule plain(std::size_t bond_count, double beta);

  double amplitude(std::size_t bond) const;
  /// Copy with the designated bonds moved to `new_t`.
  Schedule with_t(double new_t) const;
};

struct GibbsReport {
  double log_z = 0.0;
  std::vector<double> omega;       // omega(sigma_b) per bond
  std::vector<double> site_means;  // omega(sigma_n), filled on request
};

/// Effective bond weights alpha_b * beta * sqrt(t_b) * J_b.
std::vector<double> bond_weights(const CouplingAssignment& couplings, const Schedule& schedule);

std::vector<Edge> edge_list(const LatticeGeometry& geometry);

struct EnumerationOptions {
  std::size_t cap = 22;
  KernelIsa isa = KernelIsa::Auto;
  bool site_means = false;
};

/// Exact enumeration over all 2^sites configurations.
/// Throws std::length_error above the cap (use the MC engine instead).
GibbsReport log_partition(const LatticeGeometry& geometry, const CouplingAssignment& couplings,
                          const Schedule& schedule, const EnumerationOptions& options = {});

/// 1D closed forms. Free chain: N ln 2 + sum ln cosh w. Ring: additionally
/// ln(1 + prod tanh w), evaluated in log space with sign tracking.
double chain_log_z(std::span<const double> weights, std::size_t sites, bool periodic);
GibbsReport chain_gibbs(std::span<const double> weights, std::size_t sites, bool periodic);

/// Rejects d != 1.
double chain_closed_form(const LatticeGeometry& geometry, const CouplingAssignment& couplings,
                         const Schedule& schedule);

enum class ExactEngine { Auto, Enumerate, Chain };

/// Auto picks the chain formulas in d = 1 and enumeration otherwise.
GibbsReport exact_gibbs(const LatticeGeometry& geometry, const CouplingAssignment& couplings,
                        const Schedule& schedule, ExactEngine engine = ExactEngine::Auto,
                        const EnumerationOptions& options = {});

bool exactly_solvable(const LatticeGeometry& geometry, ExactEngine engine,
                      const EnumerationOptions& options = {});

enum class OverlapRoute {
  Factorized,        // square of the single-replica sum
  ExplicitReplicas,  // double sum over 4^sites replica pairs
};

/// Product-state expectation omega(sigma_b tau_b) of two replicas sharing the disorder.
double two_replica_overlap(const LatticeGeometry& geometry, const CouplingAssignment& couplings,
                           const Schedule& schedule, std::size_t bond,
                           OverlapRoute route = OverlapRoute::Factorized,
                           const EnumerationOptions& options = {});

/// Cap on the explicit two-replica route (4^sites terms).
inline constexpr std::size_t kExplicitReplicaCap = 11;

using SpinConfiguration = std::vector<std::int8_t>;

/// q_B(sigma, tau) = |B|^-1 sum_{b in B} sigma_b tau_b; empty subset means all bonds.
double bond_overlap(const LatticeGeometry& geometry, const SpinConfiguration& sigma,
                    const SpinConfiguration& tau, std::span<const std::size_t> subset = {});

/// Disorder average of U(sigma) U(tau) with U = sum_b J_b sigma_b.
QuenchedEstimate covariance_probe(const LatticeGeometry& geometry, const SpinConfiguration& sigma,
                                  const SpinConfiguration& tau, const AveragingMethod& method);

}  // namespace sgsurf

#endif  // SGSURF_ENGINE_HPP
