#ifndef SGSURF_DISORDER_HPP
#define SGSURF_DISORDER_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace sgsurf {

/// One disorder realization aligned with a geometry's bond order.
struct CouplingAssignment {
  std::vector<double> values;
  std::vector<int> signs;
  double weight = 1.0;

  std::size_t size() const { return values.size(); }
};

struct McAveraging {
  std::size_t samples = 200;
  std::uint64_t seed = 1;
};

/// Tensor-product Gauss-Hermite averaging. Bonds flagged as designated
/// (the interpolated set) use `designated_nodes`; all others use `nodes`.
struct GaussHermiteAveraging {
  int nodes = 20;
  int designated_nodes = 80;
  std::size_t cap = 10'000'000;
};

using AveragingMethod = std::variant<McAveraging, GaussHermiteAveraging>;

std::string describe(const AveragingMethod& method);
bool is_quadrature(const AveragingMethod& method);

struct QuenchedEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  AveragingMethod method = McAveraging{};
  std::size_t count = 0;
};

CouplingAssignment sample_couplings(std::size_t bond_count, std::uint64_t seed,
                                    std::uint64_t sample_index);

/// Probabilists' Gauss-Hermite rule: weights sum to one, so
/// sum_i w_i f(x_i) approximates E f(J) for J ~ N(0,1).
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Computed once per order and cached. Thread-safe.
const HermiteRule& hermite_rule(int order);

/// Streamed tensor grid; point(i) is computed from the mixed-radix digits of i.
class GaussHermiteGrid {
 public:
  GaussHermiteGrid(std::vector<int> orders, std::size_t cap = 10'000'000);

  std::size_t size() const { return size_; }
  std::size_t bond_count() const { return orders_.size(); }
  const std::vector<int>& orders() const { return orders_; }
  void point(std::size_t index, CouplingAssignment& out) const;

 private:
  std::vector<int> orders_;
  std::vector<const HermiteRule*> rules_;
  std::size_t size_ = 1;
};

/// Uniform-order grid.
GaussHermiteGrid gauss_hermite_grid(int nodes_per_bond, std::size_t bond_count,
                                    std::size_t cap = 10'000'000);

/// Per-bond orders for `method`, raising designated bonds to the designated order.
std::vector<int> grid_orders(const GaussHermiteAveraging& method, std::size_t bond_count,
                             std::span<const std::size_t> designated);

/// Vector-valued realization functional: writes `width` values for one realization.
/// `index` is the sample index (MC) or grid index (quadrature); MC consumers use it
/// to key their own thermal streams.
using RealizationFunctional =
    std::function<void(const CouplingAssignment&, std::size_t index, std::span<double> out)>;

std::vector<QuenchedEstimate> quenched_average(const RealizationFunctional& functional,
                                               std::size_t width, std::size_t bond_count,
                                               const AveragingMethod& method,
                                               std::span<const std::size_t> designated = {});

QuenchedEstimate quenched_average(const std::function<double(const CouplingAssignment&)>& functional,
                                  std::size_t bond_count, const AveragingMethod& method,
                                  std::span<const std::size_t> designated = {});

/// Number of worker threads used by the averaging loops (0 = hardware concurrency).
void set_worker_threads(unsigned threads);
unsigned worker_threads();

}  // namespace sgsurf

#endif  // SGSURF_DISORDER_HPP
