#include "sgsurf/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "sgsurf/parallel.hpp"
#include "sgsurf/rng.hpp"

namespace sgsurf {

std::string describe(const AveragingMethod& method) {
  std::ostringstream os;
  if (const auto* mc = std::get_if<McAveraging>(&method)) {
    os << "mc(samples=" << mc->samples << ", seed=" << mc->seed << ")";
  } else {
    const auto& gh = std::get<GaussHermiteAveraging>(method);
    os << "gauss_hermite(nodes=" << gh.nodes << ", designated_nodes=" << gh.designated_nodes
       << ")";
  }
  return os.str();
}

bool is_quadrature(const AveragingMethod& method) {
  return std::holds_alternative<GaussHermiteAveraging>(method);
}

CouplingAssignment sample_couplings(std::size_t bond_count, std::uint64_t seed,
                                    std::uint64_t sample_index) {
  CouplingAssignment c;
  c.values.resize(bond_count);
  c.signs.assign(bond_count, 1);
  for (std::size_t b = 0; b < bond_count; ++b) {
    c.values[b] =
        counter_normal(seed, StreamTag::Coupling, sample_index, static_cast<std::uint32_t>(b));
  }
  return c;
}

namespace {

// Newton iteration on orthonormal physicists' Hermite polynomials, mapped to
// the probabilists' weight exp(-x^2/2)/sqrt(2 pi).
HermiteRule compute_hermite_rule(int n) {
  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<double> w(static_cast<std::size_t>(n));
  const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[static_cast<std::size_t>(i - 2)];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    x[static_cast<std::size_t>(i)] = z;
    x[static_cast<std::size_t>(n - 1 - i)] = -z;
    w[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
    w[static_cast<std::size_t>(n - 1 - i)] = w[static_cast<std::size_t>(i)];
  }
  if (n % 2 == 1) x[static_cast<std::size_t>(n / 2)] = 0.0;

  HermiteRule rule;
  rule.nodes.resize(x.size());
  rule.weights.resize(w.size());
  CompensatedSum total;
  for (std::size_t i = 0; i < x.size(); ++i) {
    // Reverse so nodes ascend.
    const std::size_t j = x.size() - 1 - i;
    rule.nodes[i] = std::numbers::sqrt2 * x[j];
    rule.weights[i] = w[j] / std::sqrt(std::numbers::pi);
    total.add(rule.weights[i]);
  }
  const double norm = total.value();
  for (double& wi : rule.weights) wi /= norm;
  return rule;
}

}  // namespace

const HermiteRule& hermite_rule(int order) {
  if (order < 1) throw std::invalid_argument("hermite_rule: order must be >= 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<HermiteRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<HermiteRule>(compute_hermite_rule(order));
  return *slot;
}

GaussHermiteGrid::GaussHermiteGrid(std::vector<int> orders, std::size_t cap)
    : orders_(std::move(orders)) {
  if (orders_.empty()) throw std::invalid_argument("gauss_hermite_grid: bond_count must be >= 1");
  double projected = 1.0;
  for (int order : orders_) {
    if (order < 2) throw std::invalid_argument("gauss_hermite_grid: nodes_per_bond must be >= 2");
    projected *= order;
  }
  if (projected > static_cast<double>(cap)) {
    std::ostringstream os;
    os << "gauss_hermite_grid: grid of " << projected << " points (orders";
    for (int order : orders_) os << ' ' << order;
    os << ") exceeds the cap of " << cap << " points";
    throw std::invalid_argument(os.str());
  }
  for (int order : orders_) {
    size_ *= static_cast<std::size_t>(order);
    rules_.push_back(&hermite_rule(order));
  }
}

void GaussHermiteGrid::point(std::size_t index, CouplingAssignment& out) const {
  out.values.resize(orders_.size());
  out.signs.assign(orders_.size(), 1);
  double weight = 1.0;
  for (std::size_t b = 0; b < orders_.size(); ++b) {
    const auto order = static_cast<std::size_t>(orders_[b]);
    const std::size_t digit = index % order;
    index /= order;
    out.values[b] = rules_[b]->nodes[digit];
    weight *= rules_[b]->weights[digit];
  }
  out.weight = weight;
}

GaussHermiteGrid gauss_hermite_grid(int nodes_per_bond, std::size_t bond_count, std::size_t cap) {
  return GaussHermiteGrid(std::vector<int>(bond_count, nodes_per_bond), cap);
}

std::vector<int> grid_orders(const GaussHermiteAveraging& method, std::size_t bond_count,
                             std::span<const std::size_t> designated) {
  std::vector<int> orders(bond_count, method.nodes);
  for (std::size_t b : designated) {
    if (b >= bond_count) throw std::out_of_range("grid_orders: designated bond out of range");
    orders[b] = std::max(method.nodes, method.designated_nodes);
  }
  return orders;
}

namespace {

constexpr std::size_t kQuadratureChunk = 4096;
constexpr std::size_t kSampleChunk = 16;

[[noreturn]] void rethrow_with_index(std::size_t index, const std::exception& e) {
  throw std::runtime_error("realization " + std::to_string(index) + ": " + e.what());
}

std::vector<QuenchedEstimate> average_quadrature(const RealizationFunctional& functional,
                                                 std::size_t width, std::size_t bond_count,
                                                 const GaussHermiteAveraging& gh,
                                                 std::span<const std::size_t> designated) {
  const GaussHermiteGrid grid(grid_orders(gh, bond_count, designated), gh.cap);
  const std::size_t n = grid.size();
  const std::size_t chunks = (n + kQuadratureChunk - 1) / kQuadratureChunk;
  std::vector<double> partial(chunks * width, 0.0);
  parallel_chunks(chunks, [&](std::size_t c) {
    CouplingAssignment point;
    std::vector<double> values(width);
    std::vector<CompensatedSum> sums(width);
    const std::size_t end = std::min(n, (c + 1) * kQuadratureChunk);
    for (std::size_t i = c * kQuadratureChunk; i < end; ++i) {
      grid.point(i, point);
      try {
        functional(point, i, values);
      } catch (const std::exception& e) {
        rethrow_with_index(i, e);
      }
      for (std::size_t j = 0; j < width; ++j) sums[j].add(point.weight * values[j]);
    }
    for (std::size_t j = 0; j < width; ++j) partial[c * width + j] = sums[j].value();
  });
  std::vector<QuenchedEstimate> out(width);
  for (std::size_t j = 0; j < width; ++j) {
    CompensatedSum total;
    for (std::size_t c = 0; c < chunks; ++c) total.add(partial[c * width + j]);
    out[j] = {total.value(), 0.0, gh, n};
  }
  return out;
}

std::vector<QuenchedEstimate> average_samples(const RealizationFunctional& functional,
                                              std::size_t width, std::size_t bond_count,
                                              const McAveraging& mc) {
  if (mc.samples < 2) throw std::invalid_argument("quenched_average: MC needs samples >= 2");
  const std::size_t n = mc.samples;
  std::vector<double> values(n * width);
  const std::size_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
  parallel_chunks(chunks, [&](std::size_t c) {
    const std::size_t end = std::min(n, (c + 1) * kSampleChunk);
    for (std::size_t i = c * kSampleChunk; i < end; ++i) {
      const CouplingAssignment sample = sample_couplings(bond_count, mc.seed, i);
      try {
        functional(sample, i, std::span<double>(values.data() + i * width, width));
      } catch (const std::exception& e) {
        rethrow_with_index(i, e);
      }
    }
  });
  std::vector<QuenchedEstimate> out(width);
  for (std::size_t j = 0; j < width; ++j) {
    CompensatedSum sum;
    for (std::size_t i = 0; i < n; ++i) sum.add(values[i * width + j]);
    const double mean = sum.value() / static_cast<double>(n);
    CompensatedSum sq;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = values[i * width + j] - mean;
      sq.add(d * d);
    }
    const double var = sq.value() / static_cast<double>(n - 1);
    out[j] = {mean, std::sqrt(var / static_cast<double>(n)), mc, n};
  }
  return out;
}

}  // namespace

std::vector<QuenchedEstimate> quenched_average(const RealizationFunctional& functional,
                                               std::size_t width, std::size_t bond_count,
                                               const AveragingMethod& method,
                                               std::span<const std::size_t> designated) {
  if (const auto* gh = std::get_if<GaussHermiteAveraging>(&method)) {
    return average_quadrature(functional, width, bond_count, *gh, designated);
  }
  return average_samples(functional, width, bond_count, std::get<McAveraging>(method));
}

QuenchedEstimate quenched_average(const std::function<double(const CouplingAssignment&)>& functional,
                                  std::size_t bond_count, const AveragingMethod& method,
                                  std::span<const std::size_t> designated) {
  auto wrapped = [&](const CouplingAssignment& c, std::size_t, std::span<double> out) {
    out[0] = functional(c);
  };
  return quenched_average(wrapped, 1, bond_count, method, designated).front();
}

}  // namespace sgsurf
