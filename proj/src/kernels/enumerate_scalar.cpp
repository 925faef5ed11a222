#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "sgsurf/kernels.hpp"

namespace sgsurf::kernels {

namespace {

constexpr std::uint64_t kResyncMask = 4095;
constexpr std::uint64_t kFlushMask = 1023;

struct Walker {
  std::size_t sites;
  std::span<const Edge> edges;
  std::span<const double> weights;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adjacency;
  std::vector<int> spin;
  std::vector<double> field;
  double energy = 0.0;

  Walker(std::size_t n, std::span<const Edge> e, std::span<const double> w)
      : sites(n), edges(e), weights(w), adjacency(n), spin(n, 1), field(n, 0.0) {
    for (std::size_t b = 0; b < e.size(); ++b) {
      adjacency[e[b].first].emplace_back(e[b].second, w[b]);
      adjacency[e[b].second].emplace_back(e[b].first, w[b]);
    }
  }

  void set_gray(std::uint64_t g) {
    const std::uint64_t code = g ^ (g >> 1);
    for (std::size_t i = 0; i < sites; ++i) spin[i] = ((code >> i) & 1u) ? -1 : 1;
    energy = 0.0;
    for (std::size_t b = 0; b < edges.size(); ++b) {
      energy += weights[b] * spin[edges[b].first] * spin[edges[b].second];
    }
    for (std::size_t i = 0; i < sites; ++i) {
      double h = 0.0;
      for (const auto& [j, w] : adjacency[i]) h += w * spin[j];
      field[i] = h;
    }
  }

  void flip(std::size_t i) {
    const int s = spin[i];
    energy -= 2.0 * s * field[i];
    for (const auto& [j, w] : adjacency[i]) field[j] -= 2.0 * w * s;
    spin[i] = -s;
  }

  template <class Visit>
  void walk(Visit&& visit) {
    const std::uint64_t total = std::uint64_t{1} << sites;
    set_gray(0);
    visit();
    for (std::uint64_t g = 1; g < total; ++g) {
      if ((g & kResyncMask) == 0) {
        set_gray(g);
      } else {
        flip(static_cast<std::size_t>(std::countr_zero(g)));
      }
      visit();
    }
  }
};

}  // namespace

EnumerationResult enumerate_scalar(std::size_t sites, std::span<const Edge> edges,
                                   std::span<const double> weights, bool site_means) {
  if (sites == 0 || sites > 40) throw std::invalid_argument("enumerate: unsupported site count");
  Walker walker(sites, edges, weights);

  double emax = -std::numeric_limits<double>::infinity();
  walker.walk([&] { emax = std::max(emax, walker.energy); });

  const std::size_t nb = edges.size();
  double z = 0.0;
  double z_block = 0.0;
  std::vector<double> bond_acc(nb, 0.0), bond_block(nb, 0.0);
  std::vector<double> site_acc(site_means ? sites : 0, 0.0), site_block(site_acc.size(), 0.0);
  std::uint64_t step = 0;
  auto flush = [&] {
    z += z_block;
    z_block = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      bond_acc[b] += bond_block[b];
      bond_block[b] = 0.0;
    }
    for (std::size_t i = 0; i < site_acc.size(); ++i) {
      site_acc[i] += site_block[i];
      site_block[i] = 0.0;
    }
  };
  walker.walk([&] {
    const double p = std::exp(walker.energy - emax);
    z_block += p;
    for (std::size_t b = 0; b < nb; ++b) {
      bond_block[b] += walker.spin[edges[b].first] * walker.spin[edges[b].second] * p;
    }
    for (std::size_t i = 0; i < site_block.size(); ++i) site_block[i] += walker.spin[i] * p;
    if ((++step & kFlushMask) == 0) flush();
  });
  flush();

  EnumerationResult out;
  // Normalising by 2^sites keeps log_z == sites * ln 2 bit-exactly at zero coupling.
  out.log_z = static_cast<double>(sites) * std::numbers::ln2 +
              (emax + std::log(std::ldexp(z, -static_cast<int>(sites))));
  out.bond_means.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) out.bond_means[b] = bond_acc[b] / z;
  out.site_means.resize(site_acc.size());
  for (std::size_t i = 0; i < site_acc.size(); ++i) out.site_means[i] = site_acc[i] / z;
  return out;
}

}  // namespace sgsurf::kernels
