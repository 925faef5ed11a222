#include <immintrin.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "sgsurf/kernels.hpp"

namespace sgsurf::kernels {

namespace {

constexpr std::uint64_t kResyncMask = 1023;
constexpr std::uint64_t kFlushMask = 255;

// exp(x) for x <= 0: Cody-Waite reduction by ln 2 and a degree-13 Taylor
// polynomial on |r| <= ln2/2 (truncation below 1e-17 relative).
inline __m256d exp_nonpositive(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634);
  const __m256d ln2_hi = _mm256_set1_pd(0.693145751953125);
  const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d floor_x = _mm256_set1_pd(-708.0);
  const __m256d underflow = _mm256_cmp_pd(x, floor_x, _CMP_LT_OQ);
  x = _mm256_max_pd(x, floor_x);
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  static constexpr double kInvFact[] = {
      1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
      1.0 / 362880.0,     1.0 / 40320.0,     1.0 / 5040.0,     1.0 / 720.0,
      1.0 / 120.0,        1.0 / 24.0,        1.0 / 6.0,        0.5,
      1.0,                1.0};
  __m256d p = _mm256_set1_pd(kInvFact[0]);
  for (int i = 1; i < 14; ++i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kInvFact[i]));

  const __m128i ni = _mm256_cvtpd_epi32(n);
  __m256i bits = _mm256_cvtepi32_epi64(ni);
  bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
  bits = _mm256_slli_epi64(bits, 52);
  const __m256d scale = _mm256_castsi256_pd(bits);
  return _mm256_andnot_pd(underflow, _mm256_mul_pd(p, scale));
}

inline double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

inline double hmax(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
}

// Lane l carries the configuration of spins 0 and 1 given by the bits of l
// (set bit = spin down); the remaining spins are walked in Gray-code order.
struct LaneWalker {
  static constexpr std::size_t kLow = 2;

  std::size_t high = 0;
  __m256d low_energy;                   // energy of bonds among low spins
  std::vector<__m256d> cross;           // per high spin: sum_l w s_l(lane)
  std::vector<std::vector<std::pair<std::uint32_t, double>>> hh_adj;
  std::vector<Edge> hh_edges;           // high-spin indices
  std::vector<double> hh_weights;
  std::vector<double> spin;             // high spins, +-1
  std::vector<double> field;            // high-high part of the local field
  __m256d energy;

  static double lane_spin(std::size_t site, int lane) {
    return ((lane >> site) & 1) ? -1.0 : 1.0;
  }

  LaneWalker(std::size_t sites, std::span<const Edge> edges, std::span<const double> w)
      : high(sites - kLow), cross(high, _mm256_setzero_pd()), hh_adj(high), spin(high, 1.0),
        field(high, 0.0) {
    alignas(32) double ll[4] = {0, 0, 0, 0};
    std::vector<std::array<double, 4>> cr(high, {0, 0, 0, 0});
    for (std::size_t b = 0; b < edges.size(); ++b) {
      const std::size_t a = edges[b].first;
      const std::size_t c = edges[b].second;
      const bool a_low = a < kLow;
      const bool c_low = c < kLow;
      if (a_low && c_low) {
        for (int l = 0; l < 4; ++l) ll[l] += w[b] * lane_spin(a, l) * lane_spin(c, l);
      } else if (a_low || c_low) {
        const std::size_t lo = a_low ? a : c;
        const std::size_t hi = (a_low ? c : a) - kLow;
        for (int l = 0; l < 4; ++l) cr[hi][static_cast<std::size_t>(l)] += w[b] * lane_spin(lo, l);
      } else {
        const auto ha = static_cast<std::uint32_t>(a - kLow);
        const auto hc = static_cast<std::uint32_t>(c - kLow);
        hh_edges.emplace_back(ha, hc);
        hh_weights.push_back(w[b]);
        hh_adj[ha].emplace_back(hc, w[b]);
        hh_adj[hc].emplace_back(ha, w[b]);
      }
    }
    low_energy = _mm256_load_pd(ll);
    for (std::size_t h = 0; h < high; ++h) cross[h] = _mm256_loadu_pd(cr[h].data());
  }

  void set_gray(std::uint64_t g) {
    const std::uint64_t code = g ^ (g >> 1);
    for (std::size_t h = 0; h < high; ++h) spin[h] = ((code >> h) & 1u) ? -1.0 : 1.0;
    double scalar = 0.0;
    for (std::size_t b = 0; b < hh_edges.size(); ++b) {
      scalar += hh_weights[b] * spin[hh_edges[b].first] * spin[hh_edges[b].second];
    }
    __m256d e = _mm256_add_pd(low_energy, _mm256_set1_pd(scalar));
    for (std::size_t h = 0; h < high; ++h) {
      e = _mm256_fmadd_pd(_mm256_set1_pd(spin[h]), cross[h], e);
      double f = 0.0;
      for (const auto& [j, wj] : hh_adj[h]) f += wj * spin[j];
      field[h] = f;
    }
    energy = e;
  }

  void flip(std::size_t i) {
    const double s = spin[i];
    const __m256d local = _mm256_add_pd(_mm256_set1_pd(field[i]), cross[i]);
    energy = _mm256_fnmadd_pd(_mm256_set1_pd(2.0 * s), local, energy);
    for (const auto& [j, wj] : hh_adj[i]) field[j] -= 2.0 * wj * s;
    spin[i] = -s;
  }

  template <class Visit>
  void walk(Visit&& visit) {
    const std::uint64_t total = std::uint64_t{1} << high;
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

void exp_nonpositive_avx2(std::span<const double> x, std::span<double> out) {
  std::size_t i = 0;
  for (; i + 4 <= x.size(); i += 4) {
    _mm256_storeu_pd(out.data() + i, exp_nonpositive(_mm256_loadu_pd(x.data() + i)));
  }
  if (i < x.size()) {
    alignas(32) double tail[4] = {0, 0, 0, 0};
    std::copy(x.begin() + static_cast<std::ptrdiff_t>(i), x.end(), tail);
    _mm256_store_pd(tail, exp_nonpositive(_mm256_load_pd(tail)));
    std::copy(tail, tail + (x.size() - i), out.begin() + static_cast<std::ptrdiff_t>(i));
  }
}

EnumerationResult enumerate_avx2(std::size_t sites, std::span<const Edge> edges,
                                 std::span<const double> weights, bool site_means) {
  if (sites < LaneWalker::kLow || sites > 40) {
    throw std::invalid_argument("enumerate_avx2: needs 2..40 sites");
  }
  LaneWalker walker(sites, edges, weights);
  const std::size_t high = walker.high;

  __m256d vmax = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  walker.walk([&] { vmax = _mm256_max_pd(vmax, walker.energy); });
  const double emax = hmax(vmax);
  const __m256d shift = _mm256_set1_pd(emax);

  const std::size_t nhh = walker.hh_edges.size();
  __m256d s_tot = _mm256_setzero_pd(), s_blk = _mm256_setzero_pd();
  std::vector<__m256d> a_tot(high, _mm256_setzero_pd()), a_blk(high, _mm256_setzero_pd());
  std::vector<__m256d> b_tot(nhh, _mm256_setzero_pd()), b_blk(nhh, _mm256_setzero_pd());
  std::uint64_t step = 0;
  auto flush = [&] {
    s_tot = _mm256_add_pd(s_tot, s_blk);
    s_blk = _mm256_setzero_pd();
    for (std::size_t h = 0; h < high; ++h) {
      a_tot[h] = _mm256_add_pd(a_tot[h], a_blk[h]);
      a_blk[h] = _mm256_setzero_pd();
    }
    for (std::size_t b = 0; b < nhh; ++b) {
      b_tot[b] = _mm256_add_pd(b_tot[b], b_blk[b]);
      b_blk[b] = _mm256_setzero_pd();
    }
  };
  walker.walk([&] {
    const __m256d p = exp_nonpositive(_mm256_sub_pd(walker.energy, shift));
    s_blk = _mm256_add_pd(s_blk, p);
    for (std::size_t h = 0; h < high; ++h) {
      a_blk[h] = _mm256_fmadd_pd(_mm256_set1_pd(walker.spin[h]), p, a_blk[h]);
    }
    for (std::size_t b = 0; b < nhh; ++b) {
      const auto& e = walker.hh_edges[b];
      const double sb = walker.spin[e.first] * walker.spin[e.second];
      b_blk[b] = _mm256_fmadd_pd(_mm256_set1_pd(sb), p, b_blk[b]);
    }
    if ((++step & kFlushMask) == 0) flush();
  });
  flush();

  alignas(32) double s_lane[4];
  _mm256_store_pd(s_lane, s_tot);
  const double z = (s_lane[0] + s_lane[1]) + (s_lane[2] + s_lane[3]);

  EnumerationResult out;
  // Normalising by 2^sites keeps log_z == sites * ln 2 bit-exactly at zero coupling.
  out.log_z = static_cast<double>(sites) * std::numbers::ln2 +
              (emax + std::log(std::ldexp(z, -static_cast<int>(sites))));
  out.bond_means.resize(edges.size());
  std::size_t hh_index = 0;
  for (std::size_t b = 0; b < edges.size(); ++b) {
    const std::size_t a = edges[b].first;
    const std::size_t c = edges[b].second;
    const bool a_low = a < LaneWalker::kLow;
    const bool c_low = c < LaneWalker::kLow;
    double acc = 0.0;
    if (a_low && c_low) {
      for (int l = 0; l < 4; ++l) {
        acc += LaneWalker::lane_spin(a, l) * LaneWalker::lane_spin(c, l) * s_lane[l];
      }
    } else if (a_low || c_low) {
      const std::size_t lo = a_low ? a : c;
      const std::size_t hi = (a_low ? c : a) - LaneWalker::kLow;
      alignas(32) double lanes[4];
      _mm256_store_pd(lanes, a_tot[hi]);
      for (int l = 0; l < 4; ++l) acc += LaneWalker::lane_spin(lo, l) * lanes[l];
    } else {
      acc = hsum(b_tot[hh_index++]);
    }
    out.bond_means[b] = acc / z;
  }
  if (site_means) {
    out.site_means.resize(sites);
    for (std::size_t i = 0; i < LaneWalker::kLow; ++i) {
      double acc = 0.0;
      for (int l = 0; l < 4; ++l) acc += LaneWalker::lane_spin(i, l) * s_lane[l];
      out.site_means[i] = acc / z;
    }
    for (std::size_t h = 0; h < high; ++h) {
      out.site_means[h + LaneWalker::kLow] = hsum(a_tot[h]) / z;
    }
  }
  return out;
}

}  // namespace sgsurf::kernels
