#include <stdexcept>
#include <cmath>
#include <map>
#include <numeric>

#include "doctest.h"
#include "sgsurf/engine.hpp"
#include "sgsurf/interp.hpp"
#include "sgsurf/mc.hpp"
#include "support/generators.hpp"

using namespace sgsurf;

namespace {

std::vector<std::size_t> all_bonds(const LatticeGeometry& g) {
  std::vector<std::size_t> b(g.bond_count());
  std::iota(b.begin(), b.end(), 0);
  return b;
}

McParams quick(std::uint64_t seed) {
  McParams p;
  p.sweeps = 3000;
  p.burn_in = 300;
  p.chain_seed = seed;
  return p;
}

}  // namespace

TEST_CASE("default ladder is geometric and ends at the target") {
  const auto ladder = default_ladder(2.0, 12, 8.0);
  REQUIRE(ladder.size() == 12);
  CHECK(ladder.front() == doctest::Approx(0.25));
  CHECK(ladder.back() == 2.0);
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    CHECK(ladder[i] / ladder[i - 1] == doctest::Approx(std::pow(8.0, 1.0 / 11.0)));
  }
  CHECK(default_ladder(0.0, 12, 8.0) == std::vector<double>{0.0});
}

TEST_CASE("parameter validation names the field") {
  McParams p;
  p.burn_in = p.sweeps;
  CHECK_THROWS_WITH_AS(validate(p, 1.0), doctest::Contains("burn_in"), std::invalid_argument);
  p = McParams{};
  p.ladder = {0.5, 0.4, 1.0};
  CHECK_THROWS_WITH_AS(validate(p, 1.0), doctest::Contains("increasing"), std::invalid_argument);
  p.ladder = {0.5, 0.9};
  CHECK_THROWS_AS(validate(p, 1.0), std::invalid_argument);
  p = McParams{};
  p.replica_streams = {3, 3};
  CHECK_THROWS_AS(validate(p, 1.0), std::invalid_argument);
}

TEST_CASE("batch means of a constant and of alternating data") {
  std::vector<double> flat(100, 0.3);
  const auto a = batch_means(flat, 10);
  CHECK(a.mean == doctest::Approx(0.3));
  CHECK(a.std_error == doctest::Approx(0.0));
  std::vector<double> alt(100);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 ? 1.0 : -1.0;
  const auto b = batch_means(alt, 10);
  CHECK(b.mean == doctest::Approx(0.0));
}

TEST_CASE("Metropolis with tempering samples the Boltzmann law of a 2-site system") {
  const std::vector<Edge> edges{{0, 1}};
  const std::vector<double> k{0.8};
  const SpinSystem system(2, edges, k);
  const std::vector<double> ladder{0.3, 0.7, 1.2};
  ReplicaExchange chain(system, ladder, 99, 0);
  std::vector<std::map<int, double>> counts(ladder.size());
  const int sweeps = 100000;
  for (int s = 0; s < sweeps; ++s) {
    chain.sweep();
    chain.attempt_swaps();
    for (std::size_t r = 0; r < ladder.size(); ++r) {
      const auto& c = chain.configuration(r);
      counts[r][(c[0] > 0) * 2 + (c[1] > 0)] += 1.0;
    }
  }
  for (std::size_t r = 0; r < ladder.size(); ++r) {
    const double aligned = std::exp(ladder[r] * 0.8);
    const double anti = std::exp(-ladder[r] * 0.8);
    const double z = 2 * aligned + 2 * anti;
    double tv = 0.0;
    for (int state = 0; state < 4; ++state) {
      const bool same = state == 0 || state == 3;
      const double exact = (same ? aligned : anti) / z;
      tv += 0.5 * std::abs(counts[r][state] / sweeps - exact);
    }
    CAPTURE(r);
    CHECK(tv < 0.01);
  }
  for (double a : chain.swap_acceptance()) CHECK(a > 0.5);
}

TEST_CASE("beta = 0 overlaps vanish within errors") {
  const auto g = build_geometry(LatticeSpec{2, {3, 3}}, GeometryKind::FreeBlock);
  const auto c = sample_couplings(g.bond_count(), 4, 0);
  const auto bonds = all_bonds(g);
  const auto r = mc_bond_overlap(g, c, Schedule::plain(g.bond_count(), 0.0), bonds, quick(3));
  int within = 0;
  for (const auto& e : r.overlaps) within += std::abs(e.mean) <= 3.0 * e.std_error;
  CHECK(within >= 11);
}

TEST_CASE("MC overlaps agree with enumeration on the (3,3) block at beta = 0.5") {
  const auto g = build_geometry(LatticeSpec{2, {3, 3}}, GeometryKind::FreeBlock);
  const auto bonds = all_bonds(g);
  const auto s = Schedule::plain(g.bond_count(), 0.5);
  std::size_t agree = 0, total = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    const auto c = sample_couplings(g.bond_count(), 8, i);
    const auto exact = exact_gibbs(g, c, s);
    const auto mc = mc_bond_overlap(g, c, s, bonds, quick(100 + i));
    for (std::size_t b = 0; b < bonds.size(); ++b) {
      CHECK(std::abs(mc.overlaps[b].mean) <= 1.0);
      agree += std::abs(mc.overlaps[b].mean - exact.omega[b] * exact.omega[b]) <= 3.0 * mc.overlaps[b].std_error;
      ++total;
    }
  }
  CHECK(static_cast<double>(agree) / total >= 0.95);
}

TEST_CASE("decoupled corridor bonds have zero overlap") {
  const auto g = magnified_partition(LatticeSpec{1, {3}}, 2);
  const auto s = make_schedule(g, Designation::Corridor, 0.0, 1.0);
  const auto corridor = designated_bonds(g, Designation::Corridor);
  const auto c = sample_couplings(g.bond_count(), 6, 0);
  const auto r = mc_bond_overlap(g, c, s, corridor, quick(5));
  for (const auto& e : r.overlaps) CHECK(std::abs(e.mean) <= 3.0 * e.std_error + 1e-12);
}

TEST_CASE("swapping replica streams leaves estimates unchanged") {
  const auto g = build_geometry(LatticeSpec{2, {3, 3}}, GeometryKind::Torus);
  const auto c = sample_couplings(g.bond_count(), 2, 1);
  const auto s = Schedule::plain(g.bond_count(), 1.0);
  const auto bonds = all_bonds(g);
  auto p = quick(17);
  const auto a = mc_bond_overlap(g, c, s, bonds, p);
  p.replica_streams = {1, 0};
  const auto b = mc_bond_overlap(g, c, s, bonds, p);
  p.replica_streams = {5, 9};
  const auto other = mc_bond_overlap(g, c, s, bonds, p);
  int differ = 0;
  for (std::size_t i = 0; i < bonds.size(); ++i) {
    CHECK(a.overlaps[i].mean == b.overlaps[i].mean);
    CHECK(a.overlaps[i].std_error == b.overlaps[i].std_error);
    differ += a.overlaps[i].mean != other.overlaps[i].mean;
    CHECK(std::abs(a.overlaps[i].mean - other.overlaps[i].mean) <=
          3.0 * std::hypot(a.overlaps[i].std_error, other.overlaps[i].std_error) + 1e-12);
  }
  CHECK(differ > 0);
}

TEST_CASE("MC runs are reproducible bit for bit") {
  const auto g = build_geometry(LatticeSpec{2, {3, 3}}, GeometryKind::Torus);
  const auto c = sample_couplings(g.bond_count(), 2, 1);
  const auto s = Schedule::plain(g.bond_count(), 1.0);
  const auto bonds = all_bonds(g);
  const auto a = mc_bond_overlap(g, c, s, bonds, quick(3));
  const auto b = mc_bond_overlap(g, c, s, bonds, quick(3));
  for (std::size_t i = 0; i < bonds.size(); ++i) CHECK(a.overlaps[i].mean == b.overlaps[i].mean);
  CHECK(a.swap_acceptance == b.swap_acceptance);
}

TEST_CASE("low swap acceptance produces a warning, not an error") {
  const auto g = build_geometry(LatticeSpec{2, {3, 3}}, GeometryKind::Torus);
  const auto c = sample_couplings(g.bond_count(), 2, 1);
  auto p = quick(3);
  p.ladder = {0.05, 3.0};
  const auto r = mc_bond_overlap(g, c, Schedule::plain(g.bond_count(), 3.0), all_bonds(g), p);
  REQUIRE(r.swap_acceptance.size() == 1);
  CHECK(r.swap_acceptance[0] < 0.05);
  CHECK(!r.warnings.empty());
}

TEST_CASE("log-partition differences") {
  const auto ring = build_geometry(LatticeSpec{1, {8}}, GeometryKind::Torus);
  const auto c = sample_couplings(ring.bond_count(), 12, 0);
  const auto on = make_schedule(ring, Designation::Cut, 1.0, 1.0);
  const auto off = make_schedule(ring, Designation::Cut, 0.0, 1.0);
  const auto same = mc_log_partition_difference(ring, c, on, on, quick(1));
  CHECK(same.difference.mean == 0.0);
  CHECK(same.difference.std_error == 0.0);

  const auto d = mc_log_partition_difference(ring, c, on, off, quick(2));
  const double exact = chain_closed_form(ring, c, on) - chain_closed_form(ring, c, off);
  CHECK(std::abs(d.difference.mean - exact) <= 3.0 * d.difference.std_error);

  const auto sq = build_geometry(LatticeSpec{2, {3, 3}}, GeometryKind::Torus);
  const auto cs = sample_couplings(sq.bond_count(), 12, 1);
  const auto son = make_schedule(sq, Designation::Cut, 1.0, 1.0);
  const auto soff = make_schedule(sq, Designation::Cut, 0.0, 1.0);
  const auto ds = mc_log_partition_difference(sq, cs, son, soff, quick(4));
  const double es = log_partition(sq, cs, son).log_z - log_partition(sq, cs, soff).log_z;
  CHECK(std::abs(ds.difference.mean - es) <= 3.0 * ds.difference.std_error);
}

TEST_CASE("coupling-path difference between periodic and antiperiodic rings") {
  const auto ring = build_geometry(LatticeSpec{1, {6}}, GeometryKind::Torus);
  auto c = sample_couplings(ring.bond_count(), 30, 0);
  const auto s = Schedule::plain(ring.bond_count(), 1.0);
  const auto k_pi = bond_weights(c, s);
  auto flipped = c;
  for (std::size_t b = 0; b < ring.bond_count(); ++b) flipped.signs[b] = ring.bonds()[b].wrap ? -1 : 1;
  const auto k_star = bond_weights(flipped, s);
  const auto d = mc_coupling_path_difference(ring, k_pi, k_star, 1.0, quick(8));
  const double exact = chain_closed_form(ring, c, s) - chain_closed_form(ring, flipped, s);
  CHECK(std::abs(d.difference.mean - exact) <= 3.0 * d.difference.std_error);
}
