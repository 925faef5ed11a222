#include <stdexcept>
#include <algorithm>
#include <set>

#include "doctest.h"
#include "sgsurf/lattice.hpp"
#include "support/generators.hpp"

using namespace sgsurf;

namespace {

/// Brute-force bond enumeration straight from coordinates, independent of the library.
struct BruteBond {
  std::size_t a, b;
  int axis;
  bool wrap;
};

std::vector<BruteBond> brute_bonds(const LatticeSpec& spec, bool torus) {
  std::size_t n = 1;
  for (int L : spec.sides) n *= static_cast<std::size_t>(L);
  std::vector<BruteBond> out;
  for (int axis = 0; axis < spec.dim; ++axis) {
    std::size_t stride = 1;
    for (int i = 0; i < axis; ++i) stride *= static_cast<std::size_t>(spec.sides[i]);
    const int L = spec.sides[axis];
    for (std::size_t site = 0; site < n; ++site) {
      const int x = static_cast<int>((site / stride) % static_cast<std::size_t>(L));
      if (x + 1 < L) {
        out.push_back({site, site + stride, axis, false});
      } else if (torus) {
        const std::size_t other = site - static_cast<std::size_t>(L - 1) * stride;
        out.push_back({std::min(site, other), std::max(site, other), axis, true});
      }
    }
  }
  return out;
}

std::size_t count_role(const LatticeGeometry& g, RoleKind kind) { return g.bonds_with_role(kind).size(); }

}  // namespace

TEST_CASE("free chain of three sites has bonds (0,1) and (1,2)") {
  const auto g = build_geometry(LatticeSpec{1, {3}}, GeometryKind::FreeBlock);
  REQUIRE(g.bond_count() == 2);
  CHECK(g.bonds()[0] == Bond{0, 1, 0, false});
  CHECK(g.bonds()[1] == Bond{1, 2, 0, false});
}

TEST_CASE("(3,3) torus has 18 bonds, 6 of them wrap") {
  const auto g = build_geometry(LatticeSpec{2, {3, 3}}, GeometryKind::Torus);
  CHECK(g.bond_count() == 18);
  const auto wraps = std::count_if(g.bonds().begin(), g.bonds().end(), [](const Bond& b) { return b.wrap; });
  CHECK(wraps == 6);
  CHECK(count_role(g, RoleKind::Cut) == 6);
}

TEST_CASE("side violations are rejected with the constraint named") {
  CHECK_THROWS_WITH_AS(build_geometry(LatticeSpec{2, {2, 2}}, GeometryKind::Torus),
                       doctest::Contains("L_i >= 3"), std::invalid_argument);
  CHECK_THROWS_AS(build_geometry(LatticeSpec{1, {1}}, GeometryKind::FreeBlock), std::invalid_argument);
  CHECK_THROWS_AS(build_geometry(LatticeSpec{2, {3}}, GeometryKind::FreeBlock), std::invalid_argument);
  CHECK_THROWS_AS(build_geometry(LatticeSpec{0, {}}, GeometryKind::FreeBlock), std::invalid_argument);
}

TEST_CASE("cut_set examples") {
  CHECK(cut_set(build_geometry(LatticeSpec{1, {4}}, GeometryKind::Torus)).size() == 1);
  const auto square = build_geometry(LatticeSpec{2, {3, 3}}, GeometryKind::Torus);
  CHECK(cut_set(square).size() == 6);
  const auto cube = build_geometry(LatticeSpec{3, {3, 3, 3}}, GeometryKind::Torus);
  CHECK(cube.bond_count() == 81);
  CHECK(cut_set(cube).size() == 27);
  CHECK_THROWS_AS(cut_set(build_geometry(LatticeSpec{1, {4}}, GeometryKind::FreeBlock)), std::invalid_argument);
}

TEST_CASE("(3,3,3) wrap count matches a brute-force scan") {
  const auto brute = brute_bonds(LatticeSpec{3, {3, 3, 3}}, true);
  CHECK(std::count_if(brute.begin(), brute.end(), [](const BruteBond& b) { return b.wrap; }) == 27);
}

TEST_CASE("magnified partition examples") {
  const auto g = magnified_partition(LatticeSpec{1, {3}}, 2);
  CHECK(g.site_count() == 6);
  CHECK(g.bond_count() == 6);
  CHECK(count_role(g, RoleKind::Corridor) == 2);
  CHECK(g.block_bonds(0).size() == 2);
  CHECK(g.block_bonds(1).size() == 2);

  const auto sq = magnified_partition(LatticeSpec{2, {3, 3}}, 2);
  CHECK(sq.bond_count() == 72);
  CHECK(count_role(sq, RoleKind::Corridor) == 24);
  for (int s = 0; s < 4; ++s) CHECK(sq.block_bonds(s).size() == 12);

  CHECK_THROWS_AS(magnified_partition(LatticeSpec{1, {2}}, 1), std::invalid_argument);
  CHECK_THROWS_AS(magnified_partition(LatticeSpec{1, {3}}, 0), std::invalid_argument);
}

TEST_CASE("k = 1 corridor equals the cut set of the torus") {
  const LatticeSpec spec{2, {3, 4}};
  const auto m = magnified_partition(spec, 1);
  const auto t = build_geometry(spec, GeometryKind::Torus);
  std::vector<Bond> corridor;
  for (auto b : m.bonds_with_role(RoleKind::Corridor)) corridor.push_back(m.bonds()[b]);
  CHECK(corridor == cut_set(t));
}

TEST_CASE("bond census examples") {
  const auto c = bond_census(magnified_partition(LatticeSpec{2, {3, 3}}, 2));
  CHECK(c.corridor == 24);
  CHECK(c.blocks * c.surface_faces == 48);
  CHECK(c.corridor_identity_holds());

  const auto line = bond_census(magnified_partition(LatticeSpec{1, {3}}, 3));
  CHECK(line.corridor == 3);
  CHECK(line.surface_faces == 2);
  CHECK(2 * line.corridor == 3 * line.surface_faces);

  const auto free = bond_census(build_geometry(LatticeSpec{2, {4, 2}}, GeometryKind::FreeBlock));
  CHECK(free.interior == 10);
}

TEST_CASE("property: geometries agree with the brute-force construction") {
  gen::Source src(11);
  for (int trial = 0; trial < 60; ++trial) {
    const bool torus = src.coin();
    const auto spec = src.spec(3, torus ? 3 : 2, 400);
    CAPTURE(trial);
    const auto g = build_geometry(spec, torus ? GeometryKind::Torus : GeometryKind::FreeBlock);
    const auto brute = brute_bonds(spec, torus);
    REQUIRE(g.bond_count() == brute.size());
    std::set<std::tuple<std::size_t, std::size_t, int, bool>> expected, actual;
    for (const auto& b : brute) expected.insert({b.a, b.b, b.axis, b.wrap});
    for (const auto& b : g.bonds()) actual.insert({b.site_a, b.site_b, b.axis, b.wrap});
    CHECK(expected == actual);

    std::size_t formula = 0;
    for (int i = 0; i < spec.dim; ++i) {
      formula += torus ? spec.volume() / spec.sides[i]
                       : (spec.sides[i] - 1) * (spec.volume() / spec.sides[i]);
    }
    if (torus) formula = spec.dim * spec.volume();
    CHECK(g.bond_count() == formula);

    for (std::size_t i = 1; i < g.bond_count(); ++i) {
      const auto& p = g.bonds()[i - 1];
      const auto& q = g.bonds()[i];
      CHECK(std::tie(p.axis, p.site_a, p.site_b) < std::tie(q.axis, q.site_a, q.site_b));
    }
    for (const auto& b : g.bonds()) CHECK(b.site_a < b.site_b);

    for (auto d : g.degrees()) {
      if (torus) {
        CHECK(d == static_cast<std::size_t>(2 * spec.dim));
      } else {
        CHECK(d >= static_cast<std::size_t>(spec.dim));
        CHECK(d <= static_cast<std::size_t>(2 * spec.dim));
      }
    }
    if (torus) {
      CHECK(count_role(g, RoleKind::Cut) == spec.cross_section_sum());
      std::vector<Bond> rest;
      for (const auto& b : g.bonds()) {
        if (!b.wrap) rest.push_back(b);
      }
      CHECK(rest == build_geometry(spec, GeometryKind::FreeBlock).bonds());
    }
    const auto again = build_geometry(spec, torus ? GeometryKind::Torus : GeometryKind::FreeBlock);
    CHECK(again.bonds() == g.bonds());
  }
}

TEST_CASE("property: magnified tori partition into k^d free blocks") {
  gen::Source src(12);
  for (int trial = 0; trial < 40; ++trial) {
    const auto spec = src.spec(2, 2, 36);
    const int k = src.integer(1, 3);
    bool ok = true;
    for (int L : spec.sides) ok = ok && k * L >= 3;
    if (!ok) continue;
    CAPTURE(trial);
    const auto g = magnified_partition(spec, k);
    const auto block = build_geometry(spec, GeometryKind::FreeBlock);
    std::size_t blocks = 1;
    for (int i = 0; i < spec.dim; ++i) blocks *= static_cast<std::size_t>(k);
    REQUIRE(g.block_count() == blocks);

    // Corridor role by explicit block membership of the endpoints.
    std::size_t corridor = 0;
    for (std::size_t b = 0; b < g.bond_count(); ++b) {
      const auto& bond = g.bonds()[b];
      const bool crosses = g.block_of_site(bond.site_a) != g.block_of_site(bond.site_b) || bond.wrap;
      CHECK((g.roles()[b].kind == RoleKind::Corridor) == crosses);
      corridor += crosses;
    }
    CHECK(corridor == blocks * spec.cross_section_sum());
    CHECK(bond_census(g).corridor_identity_holds());

    std::size_t interior = 0;
    for (std::size_t s = 0; s < blocks; ++s) {
      const auto ids = g.block_bonds(static_cast<int>(s));
      interior += ids.size();
      REQUIRE(ids.size() == block.bond_count());
      // Same bond in the same position, translated into block s.
      for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto& mb = g.bonds()[ids[i]];
        const auto& fb = block.bonds()[i];
        CHECK(mb.axis == fb.axis);
        const auto ca = g.coordinates(mb.site_a);
        const auto cb = g.coordinates(mb.site_b);
        for (int d = 0; d < spec.dim; ++d) {
          CHECK(ca[d] % spec.sides[d] == block.coordinates(fb.site_a)[d]);
          CHECK(cb[d] % spec.sides[d] == block.coordinates(fb.site_b)[d]);
        }
      }
    }
    CHECK(interior + corridor == g.bond_count());
  }
}
