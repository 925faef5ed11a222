#include <stdexcept>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "sgsurf/interp.hpp"
#include "sgsurf/surface.hpp"
#include "support/generators.hpp"

using namespace sgsurf;

namespace {

IntegrandRequest request(const LatticeGeometry& g, Designation d, double beta, AveragingMethod m) {
  return IntegrandRequest{g, d, beta, m, EngineConfig{}};
}

}  // namespace

TEST_CASE("schedules") {
  const auto g = magnified_partition(LatticeSpec{1, {3}}, 2);
  const auto one = make_schedule(g, Designation::Corridor, 1.0, 0.7);
  CHECK(one.t_values == Schedule::plain(g.bond_count(), 0.7).t_values);
  const auto half = make_schedule(g, Designation::Corridor, 0.5, 0.7);
  for (std::size_t b = 0; b < g.bond_count(); ++b) {
    const bool corridor = g.roles()[b].kind == RoleKind::Corridor;
    CHECK(half.t_values[b] == (corridor ? 0.5 : 1.0));
  }
  CHECK_THROWS_AS(make_schedule(g, Designation::Corridor, 1.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_schedule(build_geometry(LatticeSpec{1, {3}}, GeometryKind::FreeBlock),
                                Designation::Cut, 0.5, 1.0),
                  std::invalid_argument);
}

TEST_CASE("t = 0 factorizes the magnified torus into blocks") {
  gen::Source src(31);
  for (const auto& spec : {LatticeSpec{1, {3}}, LatticeSpec{2, {2, 2}}}) {
    const auto g = magnified_partition(spec, 2);
    const auto block = build_geometry(spec, GeometryKind::FreeBlock);
    const auto s = make_schedule(g, Designation::Corridor, 0.0, 1.3);
    for (int trial = 0; trial < 5; ++trial) {
      const auto c = src.couplings(g.bond_count());
      double blocks = 0.0;
      for (std::size_t k = 0; k < g.block_count(); ++k) {
        const auto cs = restrict_couplings(c, g.block_bonds(static_cast<int>(k)));
        blocks += exact_gibbs(block, cs, Schedule::plain(block.bond_count(), 1.3), ExactEngine::Enumerate).log_z;
      }
      CHECK(std::abs(exact_gibbs(g, c, s, ExactEngine::Enumerate).log_z - blocks) < 1e-12);
    }
  }
}

TEST_CASE("t = 0 on the cut gives the free block") {
  gen::Source src(32);
  const LatticeSpec spec{2, {3, 3}};
  const auto torus = build_geometry(spec, GeometryKind::Torus);
  const auto free = build_geometry(spec, GeometryKind::FreeBlock);
  const auto s = make_schedule(torus, Designation::Cut, 0.0, 0.9);
  std::vector<std::size_t> inner;
  for (std::size_t b = 0; b < torus.bond_count(); ++b) {
    if (!torus.bonds()[b].wrap) inner.push_back(b);
  }
  for (int trial = 0; trial < 5; ++trial) {
    const auto c = src.couplings(torus.bond_count());
    const double folded = log_partition(torus, c, s).log_z;
    const double flat = log_partition(free, restrict_couplings(c, inner), Schedule::plain(free.bond_count(), 0.9)).log_z;
    CHECK(std::abs(folded - flat) < 1e-12);
  }
}

TEST_CASE("integrand endpoints") {
  const auto g = magnified_partition(LatticeSpec{1, {3}}, 2);
  const auto at_zero = integrand(request(g, Designation::Corridor, 1.0, GaussHermiteAveraging{3, 6}), 0.0);
  CHECK(std::abs(at_zero.normalized.mean - 1.0) < 1e-14);
  CHECK(at_zero.derivative.mean == doctest::Approx(0.5 * 2.0).epsilon(1e-15));
  const auto cold = integrand(request(g, Designation::Corridor, 0.0, GaussHermiteAveraging{3, 6}), 0.4);
  CHECK(cold.derivative.mean == 0.0);
  CHECK(std::abs(cold.normalized.mean - 1.0) < 1e-14);
}

TEST_CASE("integrand equals the finite-difference slope of the interpolated pressure") {
  const auto g = magnified_partition(LatticeSpec{1, {3}}, 2);
  const auto req = request(g, Designation::Corridor, 1.0, GaussHermiteAveraging{4, 80});
  const double h = 1e-4;
  const double fd = (interpolated_pressure(req, 0.5 + h).mean - interpolated_pressure(req, 0.5 - h).mean) / (2 * h);
  const double value = integrand(req, 0.5).derivative.mean;
  CHECK(std::abs(fd - value) / value < 1e-6);
}

TEST_CASE("beta = 0 curve is identically one and integrates to one") {
  const auto g = build_geometry(LatticeSpec{1, {4}}, GeometryKind::Torus);
  const auto r = integrate_t(request(g, Designation::Cut, 0.0, GaussHermiteAveraging{3, 3}), 16);
  double area = 0.0;
  for (std::size_t i = 0; i < r.curve.values.size(); ++i) {
    CHECK(std::abs(r.curve.values[i] - 1.0) < 1e-14);
    area += r.curve.weights[i] * r.curve.values[i];
  }
  CHECK(std::abs(area - 1.0) < 1e-14);
  CHECK(r.value.mean == 0.0);
  CHECK(r.curve.designated_count == 1);
}

TEST_CASE("N=3 ring: cut integral equals the endpoint pressure difference") {
  const auto g = build_geometry(LatticeSpec{1, {3}}, GeometryKind::Torus);
  const auto req = request(g, Designation::Cut, 1.0, GaussHermiteAveraging{20, 80});
  const auto r16 = integrate_t(req, 16);
  const auto r32 = integrate_t(req, 32);
  const double endpoints = interpolated_pressure(req, 1.0).mean - interpolated_pressure(req, 0.0).mean;
  CHECK(std::abs(r16.value.mean - endpoints) < 1e-8);
  CHECK(std::abs(r16.value.mean - r32.value.mean) < 1e-8);
  CHECK(r16.value.std_error == 0.0);
}

TEST_CASE("property: t integral equals the endpoint difference on every small interpolation with at most 8 bonds") {
  struct Case {
    LatticeGeometry g;
    Designation d;
    int nodes;
  };
  const std::vector<Case> cases{
      {build_geometry(LatticeSpec{1, {3}}, GeometryKind::Torus), Designation::Cut, 12},
      {build_geometry(LatticeSpec{1, {4}}, GeometryKind::Torus), Designation::Cut, 10},
      {build_geometry(LatticeSpec{1, {5}}, GeometryKind::Torus), Designation::Cut, 6},
      {magnified_partition(LatticeSpec{1, {3}}, 1), Designation::Corridor, 12},
      {magnified_partition(LatticeSpec{1, {3}}, 2), Designation::Corridor, 3},
      {magnified_partition(LatticeSpec{1, {4}}, 2), Designation::Corridor, 2},
  };
  gen::Source src(33);
  for (const auto& c : cases) {
    const double beta = src.uniform(0.3, 1.5);
    const auto req = request(c.g, c.d, beta, GaussHermiteAveraging{c.nodes, 80});
    const auto r = integrate_t(req, 16);
    const double endpoints = interpolated_pressure(req, 1.0).mean - interpolated_pressure(req, 0.0).mean;
    CAPTURE(c.g.bond_count());
    CAPTURE(beta);
    CHECK(std::abs(r.value.mean - endpoints) < 1e-8);
    for (double v : r.curve.values) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    CHECK(std::abs(std::accumulate(r.curve.weights.begin(), r.curve.weights.end(), 0.0) - 1.0) < 1e-14);
  }
}

TEST_CASE("MC engine integrand agrees with the exact engine") {
  const auto g = build_geometry(LatticeSpec{2, {3, 3}}, GeometryKind::Torus);
  auto exact = request(g, Designation::Cut, 1.0, McAveraging{12, 4});
  auto mc = exact;
  mc.engine.selector = EngineConfig::Selector::Mc;
  mc.engine.mc.sweeps = 2000;
  mc.engine.mc.burn_in = 200;
  const auto a = integrand(exact, 0.6);
  const auto b = integrand(mc, 0.6);
  CHECK(std::abs(a.normalized.mean - b.normalized.mean) <= 3.0 * std::hypot(a.normalized.std_error, b.normalized.std_error));
  CHECK(engine_label(g, mc.engine) == "mc:replica-exchange");
  CHECK(engine_label(build_geometry(LatticeSpec{1, {4}}, GeometryKind::Torus), EngineConfig{}) == "exact:chain");
}

TEST_CASE("explicit engines refuse geometries they cannot handle") {
  EngineConfig chain;
  chain.selector = EngineConfig::Selector::Chain;
  CHECK_THROWS_AS(uses_exact_engine(build_geometry(LatticeSpec{2, {3, 3}}, GeometryKind::Torus), chain),
                  std::invalid_argument);
  EngineConfig enumerate;
  enumerate.selector = EngineConfig::Selector::Enumerate;
  CHECK_THROWS_AS(uses_exact_engine(magnified_partition(LatticeSpec{2, {3, 3}}, 2), enumerate),
                  std::invalid_argument);
  CHECK_FALSE(uses_exact_engine(magnified_partition(LatticeSpec{2, {3, 3}}, 2), EngineConfig{}));
}
