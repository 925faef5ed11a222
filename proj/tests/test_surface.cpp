#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "sgsurf/surface.hpp"
#include "support/generators.hpp"

using namespace sgsurf;

namespace {

SurfaceMethods gh(int nodes, int designated) {
  SurfaceMethods m;
  m.averaging = GaussHermiteAveraging{nodes, designated};
  return m;
}

SurfaceMethods mc(std::size_t samples, std::uint64_t seed) {
  SurfaceMethods m;
  m.averaging = McAveraging{samples, seed};
  return m;
}

constexpr double kLnCoshPoint2 = 0.019619704883648389;  // E ln cosh(0.2 J)
constexpr double kLnCosh1 = 0.37456720749143797;        // E ln cosh(J)

}  // namespace

TEST_CASE("beta = 0 pressures are |Lambda| ln 2 exactly") {
  for (auto bc : {BoundaryCondition::Free, BoundaryCondition::Periodic, BoundaryCondition::Antiperiodic}) {
    for (const auto& spec : {LatticeSpec{1, {5}}, LatticeSpec{2, {3, 3}}}) {
      const auto p = quenched_pressure(spec, bc, 0.0, mc(8, 1));
      CHECK(p.mean == static_cast<double>(spec.volume()) * std::log(2.0));
      CHECK(p.std_error == 0.0);
    }
  }
}

TEST_CASE("beta = 0 report is identically zero") {
  const auto r = tau_report(LatticeSpec{1, {4}}, 2, 0.0, gh(3, 3));
  for (const auto* t : {&r.tau_phi, &r.tau_phi_integral, &r.tau_pi, &r.tau_pi_integral, &r.tau_pi_star}) {
    CHECK(t->raw.mean == 0.0);
    CHECK(t->by_faces == 0.0);
    CHECK(t->by_cut == 0.0);
  }
  CHECK(r.free_surface.route_difference.mean == 0.0);
  CHECK(r.periodic_shift.route_difference.mean == 0.0);
  CHECK(r.all_bounds_pass());
}

TEST_CASE("free chain pressure matches the single-bond closed form") {
  const auto p = quenched_pressure(LatticeSpec{1, {5}}, BoundaryCondition::Free, 0.2, gh(16, 16));
  CHECK(std::abs(p.mean - (5 * std::log(2.0) + 4 * kLnCoshPoint2)) < 1e-12);
  const auto q = quenched_pressure(LatticeSpec{1, {5}}, BoundaryCondition::Free, 0.2, mc(4000, 9));
  CHECK(std::abs(q.mean - (5 * std::log(2.0) + 4 * kLnCoshPoint2)) <= 3.0 * q.std_error);
}

TEST_CASE("1D free surface at small beta reduces to -E ln cosh") {
  // Remaining term is -(1/2) E ln(1 + prod of six tanh), below 1e-9 here.
  const auto t = t_phi_direct(LatticeSpec{1, {3}}, 2, 0.2, gh(12, 12));
  CHECK(std::abs(t.mean + kLnCoshPoint2) < 1e-8);
}

TEST_CASE("1D free surface at beta = 1 is bracketed by -E ln cosh") {
  const auto t = t_phi_direct(LatticeSpec{1, {3}}, 2, 1.0, gh(8, 20));
  CHECK(t.mean > -kLnCosh1 - 0.01);
  CHECK(t.mean < -kLnCosh1 + 0.01);
}

TEST_CASE("finite-k free surface is monotone in k") {
  double previous = 1.0;
  for (int k : {1, 2, 3}) {
    const double t = t_phi_direct(LatticeSpec{1, {3}}, k, 1.0, gh(4, 8)).mean;
    CAPTURE(k);
    CHECK(t < previous);
    previous = t;
  }
}

TEST_CASE("ring shift: direct and cut-integral routes agree; Pi = Pi* under symmetric nodes") {
  const auto s = delta_pi_phi(LatticeSpec{1, {4}}, 1.0, gh(8, 80));
  CHECK(std::abs(s.direct.mean - s.integral.mean) < 1e-8);
  CHECK(std::abs(s.p_pi.mean - s.p_pi_star.mean) < 1e-12);
  CHECK(std::abs(s.pi_minus_pi_star.mean) < 1e-12);
  CHECK(s.direct.mean > 0.0);
  CHECK(s.curve.designated_count == 1);
}

TEST_CASE("free geometry pressure is the same through the chain and enumeration engines") {
  auto chain = gh(6, 6);
  chain.engine.selector = EngineConfig::Selector::Chain;
  auto enumerate = gh(6, 6);
  enumerate.engine.selector = EngineConfig::Selector::Enumerate;
  for (auto bc : {BoundaryCondition::Free, BoundaryCondition::Periodic, BoundaryCondition::Antiperiodic}) {
    const double a = quenched_pressure(LatticeSpec{1, {5}}, bc, 0.8, chain).mean;
    const double b = quenched_pressure(LatticeSpec{1, {5}}, bc, 0.8, enumerate).mean;
    CHECK(std::abs(a - b) < 1e-12);
  }
}

TEST_CASE("small-beta periodic shift approaches |cut| beta^2 / 2") {
  for (double beta : {0.05, 0.1}) {
    const auto s = delta_pi_phi(LatticeSpec{1, {4}}, beta, gh(12, 12));
    CAPTURE(beta);
    CHECK(std::abs(s.direct.mean / (beta * beta) - 0.5) < beta * beta);
    CHECK(std::abs(s.integral.mean / (beta * beta) - 0.5) < beta * beta);
  }
}

TEST_CASE("free surface per face is smooth between beta = 0.1 and 0.2") {
  const LatticeSpec spec{1, {3}};
  const double faces = static_cast<double>(spec.surface_faces());
  const double a = t_phi_direct(spec, 2, 0.1, gh(12, 12)).mean / (faces * 0.01);
  const double b = t_phi_direct(spec, 2, 0.2, gh(12, 12)).mean / (faces * 0.04);
  CHECK(std::abs(a - b) < 0.02);
  CHECK(a == doctest::Approx(-0.25).epsilon(0.01));
}

TEST_CASE("report bounds and normalizations") {
  const LatticeSpec spec{1, {3}};
  const auto r = tau_report(spec, 2, 1.0, gh(3, 6));
  REQUIRE(r.bounds.size() == 6);
  CHECK(r.all_bounds_pass());
  CHECK(r.census_magnified.corridor_identity_holds());
  const double faces = static_cast<double>(spec.surface_faces());
  const double cut = static_cast<double>(spec.cross_section_sum());
  CHECK(r.tau_phi.by_faces == doctest::Approx(r.tau_phi.raw.mean / faces));
  CHECK(r.tau_phi.by_cut == doctest::Approx(r.tau_phi.raw.mean / cut));
  CHECK(r.tau_pi.raw.mean == doctest::Approx(r.tau_phi.raw.mean + r.periodic_shift.direct.mean));
  CHECK(r.tau_pi.raw.mean - r.tau_phi.raw.mean >= 0.0);
  CHECK(r.tau_phi.by_faces <= 0.0);
  CHECK(r.tau_phi.by_faces >= -0.25);
}

TEST_CASE("antiperiodic signs flip only the cut") {
  const auto torus = build_geometry(LatticeSpec{2, {3, 4}}, GeometryKind::Torus);
  gen::Source src(5);
  const auto c = src.couplings(torus.bond_count());
  const auto flipped = with_antiperiodic_signs(torus, c);
  for (std::size_t b = 0; b < torus.bond_count(); ++b) {
    CHECK(flipped.values[b] == c.values[b]);
    CHECK(flipped.signs[b] == (torus.bonds()[b].wrap ? -c.signs[b] : c.signs[b]));
  }
}

TEST_CASE("property: extrapolation recovers exact quadratics") {
  gen::Source src(6);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = src.uniform(-1, 1), b = src.uniform(-2, 2);
    std::vector<double> betas, values, errors;
    const int n = src.integer(2, 6);
    for (int i = 0; i < n; ++i) {
      const double beta = 0.05 + 0.1 * i + src.uniform(0, 0.05);
      betas.push_back(beta);
      values.push_back(a + b * beta * beta);
      errors.push_back(src.coin() ? src.uniform(0.01, 0.1) : 0.0);
    }
    const auto fit = extrapolate_small_beta(betas, values, errors);
    CHECK(fit.intercept == doctest::Approx(a).epsilon(1e-9));
    CHECK(fit.slope == doctest::Approx(b).epsilon(1e-9));
  }
}

TEST_CASE("extrapolation weights points by their errors") {
  const auto fit = extrapolate_small_beta({0.1, 0.2, 0.3}, {1.0, 1.0, 2.0}, {0.01, 0.01, 100.0});
  CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(fit.slope) < 1e-3);
  CHECK(fit.intercept_error > 0.0);
  const auto single = extrapolate_small_beta({0.1}, {1.5}, {0.1});
  CHECK(single.intercept == 1.5);
  CHECK(single.slope == 0.0);
}

TEST_CASE("scan sorts betas and reports adjacent differences") {
  const auto table = beta_scan(LatticeSpec{1, {3}}, 2, {0.4, 0.2, 0.3}, gh(3, 6));
  REQUIRE(table.rows.size() == 3);
  CHECK(table.rows[0].beta == 0.2);
  CHECK(table.rows[2].beta == 0.4);
  double worst = 0.0;
  for (std::size_t i = 1; i < 3; ++i) {
    worst = std::max(worst, std::abs(table.rows[i].tau_pi_faces - table.rows[i - 1].tau_pi_faces));
  }
  CHECK(table.max_adjacent_tau_pi_faces == worst);
  CHECK_THROWS_AS(beta_scan(LatticeSpec{1, {3}}, 2, {0.0, 0.2}, gh(3, 6)), std::invalid_argument);
}

TEST_CASE("direct-only free surface matches the full computation") {
  const auto full = t_phi(LatticeSpec{1, {3}}, 2, 0.9, gh(3, 5));
  const auto direct = t_phi_direct(LatticeSpec{1, {3}}, 2, 0.9, gh(3, 5));
  CHECK(std::abs(full.direct.mean - direct.mean) < 1e-14);
}
