#ifndef SGSURF_SURFACE_HPP
#define SGSURF_SURFACE_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "sgsurf/disorder.hpp"
#include "sgsurf/interp.hpp"
#include "sgsurf/lattice.hpp"

namespace sgsurf {

enum class BoundaryCondition { Free, Periodic, Antiperiodic };

std::string to_string(BoundaryCondition bc);

struct SurfaceMethods {
  AveragingMethod averaging = GaussHermiteAveraging{};
  EngineConfig engine;
  int gl_order = 16;
};

/// Geometry for a boundary condition: free block or torus over `spec`.
LatticeGeometry boundary_geometry(const LatticeSpec& spec, BoundaryCondition bc);

/// Realization on `geometry` with alpha_b = -1 on the cut bonds (antiperiodic).
CouplingAssignment with_antiperiodic_signs(const LatticeGeometry& torus, CouplingAssignment c);

/// Couplings of the listed bonds, in list order.
CouplingAssignment restrict_couplings(const CouplingAssignment& c, const std::vector<std::size_t>& bonds);

/// Av ln Z. Averaged as |Lambda| ln 2 + Av[ln Z - |Lambda| ln 2] so that beta = 0
/// reproduces |Lambda| ln 2 exactly. Tori use the cut bonds as the designated set.
QuenchedEstimate quenched_pressure(const LatticeSpec& spec, BoundaryCondition bc, double beta,
                                   const SurfaceMethods& methods);

struct SurfaceEstimate {
  QuenchedEstimate direct;
  QuenchedEstimate integral;
  QuenchedEstimate route_difference;  // direct - integral, paired per realization
  IntegrandCurve curve;
  std::string engine;
};

struct FreeSurface : SurfaceEstimate {
  QuenchedEstimate block_pressure;   // k^-d sum_s ln Z_{Lambda_s}, i.e. P^Phi
  QuenchedEstimate torus_pressure;   // ln Z on the k-magnified torus
};

/// T^Phi at finite k: direct k^-d [k^d P^Phi - P^Pi_{k Lambda}] with shared
/// couplings, and integral -k^-d (beta^2/2) sum_{b in C} int_0^1 (1 - <q_b>_t) dt.
FreeSurface t_phi(const LatticeSpec& spec, int k, double beta, const SurfaceMethods& methods);
QuenchedEstimate t_phi_direct(const LatticeSpec& spec, int k, double beta,
                              const SurfaceMethods& methods);
SurfaceEstimate t_phi_integral(const LatticeSpec& spec, int k, double beta,
                               const SurfaceMethods& methods);

struct PeriodicShift : SurfaceEstimate {
  QuenchedEstimate p_phi;
  QuenchedEstimate p_pi;
  QuenchedEstimate p_pi_star;
  QuenchedEstimate pi_minus_pi_star;  // paired
};

/// P^Pi - P^Phi directly and as (beta^2/2) sum_{b in cut} int_0^1 (1 - <q_b>_t) dt.
PeriodicShift delta_pi_phi(const LatticeSpec& spec, double beta, const SurfaceMethods& methods);

struct BoundCheck {
  std::string name;
  double value = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  bool upper = true;  // value <= bound, else value >= bound
  bool pass = false;
};

/// Raw surface quantity divided by both boundary normalizations.
struct TauPair {
  QuenchedEstimate raw;
  double by_faces = 0.0;
  double by_faces_error = 0.0;
  double by_cut = 0.0;
  double by_cut_error = 0.0;
};

struct SurfacePressureReport {
  LatticeSpec spec;
  int k = 1;
  double beta = 0.0;
  std::string averaging;
  std::string engine_torus;
  std::string engine_magnified;
  int gl_order = 16;
  BondCensus census_magnified;
  BondCensus census_torus;

  QuenchedEstimate p_phi;
  QuenchedEstimate p_pi;
  QuenchedEstimate p_pi_star;
  QuenchedEstimate p_per_site_ref;  // torus pressure per site on k Lambda
  int p_ref_k = 1;

  FreeSurface free_surface;
  PeriodicShift periodic_shift;

  TauPair tau_phi;           // direct route
  TauPair tau_phi_integral;
  TauPair tau_pi;            // T^Phi + (P^Pi - P^Phi), direct route
  TauPair tau_pi_integral;
  TauPair tau_pi_star;

  std::vector<BoundCheck> bounds;
  bool all_bounds_pass() const;
};

/// Significance used by every bound check: pass if within 3 standard errors.
inline constexpr double kBoundSigmas = 3.0;

SurfacePressureReport tau_report(const LatticeSpec& spec, int k, double beta,
                                 const SurfaceMethods& methods);

struct ScanRow {
  double beta = 0.0;
  double tau_phi_faces = 0.0, tau_phi_faces_error = 0.0;
  double tau_phi_cut = 0.0, tau_phi_cut_error = 0.0;
  double tau_pi_faces = 0.0, tau_pi_faces_error = 0.0;
  double tau_pi_cut = 0.0, tau_pi_cut_error = 0.0;
};

/// Weighted least-squares fit value = intercept + slope * beta^2.
struct Extrapolation {
  double intercept = 0.0;
  double intercept_error = 0.0;
  double slope = 0.0;
  double slope_error = 0.0;
};

Extrapolation extrapolate_small_beta(const std::vector<double>& betas,
                                     const std::vector<double>& values,
                                     const std::vector<double>& errors);

struct ScanTable {
  LatticeSpec spec;
  int k = 1;
  std::vector<ScanRow> rows;  // tau / beta^2 columns
  Extrapolation tau_phi_faces, tau_phi_cut, tau_pi_faces, tau_pi_cut;
  double max_adjacent_tau_pi_faces = 0.0;  // largest |difference| between adjacent betas
};

ScanTable beta_scan(const LatticeSpec& spec, int k, const std::vector<double>& betas,
                    const SurfaceMethods& methods);

/// Limits quoted alongside the scan: the stated high-temperature claim for
/// tau^Pi / beta^2 and the leading-order expansion prediction.
inline constexpr double kClaimedTauPiLimit = 0.25;
inline constexpr double kExpansionTauPiLimit = 0.0;
inline constexpr double kExpansionTauPhiLimit = -0.25;

}  // namespace sgsurf

#endif  // SGSURF_SURFACE_HPP
