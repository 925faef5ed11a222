#ifndef SGSURF_INTERP_HPP
#define SGSURF_INTERP_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sgsurf/disorder.hpp"
#include "sgsurf/engine.hpp"
#include "sgsurf/lattice.hpp"
#include "sgsurf/mc.hpp"

namespace sgsurf {

/// Which per-realization engine evaluates Gibbs expectations.
struct EngineConfig {
  enum class Selector { Auto, Enumerate, Chain, Mc };

  Selector selector = Selector::Auto;
  EnumerationOptions enumeration;
  McParams mc;
};

std::string to_string(EngineConfig::Selector selector);

/// True when `config` resolves to an exact engine on this geometry.
bool uses_exact_engine(const LatticeGeometry& geometry, const EngineConfig& config);

/// Label of the engine that will run on `geometry` (for provenance).
std::string engine_label(const LatticeGeometry& geometry, const EngineConfig& config);

/// omega(q_b) for the listed bonds of one realization. `stream` keys the
/// thermal MC streams when the MC engine is used.
std::vector<double> realization_overlaps(const LatticeGeometry& geometry,
                                         const CouplingAssignment& couplings,
                                         const Schedule& schedule,
                                         std::span<const std::size_t> bonds,
                                         const EngineConfig& config, std::uint64_t stream);

/// ln Z for one realization; the MC engine integrates from the decoupled state.
double realization_log_z(const LatticeGeometry& geometry, const CouplingAssignment& couplings,
                         const Schedule& schedule, const EngineConfig& config,
                         std::uint64_t stream);

enum class Designation { Corridor, Cut };

std::string to_string(Designation designation);
std::vector<std::size_t> designated_bonds(const LatticeGeometry& geometry, Designation designation);

/// t_b = t on the designated bonds, 1 elsewhere.
Schedule make_schedule(const LatticeGeometry& geometry, Designation designation, double t,
                       double beta);

struct IntegrandCurve {
  std::vector<double> t_nodes;
  std::vector<double> values;  // (1/|S|) sum_{b in S} (1 - <q_b>_t)
  std::vector<double> errors;
  std::vector<double> weights;
  std::size_t designated_count = 0;

  bool operator==(const IntegrandCurve&) const = default;
};

struct IntegrandRequest {
  LatticeGeometry geometry;
  Designation designation = Designation::Corridor;
  double beta = 1.0;
  AveragingMethod averaging = GaussHermiteAveraging{};
  EngineConfig engine;
};

struct IntegrandValue {
  QuenchedEstimate derivative;  // (beta^2/2) sum_{b in S} (1 - <q_b>_t)
  QuenchedEstimate normalized;  // per-bond curve value
};

IntegrandValue integrand(const IntegrandRequest& request, double t);

struct IntegralResult {
  QuenchedEstimate value;  // int_0^1 (beta^2/2) sum_{b in S} (1 - <q_b>_t) dt
  IntegrandCurve curve;
};

/// Gauss-Legendre on [0, 1]. Every node uses the same disorder realizations,
/// and the MC error of the integral is taken per realization.
IntegralResult integrate_t(const IntegrandRequest& request, int gl_order = 16);

/// Columns evaluated on the same realizations as the curve; `integral` is this
/// realization's weighted t-integral (on the scale of IntegralResult::value).
using ExtraColumns = std::function<void(const CouplingAssignment&, std::size_t index,
                                        double integral, std::span<double> out)>;

struct IntegralWithExtras : IntegralResult {
  std::vector<QuenchedEstimate> extras;
};

IntegralWithExtras integrate_t_with(const IntegrandRequest& request, int gl_order,
                                    std::size_t extra_width, const ExtraColumns& extra);

/// Quenched pressure of the interpolated model at parameter t.
QuenchedEstimate interpolated_pressure(const IntegrandRequest& request, double t);

}  // namespace sgsurf

#endif  // SGSURF_INTERP_HPP
