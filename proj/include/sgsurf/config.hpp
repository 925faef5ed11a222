#ifndef SGSURF_CONFIG_HPP
#define SGSURF_CONFIG_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgsurf/interp.hpp"
#include "sgsurf/lattice.hpp"
#include "sgsurf/surface.hpp"

namespace sgsurf {

/// Everything a run needs. Defaults are the documented ones; see README.
struct RunConfig {
  LatticeSpec lattice{1, {4}};
  std::vector<BoundaryCondition> bcs{BoundaryCondition::Free, BoundaryCondition::Periodic,
                                     BoundaryCondition::Antiperiodic};
  std::vector<double> betas{1.0};
  int k = 2;
  EngineConfig engine;
  AveragingMethod averaging = McAveraging{};
  McAveraging mc_averaging;          // kept so switching method keeps the other settings
  GaussHermiteAveraging gh_averaging;
  int gl_order = 16;
  unsigned threads = 0;
  std::string out = ".";

  SurfaceMethods methods() const;
};

/// Validation failure tied to a config field; `line` is 0 when not from a file.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, std::string message, int line = 0);

  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

/// Parses YAML (or JSON) text; unknown keys are errors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

BoundaryCondition parse_boundary(const std::string& name);
std::vector<double> parse_beta_list(const std::string& text);

/// Cross-field checks (engine vs dimension, MC ladder, lattice sides).
void validate_config(const RunConfig& config);

/// The config as JSON text, every field explicit; parse_config accepts it back.
std::string config_json(const RunConfig& config);

}  // namespace sgsurf

#endif  // SGSURF_CONFIG_HPP
