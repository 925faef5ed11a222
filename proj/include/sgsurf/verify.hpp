#ifndef SGSURF_VERIFY_HPP
#define SGSURF_VERIFY_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sgsurf/report.hpp"
#include "sgsurf/surface.hpp"

namespace sgsurf {

struct CheckResult {
  std::string name;
  double value = 0.0;
  std::string relation;  // how value is compared with tolerance
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<CheckResult> checks;
  /// Report files produced by the criterion, name -> content.
  std::vector<std::pair<std::string, std::string>> artifacts;
  double seconds = 0.0;

  bool pass() const;
};

enum class Suite { Identities, Bounds, Hightemp, All };

Suite parse_suite(const std::string& name);
std::string to_string(Suite suite);
std::vector<int> suite_criteria(Suite suite);

/// Runs the built-in desk-scale cases. Results shared between criteria
/// (curves of 3 and 4 feed 9; the 2D torus run of 4 feeds 5) are cached.
class VerifySession {
 public:
  VerifySession();
  ~VerifySession();

  CriterionResult run(int criterion);

  struct Cache;

 private:
  std::unique_ptr<Cache> cache_;
};

std::string format_check(const CheckResult& check);
Json to_json(const CriterionResult& result);

}  // namespace sgsurf

#endif  // SGSURF_VERIFY_HPP
