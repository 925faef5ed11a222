#ifndef SGSURF_REPORT_HPP
#define SGSURF_REPORT_HPP

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sgsurf/interp.hpp"
#include "sgsurf/lattice.hpp"
#include "sgsurf/surface.hpp"

namespace sgsurf {

using Json = nlohmann::ordered_json;

/// Replaces -0.0 by 0.0; everything else passes through.
double unsigned_zero(double x);

Json to_json(const QuenchedEstimate& e);
Json to_json(const BondCensus& c);
Json to_json(const LatticeSpec& spec);
Json to_json(const IntegrandCurve& curve);
Json to_json(const SurfacePressureReport& r);
Json to_json(const ScanTable& t);

/// Header, version and the embedded config block shared by every report.
Json report_envelope(const std::string& command, const std::string& config_json);

/// Pretty-printed with a trailing newline; doubles use shortest round-trip form.
std::string dump(const Json& j);

/// Columns t,value,std_error,designated_count with 17 significant digits.
std::string write_curve_csv(const IntegrandCurve& curve);
/// Inverse of write_curve_csv; the weights are recomputed from the row count.
IntegrandCurve parse_curve_csv(const std::string& text);

std::string write_scan_csv(const ScanTable& table);

/// Writes every file to a temporary name first and renames only when all
/// writes succeeded, so a failure leaves no partial output behind.
void write_outputs(const std::string& dir,
                   const std::vector<std::pair<std::string, std::string>>& files);

}  // namespace sgsurf

#endif  // SGSURF_REPORT_HPP
