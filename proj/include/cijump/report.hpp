#pragma once

// Canonical JSON reports. Exact scalars are written as literals
// ("12+6*sqrt(3)"); no decimals and no timestamps appear in the body, so equal
// inputs give byte-equal reports. Decimal renderings and run metadata go to a
// separate plain-text sidecar.

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cijump/analyzer.hpp"
#include "cijump/jump.hpp"

namespace cijump {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchema = 1;

class ReportFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json record_to_json(const VerificationRecord& record);

Json solution_to_json(const JumpSolution& solution);
/// Inverse of solution_to_json; accepts a full jump report or the bare
/// "solution" object. Throws ReportFormatError.
JumpSolution solution_from_json(const Json& json);

Json catalogue_summary(const OrbitCatalogue& catalogue);

/// mu_-, mu_+, k * mean, b+/b- and the convexity margin for k in [k_lo, k_hi].
Json index_table(const OrbitCatalogue& catalogue, std::int64_t k_lo, std::int64_t k_hi);

Json analysis_to_json(const OrbitCatalogue& catalogue, const AnalysisReport& report);

/// Wraps a body with the schema header and command name.
Json report_envelope(const std::string& command, Json body);

/// Serialized form used for files: two-space indent, trailing newline.
std::string dump_report(const Json& report);

/// "path = literal ~ decimal" for every non-integer exact scalar in the report.
std::string decimal_sidecar(const Json& report, int digits = 20);

}  // namespace cijump
