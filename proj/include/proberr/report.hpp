#ifndef PROBERR_REPORT_HPP
#define PROBERR_REPORT_HPP

#include "proberr/analysis.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace proberr {

// {error_bound, worst_case_bound, confidence, format, pbox{grid, cdf_lo,
// cdf_hi}, atoms{zero, underflow, overflow}, timings{...}, solver_stats{...}}
nlohmann::json report_json(const AnalysisReport& rep);

// Schema problems; empty when the document is well formed and every number
// is finite.
std::vector<std::string> validate_report(const nlohmann::json& j);

}  // namespace proberr

#endif
