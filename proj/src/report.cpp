#include "proberr/report.hpp"

#include <cmath>

namespace proberr {

using nlohmann::json;

json report_json(const AnalysisReport& rep) {
    json j;
    j["error_bound"] = rep.error_bound;
    j["worst_case_bound"] = rep.worst_case_bound;
    j["confidence"] = rep.confidence;
    j["format"] = {{"name", rep.fmt.name}, {"p", rep.fmt.p}, {"emin", rep.fmt.emin}, {"emax", rep.fmt.emax}};
    j["pbox"] = {{"grid", rep.output_pbox.grid}, {"cdf_lo", rep.output_pbox.cdf_lo}, {"cdf_hi", rep.output_pbox.cdf_hi}};
    j["atoms"] = {{"zero", rep.atom_zero}, {"underflow", rep.atom_underflow}, {"overflow", rep.atom_overflow}};
    j["timings"] = json::object();
    for (const auto& [k, v] : rep.timings) j["timings"][k] = v;
    const SolverStats& s = rep.solver_stats;
    j["solver_stats"] = {{"queries", s.queries}, {"sat", s.sat},         {"unsat", s.unsat},
                         {"unknown", s.unknown}, {"restarts", s.restarts}, {"seconds", s.seconds}};
    return j;
}

namespace {

void check_finite(const json& j, const std::string& path, std::vector<std::string>& out) {
    if (j.is_number()) {
        if (!std::isfinite(j.get<double>())) out.push_back(path + " is not finite");
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) check_finite(j[i], path + "[" + std::to_string(i) + "]", out);
    } else if (j.is_object()) {
        for (const auto& [k, v] : j.items()) check_finite(v, path + "." + k, out);
    } else if (j.is_null()) {
        out.push_back(path + " is null");
    }
}

}  // namespace

std::vector<std::string> validate_report(const json& j) {
    std::vector<std::string> out;
    if (!j.is_object()) return {"report is not an object"};
    for (const char* k : {"error_bound", "worst_case_bound", "confidence"})
        if (!j.contains(k) || !j[k].is_number()) out.push_back(std::string(k) + " missing or not a number");
    for (const char* k : {"pbox", "atoms", "timings", "solver_stats"})
        if (!j.contains(k) || !j[k].is_object()) out.push_back(std::string(k) + " missing or not an object");
    if (!out.empty()) return out;
    const json& pb = j["pbox"];
    std::size_t n = 0;
    for (const char* k : {"grid", "cdf_lo", "cdf_hi"}) {
        if (!pb.contains(k) || !pb[k].is_array()) {
            out.push_back(std::string("pbox.") + k + " missing");
            continue;
        }
        if (n == 0) n = pb[k].size();
        else if (pb[k].size() != n) out.push_back("pbox arrays differ in length");
    }
    for (const char* k : {"zero", "underflow", "overflow"})
        if (!j["atoms"].contains(k)) out.push_back(std::string("atoms.") + k + " missing");
    for (const char* k : {"queries", "sat", "unsat", "unknown"})
        if (!j["solver_stats"].contains(k)) out.push_back(std::string("solver_stats.") + k + " missing");
    double c = j["confidence"].get<double>();
    if (!(c > 0 && c <= 1)) out.push_back("confidence outside (0, 1]");
    if (j["error_bound"].get<double>() > j["worst_case_bound"].get<double>())
        out.push_back("error_bound exceeds worst_case_bound");
    check_finite(j, "$", out);
    return out;
}

}  // namespace proberr
