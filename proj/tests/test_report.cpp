#include "proberr/parser.hpp"
#include "proberr/report.hpp"

#include <doctest.h>

#include <cmath>

using namespace proberr;

TEST_SUITE("report") {
    TEST_CASE("document layout") {
        AnalysisConfig cfg;
        cfg.n_intervals = 10;
        cfg.use_solver = false;
        AnalysisReport r = analyze(parse_program("x ~ uniform(1, 2)\nz = x * x\n"), cfg);
        nlohmann::json j = report_json(r);
        for (const char* k : {"error_bound", "worst_case_bound", "confidence", "format", "pbox", "atoms", "timings",
                              "solver_stats"})
            CHECK(j.contains(k));
        CHECK(j["format"]["name"] == "single");
        CHECK(j["format"]["p"] == 23);
        CHECK(j["pbox"]["grid"].size() == j["pbox"]["cdf_lo"].size());
        CHECK(j["error_bound"].get<double>() == r.error_bound);
        CHECK(validate_report(j).empty());

        // round trip through text
        auto back = nlohmann::json::parse(j.dump());
        CHECK(validate_report(back).empty());
    }

    TEST_CASE("validation finds defects") {
        AnalysisConfig cfg;
        cfg.n_intervals = 10;
        cfg.use_solver = false;
        nlohmann::json j = report_json(analyze(parse_program("x ~ uniform(1, 2)\nz = x + 1\n"), cfg));
        auto bad = j;
        bad["error_bound"] = std::nan("");
        CHECK_FALSE(validate_report(bad).empty());
        bad = j;
        bad.erase("pbox");
        CHECK_FALSE(validate_report(bad).empty());
        bad = j;
        bad["confidence"] = 1.5;
        CHECK_FALSE(validate_report(bad).empty());
        bad = j;
        bad["pbox"]["cdf_hi"].erase(0);
        CHECK_FALSE(validate_report(bad).empty());
        bad = nlohmann::json::parse(j.dump());
        bad["error_bound"] = nullptr;
        CHECK_FALSE(validate_report(bad).empty());
    }
}
