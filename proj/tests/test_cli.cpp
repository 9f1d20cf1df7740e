#include "proberr/cli.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace proberr;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(const std::vector<std::string>& args) {
    std::ostringstream o, e;
    int c = run_cli(args, o, e);
    return {c, o.str(), e.str()};
}

fs::path scratch(const std::string& name) {
    fs::path d = fs::temp_directory_path() / "proberr_cli_test";
    fs::create_directories(d);
    return d / name;
}

std::string write(const std::string& name, const std::string& text) {
    fs::path p = scratch(name);
    std::ofstream(p) << text;
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kSmall = "x ~ uniform(1, 2)\ny ~ uniform(1, 2)\nz = x * y + 1\n";

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("analysis writes a valid report") {
        std::string f = write("small.prog", kSmall);
        Run r = cli({f, "--no-solver", "--intervals", "10"});
        REQUIRE(r.code == kExitOk);
        auto j = nlohmann::json::parse(r.out);
        CHECK(j["error_bound"].get<double>() > 0);
        CHECK(j["error_bound"].get<double>() <= j["worst_case_bound"].get<double>());

        Run same = cli({"analyze", f, "--no-solver", "--intervals", "10"});
        CHECK(same.code == kExitOk);
        CHECK(nlohmann::json::parse(same.out)["error_bound"] == j["error_bound"]);
    }

    TEST_CASE("confidence one equals the worst case") {
        std::string f = write("conf.prog", "x ~ normal(0, 1) in [-10, 10]\nz = x * x\n");
        Run r = cli({f, "--no-solver", "--intervals", "10", "--confidence", "1.0"});
        REQUIRE(r.code == kExitOk);
        auto j = nlohmann::json::parse(r.out);
        CHECK(j["error_bound"] == j["worst_case_bound"]);
    }

    TEST_CASE("exit codes") {
        std::string bad = write("bad.prog", "x ~ uniform(0, 1)\nz = x +\n");
        Run p = cli({bad, "--no-solver"});
        CHECK(p.code == kExitParse);
        auto e = nlohmann::json::parse(p.err);
        CHECK(e["error"] == "parse");
        CHECK(e["kind"] == "syntax");
        CHECK(e["line"] == 2);

        CHECK(cli({"--bogus-flag"}).code == kExitUsage);
        CHECK(cli({write("ok.prog", kSmall), "--confidence", "1.5"}).code == kExitUsage);
        CHECK(cli({scratch("missing.prog").string(), "--no-solver"}).code == kExitUsage);
        CHECK(cli({"--help"}).code == kExitOk);

        std::string div = write("div.prog", "x ~ uniform(-1, 1)\nz = 1 / x\n");
        CHECK(cli({div, "--no-solver"}).code == kExitAnalysis);

        std::string dep = write("dep.prog", "x ~ uniform(1, 2)\nz = x / (x + 1)\n");
        Run s = cli({dep, "--solver-cmd", "/nonexistent/solver", "--intervals", "5"});
        CHECK(s.code == kExitSolver);
    }

    TEST_CASE("seeded simulation exports are reproducible") {
        std::string f = write("mc.prog", kSmall);
        std::string a = scratch("mc_a.csv").string(), b = scratch("mc_b.csv").string();
        Run r1 = cli({f, "--no-solver", "--intervals", "10", "--mc", "100000", "--seed", "7", "--export-mc", a});
        Run r2 = cli({f, "--no-solver", "--intervals", "10", "--mc", "100000", "--seed", "7", "--export-mc", b,
                      "--workers", "2"});
        REQUIRE(r1.code == kExitOk);
        REQUIRE(r2.code == kExitOk);
        CHECK(slurp(a) == slurp(b));
        CHECK(slurp(a).rfind("q,value,abs_error\n", 0) == 0);
        auto j = nlohmann::json::parse(r1.out);
        CHECK(j["monte_carlo"]["samples"] == 100000);
        CHECK(j["monte_carlo"]["inside_pbox"] == true);
        CHECK(j["monte_carlo"]["fraction_above_error_bound"].get<double>() <= 0.01);
    }

    TEST_CASE("pbox export") {
        std::string f = write("pb.prog", kSmall);
        std::string out = scratch("pb.csv").string();
        REQUIRE(cli({f, "--no-solver", "--intervals", "10", "--export-pbox", out}).code == kExitOk);
        std::string csv = slurp(out);
        CHECK(csv.rfind("x,", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') > 5);
    }

    TEST_CASE("corpus runner") {
        fs::path empty = scratch("empty_corpus");
        fs::create_directories(empty);
        for (auto& e : fs::directory_iterator(empty)) fs::remove(e.path());
        Run r = cli({"corpus", empty.string(), "--no-solver"});
        CHECK(r.code == kExitOk);
        CHECK(r.out == "benchmark,error_bound,worst_case,runtime_s,status\n");

        fs::path dir = scratch("mixed_corpus");
        fs::create_directories(dir);
        std::ofstream(dir / "a_good.prog") << kSmall;
        std::ofstream(dir / "b_bad.prog") << "x ~ uniform(0, 1)\nz = sin(x)\n";
        Run m = cli({"corpus", dir.string(), "--no-solver", "--intervals", "10"});
        CHECK(m.code == kExitOk);
        CHECK(m.out.find("a_good,") != std::string::npos);
        CHECK(m.out.find("b_bad,") != std::string::npos);
        CHECK(m.out.find("failed:") != std::string::npos);
        Run md = cli({"corpus", dir.string(), "--no-solver", "--intervals", "10", "--markdown"});
        CHECK(md.out.rfind("|", 0) == 0);
    }

    TEST_CASE("optimize and import subcommands") {
        std::string prob = write("opt.txt", "var x 0 1\nmax x * (1 - x)\n");
        Run r = cli({"optimize", prob});
        REQUIRE(r.code == kExitOk);
        double v = std::stod(r.out);
        CHECK(v >= 0.25);
        CHECK(v <= 0.25 + 1e-9);

        std::string core = write("q.fpcore", "(FPCore (x) :pre (<= 1 x 2) (/ 1 x))");
        Run im = cli({"import-fpcore", core});
        REQUIRE(im.code == kExitOk);
        CHECK(im.out.find("x ~ uniform(1, 2)") != std::string::npos);
    }
}
