#include "proberr/cli.hpp"

#include "proberr/montecarlo.hpp"
#include "proberr/parser.hpp"
#include "proberr/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace proberr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    if (path == "-") {
        std::ostringstream os;
        os << std::cin.rdbuf();
        return os.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream o(path, std::ios::binary);
    if (!o) throw std::ios_base::failure("cannot write " + path);
    o << text;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Options {
    std::string precision = "single";
    std::size_t intervals = 50;
    double confidence = 0.99;
    std::string solver_cmd = "z3 -in";
    double solver_timeout = 60;
    bool no_solver = false;
    std::string optimizer_cmd;
    bool exact_constants = false;
    bool dependent_rounding = false;
    std::size_t workers = 1;
    double prune_budget = 60.0;
    std::string discretization = "equal-width";
    std::string solver_log;
};

void add_analysis_flags(CLI::App* app, Options& o) {
    app->add_option("--precision", o.precision, "half, single, double, toy or custom:p,emin,emax")
        ->capture_default_str();
    app->add_option("--intervals", o.intervals, "focal elements per distribution")
        ->check(CLI::Range(std::size_t{1}, std::size_t{100000}))
        ->capture_default_str();
    app->add_option("--confidence", o.confidence, "confidence level in (0, 1]")
        ->check(CLI::Range(1e-12, 1.0))
        ->capture_default_str();
    app->add_option("--solver-cmd", o.solver_cmd, "SMT-LIB 2 solver reading queries on stdin")->capture_default_str();
    app->add_option("--solver-timeout", o.solver_timeout, "seconds per solver query")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--prune-budget", o.prune_budget, "solver seconds per dependent operation for interval pruning")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_flag("--no-solver", o.no_solver, "refute dependent cells by interval propagation only");
    app->add_option("--optimizer-cmd", o.optimizer_cmd, "external optimizer for the worst-case bound");
    app->add_flag("--exact-constants", o.exact_constants, "no rounding term for representable constants");
    app->add_flag("--dependent-rounding", o.dependent_rounding,
                  "combine each rounding with its operand under unknown dependency");
    app->add_option("--workers", o.workers, "solver sessions and simulation threads")
        ->check(CLI::Range(std::size_t{1}, std::size_t{256}))
        ->capture_default_str();
    app->add_option("--discretization", o.discretization, "equal-width or equal-mass")
        ->check(CLI::IsMember({"equal-width", "equal-mass"}))
        ->capture_default_str();
    app->add_option("--solver-log", o.solver_log, "write every solver query and reply here");
}

AnalysisConfig make_config(const Options& o) {
    AnalysisConfig c;
    c.fmt = FloatFormat::from_name(o.precision);
    c.n_intervals = o.intervals;
    c.confidence = o.confidence;
    c.solver.cmd = o.solver_cmd;
    c.solver.timeout_s = o.solver_timeout;
    c.prune_budget_s = o.prune_budget;
    c.solver.workers = o.workers;
    if (!o.solver_log.empty()) c.solver.log = std::make_shared<QueryLog>();
    c.use_solver = !o.no_solver;
    c.exact_constants = o.exact_constants;
    c.dependent_rounding = o.dependent_rounding;
    c.discretization = o.discretization == "equal-mass" ? Discretization::EqualMass : Discretization::EqualWidth;
    c.gopt.optimizer_cmd = o.optimizer_cmd;
    return c;
}

// Quantile table of the sorted samples: q,value,abs_error.
std::string mc_csv(const MonteCarloResult& mc, std::size_t points = 1000) {
    std::vector<double> v = mc.values, e = mc.abs_errors;
    std::sort(v.begin(), v.end());
    std::sort(e.begin(), e.end());
    std::ostringstream os;
    os.precision(17);
    os << "q,value,abs_error\n";
    const std::size_t n = v.size();
    for (std::size_t k = 1; k <= points && n > 0; ++k) {
        std::size_t i = std::min(n - 1, (k * n + points - 1) / points - 1);
        os << static_cast<double>(k) / static_cast<double>(points) << ',' << v[i] << ',' << e[i] << '\n';
    }
    return os.str();
}

void emit_error(std::ostream& err, const std::string& category, const std::string& message, json extra = {}) {
    json j = {{"error", category}, {"message", message}};
    if (extra.is_object())
        for (auto& [k, v] : extra.items()) j[k] = v;
    err << j.dump() << '\n';
}

}  // namespace

std::vector<CorpusRow> corpus_run(const std::string& dir, const AnalysisConfig& cfg, std::size_t jobs) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".prog") files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::vector<CorpusRow> rows(files.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < files.size(); k = next++) {
            CorpusRow& r = rows[k];
            r.benchmark = files[k].stem().string();
            auto t0 = std::chrono::steady_clock::now();
            try {
                AnalysisReport rep = analyze(parse_program(read_file(files[k].string())), cfg);
                r.ok = true;
                r.error_bound = rep.error_bound;
                r.worst_case = rep.worst_case_bound;
            } catch (const std::exception& e) {
                r.ok = false;
                r.error = e.what();
            }
            r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    };
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < std::max<std::size_t>(1, std::min(jobs, files.size())); ++t)
        threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    return rows;
}

std::string corpus_table(const std::vector<CorpusRow>& rows, bool markdown) {
    std::ostringstream os;
    auto cell = [](const CorpusRow& r, double v) { return r.ok ? fmt_double(v) : std::string("-"); };
    if (markdown) {
        os << "| benchmark | error bound | worst case | runtime (s) | status |\n";
        os << "|---|---|---|---|---|\n";
        for (const auto& r : rows)
            os << "| " << r.benchmark << " | " << cell(r, r.error_bound) << " | " << cell(r, r.worst_case) << " | "
               << fmt_double(r.seconds) << " | " << (r.ok ? "ok" : "failed: " + r.error) << " |\n";
    } else {
        os << "benchmark,error_bound,worst_case,runtime_s,status\n";
        for (const auto& r : rows) {
            std::string status = r.ok ? "ok" : "failed: " + r.error;
            std::replace(status.begin(), status.end(), ',', ';');
            std::replace(status.begin(), status.end(), '\n', ' ');
            os << r.benchmark << ',' << (r.ok ? fmt_double(r.error_bound) : "") << ','
               << (r.ok ? fmt_double(r.worst_case) : "") << ',' << fmt_double(r.seconds) << ',' << status << '\n';
        }
    }
    return os.str();
}

int run_cli(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
    static const std::vector<std::string> subcommands{"analyze", "corpus", "optimize", "import-fpcore"};
    std::vector<std::string> args = args_in;
    if (!args.empty() && args[0] != "-h" && args[0] != "--help" &&
        std::find(subcommands.begin(), subcommands.end(), args[0]) == subcommands.end())
        args.insert(args.begin(), "analyze");

    CLI::App app{"Probabilistic floating-point roundoff error analyzer", "proberr"};
    app.require_subcommand(1);

    Options opts;
    std::string input, out_path, export_pbox, export_density, export_mc;
    std::size_t mc_samples = 0;
    std::uint64_t seed = 1;
    auto* an = app.add_subcommand("analyze", "analyze one program file (the default)");
    an->add_option("file", input, "program file, - for stdin")->required();
    add_analysis_flags(an, opts);
    an->add_option("--mc", mc_samples, "validate with this many simulated runs");
    an->add_option("--seed", seed, "simulation seed")->capture_default_str();
    an->add_option("--out", out_path, "write the JSON report here instead of stdout");
    an->add_option("--export-pbox", export_pbox, "CSV x,cdf_lo,cdf_hi of the output");
    an->add_option("--export-density", export_density, "CSV t,density,cdf_lo,cdf_hi of the output rounding error");
    an->add_option("--export-mc", export_mc, "CSV q,value,abs_error of the simulated runs");

    std::string corpus_dir;
    bool markdown = false;
    std::size_t jobs = 1;
    auto* co = app.add_subcommand("corpus", "analyze every *.prog file of a directory");
    co->add_option("dir", corpus_dir, "benchmark directory")->required();
    add_analysis_flags(co, opts);
    co->add_flag("--markdown", markdown, "markdown table instead of CSV");
    co->add_option("--jobs", jobs, "files analyzed concurrently")->capture_default_str();
    co->add_option("--out", out_path, "write the table here instead of stdout");

    std::string opt_file;
    GoptConfig gcfg;
    auto* op = app.add_subcommand("optimize", "bound the maximum of an expression over a box");
    op->add_option("file", opt_file, "problem file, - for stdin")->required();
    op->add_option("--tol", gcfg.tol_rel, "relative gap at which to stop")->capture_default_str();
    op->add_option("--budget", gcfg.budget, "box budget")->capture_default_str();

    std::string fp_file, fp_dist = "uniform";
    auto* im = app.add_subcommand("import-fpcore", "convert a straight-line FPCore to the program format");
    im->add_option("file", fp_file, "FPCore file, - for stdin")->required();
    im->add_option("--dist", fp_dist, "input distribution")
        ->check(CLI::IsMember({"uniform", "normal", "exp"}))
        ->capture_default_str();

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (an->parsed()) {
            AnalysisConfig cfg = make_config(opts);
            Program prog = parse_program(read_file(input));
            AnalysisReport rep = analyze(prog, cfg);
            json j = report_json(rep);
            if (mc_samples > 0) {
                MonteCarloConfig mcfg;
                mcfg.samples = mc_samples;
                mcfg.seed = seed;
                mcfg.workers = opts.workers;
                MonteCarloResult mc = monte_carlo(prog, cfg.fmt, mcfg);
                DkwCheck dk = dkw_check(rep.output_pbox, mc.values);
                double max_err = *std::max_element(mc.abs_errors.begin(), mc.abs_errors.end());
                std::size_t over = static_cast<std::size_t>(std::count_if(
                    mc.abs_errors.begin(), mc.abs_errors.end(), [&](double e) { return e > rep.error_bound; }));
                j["monte_carlo"] = {{"samples", mc_samples},
                                    {"seed", seed},
                                    {"max_abs_error", max_err},
                                    {"fraction_above_error_bound",
                                     static_cast<double>(over) / static_cast<double>(mc_samples)},
                                    {"dkw_epsilon", dk.epsilon},
                                    {"inside_pbox", dk.inside}};
                if (!export_mc.empty()) write_file(export_mc, mc_csv(mc));
            }
            if (!export_pbox.empty()) write_file(export_pbox, to_csv(rep.output_pbox));
            if (!export_density.empty()) {
                const auto& root = rep.nodes[static_cast<std::size_t>(rep.root)];
                write_file(export_density,
                           root.error_dist ? density_csv(*root.error_dist) : std::string("t,density,cdf_lo,cdf_hi\n"));
            }
            if (cfg.solver.log) cfg.solver.log->dump(opts.solver_log);
            if (out_path.empty())
                out << j.dump(2) << '\n';
            else
                write_file(out_path, j.dump(2) + "\n");
        } else if (co->parsed()) {
            auto rows = corpus_run(corpus_dir, make_config(opts), jobs);
            std::string table = corpus_table(rows, markdown);
            if (out_path.empty())
                out << table;
            else
                write_file(out_path, table);
        } else if (op->parsed()) {
            ExprPool pool;
            OptimizerProblem p = parse_optimizer_problem(pool, read_file(opt_file));
            GoptResult r = maximize(pool, p.f, p.box, {}, gcfg);
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", r.upper);
            out << buf << '\n';
        } else if (im->parsed()) {
            out << import_fpcore(read_file(fp_file), fp_dist).print();
        }
    } catch (const ParseError& e) {
        emit_error(err, "parse", e.message(),
                   {{"kind", e.category_name()}, {"line", e.pos().line}, {"column", e.pos().col}});
        return kExitParse;
    } catch (const SolverError& e) {
        emit_error(err, "solver", e.what());
        return kExitSolver;
    } catch (const std::ios_base::failure& e) {
        emit_error(err, "usage", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        emit_error(err, "analysis", e.what());
        return kExitAnalysis;
    }
    return kExitOk;
}

}  // namespace proberr
