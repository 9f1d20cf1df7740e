#ifndef PROBERR_CLI_HPP
#define PROBERR_CLI_HPP

#include "proberr/analysis.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace proberr {

enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitParse = 2, kExitAnalysis = 3, kExitSolver = 4 };

struct CorpusRow {
    std::string benchmark;
    bool ok = false;
    std::string error;
    double error_bound = 0;
    double worst_case = 0;
    double seconds = 0;
};

// Analyzes every *.prog file of dir (sorted by name) with up to jobs files in
// flight. A failing file yields a row with ok = false.
std::vector<CorpusRow> corpus_run(const std::string& dir, const AnalysisConfig& cfg, std::size_t jobs = 1);
std::string corpus_table(const std::vector<CorpusRow>& rows, bool markdown);

// args excludes the program name. Subcommands: analyze (default), corpus,
// optimize, import-fpcore.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace proberr

#endif
