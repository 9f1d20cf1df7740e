#ifndef PROBERR_ANALYSIS_HPP
#define PROBERR_ANALYSIS_HPP

#include "proberr/ast.hpp"
#include "proberr/depops.hpp"
#include "proberr/errdist.hpp"
#include "proberr/gopt.hpp"
#include "proberr/saform.hpp"
#include "proberr/smt.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace proberr {

struct AnalysisConfig {
    FloatFormat fmt = FloatFormat::single();
    std::size_t n_intervals = 50;
    double confidence = 0.99;
    SolverConfig solver;
    // without a solver, dependent cells are refuted by interval propagation only
    bool use_solver = true;
    bool exact_constants = false;
    // rounding as an unknown-dependency product instead of an independent one
    bool dependent_rounding = false;
    Discretization discretization = Discretization::EqualWidth;
    GoptConfig gopt;
    // LP thresholds per dependent operation; 0 means n_intervals
    std::size_t eval_budget = 0;
    double prune_tol_rel = 0x1p-20;
    // solver seconds per dependent operation spent shrinking cell intervals
    double prune_budget_s = 60.0;
};

struct NodeResult {
    int id = -1;
    std::string label;
    ExprKind kind = ExprKind::Const;
    // trace variable of the finite-precision value, and of the exact result
    std::string value_var;
    std::string exact_var;
    DSStructure ds_exact;
    DSStructure ds;
    PBox pbox;
    Trace trace;
    RangeErrorPair pair;
    std::optional<ErrorDistribution> error_dist;
    bool dependent = false;
    DepOpStats dep_stats;
    double seconds = 0.0;
};

// Inputs of the conditional-error maximization.
struct CondErrProblem {
    std::shared_ptr<ExprPool> pool;
    SymId objective = -1;
    struct Leaf {
        int var = -1;
        DSStructure ds;
    };
    struct Inner {
        SymId range = -1;
        DSStructure ds;
        // |fp - exact| bound of this node over the full input box
        double err_bound = 0.0;
    };
    std::vector<Leaf> leaves;
    std::vector<Inner> inner;
    GoptConfig gopt;

    Box full_box() const;
};

// Elements sorted by mass (ties: smaller |midpoint| first) and taken until
// their mass reaches the confidence; returns the merged union of their
// intervals and whether every element with positive mass was taken.
std::pair<std::vector<Interval>, bool> collected_ranges(const DSStructure& ds, double confidence);

// Upper bound on the error given every node lands in its collected ranges.
GoptResult cond_err(const CondErrProblem& prob, double confidence);

struct AnalysisReport {
    PBox output_pbox;
    DSStructure output_ds;
    double error_bound = 0.0;
    double worst_case_bound = 0.0;
    double confidence = 0.99;
    GoptResult cond_result;
    GoptResult worst_result;
    // largest discrete error components over all rounded nodes
    double atom_zero = 0.0;
    double atom_underflow = 0.0;
    double atom_overflow = 0.0;
    std::map<std::string, double> timings;
    SolverStats solver_stats;
    std::vector<NodeResult> nodes;
    int root = -1;
    std::string error_form;
    CondErrProblem problem;
    FloatFormat fmt;
};

// Distribution of E = err_rel/u for values distributed per ds: a
// piecewise-constant mixture for the interval elements and exact points for
// the degenerate ones. ds_out receives the n-slice E structure.
ErrorDistribution error_model_for_ds(const DSStructure& ds, const FloatFormat& fmt, std::size_t n, DSStructure& ds_out);

// 1 - u E per element, outward rounded.
DSStructure rounding_factor_ds(const DSStructure& e_ds, const FloatFormat& fmt);

// Rounded values from exact ones: elements of normal magnitude are multiplied
// by the continuous factor (independently, or elementwise by [1-u, 1+u] when
// dependent); elements that meet the flush-to-zero band keep their mass on
// their hull with [-min_normal, min_normal].
DSStructure apply_rounding(const DSStructure& exact, const DSStructure& e_ds, const FloatFormat& fmt, std::size_t n,
                           bool dependent);

AnalysisReport analyze(const Program& prog, const AnalysisConfig& cfg);

}  // namespace proberr

#endif
