#ifndef PROBERR_GOPT_HPP
#define PROBERR_GOPT_HPP

#include "proberr/symexpr.hpp"

#include <string>
#include <vector>

namespace proberr {

using Box = std::vector<Interval>;

struct GoptConfig {
    double tol_rel = 1e-10;
    double tol_abs = 0.0;
    std::size_t budget = 100000;
    bool mean_value = true;
    // external optimizer; empty selects the built-in branch and bound
    std::string optimizer_cmd;
};

// expr must evaluate into the union of the allowed intervals
struct BoxConstraint {
    SymId expr = -1;
    std::vector<Interval> allowed;
};

struct GoptResult {
    double upper = 0.0;
    // best value seen at a point that provably satisfies the constraints
    double lower = -HUGE_VAL;
    std::size_t boxes = 0;
    bool converged = false;
    // every box was refuted by the constraints
    bool infeasible = false;
};

// Sound upper bound on max f over the box subject to the constraints.
GoptResult maximize(ExprPool& pool, SymId f, const Box& box, const std::vector<BoxConstraint>& cons = {},
                    const GoptConfig& cfg = {});
// Maximum over a union of boxes.
GoptResult maximize_boxes(ExprPool& pool, SymId f, const std::vector<Box>& boxes,
                          const std::vector<BoxConstraint>& cons = {}, const GoptConfig& cfg = {});

// Problem text read by an external optimizer and by `proberr optimize`:
//   var <name> <lo> <hi>
//   max <expression>
std::string optimizer_problem(const ExprPool& pool, SymId f, const Box& box);
// Runs cmd with the problem on stdin; its stdout must end with a number.
double run_external_optimizer(const std::string& cmd, const std::string& problem);

struct OptimizerProblem {
    SymId f = -1;
    Box box;
};
// Reads the format above; expressions use + - * /, abs(), sign(),
// interval(lo, hi), numbers and the declared names.
OptimizerProblem parse_optimizer_problem(ExprPool& pool, const std::string& text);

}  // namespace proberr

#endif
