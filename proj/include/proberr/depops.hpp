#ifndef PROBERR_DEPOPS_HPP
#define PROBERR_DEPOPS_HPP

#include "proberr/ds.hpp"
#include "proberr/lp.hpp"
#include "proberr/smt.hpp"
#include "proberr/trace.hpp"

#include <string>
#include <vector>

namespace proberr {

struct DepCell {
    std::size_t i = 0;
    std::size_t j = 0;
    Interval iv;
    bool feasible = true;
};

struct DepOpConfig {
    std::size_t n_out = 50;
    // thresholds at which the envelope is evaluated by LP
    std::size_t budget = 50;
    // pruning stops when an endpoint moves by less than this fraction of the cell width
    double tol_rel = 0x1p-20;
    bool use_contractor = true;
    // solver seconds one operation may spend pruning; later cells keep their
    // contracted interval
    double prune_seconds = 60.0;
    // sampled input points per cell that may certify it feasible without a query
    std::size_t witness_tries = 16;
};

struct DepOpStats {
    std::size_t cells = 0;
    std::size_t contractor_infeasible = 0;
    std::size_t solver_infeasible = 0;
    std::size_t witnessed = 0;
    std::size_t pruned = 0;
    std::size_t lp_solves = 0;
};

struct DepOpResult {
    DSStructure ds;
    PBox pbox;
    Trace trace;
    std::vector<DepCell> cells;
    DepOpStats stats;
};

// Z = X op Y for operands of unknown dependency. pool == nullptr skips the
// solver: cells are then only refuted by interval propagation over the traces.
DepOpResult dep_op(const DSStructure& dx, const DSStructure& dy, ArithOp op, const Trace& tx, const Trace& ty,
                   const std::string& vx, const std::string& vy, const std::string& vz, SolverPool* pool,
                   const DepOpConfig& cfg);

// Thresholds: budget quantiles of the endpoint multiset of the feasible
// cells, or every distinct endpoint when the budget allows.
std::vector<double> select_evaluation_points(const std::vector<DepCell>& cells, std::size_t budget);

// Envelope of Z from the cells and the operand marginals.
PBox envelope_from_cells(const std::vector<DepCell>& cells, const std::vector<double>& px, const std::vector<double>& py,
                         const std::vector<double>& thresholds, std::size_t* lp_solves = nullptr);

}  // namespace proberr

#endif
