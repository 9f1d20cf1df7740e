#ifndef PROBERR_LP_HPP
#define PROBERR_LP_HPP

#include "proberr/interval.hpp"

#include <stdexcept>
#include <vector>

namespace proberr {

// The marginals admit no joint distribution once infeasible cells are zeroed.
class InfeasibleLP : public std::runtime_error {
public:
    explicit InfeasibleLP(const std::string& w) : std::runtime_error(w) {}
};

// Joint masses p[i][j] >= 0 with row sums rows[i], column sums cols[j] and
// p[i][j] = 0 where !feasible[i][j]. Cell (i, j) pairs the i-th element of
// the row operand with the j-th of the column operand.
struct TransportProblem {
    std::vector<double> rows;
    std::vector<double> cols;
    std::vector<std::vector<bool>> feasible;

    // max of the joint mass on the cells with target[i][j] set
    double max_mass(const std::vector<std::vector<bool>>& target) const;
};

// [min, max] of the target mass, each widened outward by 1e-9
Interval lp_bounds(const TransportProblem& tp, const std::vector<std::vector<bool>>& target);
std::vector<Interval> lp_bounds(const TransportProblem& tp, const std::vector<std::vector<std::vector<bool>>>& targets);

constexpr double kLpWiden = 1e-9;

}  // namespace proberr

#endif
