#ifndef PROBERR_DS_HPP
#define PROBERR_DS_HPP

#include "proberr/interval.hpp"

#include <string>
#include <vector>

namespace proberr {

// Interval with a probability that is either known (pmin == pmax) or only
// bounded.
struct FocalElement {
    Interval iv;
    double pmin = 0.0;
    double pmax = 0.0;

    FocalElement() = default;
    FocalElement(Interval i, double p) : iv(i), pmin(p), pmax(p) {}
    FocalElement(Interval i, double lo, double hi) : iv(i), pmin(lo), pmax(hi) {}

    bool known() const { return pmin == pmax; }
    double p() const { return pmin; }
};

struct DSStructure {
    std::vector<FocalElement> elements;

    std::size_t size() const { return elements.size(); }
    bool empty() const { return elements.empty(); }
    bool all_known() const;
    double total_min() const;
    double total_max() const;
    Interval support() const;
    void sort();
};

// Lower and upper CDF bounds sampled at sorted abscissae. The support lies in
// [grid.front(), grid.back()]; between abscissae the true CDF is only known
// through monotonicity.
struct PBox {
    std::vector<double> grid;
    std::vector<double> cdf_lo;
    std::vector<double> cdf_hi;

    std::size_t size() const { return grid.size(); }
    bool valid(double tol = 1e-12) const;
    // bounds on F(x) for arbitrary x
    double upper_at(double x) const;
    double lower_at(double x) const;
    Interval support() const { return {grid.front(), grid.back()}; }
};

PBox ds_to_pbox(const DSStructure& ds);
DSStructure pbox_to_ds(const PBox& pb, std::size_t n);

// Independent combination of two structures (depops has the dependent
// counterpart).
DSStructure ind_combine(const DSStructure& x, const DSStructure& y, ArithOp op);
DSStructure negate(const DSStructure& x);

// Greedy pairwise merging of neighbours (by midpoint) minimizing
// hull width times merged mass, down to at most n elements.
DSStructure condense(const DSStructure& ds, std::size_t n);

// P[Z in [a,b]] bounds: [max(0, F_lo(b) - F_hi(a^-)), F_hi(b) - F_lo(a^-)]
Interval prob_between(const PBox& pb, double a, double b);

// true when pb_inner's envelope lies inside pb_outer's at every abscissa of both
bool envelope_contains(const PBox& outer, const PBox& inner, double tol = 1e-9);

std::string to_csv(const PBox& pb);

}  // namespace proberr

#endif
