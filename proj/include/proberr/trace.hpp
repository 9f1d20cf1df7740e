#ifndef PROBERR_TRACE_HPP
#define PROBERR_TRACE_HPP

#include "proberr/interval.hpp"
#include "proberr/smt.hpp"

#include <map>
#include <set>
#include <string>

namespace proberr {

// One symbolic fact about the computation. Variable names: x_<input> for
// inputs, s<id> for the exact result of node id, n<id> for its rounded value,
// e<id> for its rounding variable.
struct TraceFact {
    enum class Kind { Range, Op, Neg, Const, Round };
    Kind kind = Kind::Range;
    std::string z;
    std::string a;
    std::string b;
    ArithOp op = ArithOp::Add;
    Interval range;
    double value = 0;
    // rounding: z = a (1 - u e), e in [-1, 1], or z in {0, +-min_normal}
    // when a may lie in the flush-to-zero band
    std::string e;
    double u = 0;
    double min_normal = 0;
    bool underflow = false;

    static TraceFact in_range(std::string z, Interval r);
    static TraceFact operation(std::string z, std::string a, ArithOp op, std::string b);
    static TraceFact negation(std::string z, std::string a);
    static TraceFact constant(std::string z, double v);
    static TraceFact rounding(std::string z, std::string a, std::string e, double u, double min_normal, bool underflow);

    std::string key() const;
    void encode(Constraint& c) const;
};

class Trace {
public:
    void add(const TraceFact& f);
    void add_input(const std::string& var, Interval r);
    void merge(const Trace& o);

    const std::map<std::string, TraceFact>& facts() const { return facts_; }
    const std::set<std::string>& inputs() const { return inputs_; }
    bool shares_inputs(const Trace& o) const;
    std::size_t size() const { return facts_.size(); }

    Constraint to_constraint() const;

    // Interval constraint propagation over the facts; false when some
    // variable's domain becomes empty (a proof of infeasibility).
    bool contract(std::map<std::string, Interval>& box, int passes = 6) const;

private:
    std::map<std::string, TraceFact> facts_;
    std::set<std::string> inputs_;
};

}  // namespace proberr

#endif
