#ifndef PROBERR_SYMEXPR_HPP
#define PROBERR_SYMEXPR_HPP

#include "proberr/interval.hpp"

#include <map>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace proberr {

enum class SymOp { Const, Var, Add, Sub, Mul, Div, Neg, Abs, Sign };

using SymId = int;

struct SymNode {
    SymOp op = SymOp::Const;
    SymId a = -1;
    SymId b = -1;
    Interval c;   // Const: enclosure of the constant
    int var = -1;  // Var: index into the pool's variable table
};

// Hash-consed expression DAG. Children always have smaller ids than their
// parents, so ascending id order is a topological order.
class ExprPool {
public:
    SymId constant(Interval c);
    SymId constant(double v) { return constant(Interval{v, v}); }
    SymId var(const std::string& name);

    SymId add(SymId a, SymId b);
    SymId sub(SymId a, SymId b);
    SymId mul(SymId a, SymId b);
    SymId div(SymId a, SymId b);
    SymId neg(SymId a);
    SymId abs(SymId a);
    SymId sign(SymId a);
    SymId sum(const std::vector<SymId>& terms);

    const SymNode& node(SymId id) const { return nodes_[static_cast<std::size_t>(id)]; }
    std::size_t size() const { return nodes_.size(); }
    bool is_const(SymId id) const { return node(id).op == SymOp::Const; }
    bool is_zero(SymId id) const;

    int var_count() const { return static_cast<int>(var_names_.size()); }
    const std::string& var_name(int i) const { return var_names_[static_cast<std::size_t>(i)]; }
    // -1 when the name was never registered
    int var_index(const std::string& name) const;

    // d f / d v, memoized; Abs differentiates to Sign times the inner derivative
    SymId derivative(SymId f, int v);
    bool contains_op(SymId root, SymOp op) const;
    // sorted variable indices f depends on
    std::vector<int> vars_of(SymId f) const;

    // box is indexed by variable index and must cover every variable of root
    Interval eval(SymId root, const std::vector<Interval>& box) const;
    std::string to_string(SymId root) const;

private:
    SymId intern(const SymNode& n);

    std::vector<SymNode> nodes_;
    std::map<std::tuple<int, int, int, int, double, double>, SymId> index_;
    std::vector<std::string> var_names_;
    std::unordered_map<std::string, int> var_ids_;
    std::map<std::pair<SymId, int>, SymId> deriv_cache_;
};

// A set of roots compiled to a straight-line program over their shared DAG,
// for repeated evaluation on many boxes.
class CompiledExprs {
public:
    CompiledExprs(const ExprPool& pool, const std::vector<SymId>& roots);
    // values of the roots, in the order given at construction
    std::vector<Interval> eval(const std::vector<Interval>& box) const;
    // fills scratch with every intermediate value; throws DivisionByZero
    void eval_into(const std::vector<Interval>& box, std::vector<Interval>& scratch) const;
    Interval root_value(const std::vector<Interval>& scratch, std::size_t k) const { return scratch[root_slots_[k]]; }
    std::size_t scratch_size() const { return code_.size(); }

private:
    struct Instr {
        SymOp op;
        int a;
        int b;
        Interval c;
        int var;
    };
    std::vector<Instr> code_;
    std::vector<std::size_t> root_slots_;
};

}  // namespace proberr

#endif
