#include "proberr/symexpr.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>

namespace proberr {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool is_point(const Interval& c, double v) { return c.lo == v && c.hi == v; }

}  // namespace

SymId ExprPool::intern(const SymNode& n) {
    auto key = std::make_tuple(static_cast<int>(n.op), n.a, n.b, n.var, n.c.lo, n.c.hi);
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    nodes_.push_back(n);
    SymId id = static_cast<SymId>(nodes_.size()) - 1;
    index_.emplace(key, id);
    return id;
}

SymId ExprPool::constant(Interval c) {
    SymNode n;
    n.op = SymOp::Const;
    n.c = c;
    if (c.lo == 0.0) n.c.lo = 0.0;  // fold -0
    if (c.hi == 0.0) n.c.hi = 0.0;
    return intern(n);
}

SymId ExprPool::var(const std::string& name) {
    auto it = var_ids_.find(name);
    int idx;
    if (it == var_ids_.end()) {
        idx = static_cast<int>(var_names_.size());
        var_names_.push_back(name);
        var_ids_.emplace(name, idx);
    } else {
        idx = it->second;
    }
    SymNode n;
    n.op = SymOp::Var;
    n.var = idx;
    return intern(n);
}

int ExprPool::var_index(const std::string& name) const {
    auto it = var_ids_.find(name);
    return it == var_ids_.end() ? -1 : it->second;
}

bool ExprPool::is_zero(SymId id) const { return is_const(id) && is_point(node(id).c, 0.0); }

SymId ExprPool::add(SymId a, SymId b) {
    if (is_const(a) && is_const(b)) return constant(node(a).c + node(b).c);
    if (is_zero(a)) return b;
    if (is_zero(b)) return a;
    if (a > b) std::swap(a, b);
    return intern({SymOp::Add, a, b, {}, -1});
}

SymId ExprPool::sub(SymId a, SymId b) {
    if (is_const(a) && is_const(b)) return constant(node(a).c - node(b).c);
    if (is_zero(b)) return a;
    if (is_zero(a)) return neg(b);
    return intern({SymOp::Sub, a, b, {}, -1});
}

SymId ExprPool::mul(SymId a, SymId b) {
    if (is_const(a) && is_const(b)) return constant(node(a).c * node(b).c);
    if (is_zero(a) || is_zero(b)) return constant(0.0);
    if (is_const(a) && is_point(node(a).c, 1.0)) return b;
    if (is_const(b) && is_point(node(b).c, 1.0)) return a;
    if (a > b) std::swap(a, b);
    return intern({SymOp::Mul, a, b, {}, -1});
}

SymId ExprPool::div(SymId a, SymId b) {
    if (is_const(a) && is_const(b)) return constant(node(a).c / node(b).c);
    if (is_const(b) && is_point(node(b).c, 1.0)) return a;
    return intern({SymOp::Div, a, b, {}, -1});
}

SymId ExprPool::neg(SymId a) {
    if (is_const(a)) return constant(-node(a).c);
    if (node(a).op == SymOp::Neg) return node(a).a;
    return intern({SymOp::Neg, a, -1, {}, -1});
}

SymId ExprPool::abs(SymId a) {
    if (is_const(a)) return constant(iabs(node(a).c));
    if (node(a).op == SymOp::Abs) return a;
    return intern({SymOp::Abs, a, -1, {}, -1});
}

SymId ExprPool::sign(SymId a) {
    if (is_const(a)) return constant(isign(node(a).c));
    return intern({SymOp::Sign, a, -1, {}, -1});
}

SymId ExprPool::sum(const std::vector<SymId>& terms) {
    SymId acc = constant(0.0);
    for (SymId t : terms) acc = add(acc, t);
    return acc;
}

SymId ExprPool::derivative(SymId f, int v) {
    auto key = std::make_pair(f, v);
    auto it = deriv_cache_.find(key);
    if (it != deriv_cache_.end()) return it->second;
    const SymNode n = node(f);
    SymId d;
    switch (n.op) {
        case SymOp::Const: d = constant(0.0); break;
        case SymOp::Var: d = constant(n.var == v ? 1.0 : 0.0); break;
        case SymOp::Add: d = add(derivative(n.a, v), derivative(n.b, v)); break;
        case SymOp::Sub: d = sub(derivative(n.a, v), derivative(n.b, v)); break;
        case SymOp::Mul: d = add(mul(derivative(n.a, v), n.b), mul(n.a, derivative(n.b, v))); break;
        case SymOp::Div: {
            SymId da = derivative(n.a, v), db = derivative(n.b, v);
            d = is_zero(db) ? div(da, n.b) : div(sub(da, mul(f, db)), n.b);
            break;
        }
        case SymOp::Neg: d = neg(derivative(n.a, v)); break;
        case SymOp::Abs: d = mul(sign(n.a), derivative(n.a, v)); break;
        case SymOp::Sign: d = constant(0.0); break;
        default: d = constant(0.0);
    }
    deriv_cache_.emplace(key, d);
    return d;
}

namespace {

template <class F>
void visit_reachable(const ExprPool& pool, const std::vector<SymId>& roots, F&& f) {
    std::vector<char> seen(pool.size(), 0);
    std::vector<SymId> stack(roots.begin(), roots.end());
    std::vector<SymId> order;
    while (!stack.empty()) {
        SymId id = stack.back();
        stack.pop_back();
        if (id < 0 || seen[static_cast<std::size_t>(id)]) continue;
        seen[static_cast<std::size_t>(id)] = 1;
        order.push_back(id);
        const SymNode& n = pool.node(id);
        if (n.a >= 0) stack.push_back(n.a);
        if (n.b >= 0) stack.push_back(n.b);
    }
    std::sort(order.begin(), order.end());
    for (SymId id : order) f(id);
}

Interval eval_node(const SymNode& n, const Interval& a, const Interval& b, const std::vector<Interval>& box) {
    switch (n.op) {
        case SymOp::Const: return n.c;
        case SymOp::Var: return box.at(static_cast<std::size_t>(n.var));
        case SymOp::Add: return a + b;
        case SymOp::Sub: return a - b;
        case SymOp::Mul: return a * b;
        case SymOp::Div: return a / b;
        case SymOp::Neg: return -a;
        case SymOp::Abs: return iabs(a);
        case SymOp::Sign: return isign(a);
    }
    return Interval::entire();
}

}  // namespace

bool ExprPool::contains_op(SymId root, SymOp op) const {
    bool found = false;
    visit_reachable(*this, {root}, [&](SymId id) { found = found || node(id).op == op; });
    return found;
}

std::vector<int> ExprPool::vars_of(SymId f) const {
    std::vector<int> vs;
    visit_reachable(*this, {f}, [&](SymId id) {
        if (node(id).op == SymOp::Var) vs.push_back(node(id).var);
    });
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    return vs;
}

Interval ExprPool::eval(SymId root, const std::vector<Interval>& box) const {
    CompiledExprs prog(*this, {root});
    return prog.eval(box)[0];
}

std::string ExprPool::to_string(SymId root) const {
    std::map<SymId, std::string> memo;
    std::function<std::string(SymId)> go = [&](SymId id) -> std::string {
        auto it = memo.find(id);
        if (it != memo.end()) return it->second;
        const SymNode& n = node(id);
        std::string s;
        switch (n.op) {
            case SymOp::Const:
                s = n.c.lo == n.c.hi ? fmt_double(n.c.lo)
                                     : "interval(" + fmt_double(n.c.lo) + ", " + fmt_double(n.c.hi) + ")";
                if (n.c.lo == n.c.hi && n.c.lo < 0) s = "(" + s + ")";
                break;
            case SymOp::Var: s = var_name(n.var); break;
            case SymOp::Add: s = "(" + go(n.a) + " + " + go(n.b) + ")"; break;
            case SymOp::Sub: s = "(" + go(n.a) + " - " + go(n.b) + ")"; break;
            case SymOp::Mul: s = "(" + go(n.a) + " * " + go(n.b) + ")"; break;
            case SymOp::Div: s = "(" + go(n.a) + " / " + go(n.b) + ")"; break;
            case SymOp::Neg: s = "(-" + go(n.a) + ")"; break;
            case SymOp::Abs: s = "abs(" + go(n.a) + ")"; break;
            case SymOp::Sign: s = "sign(" + go(n.a) + ")"; break;
        }
        memo.emplace(id, s);
        return s;
    };
    return go(root);
}

CompiledExprs::CompiledExprs(const ExprPool& pool, const std::vector<SymId>& roots) {
    std::unordered_map<SymId, int> slot;
    visit_reachable(pool, roots, [&](SymId id) {
        const SymNode& n = pool.node(id);
        Instr in{n.op, n.a >= 0 ? slot.at(n.a) : -1, n.b >= 0 ? slot.at(n.b) : -1, n.c, n.var};
        slot.emplace(id, static_cast<int>(code_.size()));
        code_.push_back(in);
    });
    for (SymId r : roots) root_slots_.push_back(static_cast<std::size_t>(slot.at(r)));
}

void CompiledExprs::eval_into(const std::vector<Interval>& box, std::vector<Interval>& scratch) const {
    scratch.resize(code_.size());
    for (std::size_t i = 0; i < code_.size(); ++i) {
        const Instr& in = code_[i];
        SymNode n{in.op, -1, -1, in.c, in.var};
        Interval a = in.a >= 0 ? scratch[static_cast<std::size_t>(in.a)] : Interval{};
        Interval b = in.b >= 0 ? scratch[static_cast<std::size_t>(in.b)] : Interval{};
        scratch[i] = eval_node(n, a, b, box);
    }
}

std::vector<Interval> CompiledExprs::eval(const std::vector<Interval>& box) const {
    std::vector<Interval> scratch;
    eval_into(box, scratch);
    std::vector<Interval> out;
    out.reserve(root_slots_.size());
    for (std::size_t s : root_slots_) out.push_back(scratch[s]);
    return out;
}

}  // namespace proberr
