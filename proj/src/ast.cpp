#include "proberr/ast.hpp"

#include <cstdio>
#include <functional>
#include <map>
#include <stdexcept>

namespace proberr {

ExprPtr Expr::constant(Rational v, std::string literal, SrcPos pos) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Const;
    e->value = std::move(v);
    e->literal = std::move(literal);
    e->pos = pos;
    return e;
}

ExprPtr Expr::variable(std::string name, SrcPos pos) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Var;
    e->name = std::move(name);
    e->pos = pos;
    return e;
}

ExprPtr Expr::negate(ExprPtr a, SrcPos pos) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Neg;
    e->lhs = std::move(a);
    e->pos = pos;
    return e;
}

ExprPtr Expr::binary(ArithOp op, ExprPtr a, ExprPtr b, SrcPos pos) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Bin;
    e->op = op;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    e->pos = pos;
    return e;
}

bool same_expr(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case ExprKind::Const: return a->value == b->value;
        case ExprKind::Var: return a->name == b->name;
        case ExprKind::Neg: return same_expr(a->lhs, b->lhs);
        case ExprKind::Bin: return a->op == b->op && same_expr(a->lhs, b->lhs) && same_expr(a->rhs, b->rhs);
    }
    return false;
}

std::string print_expr(const ExprPtr& e) {
    switch (e->kind) {
        case ExprKind::Const: return e->literal.empty() ? e->value.str() : e->literal;
        case ExprKind::Var: return e->name;
        case ExprKind::Neg: return "(-" + print_expr(e->lhs) + ")";
        case ExprKind::Bin:
            return "(" + print_expr(e->lhs) + " " + op_symbol(e->op) + " " + print_expr(e->rhs) + ")";
    }
    return {};
}

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string list(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
    return s + "]";
}

}  // namespace

DistPtr DistDecl::make() const {
    if (kind == "piecewise") {
        DistPtr d = make_piecewise(breaks, coeffs);
        return range ? truncate(d, *range) : d;
    }
    std::string k = kind == "exp" ? "laplace" : kind;
    BuiltinSpec spec;
    spec.kind = kind_from_name(k);
    if (!shorthand) {
        spec.params = params;
        return make_builtin(spec, range);
    }
    if (!range) throw std::invalid_argument(name + ": '" + kind + " in [a, b]' needs a range");
    const double mid = 0.5 * range->lo + 0.5 * range->hi;
    switch (spec.kind) {
        case BuiltinKind::Uniform: spec.params = {range->lo, range->hi}; return make_builtin(spec);
        case BuiltinKind::Normal: spec.params = {mid, 1.0}; break;
        case BuiltinKind::Laplace: spec.params = {mid, 0.01}; break;
        case BuiltinKind::Exponential: spec.params = {1.0}; break;
        case BuiltinKind::Rayleigh: spec.params = {1.0}; break;
        case BuiltinKind::Beta: throw std::invalid_argument(name + ": beta needs explicit parameters");
    }
    return make_builtin(spec, range);
}

std::string DistDecl::print() const {
    std::string s = name + " ~ " + kind;
    if (kind == "piecewise") {
        s += "(" + list(breaks) + ", [";
        for (std::size_t i = 0; i < coeffs.size(); ++i) s += (i ? ", " : "") + list(coeffs[i]);
        s += "])";
    } else if (!shorthand) {
        s += "(";
        for (std::size_t i = 0; i < params.size(); ++i) s += (i ? ", " : "") + num(params[i]);
        s += ")";
    }
    if (range) s += " in [" + num(range->lo) + ", " + num(range->hi) + "]";
    if (exact) s += " exact";
    return s;
}

const DistDecl* Program::find_decl(const std::string& name) const {
    for (const auto& d : decls)
        if (d.name == name) return &d;
    return nullptr;
}

const Assignment* Program::find_assign(const std::string& name) const {
    for (const auto& a : assigns)
        if (a.name == name) return &a;
    return nullptr;
}

const Assignment& Program::output() const {
    if (assigns.empty()) throw std::logic_error("program has no assignment");
    return assigns.back();
}

std::string Program::print() const {
    std::string s;
    for (const auto& d : decls) s += d.print() + "\n";
    for (const auto& a : assigns) s += a.name + " = " + print_expr(a.expr) + "\n";
    return s;
}

bool same_program(const Program& a, const Program& b) {
    if (a.decls.size() != b.decls.size() || a.assigns.size() != b.assigns.size()) return false;
    for (std::size_t i = 0; i < a.decls.size(); ++i) {
        const auto &x = a.decls[i], &y = b.decls[i];
        bool ranges = x.range.has_value() == y.range.has_value() && (!x.range || *x.range == *y.range);
        if (x.name != y.name || x.kind != y.kind || x.params != y.params || x.shorthand != y.shorthand || !ranges ||
            x.breaks != y.breaks || x.coeffs != y.coeffs || x.exact != y.exact)
            return false;
    }
    for (std::size_t i = 0; i < a.assigns.size(); ++i)
        if (a.assigns[i].name != b.assigns[i].name || !same_expr(a.assigns[i].expr, b.assigns[i].expr)) return false;
    return true;
}

Dag build_dag(const Program& prog) {
    Dag dag;
    std::map<std::string, int> index;
    std::map<std::string, int> assigned;
    auto intern = [&](DagNode n) {
        std::string key = std::to_string(static_cast<int>(n.kind)) + "|" + op_symbol(n.op) + "|" + n.name + "|" +
                          (n.kind == ExprKind::Const ? n.value.str() : "") + "|" + std::to_string(n.a) + "|" +
                          std::to_string(n.b);
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        dag.nodes.push_back(std::move(n));
        int id = static_cast<int>(dag.nodes.size()) - 1;
        index.emplace(key, id);
        return id;
    };
    std::function<int(const ExprPtr&, std::size_t)> go = [&](const ExprPtr& e, std::size_t upto) -> int {
        DagNode n;
        n.kind = e->kind;
        n.pos = e->pos;
        switch (e->kind) {
            case ExprKind::Const:
                n.value = e->value;
                n.literal = e->literal;
                break;
            case ExprKind::Var: {
                // earlier assignments are inlined; the parser keeps names unique
                for (std::size_t i = 0; i < upto; ++i) {
                    if (prog.assigns[i].name != e->name) continue;
                    auto it = assigned.find(e->name);
                    if (it != assigned.end()) return it->second;
                    int id = go(prog.assigns[i].expr, i);
                    assigned.emplace(e->name, id);
                    return id;
                }
                if (!prog.find_decl(e->name)) throw std::invalid_argument("undeclared variable '" + e->name + "'");
                n.name = e->name;
                break;
            }
            case ExprKind::Neg: n.a = go(e->lhs, upto); break;
            case ExprKind::Bin:
                n.op = e->op;
                n.a = go(e->lhs, upto);
                n.b = go(e->rhs, upto);
                break;
        }
        return intern(std::move(n));
    };
    const std::size_t last = prog.assigns.size() - 1;
    dag.root = go(prog.output().expr, last);
    return dag;
}

std::string Dag::label(int id) const {
    const DagNode& n = nodes[static_cast<std::size_t>(id)];
    switch (n.kind) {
        case ExprKind::Const: return n.literal.empty() ? n.value.str() : n.literal;
        case ExprKind::Var: return n.name;
        case ExprKind::Neg: return "(-" + label(n.a) + ")";
        case ExprKind::Bin: return "(" + label(n.a) + " " + op_symbol(n.op) + " " + label(n.b) + ")";
    }
    return {};
}

}  // namespace proberr
