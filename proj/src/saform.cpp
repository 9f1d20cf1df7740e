#include "proberr/saform.hpp"

#include <cmath>

namespace proberr {

SAContext::SAContext(ExprPool& pool, FloatFormat fmt, bool exact_constants)
    : pool_(pool), fmt_(std::move(fmt)), exact_constants_(exact_constants) {}

AffineForm SAContext::zero_form() {
    AffineForm f;
    f.c0 = pool_.constant(0.0);
    return f;
}

int SAContext::fresh_noise(const std::string& origin) {
    int id = next_noise_++;
    origins_.emplace(id, origin);
    return id;
}

bool SAContext::is_zero(const AffineForm& f) const {
    if (!pool_.is_zero(f.c0)) return false;
    for (const auto& [id, c] : f.terms)
        if (!pool_.is_zero(c)) return false;
    return true;
}

AffineForm SAContext::affine_linear(SymId alpha, const AffineForm& x, SymId beta, const AffineForm& y, SymId zeta) {
    AffineForm out;
    out.c0 = pool_.add(pool_.add(pool_.mul(alpha, x.c0), pool_.mul(beta, y.c0)), zeta);
    for (const auto& [id, c] : x.terms) out.terms[id] = pool_.mul(alpha, c);
    for (const auto& [id, c] : y.terms) {
        SymId t = pool_.mul(beta, c);
        auto it = out.terms.find(id);
        if (it == out.terms.end())
            out.terms.emplace(id, t);
        else
            it->second = pool_.add(it->second, t);
    }
    for (auto it = out.terms.begin(); it != out.terms.end();) {
        if (pool_.is_zero(it->second))
            it = out.terms.erase(it);
        else
            ++it;
    }
    return out;
}

AffineForm SAContext::scale(SymId k, const AffineForm& f) {
    return affine_linear(k, f, pool_.constant(0.0), zero_form(), pool_.constant(0.0));
}

SymId SAContext::magnitude(const AffineForm& f) {
    std::vector<SymId> parts;
    if (!pool_.is_zero(f.c0)) parts.push_back(pool_.abs(f.c0));
    for (const auto& [id, c] : f.terms) parts.push_back(pool_.abs(c));
    return pool_.sum(parts);
}

SymId SAContext::rounding_coeff(SymId value_mag) {
    SymId main = pool_.mul(pool_.constant(fmt_.u()), value_mag);
    // flush-to-zero and round-up-to-2^emin both err by at most 2^(emin-1)
    if (domain_) {
        Interval m = pool_.eval(value_mag, *domain_);
        if (m.lo >= fmt_.min_normal()) return main;
    }
    return pool_.add(main, pool_.constant(0.5 * fmt_.min_normal()));
}

RangeErrorPair SAContext::leaf(const std::string& var, bool exact) {
    RangeErrorPair p;
    p.range = pool_.var(var);
    p.err = zero_form();
    if (!exact) p.err.terms.emplace(fresh_noise("input " + var), rounding_coeff(pool_.abs(p.range)));
    return p;
}

RangeErrorPair SAContext::constant(const Rational& v) {
    RangeErrorPair p;
    p.range = pool_.constant(Interval{to_double_down(v), to_double_up(v)});
    p.err = zero_form();
    if (v == 0 || (exact_constants_ && representable(v, fmt_))) return p;
    Interval mag = iabs(pool_.node(p.range).c);
    SymId coeff = pool_.constant(Interval{fmt_.u()} * mag);
    if (mag.lo < fmt_.min_normal()) coeff = pool_.add(coeff, pool_.constant(0.5 * fmt_.min_normal()));
    p.err.terms.emplace(fresh_noise("constant " + v.str()), coeff);
    return p;
}

RangeErrorPair SAContext::neg(const RangeErrorPair& x) {
    return {pool_.neg(x.range), scale(pool_.constant(-1.0), x.err)};
}

RangeErrorPair SAContext::add(const RangeErrorPair& x, const RangeErrorPair& y) {
    SymId one = pool_.constant(1.0), zero = pool_.constant(0.0);
    return {pool_.add(x.range, y.range), affine_linear(one, x.err, one, y.err, zero)};
}

RangeErrorPair SAContext::sub(const RangeErrorPair& x, const RangeErrorPair& y) {
    SymId one = pool_.constant(1.0), zero = pool_.constant(0.0);
    return {pool_.sub(x.range, y.range), affine_linear(one, x.err, pool_.constant(-1.0), y.err, zero)};
}

RangeErrorPair SAContext::mul(const RangeErrorPair& x, const RangeErrorPair& y) {
    RangeErrorPair p;
    p.range = pool_.mul(x.range, y.range);
    p.err = affine_linear(x.range, y.err, y.range, x.err, pool_.constant(0.0));
    if (!is_zero(x.err) && !is_zero(y.err))
        p.err.terms.emplace(fresh_noise("product of errors"), pool_.mul(magnitude(x.err), magnitude(y.err)));
    return p;
}

RangeErrorPair SAContext::div(const RangeErrorPair& x, const RangeErrorPair& y) {
    RangeErrorPair p;
    p.range = pool_.div(x.range, y.range);
    SymId ay = pool_.abs(y.range);
    SymId y2 = pool_.mul(ay, ay);
    SymId inv = pool_.div(pool_.constant(1.0), y.range);
    SymId slope = pool_.neg(pool_.div(x.range, pool_.mul(y.range, y.range)));
    p.err = affine_linear(inv, x.err, slope, y.err, pool_.constant(0.0));
    if (is_zero(y.err)) return p;
    // (x+ex)/(y+ey) - x/y - ex/y + x ey/y^2 = -ex ey/y^2 + (x+ex) ey^2 / (y^2 (y+ey))
    SymId Ey = magnitude(y.err);
    SymId Ex = magnitude(x.err);
    SymId num = pool_.mul(pool_.add(pool_.abs(x.range), Ex), pool_.mul(Ey, Ey));
    SymId rem = pool_.div(num, pool_.mul(y2, pool_.sub(ay, Ey)));
    if (!is_zero(x.err)) rem = pool_.add(rem, pool_.div(pool_.mul(Ex, Ey), y2));
    p.err.terms.emplace(fresh_noise("quotient remainder"), rem);
    return p;
}

RangeErrorPair SAContext::apply(ArithOp op, const RangeErrorPair& x, const RangeErrorPair& y) {
    switch (op) {
        case ArithOp::Add: return add(x, y);
        case ArithOp::Sub: return sub(x, y);
        case ArithOp::Mul: return mul(x, y);
        case ArithOp::Div: return div(x, y);
    }
    throw std::logic_error("unknown operation");
}

RangeErrorPair SAContext::round(const RangeErrorPair& p, const std::string& origin) {
    RangeErrorPair out = p;
    SymId value_mag = pool_.add(pool_.abs(p.range), magnitude(p.err));
    SymId coeff;
    if (domain_) {
        // |range| - |err| >= min_normal rules out the underflow band
        Interval r = pool_.eval(pool_.abs(p.range), *domain_);
        Interval e = pool_.eval(magnitude(p.err), *domain_);
        SymId main = pool_.mul(pool_.constant(fmt_.u()), value_mag);
        coeff = (r - e).lo >= fmt_.min_normal() ? main : pool_.add(main, pool_.constant(0.5 * fmt_.min_normal()));
    } else {
        coeff = rounding_coeff(value_mag);
    }
    out.err.terms.emplace(fresh_noise(origin.empty() ? "rounding" : "rounding " + origin), coeff);
    return out;
}

Interval SAContext::concretize(const AffineForm& f, const std::vector<Interval>& box) {
    Interval acc = pool_.eval(f.c0, box);
    for (const auto& [id, c] : f.terms) acc = acc + pool_.eval(c, box) * Interval{-1.0, 1.0};
    return acc;
}

std::string SAContext::to_string(const AffineForm& f) {
    std::string s = pool_.to_string(f.c0);
    for (const auto& [id, c] : f.terms) s += " + " + pool_.to_string(c) + " * eps" + std::to_string(id);
    return s;
}

ErrorFormResult build_error_form(SAContext& ctx, const Program& prog) {
    ErrorFormResult res;
    res.dag = build_dag(prog);
    res.pairs.resize(res.dag.nodes.size());
    for (std::size_t i = 0; i < res.dag.nodes.size(); ++i) {
        const DagNode& n = res.dag.nodes[i];
        switch (n.kind) {
            case ExprKind::Const: res.pairs[i] = ctx.constant(n.value); break;
            case ExprKind::Var: res.pairs[i] = ctx.leaf(n.name, prog.find_decl(n.name)->exact); break;
            case ExprKind::Neg: res.pairs[i] = ctx.neg(res.pairs[static_cast<std::size_t>(n.a)]); break;
            case ExprKind::Bin:
                res.pairs[i] = ctx.round(ctx.apply(n.op, res.pairs[static_cast<std::size_t>(n.a)],
                                                   res.pairs[static_cast<std::size_t>(n.b)]),
                                         res.dag.label(static_cast<int>(i)));
                break;
        }
    }
    res.output = res.pairs[static_cast<std::size_t>(res.dag.root)];
    return res;
}

}  // namespace proberr
