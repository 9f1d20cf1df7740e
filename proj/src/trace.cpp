#include "proberr/trace.hpp"

#include <cmath>

namespace proberr {

TraceFact TraceFact::in_range(std::string z, Interval r) {
    TraceFact f;
    f.kind = Kind::Range;
    f.z = std::move(z);
    f.range = r;
    return f;
}

TraceFact TraceFact::operation(std::string z, std::string a, ArithOp op, std::string b) {
    TraceFact f;
    f.kind = Kind::Op;
    f.z = std::move(z);
    f.a = std::move(a);
    f.b = std::move(b);
    f.op = op;
    return f;
}

TraceFact TraceFact::negation(std::string z, std::string a) {
    TraceFact f;
    f.kind = Kind::Neg;
    f.z = std::move(z);
    f.a = std::move(a);
    return f;
}

TraceFact TraceFact::constant(std::string z, double v) {
    TraceFact f;
    f.kind = Kind::Const;
    f.z = std::move(z);
    f.value = v;
    return f;
}

TraceFact TraceFact::rounding(std::string z, std::string a, std::string e, double u, double min_normal,
                              bool underflow) {
    TraceFact f;
    f.kind = Kind::Round;
    f.z = std::move(z);
    f.a = std::move(a);
    f.e = std::move(e);
    f.u = u;
    f.min_normal = min_normal;
    f.underflow = underflow;
    return f;
}

std::string TraceFact::key() const {
    switch (kind) {
        case Kind::Range: return "range:" + z;
        case Kind::Op: return "op:" + z;
        case Kind::Neg: return "neg:" + z;
        case Kind::Const: return "const:" + z;
        case Kind::Round: return "round:" + z;
    }
    return z;
}

void TraceFact::encode(Constraint& c) const {
    c.declare(z);
    switch (kind) {
        case Kind::Range: c.add(smt_in(z, range)); break;
        case Kind::Const: c.add("(= " + z + " " + smt_number(value) + ")"); break;
        case Kind::Neg:
            c.declare(a);
            c.add("(= " + z + " (- " + a + "))");
            break;
        case Kind::Op:
            c.declare(a);
            c.declare(b);
            if (op == ArithOp::Div) {
                // product form keeps the encoding polynomial
                c.add("(= (* " + z + " " + b + ") " + a + ")");
                c.add("(not (= " + b + " 0.0))");
            } else {
                c.add("(= " + z + " (" + op_symbol(op) + " " + a + " " + b + "))");
            }
            break;
        case Kind::Round: {
            c.declare(a);
            c.declare(e);
            c.add(smt_in(e, {-1.0, 1.0}));
            std::string rel = "(* " + a + " (- 1.0 (* " + smt_number(u) + " " + e + ")))";
            if (underflow) {
                // flushing to 0 or +-min_normal moves the value by at most
                // min_normal, so an absolute slack replaces the disjunction
                std::string h = "h_" + z;
                c.declare(h);
                c.add(smt_in(h, {-min_normal, min_normal}));
                c.add("(= " + z + " (+ " + rel + " " + h + "))");
            } else {
                c.add("(= " + z + " " + rel + ")");
            }
            break;
        }
    }
}

void Trace::add(const TraceFact& f) { facts_.insert_or_assign(f.key(), f); }

void Trace::add_input(const std::string& var, Interval r) {
    add(TraceFact::in_range(var, r));
    inputs_.insert(var);
}

void Trace::merge(const Trace& o) {
    for (const auto& [k, f] : o.facts_) facts_.emplace(k, f);
    inputs_.insert(o.inputs_.begin(), o.inputs_.end());
}

bool Trace::shares_inputs(const Trace& o) const {
    const auto& small = inputs_.size() <= o.inputs_.size() ? inputs_ : o.inputs_;
    const auto& big = inputs_.size() <= o.inputs_.size() ? o.inputs_ : inputs_;
    for (const auto& v : small)
        if (big.count(v)) return true;
    return false;
}

Constraint Trace::to_constraint() const {
    Constraint c;
    for (const auto& [k, f] : facts_) f.encode(c);
    return c;
}

namespace {

bool finite(Interval a) { return std::isfinite(a.lo) && std::isfinite(a.hi); }

// narrows x by y; returns false when the result is empty
bool narrow(Interval& x, Interval y, bool& changed) {
    Interval r = intersect(x, y);
    if (r.is_empty()) return false;
    if (r.lo != x.lo || r.hi != x.hi) changed = true;
    x = r;
    return true;
}

}  // namespace

bool Trace::contract(std::map<std::string, Interval>& box, int passes) const {
    auto dom = [&](const std::string& v) -> Interval& {
        auto it = box.find(v);
        if (it == box.end()) it = box.emplace(v, Interval::entire()).first;
        return it->second;
    };
    for (const auto& [k, f] : facts_) {
        if (f.kind == TraceFact::Kind::Range) {
            bool ch = false;
            if (!narrow(dom(f.z), f.range, ch)) return false;
        }
    }
    for (int pass = 0; pass < passes; ++pass) {
        bool changed = false;
        for (const auto& [k, f] : facts_) {
            Interval& z = dom(f.z);
            switch (f.kind) {
                case TraceFact::Kind::Range: break;
                case TraceFact::Kind::Const:
                    if (!narrow(z, {f.value, f.value}, changed)) return false;
                    break;
                case TraceFact::Kind::Neg: {
                    Interval& a = dom(f.a);
                    if (!narrow(z, -a, changed) || !narrow(a, -z, changed)) return false;
                    break;
                }
                case TraceFact::Kind::Op: {
                    Interval& a = dom(f.a);
                    Interval& b = dom(f.b);
                    if (!finite(a) || !finite(b)) break;
                    switch (f.op) {
                        case ArithOp::Add:
                            if (!narrow(z, a + b, changed)) return false;
                            if (!narrow(a, z - b, changed) || !narrow(b, z - a, changed)) return false;
                            break;
                        case ArithOp::Sub:
                            if (!narrow(z, a - b, changed)) return false;
                            if (!narrow(a, z + b, changed) || !narrow(b, a - z, changed)) return false;
                            break;
                        case ArithOp::Mul:
                            if (!narrow(z, a * b, changed)) return false;
                            if (!b.contains_zero() && !narrow(a, z / b, changed)) return false;
                            if (!a.contains_zero() && !narrow(b, z / a, changed)) return false;
                            break;
                        case ArithOp::Div:
                            if (b.contains_zero()) break;
                            if (!narrow(z, a / b, changed)) return false;
                            if (finite(z) && !narrow(a, z * b, changed)) return false;
                            if (finite(z) && !z.contains_zero() && !narrow(b, a / z, changed)) return false;
                            break;
                    }
                    break;
                }
                case TraceFact::Kind::Round: {
                    Interval& a = dom(f.a);
                    if (!finite(a)) break;
                    Interval fac{1.0 - f.u, 1.0 + f.u};
                    Interval img = a * fac;
                    if (f.underflow) {
                        // only the part of a inside the band maps into the band
                        const double mn = f.min_normal;
                        Interval pos = intersect(a, Interval{mn, HUGE_VAL});
                        Interval neg = intersect(a, Interval{-HUGE_VAL, -mn});
                        img = Interval::empty();
                        if (!pos.is_empty()) img = pos * fac;
                        if (!neg.is_empty()) img = img.is_empty() ? neg * fac : hull(img, neg * fac);
                        if (a.lo < mn && a.hi > -mn) {
                            Interval band{a.lo >= 0 ? 0.0 : -mn, a.hi <= 0 ? 0.0 : mn};
                            img = img.is_empty() ? band : hull(img, band);
                        }
                    }
                    if (!narrow(z, img, changed)) return false;
                    if (finite(z)) {
                        Interval pre = z / fac;
                        // a value in the band may have been flushed to 0 or +-min_normal
                        if (f.underflow && z.lo <= f.min_normal && z.hi >= -f.min_normal)
                            pre = hull(pre, Interval{-f.min_normal, f.min_normal});
                        if (!narrow(a, pre, changed)) return false;
                    }
                    break;
                }
            }
        }
        if (!changed) break;
    }
    return true;
}

}  // namespace proberr
