#include "proberr/interval.hpp"

#include <algorithm>
#include <sstream>

namespace proberr {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double down(double x) {
    if (x == -kInf || std::isnan(x)) return x;
    return std::nextafter(x, -kInf);
}

double up(double x) {
    if (x == kInf || std::isnan(x)) return x;
    return std::nextafter(x, kInf);
}

double Interval::mig() const {
    if (contains_zero()) return 0.0;
    return std::fmin(std::fabs(lo), std::fabs(hi));
}

namespace {
// Directed rounding through error-free transformations: the rounded result
// plus the sign of its exact error decide whether a step is needed.
double add_dn(double a, double b) {
    double s = a + b;
    if (!std::isfinite(s)) return std::isnan(s) ? s : (s > 0 ? std::numeric_limits<double>::max() : s);
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return err < 0 ? down(s) : s;
}
double add_up(double a, double b) {
    double s = a + b;
    if (!std::isfinite(s)) return std::isnan(s) ? s : (s < 0 ? -std::numeric_limits<double>::max() : s);
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return err > 0 ? up(s) : s;
}
// Below this magnitude the fma residual may itself be rounded, so the step
// is taken unconditionally.
constexpr double kTiny = 0x1p-960;

// 0 * inf is taken as 0: an exact zero factor annihilates any bound.
double mul_dn(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    double p = a * b;
    if (std::isinf(p) && std::isfinite(a) && std::isfinite(b)) return p > 0 ? std::numeric_limits<double>::max() : p;
    if (!std::isfinite(p)) return p;
    if (std::fabs(p) < kTiny) return down(p);
    double err = std::fma(a, b, -p);
    return err < 0 ? down(p) : p;
}
double mul_up(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    double p = a * b;
    if (std::isinf(p) && std::isfinite(a) && std::isfinite(b)) return p < 0 ? -std::numeric_limits<double>::max() : p;
    if (!std::isfinite(p)) return p;
    if (std::fabs(p) < kTiny) return up(p);
    double err = std::fma(a, b, -p);
    return err > 0 ? up(p) : p;
}
// sign of a - q*b decides on which side of q the exact quotient lies
double div_dn(double a, double b) {
    double q = a / b;
    if (std::isinf(q) && std::isfinite(a)) return q > 0 ? std::numeric_limits<double>::max() : q;
    if (!std::isfinite(q) || q == 0.0) return q == 0.0 && a != 0.0 ? ((a > 0) == (b > 0) ? 0.0 : down(0.0)) : q;
    if (std::fabs(q) < kTiny) return down(q);
    double r = std::fma(-q, b, a);
    if (r == 0.0) return q;
    bool exact_above = (r > 0) == (b > 0);  // a/b > q
    return exact_above ? q : down(q);
}
double div_up(double a, double b) {
    double q = a / b;
    if (std::isinf(q) && std::isfinite(a)) return q < 0 ? -std::numeric_limits<double>::max() : q;
    if (!std::isfinite(q) || q == 0.0) return q == 0.0 && a != 0.0 ? ((a > 0) == (b > 0) ? up(0.0) : 0.0) : q;
    if (std::fabs(q) < kTiny) return up(q);
    double r = std::fma(-q, b, a);
    if (r == 0.0) return q;
    bool exact_above = (r > 0) == (b > 0);
    return exact_above ? up(q) : q;
}
}  // namespace

Interval operator+(const Interval& a, const Interval& b) {
    return {add_dn(a.lo, b.lo), add_up(a.hi, b.hi)};
}

Interval operator-(const Interval& a, const Interval& b) {
    return {add_dn(a.lo, -b.hi), add_up(a.hi, -b.lo)};
}

Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

Interval operator*(const Interval& a, const Interval& b) {
    double l = std::min({mul_dn(a.lo, b.lo), mul_dn(a.lo, b.hi), mul_dn(a.hi, b.lo), mul_dn(a.hi, b.hi)});
    double h = std::max({mul_up(a.lo, b.lo), mul_up(a.lo, b.hi), mul_up(a.hi, b.lo), mul_up(a.hi, b.hi)});
    return {l, h};
}

Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains_zero()) throw DivisionByZero("division by an interval containing zero: " + to_string(b));
    double l = std::min({div_dn(a.lo, b.lo), div_dn(a.lo, b.hi), div_dn(a.hi, b.lo), div_dn(a.hi, b.hi)});
    double h = std::max({div_up(a.lo, b.lo), div_up(a.lo, b.hi), div_up(a.hi, b.lo), div_up(a.hi, b.hi)});
    return {l, h};
}

Interval hull(const Interval& a, const Interval& b) {
    if (a.is_empty()) return b;
    if (b.is_empty()) return a;
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

Interval intersect(const Interval& a, const Interval& b) {
    Interval r{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
    return r.is_empty() ? Interval::empty() : r;
}

Interval iabs(const Interval& a) {
    if (a.lo >= 0) return a;
    if (a.hi <= 0) return -a;
    return {0.0, std::max(-a.lo, a.hi)};
}

Interval isqr(const Interval& a) {
    Interval m = iabs(a);
    return {mul_dn(m.lo, m.lo), mul_up(m.hi, m.hi)};
}

Interval ipow(const Interval& a, int n) {
    if (n == 0) return {1.0, 1.0};
    if (n == 1) return a;
    if (n % 2 == 0) {
        Interval s = isqr(a);
        return ipow(s, n / 2);
    }
    return a * ipow(a, n - 1);
}

Interval isign(const Interval& a) {
    if (a.lo > 0) return {1.0, 1.0};
    if (a.hi < 0) return {-1.0, -1.0};
    if (a.lo == 0 && a.hi == 0) return {0.0, 0.0};
    return {a.lo < 0 ? -1.0 : 0.0, a.hi > 0 ? 1.0 : 0.0};
}

Interval apply(ArithOp op, const Interval& a, const Interval& b) {
    switch (op) {
        case ArithOp::Add: return a + b;
        case ArithOp::Sub: return a - b;
        case ArithOp::Mul: return a * b;
        case ArithOp::Div: return a / b;
    }
    return Interval::entire();
}

char op_symbol(ArithOp op) {
    switch (op) {
        case ArithOp::Add: return '+';
        case ArithOp::Sub: return '-';
        case ArithOp::Mul: return '*';
        case ArithOp::Div: return '/';
    }
    return '?';
}

std::string to_string(const Interval& a) {
    std::ostringstream os;
    os.precision(17);
    os << '[' << a.lo << ", " << a.hi << ']';
    return os.str();
}

}  // namespace proberr
