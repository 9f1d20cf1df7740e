#ifndef PROBERR_INTERVAL_HPP
#define PROBERR_INTERVAL_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace proberr {

// Closed interval of doubles. Endpoints of arithmetic results are rounded
// outward, so the exact real result is always enclosed.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    constexpr Interval(double v) : lo(v), hi(v) {}
    constexpr Interval(double l, double h) : lo(l), hi(h) {}

    static Interval empty() {
        return {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    }
    static Interval entire() {
        return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    }

    bool is_empty() const { return !(lo <= hi); }
    double width() const { return hi - lo; }
    double mid() const { return lo == hi ? lo : 0.5 * lo + 0.5 * hi; }
    double mag() const { return std::fmax(std::fabs(lo), std::fabs(hi)); }
    double mig() const;
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool contains_zero() const { return lo <= 0.0 && 0.0 <= hi; }
    bool subset_of(const Interval& o) const { return o.lo <= lo && hi <= o.hi; }
    bool intersects(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }

    bool operator==(const Interval& o) const { return lo == o.lo && hi == o.hi; }
};

class DivisionByZero : public std::domain_error {
public:
    explicit DivisionByZero(const std::string& what) : std::domain_error(what) {}
};

double down(double x);
double up(double x);

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);
Interval operator*(const Interval& a, const Interval& b);
// Throws DivisionByZero when b contains 0.
Interval operator/(const Interval& a, const Interval& b);

Interval hull(const Interval& a, const Interval& b);
Interval intersect(const Interval& a, const Interval& b);
Interval iabs(const Interval& a);
Interval isqr(const Interval& a);
Interval ipow(const Interval& a, int n);
// sign(x) as an interval: [-1,1] when a straddles 0.
Interval isign(const Interval& a);

enum class ArithOp { Add, Sub, Mul, Div };

Interval apply(ArithOp op, const Interval& a, const Interval& b);
char op_symbol(ArithOp op);

std::string to_string(const Interval& a);

}  // namespace proberr

#endif
