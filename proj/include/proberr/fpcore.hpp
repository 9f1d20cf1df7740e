#ifndef PROBERR_FPCORE_HPP
#define PROBERR_FPCORE_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace proberr {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// F(p, emin, emax): values (-1)^s 2^e (1 + k 2^-p) plus 0 and +-inf.
// No subnormals; anything below 2^(emin-1) in magnitude rounds to 0 and
// anything above the largest finite value rounds to infinity.
struct FloatFormat {
    int p = 23;
    int emin = -126;
    int emax = 127;
    std::string name = "single";

    static FloatFormat half();
    static FloatFormat single();
    static FloatFormat dbl();
    // p = 4 with a 3-bit IEEE-style exponent field (emin = -2, emax = 3)
    static FloatFormat toy();
    static FloatFormat custom(int p, int emin, int emax);
    // "half", "single", "double", "toy", "custom:p,emin,emax"
    static FloatFormat from_name(const std::string& name);

    double u() const;
    double max_finite() const;
    double min_normal() const;
    // magnitudes strictly below this round to zero
    double underflow_threshold() const;
    // number of finite nonzero representables
    std::uint64_t finite_count() const;
    bool enumerable() const;
    Rational u_exact() const;

    bool operator==(const FloatFormat& o) const { return p == o.p && emin == o.emin && emax == o.emax; }
};

struct FloatValue {
    enum class Kind { Finite, Zero, PosInf, NegInf };
    Kind kind = Kind::Zero;
    int s = 0;
    int e = 0;
    std::uint64_t k = 0;

    static FloatValue finite(int s, int e, std::uint64_t k) { return {Kind::Finite, s, e, k}; }
    static FloatValue zero() { return {Kind::Zero, 0, 0, 0}; }
    static FloatValue pos_inf() { return {Kind::PosInf, 0, 0, 0}; }
    static FloatValue neg_inf() { return {Kind::NegInf, 1, 0, 0}; }

    bool is_finite_nonzero() const { return kind == Kind::Finite; }
    double value(const FloatFormat& fmt) const;
    Rational exact(const FloatFormat& fmt) const;
    bool operator==(const FloatValue& o) const { return kind == o.kind && s == o.s && e == o.e && k == o.k; }
};

struct RoundingInterval {
    Rational lo;
    Rational hi;
    Rational width() const { return hi - lo; }
};

class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& w) : std::domain_error(w) {}
};

FloatValue round(double x, const FloatFormat& fmt);
double round_value(double x, const FloatFormat& fmt);
long double round_value(long double x, const FloatFormat& fmt);
// exact rounding of a rational (used for decimal constants)
double round_rational(const Rational& x, const FloatFormat& fmt);

// x must be exactly representable in fmt
FloatValue decompose(double z, const FloatFormat& fmt);
bool representable(double x, const FloatFormat& fmt);
bool representable(const Rational& x, const FloatFormat& fmt);

double err_abs(double x, const FloatFormat& fmt);
// (x - round(x)) / x; 1 on the zero interval, +-inf on the infinite ones
double err_rel(double x, const FloatFormat& fmt);

RoundingInterval rounding_interval(const FloatValue& z, const FloatFormat& fmt);
// u |z| = C(e,k) tau(z)
Rational c_coeff(int e, std::uint64_t k, const FloatFormat& fmt);
// closed-form t range for which z / (1 - t u) stays inside the rounding
// interval of z; valid for emin < e < emax
struct TRange {
    Rational lo;
    Rational hi;
};
TRange t_range(const FloatValue& z, const FloatFormat& fmt);
bool t_feasible(const FloatValue& z, double t, const FloatFormat& fmt);
// direct check z / (1 - t u) in [lo(z), hi(z)], any exponent
bool t_feasible_direct(const FloatValue& z, const Rational& t, const FloatFormat& fmt);

// successor of a finite nonzero positive value (or the smallest positive value
// when z is zero); returns +inf past the largest finite value
FloatValue next_positive(const FloatValue& z, const FloatFormat& fmt);

Rational pow2(int e);
Rational to_rational(double x);
// nearest double, and a directed enclosure
double to_double(const Rational& r);
double to_double_down(const Rational& r);
double to_double_up(const Rational& r);

}  // namespace proberr

#endif
