#include "proberr/fpcore.hpp"

#include <cfenv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace proberr {

FloatFormat FloatFormat::half() { return {10, -14, 15, "half"}; }
FloatFormat FloatFormat::single() { return {23, -126, 127, "single"}; }
FloatFormat FloatFormat::dbl() { return {52, -1022, 1023, "double"}; }
FloatFormat FloatFormat::toy() { return {4, -2, 3, "toy"}; }

FloatFormat FloatFormat::custom(int p, int emin, int emax) {
    if (p < 1 || p > 52) throw std::invalid_argument("precision must lie in [1, 52]");
    if (emin >= emax) throw std::invalid_argument("emin must be below emax");
    if (emin < -1021 || emax > 1023) throw std::invalid_argument("exponent range exceeds the double range");
    return {p, emin, emax, "custom:" + std::to_string(p) + "," + std::to_string(emin) + "," + std::to_string(emax)};
}

FloatFormat FloatFormat::from_name(const std::string& name) {
    if (name == "half") return half();
    if (name == "single") return single();
    if (name == "double") return dbl();
    if (name == "toy") return toy();
    const std::string prefix = "custom:";
    if (name.rfind(prefix, 0) == 0) {
        int p = 0, lo = 0, hi = 0;
        char c1 = 0, c2 = 0;
        std::string rest = name.substr(prefix.size());
        if (std::sscanf(rest.c_str(), "%d%c%d%c%d", &p, &c1, &lo, &c2, &hi) == 5 && c1 == ',' && c2 == ',')
            return custom(p, lo, hi);
    }
    throw std::invalid_argument("unknown format '" + name + "'");
}

double FloatFormat::u() const { return std::ldexp(1.0, -(p + 1)); }
Rational FloatFormat::u_exact() const { return pow2(-(p + 1)); }

double FloatFormat::max_finite() const { return std::ldexp(2.0 - std::ldexp(1.0, -p), emax); }
double FloatFormat::min_normal() const { return std::ldexp(1.0, emin); }
double FloatFormat::underflow_threshold() const { return std::ldexp(1.0, emin - 1); }

std::uint64_t FloatFormat::finite_count() const {
    if (p >= 40) return std::numeric_limits<std::uint64_t>::max();
    return 2ull * static_cast<std::uint64_t>(emax - emin + 1) << p;
}

bool FloatFormat::enumerable() const { return finite_count() <= (1ull << 22); }

Rational pow2(int e) {
    if (e >= 0) return Rational(BigInt(1) << e);
    return Rational(BigInt(1), BigInt(1) << -e);
}

double FloatValue::value(const FloatFormat& fmt) const {
    switch (kind) {
        case Kind::Zero: return 0.0;
        case Kind::PosInf: return std::numeric_limits<double>::infinity();
        case Kind::NegInf: return -std::numeric_limits<double>::infinity();
        case Kind::Finite: break;
    }
    double m = 1.0 + std::ldexp(static_cast<double>(k), -fmt.p);
    double v = std::ldexp(m, e);
    return s ? -v : v;
}

Rational FloatValue::exact(const FloatFormat& fmt) const {
    if (kind != Kind::Finite) {
        if (kind == Kind::Zero) return Rational(0);
        throw DomainError("infinite value has no rational form");
    }
    Rational v = pow2(e) * Rational(BigInt((BigInt(1) << fmt.p) + BigInt(k)), BigInt(1) << fmt.p);
    return s ? Rational(-v) : v;
}

namespace {

template <class T>
T round_impl(T x, const FloatFormat& fmt) {
    if (x == 0 || std::isnan(x)) return x;
    T a = std::fabs(x);
    T sign = x < 0 ? T(-1) : T(1);
    if (std::isinf(a) || a > static_cast<T>(fmt.max_finite())) return sign * std::numeric_limits<T>::infinity();
    T thr = std::ldexp(T(1), fmt.emin - 1);
    if (a <= thr) return sign * T(0);  // the tie at 2^(emin-1) goes to the even zero
    int ex = 0;
    T m = std::frexp(a, &ex);  // a = m 2^ex, m in [0.5, 1)
    int e = ex - 1;
    if (e < fmt.emin) return sign * std::ldexp(T(1), fmt.emin);
    T scaled = std::ldexp(m * 2, fmt.p);
    T r = std::nearbyint(scaled);  // default mode: nearest, ties to even
    return sign * std::ldexp(r, e - fmt.p);
}

}  // namespace

double round_value(double x, const FloatFormat& fmt) { return round_impl<double>(x, fmt); }
long double round_value(long double x, const FloatFormat& fmt) { return round_impl<long double>(x, fmt); }

FloatValue decompose(double z, const FloatFormat& fmt) {
    if (z == 0) return FloatValue::zero();
    if (std::isinf(z)) return z > 0 ? FloatValue::pos_inf() : FloatValue::neg_inf();
    int ex = 0;
    double m = std::frexp(std::fabs(z), &ex);
    int e = ex - 1;
    double frac = std::ldexp(m * 2 - 1, fmt.p);
    if (e < fmt.emin || e > fmt.emax || frac != std::floor(frac))
        throw DomainError("value is not representable in format " + fmt.name);
    return FloatValue::finite(z < 0, e, static_cast<std::uint64_t>(frac));
}

FloatValue round(double x, const FloatFormat& fmt) { return decompose(round_value(x, fmt), fmt); }

bool representable(double x, const FloatFormat& fmt) {
    if (x == 0) return true;
    if (!std::isfinite(x)) return false;
    return round_value(x, fmt) == x;
}

Rational to_rational(double x) {
    if (!std::isfinite(x)) throw DomainError("non-finite value has no rational form");
    if (x == 0) return Rational(0);
    int ex = 0;
    double m = std::frexp(x, &ex);
    long long mant = static_cast<long long>(std::ldexp(m, 53));
    return Rational(BigInt(mant)) * pow2(ex - 53);
}

namespace {

// floor(|r| * 2^s) as an integer
BigInt scaled_floor(const Rational& r, int s, bool& exact) {
    BigInt num = boost::multiprecision::numerator(r);
    BigInt den = boost::multiprecision::denominator(r);
    if (num < 0) num = -num;
    if (s >= 0) num <<= s;
    else den <<= -s;
    BigInt q = num / den;
    exact = (q * den == num);
    return q;
}

int floor_log2(const Rational& r) {
    // |r| > 0: largest e with 2^e <= |r|
    BigInt num = boost::multiprecision::numerator(r);
    BigInt den = boost::multiprecision::denominator(r);
    if (num < 0) num = -num;
    int e = static_cast<int>(boost::multiprecision::msb(num)) - static_cast<int>(boost::multiprecision::msb(den));
    if (pow2(e) > Rational(num, den)) --e;
    return e;
}

enum class Dir { Nearest, Down, Up };

double rational_to_double(const Rational& r, Dir dir, int prec = 52) {
    if (r == 0) return 0.0;
    bool neg = r < 0;
    int e = floor_log2(r);
    if (e > 1023) {
        bool toward_inf = dir == Dir::Nearest || (dir == Dir::Up && !neg) || (dir == Dir::Down && neg);
        double big = toward_inf ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::max();
        return neg ? -big : big;
    }
    if (e < -1022) e = -1022;  // subnormal region of the double format
    bool exact = false;
    BigInt q = scaled_floor(r, prec - e, exact);  // q in [2^prec, 2^(prec+1))
    BigInt q_up = exact ? q : q + 1;
    BigInt chosen;
    if (exact) {
        chosen = q;
    } else if (dir == Dir::Nearest) {
        // compare remainder against one half
        Rational frac = (neg ? Rational(-r) : r) * pow2(prec - e) - Rational(q);
        if (frac > Rational(1, 2)) chosen = q_up;
        else if (frac < Rational(1, 2)) chosen = q;
        else chosen = (q & 1) ? q_up : q;
    } else {
        bool away = (dir == Dir::Up) != neg;  // magnitude rounds up
        chosen = away ? q_up : q;
    }
    double mag = std::ldexp(chosen.convert_to<double>(), e - prec);
    return neg ? -mag : mag;
}

}  // namespace

double to_double(const Rational& r) { return rational_to_double(r, Dir::Nearest); }
double to_double_down(const Rational& r) { return rational_to_double(r, Dir::Down); }
double to_double_up(const Rational& r) { return rational_to_double(r, Dir::Up); }

double round_rational(const Rational& x, const FloatFormat& fmt) {
    if (x == 0) return 0.0;
    Rational a = x < 0 ? Rational(-x) : x;
    double sign = x < 0 ? -1.0 : 1.0;
    if (a > to_rational(fmt.max_finite())) return sign * std::numeric_limits<double>::infinity();
    if (a <= pow2(fmt.emin - 1)) return sign * 0.0;
    if (a < pow2(fmt.emin)) return sign * fmt.min_normal();
    return sign * rational_to_double(a, Dir::Nearest, fmt.p);
}

bool representable(const Rational& x, const FloatFormat& fmt) {
    if (x == 0) return true;
    double r = round_rational(x, fmt);
    return std::isfinite(r) && to_rational(r) == x;
}

double err_abs(double x, const FloatFormat& fmt) { return x - round_value(x, fmt); }

double err_rel(double x, const FloatFormat& fmt) {
    if (x == 0) throw DomainError("relative error is undefined at 0");
    double r = round_value(x, fmt);
    if (std::isinf(r)) return r > 0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    if (r == 0) return 1.0;
    // Sterbenz: round(x) is within a factor of two of x, so the difference is exact
    return static_cast<double>((static_cast<long double>(x) - r) / x);
}

RoundingInterval rounding_interval(const FloatValue& z, const FloatFormat& fmt) {
    if (!z.is_finite_nonzero()) throw DomainError("rounding interval requires a finite nonzero value");
    const int p = fmt.p;
    const BigInt two_p1 = BigInt(1) << (p + 1);
    const std::uint64_t kmax = (1ull << p) - 1;
    const int e = z.e;
    const BigInt k(z.k);
    Rational lo, hi;
    if (e == fmt.emin && z.k == 0) lo = pow2(e - 1);
    else if (z.k == 0) lo = pow2(e - 1) * (Rational(1) + Rational(two_p1 - 1, two_p1));
    else lo = pow2(e) * (Rational(1) + Rational(2 * k - 1, two_p1));
    if (e == fmt.emax && z.k == kmax) hi = FloatValue::finite(0, e, z.k).exact(fmt);
    else hi = pow2(e) * (Rational(1) + Rational(2 * k + 1, two_p1));
    if (z.s) return {Rational(-hi), Rational(-lo)};
    return {lo, hi};
}

Rational c_coeff(int e, std::uint64_t k, const FloatFormat& fmt) {
    const int p = fmt.p;
    const BigInt two_p = BigInt(1) << p;
    const BigInt two_p1 = BigInt(1) << (p + 1);
    if (e == fmt.emin && k == 0) return Rational(two_p1 + 1, two_p * (two_p1 - 1));
    if (k == 0) return Rational(2, 3);
    if (e == fmt.emax && k == (1ull << p) - 1) return Rational(3 * (two_p1 - 1), two_p1);
    return Rational(two_p + BigInt(k), two_p1);
}

TRange t_range(const FloatValue& z, const FloatFormat& fmt) {
    const BigInt two_p1 = BigInt(1) << (fmt.p + 1);
    const BigInt two_p2 = BigInt(1) << (fmt.p + 2);
    const BigInt k(z.k);
    if (z.k == 0) return {Rational(-two_p1, two_p2 - 1), Rational(two_p1, two_p1 + 1)};
    return {Rational(-two_p1, two_p1 + 2 * k - 1), Rational(two_p1, two_p1 + 2 * k + 1)};
}

bool t_feasible_direct(const FloatValue& z, const Rational& t, const FloatFormat& fmt) {
    Rational denom = Rational(1) - t * fmt.u_exact();
    if (denom <= 0) return false;
    Rational x = z.exact(fmt) / denom;
    RoundingInterval ri = rounding_interval(z, fmt);
    return ri.lo <= x && x <= ri.hi;
}

bool t_feasible(const FloatValue& z, double t, const FloatFormat& fmt) {
    if (std::fabs(t) <= 0.5) return true;
    Rational tr = to_rational(t);
    if (z.e == fmt.emin || z.e == fmt.emax) return t_feasible_direct(z, tr, fmt);
    TRange r = t_range(z, fmt);
    return r.lo <= tr && tr <= r.hi;
}

FloatValue next_positive(const FloatValue& z, const FloatFormat& fmt) {
    if (z.kind == FloatValue::Kind::Zero) return FloatValue::finite(0, fmt.emin, 0);
    if (z.kind != FloatValue::Kind::Finite || z.s) throw DomainError("next_positive expects a positive value");
    if (z.k + 1 < (1ull << fmt.p)) return FloatValue::finite(0, z.e, z.k + 1);
    if (z.e < fmt.emax) return FloatValue::finite(0, z.e + 1, 0);
    return FloatValue::pos_inf();
}

}  // namespace proberr
