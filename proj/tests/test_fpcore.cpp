#include "proberr/fpcore.hpp"

#include <doctest.h>

#include <cmath>

using namespace proberr;

TEST_SUITE("fpcore") {
    TEST_CASE("format constants") {
        FloatFormat s = FloatFormat::single();
        CHECK(s.u() == std::ldexp(1.0, -24));
        CHECK(s.min_normal() == std::ldexp(1.0, -126));
        CHECK(s.max_finite() == static_cast<double>(std::numeric_limits<float>::max()));
        CHECK(FloatFormat::dbl().u() == std::ldexp(1.0, -53));
        CHECK(FloatFormat::half().max_finite() == 65504.0);
        FloatFormat t = FloatFormat::toy();
        CHECK(t.p == 4);
        // 16 significands, 6 exponents, 2 signs
        CHECK(t.finite_count() == 192u);
        CHECK(t.enumerable());
        CHECK(FloatFormat::from_name("custom:10,-14,15") == FloatFormat::half());
        CHECK_THROWS(FloatFormat::from_name("quad"));
    }

    TEST_CASE("round to nearest, ties to even, against float casts") {
        FloatFormat s = FloatFormat::single();
        CHECK(round_value(1.0 + std::ldexp(1.0, -24), s) == 1.0);
        CHECK(round_value(1.0 + 3 * std::ldexp(1.0, -24), s) == 1.0 + std::ldexp(1.0, -22));
        const double xs[] = {0.1, 1.0 / 3.0, -2.718281828459045, 12345.678901, 1e-30, -6.02e23};
        for (double x : xs) CHECK(round_value(x, s) == static_cast<double>(static_cast<float>(x)));
    }

    TEST_CASE("flush to zero below half the smallest normal, no subnormals") {
        FloatFormat s = FloatFormat::single();
        double mn = s.min_normal();
        CHECK(round_value(0.49 * mn, s) == 0.0);
        CHECK(round_value(0.51 * mn, s) == mn);
        CHECK(round_value(-0.75 * mn, s) == -mn);
        CHECK(err_rel(0.49 * mn, s) == 1.0);
    }

    TEST_CASE("overflow rounds to infinity") {
        FloatFormat h = FloatFormat::half();
        CHECK(std::isinf(round_value(70000.0, h)));
        // anything above the largest finite value overflows, with no half-ulp band
        CHECK(round_value(65504.0, h) == 65504.0);
        CHECK(std::isinf(round_value(65505.0, h)));
        CHECK(round_value(65500.0, h) == 65504.0);
        CHECK(err_rel(70000.0, h) == -INFINITY);
    }

    TEST_CASE("relative error sign convention: round(x) = x (1 - err_rel)") {
        FloatFormat s = FloatFormat::single();
        double x = 0.1;
        double r = round_value(x, s);
        double e = err_rel(x, s);
        Rational exact = (to_rational(x) - to_rational(r)) / to_rational(x);
        CHECK(std::abs(e - to_double(exact)) <= 1e-16 * std::abs(e));
        CHECK(std::abs(e) <= s.u());
    }

    TEST_CASE("rational constants round exactly") {
        FloatFormat s = FloatFormat::single();
        CHECK(round_rational(Rational(1, 10), s) == static_cast<double>(0.1f));
        CHECK(round_rational(Rational(1, 3), s) == static_cast<double>(1.0f / 3.0f));
        CHECK(representable(Rational(3, 4), s));
        CHECK_FALSE(representable(Rational(1, 10), s));
        CHECK(representable(6.0, s));
        CHECK_FALSE(representable(0.1, s));
    }

    TEST_CASE("rounding interval of a toy value") {
        FloatFormat t = FloatFormat::toy();
        // 3 = 2^1 (1 + 8/16): neighbours 2.875 and 3.125
        FloatValue z = decompose(3.0, t);
        RoundingInterval ri = rounding_interval(z, t);
        CHECK(ri.lo == Rational(2.9375));
        CHECK(ri.hi == Rational(3.0625));
        CHECK(next_positive(z, t).value(t) == 3.125);
    }

    TEST_CASE("directed conversions bracket a rational") {
        Rational third(1, 3);
        CHECK(to_rational(to_double_down(third)) <= third);
        CHECK(to_rational(to_double_up(third)) >= third);
        CHECK(to_double_up(third) == std::nextafter(to_double_down(third), 1.0));
    }
}
