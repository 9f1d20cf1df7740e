#include "proberr/fpcore.hpp"
#include "proberr/interval.hpp"

#include <doctest.h>

#include <cmath>

using namespace proberr;

namespace {
// infinite endpoints are unbounded sides
bool encloses(const Interval& iv, const Rational& exact) {
    bool lo_ok = iv.lo == -INFINITY || (std::isfinite(iv.lo) && to_rational(iv.lo) <= exact);
    bool hi_ok = iv.hi == INFINITY || (std::isfinite(iv.hi) && exact <= to_rational(iv.hi));
    return lo_ok && hi_ok;
}
}  // namespace

TEST_SUITE("interval") {
    TEST_CASE("sums and products enclose the exact real result") {
        const double xs[] = {0.1, 0.2, 1.0 / 3.0, -7.25, 1e-300, 3e200};
        for (double a : xs)
            for (double b : xs) {
                Rational ra = to_rational(a), rb = to_rational(b);
                CHECK(encloses(Interval{a} + Interval{b}, ra + rb));
                CHECK(encloses(Interval{a} - Interval{b}, ra - rb));
                CHECK(encloses(Interval{a} * Interval{b}, ra * rb));
                CHECK(encloses(Interval{a} / Interval{b}, ra / rb));
            }
    }

    TEST_CASE("exact operations stay points") {
        CHECK(Interval{0.5} + Interval{0.25} == Interval{0.75});
        CHECK(Interval{3.0} * Interval{-2.0} == Interval{-6.0});
        CHECK(Interval{1.0} / Interval{4.0} == Interval{0.25});
    }

    TEST_CASE("products over mixed signs") {
        Interval r = Interval{-2, 3} * Interval{-1, 4};
        CHECK(r.lo == -8.0);
        CHECK(r.hi == 12.0);
        CHECK(isqr(Interval{-3, 2}) == Interval{0, 9});
        CHECK(iabs(Interval{-3, 2}) == Interval{0, 3});
        CHECK(iabs(Interval{-3, -2}) == Interval{2, 3});
    }

    TEST_CASE("division by an interval containing zero throws") {
        CHECK_THROWS_AS((Interval{1.0} / Interval{-1, 1}), DivisionByZero);
    }

    TEST_CASE("hull, intersection, sign") {
        CHECK(hull(Interval{0, 1}, Interval{3, 4}) == Interval{0, 4});
        CHECK(intersect(Interval{0, 2}, Interval{1, 3}) == Interval{1, 2});
        CHECK(intersect(Interval{0, 1}, Interval{2, 3}).is_empty());
        CHECK(isign(Interval{1, 2}) == Interval{1, 1});
        CHECK(isign(Interval{-1, 2}) == Interval{-1, 1});
        CHECK(Interval{-3, 2}.mig() == 0.0);
        CHECK(Interval{-3, -2}.mig() == 2.0);
    }
}
