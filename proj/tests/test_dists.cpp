#include "proberr/dists.hpp"

#include <doctest.h>

#include <cmath>

using namespace proberr;

TEST_SUITE("dists") {
    TEST_CASE("uniform") {
        auto d = make_uniform(2, 6);
        CHECK(d->cdf(3) == doctest::Approx(0.25));
        CHECK(d->pdf(4) == doctest::Approx(0.25));
        CHECK(d->quantile(0.5) == doctest::Approx(4));
        CHECK(d->mass(5, 100) == doctest::Approx(0.25));
        CHECK(d->first_moment(2, 6) == doctest::Approx(4));
        REQUIRE(d->uniform_support());
        CHECK(*d->uniform_support() == Interval{2, 6});
    }

    TEST_CASE("normal against tabulated values") {
        auto d = make_normal(0, 1);
        CHECK(d->cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-12));
        CHECK(d->cdf(-3) == doctest::Approx(0.0013498980316301).epsilon(1e-10));
        CHECK(d->pdf(0) == doctest::Approx(0.3989422804014327));
        // upper tail without cancellation
        CHECK(d->mass(8, 9) == doctest::Approx(6.2209605742717e-16 - 1.1285884059538e-19).epsilon(1e-6));
    }

    TEST_CASE("truncation renormalizes") {
        auto d = truncate(make_normal(0, 1), {-1, 1});
        CHECK(d->mass(-1, 1) == doctest::Approx(1.0));
        // phi(0) / (Phi(1) - Phi(-1))
        CHECK(d->pdf(0) == doctest::Approx(0.3989422804014327 / 0.6826894921370859));
        CHECK(d->support() == Interval{-1, 1});
        CHECK(d->pdf(1.5) == 0.0);
    }

    TEST_CASE("builtin families by name") {
        CHECK(kind_from_name("laplace") == BuiltinKind::Laplace);
        CHECK_THROWS(kind_from_name("cauchy"));
        auto e = make_builtin({BuiltinKind::Exponential, {2.0}}, Interval{0, 10});
        CHECK(e->cdf(1) == doctest::Approx((1 - std::exp(-2.0)) / (1 - std::exp(-20.0))));
        auto b = make_builtin({BuiltinKind::Beta, {2.0, 2.0}});
        // Beta(2,2): 6x(1-x)
        CHECK(b->pdf(0.5) == doctest::Approx(1.5));
        CHECK(b->cdf(0.5) == doctest::Approx(0.5));
        auto r = make_builtin({BuiltinKind::Rayleigh, {1.0}}, Interval{0, 5});
        CHECK(r->pdf(1) == doctest::Approx(std::exp(-0.5) / (1 - std::exp(-12.5))));
    }

    TEST_CASE("piecewise polynomial density") {
        auto d = make_piecewise({0, 0.25, 1}, {{2.0}, {2.0 / 3.0}});
        CHECK(d->cdf(0.25) == doctest::Approx(0.5));
        CHECK(d->quantile(0.75) == doctest::Approx(0.625));
        CHECK(d->first_moment(0, 1) == doctest::Approx(2 * 0.03125 + (2.0 / 3.0) * (0.5 - 0.03125)));
        auto lin = make_piecewise({0, 1}, {{0.0, 2.0}});
        CHECK(lin->cdf(0.5) == doctest::Approx(0.25));
        CHECK_THROWS(make_piecewise({0, 1}, {{-1.0}}));
        CHECK_THROWS(make_piecewise({1, 0}, {{1.0}}));
    }

    TEST_CASE("discretization schemes") {
        auto d = make_uniform(0, 1);
        DSStructure w = discretize(*d, 4);
        REQUIRE(w.size() == 4);
        CHECK(w.elements[1].iv == Interval{0.25, 0.5});
        CHECK(w.elements[1].p() == doctest::Approx(0.25));
        auto n = truncate(make_normal(0, 1), {-4, 4});
        DSStructure m = discretize(*n, 10, Discretization::EqualMass);
        for (const auto& f : m.elements) CHECK(f.p() == doctest::Approx(0.1).epsilon(1e-9));
        CHECK_THROWS(discretize(*make_normal(0, 1), 10));
    }

    TEST_CASE("sampling is seeded and matches the CDF") {
        auto d = truncate(make_normal(1, 2), {-3, 5});
        auto a = sample(*d, 7, 20000), b = sample(*d, 7, 20000);
        CHECK(a == b);
        CHECK(ks_statistic(a, [&](double x) { return d->cdf(x); }) < ks_critical(a.size()));
    }
}
