#include "proberr/errdist.hpp"

#include <doctest.h>

#include <cmath>

using namespace proberr;

TEST_SUITE("errdist") {
    TEST_CASE("typical density closed form") {
        CHECK(typical_density(0.0) == 0.75);
        CHECK(typical_density(0.5) == 0.75);
        // w = 1/0.8 - 1 = 0.25: 0.125 + 0.015625
        CHECK(typical_density(0.8) == doctest::Approx(0.140625));
        CHECK(typical_density(-0.8) == doctest::Approx(0.140625));
        CHECK(typical_density(1.0) == 0.0);
        CHECK(typical_density(1.5) == 0.0);
        CHECK(typical_cdf(0.0) == doctest::Approx(0.5));
        CHECK(typical_cdf(1.0) == doctest::Approx(1.0));
        CHECK(typical_cdf(-0.5) == doctest::Approx(0.5 - 0.375));
    }

    TEST_CASE("exact density in a toy format integrates to the continuous mass") {
        FloatFormat t = FloatFormat::toy();
        ErrorDistribution e = exact_error_density(make_uniform(2, 4), t);
        CHECK(e.method == ErrorDistribution::Method::Exact);
        CHECK(e.continuous_mass() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(e.atom_zero == 0.0);
        CHECK(e.remainder == 0.0);
    }

    TEST_CASE("toy density matches a direct count of rounding errors") {
        // uniform(2,4) in p = 4: every cell of width 1/8 contributes the same
        // t-profile, so P[E <= 0] = 1/2 by symmetry within each cell
        FloatFormat t = FloatFormat::toy();
        ErrorDistribution e = exact_error_density(make_uniform(2, 4), t);
        PBox pb = error_pbox(e);
        CHECK(pb.lower_at(0.0) <= 0.5 + 1e-9);
        CHECK(pb.upper_at(0.0) >= 0.5 - 1e-9);
    }

    TEST_CASE("model selection") {
        CHECK(select_error_model(make_uniform(2, 4), FloatFormat::toy()).method == ErrorDistribution::Method::Exact);
        CHECK(select_error_model(truncate(make_normal(0, 1), {-5, 5}), FloatFormat::single()).method ==
              ErrorDistribution::Method::HighPrecision);
        CHECK(select_error_model(make_uniform(4, 32), FloatFormat::single()).method ==
              ErrorDistribution::Method::Typical);
        CHECK(equiprobable_significands(*make_uniform(4, 32)));
        CHECK_FALSE(equiprobable_significands(*make_uniform(4, 6)));
        CHECK_FALSE(equiprobable_significands(*make_uniform(-4, 4)));
    }

    TEST_CASE("remainder of the high-precision form") {
        FloatFormat s = FloatFormat::single();
        ErrorDistribution n = hp_error_density(truncate(make_normal(0, 1), {-10, 10}), s);
        CHECK(n.remainder > 0);
        CHECK(n.remainder <= 3.2e-7);
        ErrorDistribution u = hp_error_density(make_uniform(-2, 2), s);
        CHECK(u.remainder <= 1.2e-7);
    }

    TEST_CASE("atoms of a distribution reaching zero and overflow") {
        FloatFormat h = FloatFormat::half();
        ErrorDistribution z = hp_error_density(make_uniform(-1, 1), h);
        // mass below half the smallest normal flushes: 2^-15 on each side over width 2
        CHECK(z.atom_zero == doctest::Approx(std::ldexp(1.0, -15)).epsilon(1e-9));
        CHECK(z.atom_underflow > 0);
        ErrorDistribution o = hp_error_density(make_uniform(60000, 70000), h);
        CHECK(o.atom_overflow > 0);
        CHECK_THROWS(error_pbox(o));
    }

    TEST_CASE("error structure: n slices plus the atoms, unit mass") {
        ErrorDistribution e = hp_error_density(make_uniform(-1, 1), FloatFormat::half());
        DSStructure d = error_ds(e, 20);
        CHECK(d.total_min() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(d.size() <= 22);
        PBox pb = error_pbox(e);
        CHECK(pb.valid());
    }

    TEST_CASE("covariance bounds") {
        CovarianceBounds c = covariance_bounds(make_uniform(-2, 2), FloatFormat::single());
        CHECK(c.lo == 0.0);
        CHECK(c.hi == 0.0);
        CovarianceBounds d = covariance_bounds(make_uniform(2, 4), FloatFormat::single());
        CHECK(d.lo < d.hi);
        CHECK(std::abs(d.lo) < 1e-6);
    }

    TEST_CASE("density csv") {
        std::string csv = density_csv(typical_error_distribution(make_uniform(4, 32), FloatFormat::single()));
        CHECK(csv.rfind("t,density,cdf_lo,cdf_hi\n", 0) == 0);
    }
}
