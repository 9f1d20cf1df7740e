#include "proberr/montecarlo.hpp"
#include "proberr/parser.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace proberr;

TEST_SUITE("montecarlo") {
    TEST_CASE("a constant output has a constant error") {
        Program p = parse_program("x ~ uniform(0, 1)\nz = 0.1 * 1\n");
        MonteCarloConfig cfg;
        cfg.samples = 1000;
        auto r = monte_carlo(p, FloatFormat::single(), cfg);
        REQUIRE(r.values.size() == 1000);
        const double expect = std::fabs(0.1 - static_cast<double>(0.1f));
        for (std::size_t i = 0; i < r.values.size(); ++i) {
            CHECK(r.values[i] == static_cast<double>(0.1f));
            CHECK(r.abs_errors[i] == doctest::Approx(expect).epsilon(1e-6));
        }
    }

    TEST_CASE("input rounding stays within one unit roundoff") {
        Program p = parse_program("x ~ uniform(0, 1)\nz = x\n");
        MonteCarloConfig cfg;
        cfg.samples = 20000;
        auto r = monte_carlo(p, FloatFormat::single(), cfg);
        double worst = 0;
        for (double e : r.rel_errors) worst = std::max(worst, std::fabs(e));
        CHECK(worst <= 1.0);
        CHECK(worst > 0.9);
    }

    TEST_CASE("results do not depend on the worker count") {
        Program p = parse_program("x ~ uniform(1, 2)\ny ~ normal(0, 1) in [-3, 3]\nz = (x + y) * x\n");
        MonteCarloConfig a;
        a.samples = 5001;
        a.seed = 7;
        MonteCarloConfig b = a;
        b.workers = 3;
        auto ra = monte_carlo(p, FloatFormat::single(), a);
        auto rb = monte_carlo(p, FloatFormat::single(), b);
        CHECK(ra.values == rb.values);
        CHECK(ra.abs_errors == rb.abs_errors);
        MonteCarloConfig c = a;
        c.seed = 8;
        CHECK(monte_carlo(p, FloatFormat::single(), c).values != ra.values);
    }

    TEST_CASE("DKW check and quantiles") {
        PBox pb;
        pb.grid = {0, 0.5, 1};
        pb.cdf_lo = {0, 0.5, 1};
        pb.cdf_hi = {0, 0.5, 1};
        std::vector<double> xs;
        for (int i = 0; i < 1000; ++i) xs.push_back((i + 0.5) / 1000.0);
        auto ok = dkw_check(pb, xs);
        CHECK(ok.inside);
        CHECK(ok.epsilon == doctest::Approx(std::sqrt(std::log(200.0) / 2000.0)));
        std::vector<double> shifted;
        for (double x : xs) shifted.push_back(x * 0.5);
        CHECK_FALSE(dkw_check(pb, shifted).inside);
        CHECK(empirical_quantile(xs, 0.5) == doctest::Approx(0.4995));
        CHECK(empirical_quantile(xs, 1.0) == doctest::Approx(0.9995));
        std::string csv = ecdf_csv(xs, 10);
        CHECK(csv.rfind("x,ecdf\n", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
    }
}
