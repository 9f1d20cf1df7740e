#include "proberr/dists.hpp"
#include "proberr/ds.hpp"

#include <doctest.h>

using namespace proberr;

namespace {
DSStructure mk(std::initializer_list<std::pair<Interval, double>> els) {
    DSStructure d;
    for (const auto& [iv, p] : els) d.elements.emplace_back(iv, p);
    return d;
}
}  // namespace

TEST_SUITE("ds") {
    TEST_CASE("p-box of a structure: upper counts elements starting below, lower those ending below") {
        PBox pb = ds_to_pbox(mk({{{0, 2}, 0.5}, {{1, 3}, 0.5}}));
        CHECK(pb.upper_at(1.0) == doctest::Approx(1.0));
        CHECK(pb.lower_at(1.0) == doctest::Approx(0.0));
        CHECK(pb.lower_at(2.0) == doctest::Approx(0.5));
        CHECK(pb.upper_at(-0.5) == 0.0);
        CHECK(pb.lower_at(3.0) == doctest::Approx(1.0));
        CHECK(pb.valid());
    }

    TEST_CASE("independent combination") {
        DSStructure z = ind_combine(mk({{{0, 1}, 0.5}, {{1, 2}, 0.5}}), mk({{{10, 20}, 1.0}}), ArithOp::Add);
        REQUIRE(z.size() == 2);
        CHECK(z.elements[0].iv == Interval{10, 21});
        CHECK(z.elements[0].p() == doctest::Approx(0.5));
        DSStructure q = ind_combine(mk({{{1, 2}, 1.0}}), mk({{{-2, -1}, 1.0}}), ArithOp::Div);
        CHECK(q.elements[0].iv.lo <= -2.0);
        CHECK(q.elements[0].iv.hi >= -0.5);
        CHECK(negate(mk({{{1, 2}, 1.0}})).elements[0].iv == Interval{-2, -1});
    }

    TEST_CASE("sum of two independent uniforms encloses the triangular CDF") {
        auto u = make_uniform(0, 1);
        DSStructure z = ind_combine(discretize(*u, 50), discretize(*u, 50), ArithOp::Add);
        PBox pb = ds_to_pbox(condense(z, 50));
        for (double x = 0.0; x <= 2.0; x += 0.01) {
            double f = x <= 1 ? x * x / 2 : 1 - (2 - x) * (2 - x) / 2;
            CHECK(pb.lower_at(x) <= f + 1e-12);
            CHECK(pb.upper_at(x) >= f - 1e-12);
        }
    }

    TEST_CASE("condense keeps mass and encloses the original envelope") {
        auto d = truncate(make_normal(0, 1), {-5, 5});
        DSStructure z = ind_combine(discretize(*d, 40), discretize(*d, 40), ArithOp::Mul);
        DSStructure c = condense(z, 30);
        CHECK(c.size() <= 30);
        CHECK(c.total_min() == doctest::Approx(z.total_min()));
        CHECK(envelope_contains(ds_to_pbox(c), ds_to_pbox(z)));
    }

    TEST_CASE("p-box to structure and back stays inside the envelope") {
        auto d = make_uniform(-1, 3);
        PBox pb = ds_to_pbox(discretize(*d, 20));
        DSStructure back = pbox_to_ds(pb, 10);
        CHECK(back.size() <= 10);
        CHECK(back.total_min() == doctest::Approx(1.0));
        CHECK(envelope_contains(ds_to_pbox(back), pb));
    }

    TEST_CASE("interval probability") {
        PBox pb = ds_to_pbox(mk({{{0, 1}, 0.25}, {{1, 2}, 0.25}, {{2, 3}, 0.5}}));
        Interval p = prob_between(pb, 1.0, 2.0);
        CHECK(p.lo <= 0.25 + 1e-12);
        CHECK(p.hi >= 0.25);
        CHECK(p.hi <= 1.0);
    }

    TEST_CASE("csv export") {
        std::string csv = to_csv(ds_to_pbox(mk({{{0, 1}, 1.0}})));
        CHECK(csv.rfind("x,cdf_lo,cdf_hi\n", 0) == 0);
    }
}
