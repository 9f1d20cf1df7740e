#include "proberr/lp.hpp"

#include <doctest.h>

using namespace proberr;

namespace {
using Grid = std::vector<std::vector<bool>>;
Grid only(std::size_t n, std::size_t m, std::initializer_list<std::pair<int, int>> cells) {
    Grid g(n, std::vector<bool>(m, false));
    for (auto [i, j] : cells) g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
    return g;
}
}  // namespace

TEST_SUITE("lp") {
    TEST_CASE("Frechet bounds on a 2x2 table") {
        TransportProblem tp{{0.5, 0.5}, {0.5, 0.5}, Grid(2, std::vector<bool>(2, true))};
        Interval b = lp_bounds(tp, only(2, 2, {{0, 0}}));
        CHECK(b.lo <= 0.0);
        CHECK(b.lo >= -kLpWiden - 1e-15);
        CHECK(b.hi >= 0.5);
        CHECK(b.hi <= 0.5 + kLpWiden + 1e-15);
    }

    TEST_CASE("zeroed cells pin the joint") {
        TransportProblem tp{{0.3, 0.7}, {0.3, 0.7}, only(2, 2, {{0, 0}, {1, 1}})};
        Interval b = lp_bounds(tp, only(2, 2, {{0, 0}}));
        CHECK(b.lo == doctest::Approx(0.3).epsilon(1e-8));
        CHECK(b.hi == doctest::Approx(0.3).epsilon(1e-8));
    }

    TEST_CASE("unequal marginals: max of a row is its mass") {
        TransportProblem tp{{0.2, 0.5, 0.3}, {0.6, 0.4}, Grid(3, std::vector<bool>(2, true))};
        Interval b = lp_bounds(tp, only(3, 2, {{1, 0}, {1, 1}}));
        CHECK(b.lo == doctest::Approx(0.5).epsilon(1e-8));
        CHECK(b.hi == doctest::Approx(0.5).epsilon(1e-8));
        // mass on (0,0) and (2,1): at most 0.2 + 0.3, at least 0
        Interval c = lp_bounds(tp, only(3, 2, {{0, 0}, {2, 1}}));
        CHECK(c.hi == doctest::Approx(0.5).epsilon(1e-8));
        CHECK(c.lo <= 1e-8);
    }

    TEST_CASE("infeasible support throws") {
        TransportProblem tp{{0.5, 0.5}, {0.9, 0.1}, only(2, 2, {{0, 0}, {1, 1}})};
        CHECK_THROWS_AS(lp_bounds(tp, only(2, 2, {{0, 0}})), InfeasibleLP);
    }

    TEST_CASE("batched targets agree with single solves") {
        TransportProblem tp{{0.25, 0.25, 0.5}, {0.5, 0.25, 0.25}, Grid(3, std::vector<bool>(3, true))};
        tp.feasible[0][2] = false;
        std::vector<Grid> targets{only(3, 3, {{0, 0}}), only(3, 3, {{2, 2}, {1, 1}})};
        auto many = lp_bounds(tp, targets);
        for (std::size_t k = 0; k < targets.size(); ++k) {
            Interval one = lp_bounds(tp, targets[k]);
            CHECK(many[k].lo == doctest::Approx(one.lo));
            CHECK(many[k].hi == doctest::Approx(one.hi));
        }
    }
}
