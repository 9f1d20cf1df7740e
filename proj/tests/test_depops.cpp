#include "proberr/depops.hpp"
#include "proberr/dists.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace proberr;

namespace {

std::vector<double> masses(const DSStructure& ds) {
    std::vector<double> p;
    for (const auto& e : ds.elements) p.push_back(e.p());
    return p;
}

// every sample CDF value inside the envelope, up to the DKW band at 99.9%
void check_envelope(const PBox& pb, std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    const double eps = std::sqrt(std::log(2.0 / 0.001) / (2.0 * n));
    for (double t : pb.grid) {
        double f = static_cast<double>(std::upper_bound(xs.begin(), xs.end(), t) - xs.begin()) / n;
        CHECK(pb.lower_at(t) <= f + eps);
        CHECK(pb.upper_at(t) >= f - eps);
    }
}

}  // namespace

TEST_SUITE("depops") {
    TEST_CASE("threshold selection") {
        std::vector<DepCell> cells{{0, 0, {0, 1}, true}, {0, 1, {0.5, 2}, true}, {1, 0, {10, 11}, false}};
        auto all = select_evaluation_points(cells, 10);
        CHECK(all == std::vector<double>{0, 0.5, 1, 2});
        auto two = select_evaluation_points(cells, 2);
        CHECK(two.size() <= 2);
        CHECK(two.back() == 2.0);
        CHECK_THROWS(select_evaluation_points(cells, 0));
    }

    TEST_CASE("envelope of a 2x2 sum") {
        std::vector<DepCell> cells{
            {0, 0, {0, 1}, true}, {0, 1, {1, 2}, true}, {1, 0, {1, 2}, true}, {1, 1, {2, 3}, true}};
        PBox pb = envelope_from_cells(cells, {0.5, 0.5}, {0.5, 0.5}, {0, 1, 1.5, 2, 3});
        REQUIRE(pb.valid());
        // F(2) >= mass off cell (1,1), which is at least 1/2
        CHECK(pb.lower_at(2.0) == doctest::Approx(0.5).epsilon(1e-7));
        CHECK(pb.upper_at(1.5) == doctest::Approx(1.0).epsilon(1e-7));
        CHECK(pb.lower_at(1.5) <= 1e-8);
        CHECK(pb.upper_at(3.0) == 1.0);
    }

    TEST_CASE("(x + y) / y without a solver") {
        const std::size_t n = 20;
        DSStructure dx = discretize(*make_uniform(1, 2), n);
        DSStructure dy = discretize(*make_uniform(1, 2), n);
        Trace tx, ty;
        tx.add_input("x_x", {1, 2});
        ty.add_input("x_y", {1, 2});
        Trace ts = tx;
        ts.merge(ty);
        ts.add(TraceFact::operation("s", "x_x", ArithOp::Add, "x_y"));
        DSStructure ds = condense(ind_combine(dx, dy, ArithOp::Add), n);

        DepOpConfig cfg;
        cfg.n_out = n;
        cfg.budget = n;
        DepOpResult r = dep_op(ds, dy, ArithOp::Div, ts, ty, "s", "x_y", "q", nullptr, cfg);
        CHECK(r.stats.cells == n * n);
        CHECK(r.stats.contractor_infeasible > 0);
        // independence would give [1, 4]; the true range is [1.5, 3]
        Interval sup = r.pbox.support();
        CHECK(sup.lo > 1.2);
        CHECK(sup.hi < 3.6);
        CHECK(r.trace.shares_inputs(tx));

        Rng rng(11);
        auto u = make_uniform(1, 2);
        std::vector<double> zs;
        for (int k = 0; k < 20000; ++k) {
            double x = draw(*u, rng), y = draw(*u, rng);
            zs.push_back((x + y) / y);
        }
        check_envelope(r.pbox, zs);
        CHECK(masses(r.ds).size() <= n);
    }

    TEST_CASE("x - x collapses with a solver") {
        DSStructure dx = discretize(*make_uniform(0, 1), 10);
        Trace t;
        t.add_input("x_x", {0, 1});
        DepOpConfig cfg;
        cfg.n_out = 10;
        cfg.budget = 10;

        DepOpResult plain = dep_op(dx, dx, ArithOp::Sub, t, t, "x_x", "x_x", "z", nullptr, cfg);
        CHECK(plain.pbox.support().width() <= 0.2 + 1e-12);

        SolverConfig sc;
        sc.cmd = PROBERR_SOLVER_CMD;
        SolverPool pool(sc);
        DepOpResult r = dep_op(dx, dx, ArithOp::Sub, t, t, "x_x", "x_x", "z", &pool, cfg);
        CHECK(r.pbox.support().lo <= 0.0);
        CHECK(r.pbox.support().hi >= 0.0);
        CHECK(r.pbox.support().width() < 1e-5);
        CHECK(pool.stats().queries > 0);
    }

    TEST_CASE("witnesses replace feasibility queries") {
        const std::size_t n = 8;
        const double u = 0x1p-24, mn = 0x1p-126;
        DSStructure d = discretize(*make_uniform(-4, 4), n);
        Trace tx, ty;
        tx.add_input("x_x", {-4, 4});
        tx.add(TraceFact::rounding("n0", "x_x", "e0", u, mn, true));
        ty.add_input("x_y", {-4, 4});
        ty.add(TraceFact::rounding("n1", "x_y", "e1", u, mn, true));
        Trace tp = tx;
        tp.merge(ty);
        tp.add(TraceFact::operation("s2", "n0", ArithOp::Mul, "n1"));
        DSStructure dp = condense(ind_combine(d, d, ArithOp::Mul), n);

        SolverConfig sc;
        sc.cmd = PROBERR_SOLVER_CMD;
        SolverPool pool(sc);
        DepOpConfig cfg;
        cfg.n_out = n;
        cfg.budget = n;
        cfg.prune_seconds = 0;
        // x*y paired with x: every cell whose x-part is compatible is witnessed
        DepOpResult r = dep_op(dp, d, ArithOp::Add, tp, tx, "s2", "n0", "z", &pool, cfg);
        const std::size_t refuted = r.stats.contractor_infeasible + r.stats.solver_infeasible;
        CHECK(r.stats.witnessed > 0);
        CHECK(r.stats.witnessed + refuted <= r.stats.cells);
        CHECK(r.stats.pruned == 0);
        // only cells left undecided by propagation and witnesses reach the solver
        CHECK(pool.stats().queries <= r.stats.cells - r.stats.witnessed - r.stats.contractor_infeasible);

        Rng rng(5);
        auto uni = make_uniform(-4, 4);
        std::vector<double> zs;
        for (int k = 0; k < 20000; ++k) {
            double x = draw(*uni, rng), y = draw(*uni, rng);
            zs.push_back(x * y + x);
        }
        check_envelope(r.pbox, zs);
    }

    TEST_CASE("a zero pruning budget keeps the contracted cells") {
        DSStructure dx = discretize(*make_uniform(0, 1), 10);
        Trace t;
        t.add_input("x_x", {0, 1});
        DepOpConfig cfg;
        cfg.n_out = 10;
        cfg.budget = 10;
        cfg.prune_seconds = 0;
        SolverConfig sc;
        sc.cmd = PROBERR_SOLVER_CMD;
        SolverPool pool(sc);
        DepOpResult r = dep_op(dx, dx, ArithOp::Sub, t, t, "x_x", "x_x", "z", &pool, cfg);
        DepOpResult plain = dep_op(dx, dx, ArithOp::Sub, t, t, "x_x", "x_x", "z", nullptr, cfg);
        CHECK(r.stats.pruned == 0);
        CHECK(r.pbox.support().lo == plain.pbox.support().lo);
        CHECK(r.pbox.support().hi == plain.pbox.support().hi);
        CHECK(r.pbox.support().contains(0.0));
    }
}
