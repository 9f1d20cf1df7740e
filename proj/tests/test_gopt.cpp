#include "proberr/gopt.hpp"

#include <doctest.h>

using namespace proberr;

TEST_SUITE("gopt") {
    TEST_CASE("x (1 - x) on [0, 1]") {
        ExprPool p;
        SymId x = p.var("x");
        SymId f = p.mul(x, p.sub(p.constant(1.0), x));
        GoptResult r = maximize(p, f, {{0, 1}});
        CHECK(r.converged);
        CHECK(r.upper >= 0.25);
        CHECK(r.upper <= 0.25 + 1e-9);
        CHECK(r.lower <= 0.25);
        CHECK(r.lower >= 0.25 - 1e-9);
    }

    TEST_CASE("a constraint moves the maximum") {
        ExprPool p;
        SymId x = p.var("x");
        SymId f = p.mul(x, p.sub(p.constant(1.0), x));
        // only x in [0, 0.2] allowed: max is 0.2 * 0.8
        BoxConstraint c{x, {{0, 0.2}}};
        GoptResult r = maximize(p, f, {{0, 1}}, {c});
        CHECK(r.upper >= 0.16);
        CHECK(r.upper <= 0.16 + 1e-8);
        // an unsatisfiable constraint
        BoxConstraint none{x, {{5, 6}}};
        GoptResult e = maximize(p, f, {{0, 1}}, {none});
        CHECK(e.infeasible);
    }

    TEST_CASE("union of boxes and two variables") {
        ExprPool p;
        SymId x = p.var("x"), y = p.var("y");
        SymId f = p.sub(p.mul(x, y), p.mul(x, x));
        // on [0,1]^2 the max of xy - x^2 is 1/4 at x = 1/2, y = 1
        GoptResult a = maximize(p, f, {{0, 1}, {0, 1}});
        CHECK(a.upper == doctest::Approx(0.25).epsilon(1e-8));
        CHECK(a.upper >= 0.25);
        GoptResult b = maximize_boxes(p, f, {{{0, 0.25}, {0, 1}}, {{0.75, 1}, {0, 1}}});
        // x = 1/4 gives 3/16
        CHECK(b.upper == doctest::Approx(0.1875).epsilon(1e-8));
        CHECK(b.upper >= 0.1875);
        CHECK_THROWS(maximize(p, f, {{0, 1}}));
    }

    TEST_CASE("problem text round trip") {
        ExprPool p;
        SymId x = p.var("x"), y = p.var("y");
        SymId f = p.add(p.abs(p.sub(x, y)), p.mul(p.constant(Interval{0.5, 0.5}), x));
        std::string text = optimizer_problem(p, f, {{-1, 2}, {0, 3}});
        ExprPool q;
        OptimizerProblem op = parse_optimizer_problem(q, text);
        REQUIRE(op.box.size() == 2);
        CHECK(op.box[0] == Interval{-1, 2});
        GoptResult r1 = maximize(p, f, {{-1, 2}, {0, 3}});
        GoptResult r2 = maximize(q, op.f, op.box);
        // |(-1) - 3| + -0.5 = 3.5
        CHECK(r1.upper == doctest::Approx(3.5).epsilon(1e-9));
        CHECK(r2.upper == doctest::Approx(r1.upper).epsilon(1e-12));
        CHECK_THROWS(parse_optimizer_problem(q, "var x 0 1\nmax x +\n"));
    }

    TEST_CASE("external optimizer") {
        ExprPool p;
        SymId x = p.var("x");
        SymId f = p.mul(x, p.sub(p.constant(1.0), x));
        GoptConfig cfg;
        cfg.optimizer_cmd = std::string(PROBERR_CLI_PATH) + " optimize -";
        GoptResult r = maximize(p, f, {{0, 1}}, {}, cfg);
        CHECK(r.upper >= 0.25);
        CHECK(r.upper <= 0.25 + 1e-9);
        CHECK_THROWS(run_external_optimizer("false", "var x 0 1\nmax x\n"));
    }
}
