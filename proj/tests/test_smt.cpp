#include "proberr/smt.hpp"

#include <doctest.h>

using namespace proberr;

namespace {
SolverConfig z3() {
    SolverConfig c;
    c.cmd = PROBERR_SOLVER_CMD;
    c.timeout_s = 10;
    return c;
}
Constraint over_x(std::initializer_list<std::string> asserts) {
    Constraint c;
    c.declare("x");
    for (const auto& a : asserts) c.add(a);
    return c;
}
}  // namespace

TEST_SUITE("smt") {
    TEST_CASE("exact number encoding") {
        CHECK(smt_number(0.75) == "(/ 3.0 4.0)");
        CHECK(smt_number(-2.0) == "(- 2.0)");
        CHECK(smt_number(5.0) == "5.0");
        CHECK(smt_in("x", {1, 2}) == "(and (<= 1.0 x) (<= x 2.0))");
        CHECK_THROWS(smt_number(INFINITY));
    }

    TEST_CASE("sat and unsat") {
        SolverSession s(z3());
        CHECK(s.check(over_x({"(= (* x x) 2.0)", "(> x 0.0)"})) == SatResult::Sat);
        CHECK(s.check(over_x({"(< (* x x) 0.0)"})) == SatResult::Unsat);
        // every query starts from a clean state
        CHECK(s.check(over_x({"(> x 1.0)"})) == SatResult::Sat);
        CHECK(s.stats().queries == 3);
    }

    TEST_CASE("model witness") {
        SolverSession s(z3());
        std::optional<Interval> w;
        CHECK(s.check(over_x({"(= (* 4.0 x) 3.0)"}), "x", w) == SatResult::Sat);
        REQUIRE(w);
        CHECK(w->contains(0.75));
    }

    TEST_CASE("pruning shrinks to the feasible set") {
        SolverSession s(z3());
        auto r = prune_interval(s, over_x({"(<= (* x x) 4.0)"}), "x", {-10, 10}, 1e-6);
        REQUIRE(r);
        CHECK(r->lo <= -2.0);
        CHECK(r->lo >= -2.0 - 1e-6);
        CHECK(r->hi >= 2.0);
        CHECK(r->hi <= 2.0 + 1e-6);
        CHECK_FALSE(prune_interval(s, over_x({"(> x 20.0)"}), "x", {-10, 10}, 1e-6));
    }

    TEST_CASE("a missing solver is an error") {
        SolverConfig c;
        c.cmd = "/nonexistent/solver-binary";
        c.timeout_s = 1;
        SolverSession s(c);
        CHECK_THROWS_AS(s.check(over_x({"(> x 1.0)"})), SolverError);
    }

    TEST_CASE("a silent solver is killed and restarted") {
        SolverConfig c;
        c.cmd = "sleep 30";
        c.timeout_s = 0.2;
        c.grace_s = 0.1;
        SolverSession s(c);
        CHECK(s.check(over_x({"(> x 1.0)"})) == SatResult::Unknown);
        CHECK(s.stats().restarts == 1);
    }

    TEST_CASE("pool results are independent of scheduling") {
        SolverConfig c = z3();
        c.workers = 2;
        c.log = std::make_shared<QueryLog>();
        SolverPool pool(c);
        std::vector<SatResult> out(6);
        pool.run(6, [&](std::size_t i, SolverSession& s) {
            out[i] = s.check(over_x({"(> x " + std::to_string(i) + ".0)", "(< x 3.0)"}));
        });
        for (std::size_t i = 0; i < 6; ++i) CHECK(out[i] == (i < 3 ? SatResult::Sat : SatResult::Unsat));
        CHECK(pool.stats().queries == 6);
        CHECK(c.log->size() == 6);
    }
}
