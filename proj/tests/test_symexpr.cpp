#include "proberr/symexpr.hpp"

#include <doctest.h>

using namespace proberr;

TEST_SUITE("symexpr") {
    TEST_CASE("hash-consing shares structure") {
        ExprPool p;
        SymId x = p.var("x"), y = p.var("y");
        CHECK(p.var("x") == x);
        CHECK(p.add(x, y) == p.add(y, x));
        CHECK(p.mul(x, y) == p.mul(y, x));
        CHECK(p.sub(x, y) != p.sub(y, x));
        std::size_t before = p.size();
        p.mul(p.add(x, y), p.add(y, x));
        // both sums already exist; only the product is new
        CHECK(p.size() == before + 1);
    }

    TEST_CASE("local simplification") {
        ExprPool p;
        SymId x = p.var("x");
        SymId zero = p.constant(0.0), one = p.constant(1.0);
        CHECK(p.add(x, zero) == x);
        CHECK(p.mul(x, one) == x);
        CHECK(p.is_zero(p.mul(x, zero)));
        CHECK(p.div(x, one) == x);
        CHECK(p.neg(p.neg(x)) == x);
        CHECK(p.abs(p.abs(x)) == p.abs(x));
        SymId c = p.add(p.constant(2.0), p.constant(3.0));
        REQUIRE(p.is_const(c));
        CHECK(p.node(c).c == Interval{5, 5});
        CHECK(p.constant(-0.0) == zero);
    }

    TEST_CASE("derivatives") {
        ExprPool p;
        SymId x = p.var("x"), y = p.var("y");
        const int ix = p.var_index("x");
        SymId sq = p.mul(x, x);
        SymId d = p.derivative(sq, ix);
        CHECK(p.eval(d, {{3, 3}, {0, 0}}) == Interval{6, 6});
        // d/dx (x / y) = 1 / y
        SymId q = p.derivative(p.div(x, y), ix);
        Interval v = p.eval(q, {{1, 1}, {4, 4}});
        CHECK(v.contains(0.25));
        // d/dx |x| is sign(x)
        SymId a = p.derivative(p.abs(x), ix);
        CHECK(p.contains_op(a, SymOp::Sign));
        CHECK(p.eval(a, {{-2, -1}, {0, 0}}) == Interval{-1, -1});
        CHECK(p.is_zero(p.derivative(y, ix)));
        CHECK(p.derivative(sq, ix) == d);
    }

    TEST_CASE("interval evaluation encloses point values") {
        ExprPool p;
        SymId x = p.var("x");
        SymId f = p.mul(x, p.sub(p.constant(1.0), x));
        Interval r = p.eval(f, {{0, 1}});
        CHECK(r.lo <= 0.0);
        CHECK(r.hi >= 0.25);
        for (double t : {0.0, 0.1, 0.5, 0.9, 1.0}) CHECK(r.contains(t * (1 - t)));
        CHECK(p.vars_of(f) == std::vector<int>{0});
        CHECK(p.to_string(f).find('x') != std::string::npos);
    }

    TEST_CASE("division by an interval containing zero throws") {
        ExprPool p;
        SymId x = p.var("x"), y = p.var("y");
        SymId f = p.div(x, y);
        CHECK_THROWS_AS(p.eval(f, {{1, 2}, {-1, 1}}), DivisionByZero);
        CompiledExprs prog(p, {f, p.add(x, y)});
        auto v = prog.eval({{1, 2}, {2, 4}});
        REQUIRE(v.size() == 2);
        CHECK(v[0].contains(0.25));
        CHECK(v[0].contains(1.0));
        CHECK(v[1] == Interval{3, 6});
    }
}
