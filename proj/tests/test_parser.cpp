#include "proberr/parser.hpp"

#include <doctest.h>

using namespace proberr;

namespace {

ParseError::Category category_of(const std::string& text) {
    try {
        parse_program(text);
    } catch (const ParseError& e) {
        return e.category();
    }
    FAIL("no parse error");
    return ParseError::Category::Syntax;
}

}  // namespace

TEST_SUITE("parser") {
    TEST_CASE("quotient program") {
        Program p = parse_program("x ~ uniform(1, 2)\ny ~ uniform(1, 2)\nz = (x + y) / y\n");
        REQUIRE(p.decls.size() == 2);
        CHECK(p.decls[0].kind == "uniform");
        CHECK(p.decls[0].params == std::vector<double>{1, 2});
        ExprPtr expect = Expr::binary(ArithOp::Div,
                                      Expr::binary(ArithOp::Add, Expr::variable("x"), Expr::variable("y")),
                                      Expr::variable("y"));
        CHECK(same_expr(p.output().expr, expect));
        CHECK(p.output().name == "z");
        Dag d = build_dag(p);
        // x, y, x + y, and the quotient; y appears once
        CHECK(d.nodes.size() == 4);
    }

    TEST_CASE("precedence and unary minus") {
        Program p = parse_program("a ~ uniform(0, 1)\nr = -a * 2 - 3 / a\n");
        ExprPtr expect = Expr::binary(
            ArithOp::Sub,
            Expr::binary(ArithOp::Mul, Expr::negate(Expr::variable("a")), Expr::constant(Rational(2), "2")),
            Expr::binary(ArithOp::Div, Expr::constant(Rational(3), "3"), Expr::variable("a")));
        CHECK(same_expr(p.output().expr, expect));
    }

    TEST_CASE("decimal literals are exact") {
        CHECK(parse_rational("0.1") == Rational(1, 10));
        CHECK(parse_rational("1e-3") == Rational(1, 1000));
        CHECK(parse_rational("3/4") == Rational(3, 4));
        CHECK(parse_rational("2.5E2") == Rational(250));
    }

    TEST_CASE("error categories and positions") {
        CHECK(category_of("x ~ uniform(0, 1)\nz = x + w\n") == ParseError::Category::Undeclared);
        CHECK(category_of("x ~ uniform(0, 1)\nz = sin(x)\n") == ParseError::Category::Unsupported);
        CHECK(category_of("x ~ uniform(0, 1)\nz = (x + 1\n") == ParseError::Category::Syntax);
        CHECK(category_of("x ~ uniform(1, 0)\nz = x\n") == ParseError::Category::Semantic);
        CHECK(category_of("x ~ uniform(0, 1)\n") == ParseError::Category::Semantic);
        CHECK(category_of("x ~ uniform(0, 1)\nx = x\n") == ParseError::Category::Semantic);
        try {
            parse_program("x ~ uniform(0, 1)\nz = x * q\n");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.pos().line == 2);
            CHECK(e.pos().col == 9);
            CHECK(e.category_name() == "undeclared");
        }
    }

    TEST_CASE("declarations of every form") {
        Program p = parse_program(
            "# comment\n"
            "a ~ uniform(0, 1)\n"
            "b ~ normal(0, 1) in [-3, 3]\n"
            "w ~ normal in [20, 20000]\n"
            "p ~ piecewise([0, 0.25, 1], [[2], [0.6666]]) exact\n"
            "z = a + b + w + p  # trailing\n");
        CHECK(p.decls[1].range.has_value());
        CHECK(p.decls[2].shorthand);
        CHECK(p.decls[3].exact);
        CHECK(p.decls[2].make()->support().lo == 20);
        CHECK(p.decls[1].make()->support().hi == 3);
    }

    TEST_CASE("print then parse is the identity") {
        const char* src =
            "x ~ uniform(-1, 2)\ny ~ normal(0, 1) in [-3, 3]\nv ~ laplace in [0, 1]\n"
            "t = x * x - 0.1\nz = -(t / (y + 4)) + 1/3\n";
        Program p = parse_program(src);
        Program q = parse_program(p.print());
        CHECK(same_program(p, q));
        CHECK(q.print() == p.print());
    }

    TEST_CASE("FPCore import") {
        Program p = import_fpcore(
            "(FPCore (x y) :name \"q\" :pre (and (<= 1 x 2) (<= 1 y 2)) (let ((s (+ x y))) (/ s y)))");
        REQUIRE(p.decls.size() == 2);
        CHECK(p.decls[0].kind == "uniform");
        CHECK(p.decls[1].params == std::vector<double>{1, 2});
        Program q = parse_program("x ~ uniform(1, 2)\ny ~ uniform(1, 2)\nresult = (x + y) / y\n");
        CHECK(same_expr(p.output().expr, q.output().expr));

        Program n = import_fpcore("(FPCore (x) :pre (<= -1 x 1) (* x x))", "normal");
        CHECK(n.decls[0].shorthand);
        CHECK_THROWS_AS(import_fpcore("(FPCore (x) (* x x))"), ParseError);
        CHECK_THROWS_AS(import_fpcore("(FPCore (x) :pre (<= 0 x 1) (sin x))"), ParseError);
    }
}
