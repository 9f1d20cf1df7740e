#include "proberr/parser.hpp"
#include "proberr/saform.hpp"

#include <doctest.h>

#include <cmath>

using namespace proberr;

namespace {

double fp_eval(const std::string& which, double x, double y, const FloatFormat& f) {
    double xr = round_value(x, f), yr = round_value(y, f);
    if (which == "div") {
        double s = round_value(xr + yr, f);
        double q = round_value(s / yr, f);
        double c = round_value(0.1, f);
        return round_value(q - round_value(c * xr, f), f);
    }
    return round_value(xr * yr, f);
}

}  // namespace

TEST_SUITE("saform") {
    TEST_CASE("a product of exact inputs has error u |x y|") {
        Program prog = parse_program("x ~ uniform(1, 2) exact\ny ~ uniform(1, 2) exact\nz = x * y\n");
        ExprPool pool;
        pool.var("x");
        pool.var("y");
        FloatFormat f = FloatFormat::single();
        SAContext ctx(pool, f);
        ctx.set_domain({{1, 2}, {1, 2}});
        ErrorFormResult r = build_error_form(ctx, prog);
        CHECK(r.output.err.terms.size() == 1);
        SymId mag = ctx.magnitude(r.output.err);
        Interval m = pool.eval(mag, {{1.5, 1.5}, {1.5, 1.5}});
        CHECK(m.contains(2.25 * f.u()));
        CHECK(m.width() <= 1e-20);
        Interval whole = ctx.concretize(r.output.err, {{1, 2}, {1, 2}});
        CHECK(whole.hi >= 4 * f.u());
        CHECK(whole.lo <= -4 * f.u());
    }

    TEST_CASE("error bound dominates the observed error") {
        Program prog = parse_program("x ~ uniform(1, 2)\ny ~ uniform(1, 2)\nz = (x + y) / y - 0.1 * x\n");
        ExprPool pool;
        pool.var("x");
        pool.var("y");
        FloatFormat f = FloatFormat::single();
        SAContext ctx(pool, f);
        ctx.set_domain({{1, 2}, {1, 2}});
        ErrorFormResult r = build_error_form(ctx, prog);
        SymId mag = ctx.magnitude(r.output.err);
        CHECK(ctx.noise_origins().size() >= 6);

        Rng rng(5);
        auto u = make_uniform(1, 2);
        double worst_ratio = 0;
        for (int k = 0; k < 5000; ++k) {
            double x = draw(*u, rng), y = draw(*u, rng);
            long double ref = (static_cast<long double>(x) + y) / y - 0.1L * x;
            double err = static_cast<double>(std::fabs(ref - fp_eval("div", x, y, f)));
            double bound = pool.eval(mag, {{x, x}, {y, y}}).hi;
            CHECK(err <= bound);
            worst_ratio = std::max(worst_ratio, err / bound);
        }
        // the bound is not vacuous either
        CHECK(worst_ratio > 0.05);
    }

    TEST_CASE("shared subterms stay shared") {
        Program prog = parse_program("x ~ uniform(1, 2)\nt = x * x\nz = t + t\n");
        ExprPool pool;
        SAContext ctx(pool, FloatFormat::single());
        ErrorFormResult r = build_error_form(ctx, prog);
        // x, x*x, and the sum
        CHECK(r.dag.nodes.size() == 3);
        // input rounding, the second-order product term, product rounding
        // and sum rounding
        CHECK(ctx.noise_origins().size() == 4);
    }

    TEST_CASE("exactly representable constants are free when requested") {
        Program prog = parse_program("x ~ uniform(1, 2) exact\nz = 0.5 * x\n");
        ExprPool p1, p2;
        SAContext plain(p1, FloatFormat::single(), false), exact(p2, FloatFormat::single(), true);
        plain.set_domain({{1, 2}});
        exact.set_domain({{1, 2}});
        auto a = build_error_form(plain, prog);
        auto b = build_error_form(exact, prog);
        CHECK(b.output.err.terms.size() < a.output.err.terms.size());
    }
}
