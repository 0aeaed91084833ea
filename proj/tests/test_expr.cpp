#include <doctest.h>

#include <cmath>

#include "termshape/expr.hpp"
#include "termshape/rng.hpp"

using termshape::expr::Expression;
using termshape::expr::EvalError;
using termshape::expr::ParamMap;
using termshape::expr::ParseError;

TEST_CASE("parse collects parameters") {
    const auto e = Expression::parse("k*(theta - x)");
    REQUIRE(e.parameters().size() == 2);
    CHECK(e.parameters()[0] == "k");
    CHECK(e.parameters()[1] == "theta");

    const auto ev = Expression::parse("x*(eta - a*ln(x))");
    REQUIRE(ev.parameters().size() == 2);
    CHECK(ev.parameters()[0] == "eta");
    CHECK(ev.parameters()[1] == "a");
}

TEST_CASE("syntax error carries byte offset") {
    try {
        Expression::parse("2*(1+");
        FAIL("expected a parse error");
    } catch (const ParseError& err) {
        CHECK(err.offset() == 5);
    }
    CHECK_THROWS_AS(Expression::parse("foo(x)"), ParseError);       // unknown function
    CHECK_THROWS_AS(Expression::parse("min(x)"), ParseError);       // arity
    CHECK_THROWS_AS(Expression::parse("ln(x, t)"), ParseError);     // arity
    CHECK_THROWS_AS(Expression::parse("x + * 2"), ParseError);
    CHECK_THROWS_AS(Expression::parse("x 2"), ParseError);          // trailing input
}

TEST_CASE("evaluation follows standard precedence") {
    CHECK(Expression::parse("k*(theta-x)").eval(0.05, 0.0, {{"k", 2.0}, {"theta", 0.1}}) ==
          doctest::Approx(0.1).epsilon(1e-15));
    CHECK(Expression::parse("x^2").eval(-3.0, 0.0) == doctest::Approx(9.0));
    CHECK(Expression::parse("2+3*4").eval(0, 0) == doctest::Approx(14.0));
    CHECK(Expression::parse("2*3^2").eval(0, 0) == doctest::Approx(18.0));
    CHECK(Expression::parse("2^3^2").eval(0, 0) == doctest::Approx(512.0));   // right assoc
    CHECK(Expression::parse("-x^2").eval(2, 0) == doctest::Approx(-4.0));     // ^ binds tighter
    CHECK(Expression::parse("2^-1").eval(0, 0) == doctest::Approx(0.5));
    CHECK(Expression::parse("min(x, t)").eval(1, 2) == doctest::Approx(1.0));
    CHECK(Expression::parse("max(x, t)").eval(1, 2) == doctest::Approx(2.0));
    CHECK(Expression::parse("abs(-x)").eval(3, 0) == doctest::Approx(3.0));
    CHECK(Expression::parse("exp(ln(x))").eval(1.7, 0) == doctest::Approx(1.7));
    CHECK(Expression::parse("1 - 2 - 3").eval(0, 0) == doctest::Approx(-4.0));  // left assoc
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(Expression::parse("ln(x)").eval(0.0, 0.0), EvalError);
    CHECK_THROWS_AS(Expression::parse("ln(x)").eval(-1.0, 0.0), EvalError);
    CHECK_THROWS_AS(Expression::parse("sqrt(x)").eval(-1e-9, 0.0), EvalError);
    CHECK_THROWS_AS(Expression::parse("1/x").eval(0.0, 0.0), EvalError);
    CHECK_THROWS_AS(Expression::parse("x^0.5").eval(-2.0, 0.0), EvalError);
    CHECK_THROWS_AS(Expression::parse("k*x").eval(1.0, 0.0), EvalError);  // unbound parameter
}

TEST_CASE("finite-difference derivatives") {
    const ParamMap none;
    CHECK(Expression::parse("x^2").derivative_fd(1.0, 0.0, none, 2, 1e-4) ==
          doctest::Approx(2.0).epsilon(1e-6));
    CHECK(Expression::parse("k*(theta-x)")
              .derivative_fd(0.3, 0.0, {{"k", 2.0}, {"theta", 0.1}}, 2, 1e-4) ==
          doctest::Approx(0.0).epsilon(1e-8));
    // beta = x(1 - 0.5 ln x): beta_xx = -a/x with a = 0.5, so -0.25 at x = 2
    CHECK(Expression::parse("x*(1-0.5*ln(x))").derivative_fd(2.0, 0.0, none, 2, 1e-5) ==
          doctest::Approx(-0.25).epsilon(1e-6));
    CHECK(Expression::parse("x^3").derivative_fd(2.0, 0.0, none, 1) ==
          doctest::Approx(12.0).epsilon(1e-8));
    // domain error inside the stencil propagates
    CHECK_THROWS_AS(Expression::parse("ln(x)").derivative_fd(5e-7, 0.0, none, 1, 1e-6), EvalError);
}

TEST_CASE("print/parse round trip evaluates identically on random points") {
    const char* sources[] = {
        "k*(theta - x)", "x*(eta - a*ln(abs(x)+1))", "exp(-x*t) + sqrt(abs(x))",
        "min(x, max(t, 0.5)) * (1 + x^2)", "-x^3 / (1 + t) + 2^x",
    };
    termshape::rng::PathStream stream(7, 0);
    for (const char* src : sources) {
        const auto a = Expression::parse(src);
        const auto b = Expression::parse(a.print());
        ParamMap params;
        for (const auto& p : a.parameters()) params[p] = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double x = 4.0 * stream.normal();
            const double t = std::fabs(stream.normal());
            for (auto& kv : params) kv.second = stream.normal();
            double va, vb;
            try {
                va = a.eval(x, t, params);
            } catch (const EvalError&) {
                CHECK_THROWS_AS(b.eval(x, t, params), EvalError);
                continue;
            }
            vb = b.eval(x, t, params);
            CHECK(va == doctest::Approx(vb).epsilon(1e-15));
        }
    }
}
