#include <doctest.h>

#include <cmath>

#include "termshape/expr.hpp"
#include "termshape/models.hpp"
#include "termshape/shape.hpp"

using namespace termshape;
using models::Domain;
using models::RegistryParams;

namespace {

RegistryParams vasicek_params() {
    RegistryParams p;
    p.scalars = {{"k", 0.86}, {"theta", 0.08}, {"sigma", 0.01}};
    return p;
}

}  // namespace

TEST_CASE("registry coefficients") {
    const auto v = models::registry("V", vasicek_params());
    CHECK(v.beta(0.05, 0.0) == doctest::Approx(0.86 * 0.03).epsilon(1e-14));
    CHECK(v.domain() == Domain::FullLine);
    CHECK_FALSE(v.time_dependent());

    const auto cir = models::registry("CIR", shape::stock_params("CIR"));
    CHECK(cir.alpha(0.0, 1.0) == 0.0);  // sigma sqrt(x) vanishes at 0
    CHECK(cir.domain() == Domain::HalfLine);
    CHECK(cir.beta(0.0, 0.0) == doctest::Approx(0.5 * 0.06));

    const auto d = models::registry("D", shape::stock_params("D"));
    CHECK(d.beta(0.0, 0.0) == 0.0);
    CHECK(d.sigma(2.0, 0.0) == doctest::Approx(0.15 * 2.0));

    const auto hw = models::registry("HW", shape::stock_params("HW"));
    CHECK(hw.time_dependent());
    CHECK(hw.beta(0.0, 0.0) == doctest::Approx(0.5 * 0.05));
}

TEST_CASE("registry parameter constraints") {
    RegistryParams bad;
    bad.scalars = {{"lambda", 0.5}, {"gamma", 1.0}, {"sigma", 0.2}};
    bad.theta_table = models::PiecewiseLinear(0.08);
    CHECK_THROWS_AS(models::registry("MM", bad), ConfigError);  // lambda >= gamma

    RegistryParams neg = vasicek_params();
    neg.scalars["k"] = -1.0;
    CHECK_THROWS_AS(models::registry("V", neg), ConfigError);
    CHECK_THROWS_AS(models::registry("nope", vasicek_params()), ConfigError);
}

TEST_CASE("analytic derivatives match finite differences") {
    for (const char* name : {"V", "CIR", "D", "EV", "HW", "BK", "MM"}) {
        const auto m = models::registry(name, shape::stock_params(name));
        for (double x : {1e-3, 0.05, 0.5, 2.0, 10.0}) {
            if (m.domain() == Domain::FullLine && x < 0.01) continue;
            for (double t : {0.0, 1.5}) {
                // step balancing the -a/x truncation error of the lognormal
                // drifts against second-difference rounding of the linear ones
                const double h = std::max(2e-3 * std::fabs(x), 1.8e-6);
                const double fd_bxx = (m.beta(x + h, t) - 2 * m.beta(x, t) + m.beta(x - h, t)) / (h * h);
                const double fd_axx =
                    (m.alpha(x + h, t) - 2 * m.alpha(x, t) + m.alpha(x - h, t)) / (h * h);
                const double scale_b = std::max(1.0, std::fabs(m.beta_xx(x, t)));
                const double scale_a = std::max(1.0, std::fabs(m.alpha_xx(x, t)));
                CHECK(std::fabs(m.beta_xx(x, t) - fd_bxx) / scale_b < 1e-6);
                CHECK(std::fabs(m.alpha_xx(x, t) - fd_axx) / scale_a < 1e-6);
            }
        }
    }
}

TEST_CASE("growth bounds hold with the stored constant on the standard envelope") {
    for (const char* name : {"V", "CIR", "D", "EV", "HW", "BK", "MM"}) {
        const auto m = models::registry(name, shape::stock_params(name));
        const double lo = m.domain() == Domain::HalfLine ? 0.0 : -50.0;
        bool ok = true;
        for (int i = 0; i <= 1000; ++i) {
            const double x = lo + (50.0 - lo) * i / 1000.0;
            for (double t : {0.0, 2.5, 5.0, 10.0}) ok = ok && m.growth_bounds_ok(x, t);
        }
        CHECK_MESSAGE(ok, name);
    }
}

TEST_CASE("custom model agrees with registry twin") {
    const auto drift = expr::Expression::parse("k*(theta-x)");
    const auto vol = expr::Expression::parse("sigma");
    const auto m = models::custom(drift, vol, Domain::FullLine,
                                  {{"k", 0.86}, {"theta", 0.08}, {"sigma", 0.01}});
    const auto v = models::registry("V", vasicek_params());
    for (double x : {-1.0, 0.0, 0.05, 2.0})
        for (double t : {0.0, 3.0}) {
            CHECK(m.beta(x, t) == doctest::Approx(v.beta(x, t)).epsilon(1e-12));
            CHECK(m.sigma(x, t) == doctest::Approx(v.sigma(x, t)).epsilon(1e-12));
        }
    CHECK_FALSE(m.time_dependent());
}

TEST_CASE("rate cap shape") {
    const models::RateCap cap{2.0, 1.0};
    CHECK(cap(1.0) == 1.0);                        // identity region
    CHECK(cap(2.0) == 2.0);
    CHECK(cap(3.0) == doctest::Approx(cap(4.0)));  // constant region
    CHECK(cap(3.0) == doctest::Approx(2.0 + 1.0 / 3.0));

    // concavity (midpoint test), monotonicity and f(x) <= x on [K'-1, K'+2]
    double prev = cap(1.0);
    for (int i = 0; i <= 300; ++i) {
        const double x = 1.0 + 3.0 * i / 300.0;
        const double f = cap(x);
        CHECK(f <= x + 1e-15);
        CHECK(f >= prev - 1e-15);
        prev = f;
        if (i >= 1 && i <= 299) {
            const double h = 3.0 / 300.0;
            CHECK(cap(x - h) + cap(x + h) - 2.0 * f <= 1e-12);
        }
    }
}

TEST_CASE("cap is monotone in the cap level") {
    const models::RateCap c1{1.0, 1.0}, c2{2.0, 1.0};
    for (int i = 0; i <= 400; ++i) {
        const double x = -1.0 + 6.0 * i / 400.0;
        CHECK(c1(x) <= c2(x) + 1e-15);
        CHECK(c2(x) <= x + 1e-15);
    }
}

TEST_CASE("payoff flag validation helpers") {
    const auto p = models::unit_payoff();
    // unit payoff: trivially decreasing and midpoint-convex on any grid
    for (int i = 1; i < 1000; ++i) {
        const double x0 = -5.0 + 10.0 * (i - 1) / 1000.0;
        const double x1 = -5.0 + 10.0 * i / 1000.0;
        CHECK(p.g(x0) >= p.g(x1));
    }
    CHECK(p.g(0.0) == 1.0);
}
