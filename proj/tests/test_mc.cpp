#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "termshape/affine.hpp"
#include "termshape/expr.hpp"
#include "termshape/mc.hpp"
#include "termshape/shape.hpp"

using namespace termshape;

namespace {

double oracle_bond(const affine::AffineParams& p, double x0, double T) {
    const auto sol = affine::riccati_bond(p, T, 4096);
    return sol.bond(x0, sol.tau.size() - 1);
}

}  // namespace

TEST_CASE("deterministic model prices exactly with zero stderr") {
    const auto m = models::custom(expr::Expression::parse("0"), expr::Expression::parse("0"),
                                  models::Domain::FullLine, {}, "flat");
    mc::McConfig cfg;
    cfg.n_paths = 64;
    cfg.n_steps = 16;
    const auto est = mc::price(m, models::unit_payoff(), 0.05, 0.0, 1.0, cfg);
    CHECK(est.mean == doctest::Approx(std::exp(-0.05)).epsilon(1e-12));
    CHECK(est.stderr_ == 0.0);
}

TEST_CASE("scheme/domain combinations are validated") {
    const auto cir = models::registry("CIR", shape::stock_params("CIR"));
    mc::McConfig cfg;
    cfg.scheme = mc::Scheme::Euler;
    CHECK_THROWS_AS(mc::price(cir, models::unit_payoff(), 0.04, 0.0, 1.0, cfg), ConfigError);
    cfg.scheme = mc::Scheme::ExactOu;
    CHECK_THROWS_AS(mc::price(cir, models::unit_payoff(), 0.04, 0.0, 1.0, cfg), ConfigError);
    cfg.scheme = mc::Scheme::FullTruncationEuler;
    CHECK_NOTHROW(mc::price(cir, models::unit_payoff(), 0.04, 0.0, 0.5, {100, 10, 1, cfg.scheme}));
}

TEST_CASE("vasicek euler price sits within 3 stderr of the riccati oracle") {
    const auto m = models::registry("V", shape::stock_params("V"));
    mc::McConfig cfg;
    cfg.n_paths = 40000;
    cfg.n_steps = 250;
    cfg.seed = 42;
    const auto est = mc::price(m, models::unit_payoff(), 0.05, 0.0, 1.0, cfg);
    const double oracle = oracle_bond(affine::AffineParams::vasicek(0.86, 0.08, 0.01), 0.05, 1.0);
    CHECK(std::fabs(est.mean - oracle) <= 3.0 * est.stderr_);
}

TEST_CASE("cir full truncation sits within 3 stderr of the riccati oracle") {
    const auto m = models::registry("CIR", shape::stock_params("CIR"));
    mc::McConfig cfg;
    cfg.n_paths = 40000;
    cfg.n_steps = 250;
    cfg.seed = 4242;
    cfg.scheme = mc::Scheme::FullTruncationEuler;
    const auto est = mc::price(m, models::unit_payoff(), 0.04, 0.0, 1.0, cfg);
    const double oracle = oracle_bond(affine::AffineParams::cir(0.5, 0.06, 0.2), 0.04, 1.0);
    CHECK(std::fabs(est.mean - oracle) <= 3.0 * est.stderr_);
}

TEST_CASE("estimates are bit-identical across runs and worker counts") {
    const auto m = models::registry("V", shape::stock_params("V"));
    mc::McConfig cfg;
    cfg.n_paths = 30000;  // spans several reduction blocks
    cfg.n_steps = 20;
    cfg.seed = 7;
    setenv("TERMSHAPE_THREADS", "2", 1);
    const auto a = mc::price(m, models::unit_payoff(), 0.05, 0.0, 1.0, cfg);
    setenv("TERMSHAPE_THREADS", "1", 1);
    const auto b = mc::price(m, models::unit_payoff(), 0.05, 0.0, 1.0, cfg);
    unsetenv("TERMSHAPE_THREADS");
    const auto c = mc::price(m, models::unit_payoff(), 0.05, 0.0, 1.0, cfg);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_ == b.stderr_);
    CHECK(a.mean == c.mean);
}

TEST_CASE("antithetic variates leave the mean unbiased") {
    const auto m = models::registry("V", shape::stock_params("V"));
    mc::McConfig plain;
    plain.n_paths = 40000;
    plain.n_steps = 50;
    plain.seed = 99;
    mc::McConfig anti = plain;
    anti.antithetic = true;
    const auto a = mc::price(m, models::unit_payoff(), 0.05, 0.0, 1.0, plain);
    const auto b = mc::price(m, models::unit_payoff(), 0.05, 0.0, 1.0, anti);
    const double combined = std::hypot(a.stderr_, b.stderr_);
    CHECK(std::fabs(a.mean - b.mean) <= 4.0 * combined);
    CHECK(b.stderr_ < a.stderr_);  // pairing reduces variance for this payoff
}

TEST_CASE("coupled compare: identical models give exactly zero difference") {
    const auto m = models::registry("V", shape::stock_params("V"));
    mc::McConfig cfg;
    cfg.n_paths = 5000;
    cfg.n_steps = 50;
    const auto res = mc::coupled_compare(m, m, models::unit_payoff(), 0.05, 0.0, 1.0, cfg);
    CHECK(res.diff_mean == 0.0);
    CHECK(res.diff_stderr == 0.0);
}

TEST_CASE("coupled compare: volatility and drift monotonicity have the predicted sign") {
    mc::McConfig cfg;
    cfg.n_paths = 20000;
    cfg.n_steps = 100;
    cfg.seed = 11;

    auto p_lo = shape::stock_params("V");
    auto p_hi = p_lo;
    p_hi.scalars["sigma"] = 0.02;
    const auto res = mc::coupled_compare(models::registry("V", p_hi), models::registry("V", p_lo),
                                         models::unit_payoff(), 0.05, 0.0, 5.0, cfg);
    CHECK(res.diff_mean >= -3.0 * res.diff_stderr);  // sigma up => price up

    auto p_drift_hi = p_lo;
    p_drift_hi.scalars["theta"] = 0.10;  // larger drift
    const auto res2 = mc::coupled_compare(models::registry("V", p_lo),
                                          models::registry("V", p_drift_hi), models::unit_payoff(),
                                          0.05, 0.0, 5.0, cfg);
    CHECK(res2.diff_mean >= -3.0 * res2.diff_stderr);  // beta up => price down
}

TEST_CASE("exact ou moments: driftless limit matches the brownian closed forms") {
    models::OuParams ou{0.0, models::PiecewiseLinear(0.0), 0.3};
    const auto m = mc::exact_ou_moments(ou, 0.07, 0.0, 2.0);
    CHECK(m.mean_x == doctest::Approx(0.07));
    CHECK(m.mean_int == doctest::Approx(0.14));
    CHECK(m.var_x == doctest::Approx(0.09 * 2.0));
    CHECK(m.cov == doctest::Approx(0.5 * 0.09 * 4.0));
    CHECK(m.var_int == doctest::Approx(0.09 * 8.0 / 3.0));
}

TEST_CASE("exact ou moments: sigma = 0 collapses to the deterministic pair") {
    models::OuParams ou{0.5, models::PiecewiseLinear(0.08), 0.0};
    const auto m = mc::exact_ou_moments(ou, 0.05, 0.0, 3.0);
    CHECK(m.var_x == 0.0);
    CHECK(m.var_int == 0.0);
    rng::PathStream s(1, 0);
    const auto draw = mc::exact_ou_sample(ou, 0.05, 0.0, 3.0, s);
    CHECK(draw.first == doctest::Approx(m.mean_x));
    CHECK(draw.second == doctest::Approx(m.mean_int));
}

TEST_CASE("exact ou moments agree with euler sample moments") {
    const auto v = models::registry("V", shape::stock_params("V"));
    const models::OuParams& ou = *v.ou_params();
    const auto m = mc::exact_ou_moments(ou, 0.05, 0.0, 2.0);

    const int n_paths = 20000, n_steps = 10000;
    double sx = 0.0, si = 0.0, sxx = 0.0, sii = 0.0;
    for (int p = 0; p < n_paths; ++p) {
        rng::PathStream stream(123, static_cast<std::uint64_t>(p));
        double x = 0.05, integral = 0.0;
        const double dt = 2.0 / n_steps, sdt = std::sqrt(dt);
        for (int i = 0; i < n_steps; ++i) {
            const double xn = x + v.beta(x, 0.0) * dt + v.sigma(x, 0.0) * sdt * stream.normal();
            integral += 0.5 * (x + xn) * dt;
            x = xn;
        }
        sx += x; si += integral; sxx += x * x; sii += integral * integral;
    }
    const double mx = sx / n_paths, mi = si / n_paths;
    const double vx = sxx / n_paths - mx * mx, vi = sii / n_paths - mi * mi;
    CHECK(std::fabs(mx - m.mean_x) <= 4.0 * std::sqrt(m.var_x / n_paths));
    CHECK(std::fabs(mi - m.mean_int) <= 4.0 * std::sqrt(m.var_int / n_paths));
    CHECK(vx == doctest::Approx(m.var_x).epsilon(0.05));
    CHECK(vi == doctest::Approx(m.var_int).epsilon(0.05));
}

TEST_CASE("exact ou bond price agrees with riccati and euler") {
    const auto v = models::registry("V", shape::stock_params("V"));
    mc::McConfig exact;
    exact.n_paths = 200000;
    exact.n_steps = 1;
    exact.seed = 5;
    exact.scheme = mc::Scheme::ExactOu;
    const auto ee = mc::price(v, models::unit_payoff(), 0.05, 0.0, 5.0, exact);
    const double oracle = oracle_bond(affine::AffineParams::vasicek(0.86, 0.08, 0.01), 0.05, 5.0);
    CHECK(std::fabs(ee.mean - oracle) <= 3.0 * ee.stderr_);

    mc::McConfig euler;
    euler.n_paths = 40000;
    euler.n_steps = 500;
    euler.seed = 6;
    const auto eu = mc::price(v, models::unit_payoff(), 0.05, 0.0, 5.0, euler);
    CHECK(std::fabs(ee.mean - eu.mean) <= 4.0 * std::hypot(ee.stderr_, eu.stderr_));
}

TEST_CASE("trapezoid discount bias decays monotonically under step doubling") {
    const auto v = models::registry("V", shape::stock_params("V"));
    const double oracle = oracle_bond(affine::AffineParams::vasicek(0.86, 0.08, 0.01), 0.05, 5.0);
    mc::McConfig cfg;
    cfg.n_paths = 200000;
    cfg.seed = 31;
    double prev = 1e9;
    for (int steps : {10, 20, 40, 80}) {
        cfg.n_steps = steps;
        const auto est = mc::price(v, models::unit_payoff(), 0.05, 0.0, 5.0, cfg);
        const double gap = std::fabs(est.mean - oracle);
        CHECK(gap < prev);
        prev = gap;
    }
}

TEST_CASE("capped discounting raises the price, less so for higher caps") {
    const auto d = models::registry("D", shape::stock_params("D"));
    mc::McConfig base;
    base.n_paths = 20000;
    base.n_steps = 250;
    base.seed = 55;
    base.scheme = mc::Scheme::FullTruncationEuler;
    const double x0 = 0.5, T = 5.0;
    const auto plain = mc::price(d, models::unit_payoff(), x0, 0.0, T, base);

    mc::McConfig c1 = base;
    c1.rate_cap = models::RateCap{1.0, 1.0};
    mc::McConfig c2 = base;
    c2.rate_cap = models::RateCap{2.0, 1.0};
    const auto p1 = mc::price(d, models::unit_payoff(), x0, 0.0, T, c1);
    const auto p2 = mc::price(d, models::unit_payoff(), x0, 0.0, T, c2);
    // common random numbers make the ordering hold pathwise
    CHECK(p1.mean >= p2.mean);
    CHECK(p2.mean >= plain.mean);

    mc::McConfig bad = base;
    bad.scheme = mc::Scheme::ExactOu;
    bad.rate_cap = models::RateCap{1.0, 1.0};
    const auto v = models::registry("V", shape::stock_params("V"));
    CHECK_THROWS_AS(mc::price(v, models::unit_payoff(), 0.05, 0.0, 1.0, bad), ConfigError);
}

TEST_CASE("continuity experiment: constant sequence prices are all equal") {
    const auto v = models::registry("V", shape::stock_params("V"));
    mc::McConfig cfg;
    cfg.n_paths = 2000;
    cfg.n_steps = 50;
    const auto res = mc::continuity_experiment({v, v, v}, v, models::unit_payoff(), 0.05, 0.0, 1.0,
                                               cfg);
    REQUIRE(res.mollified.size() == 3);
    for (const auto& est : res.mollified) CHECK(est.mean == res.limit.mean);
    for (double s : res.sup_dist_sq) CHECK(s == 0.0);
}
