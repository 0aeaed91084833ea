#include "termshape/checks.hpp"

#include <algorithm>
#include <cmath>

namespace termshape::checks {

namespace {

double surface_scale(const pde::PriceSurface& s) {
    double m = 0.0;
    for (double v : s.values) m = std::max(m, std::fabs(v));
    return m;
}

struct Window {
    int i_lo, i_hi;  // inclusive
};

Window window(const pde::Grid& grid, const CheckConfig& cfg) {
    int trim = static_cast<int>(cfg.trim_fraction * grid.nx);
    int lo = trim, hi = grid.nx - 1 - trim;
    if (cfg.x_lo) lo = std::max(lo, static_cast<int>(std::ceil((*cfg.x_lo - grid.x_min) / grid.h() - 1e-9)));
    if (cfg.x_hi) hi = std::min(hi, static_cast<int>(std::floor((*cfg.x_hi - grid.x_min) / grid.h() + 1e-9)));
    if (lo > hi) throw ConfigError("report region is empty on this grid");
    return {lo, hi};
}

}  // namespace

std::pair<int, int> region_indices(const pde::Grid& grid, const CheckConfig& cfg) {
    const Window w = window(grid, cfg);
    return {w.i_lo, w.i_hi};
}

CheckConfig default_region(double x0, double half_width) {
    CheckConfig cfg;
    cfg.x_lo = x0 - half_width;
    cfg.x_hi = x0 + half_width;
    return cfg;
}

CheckReport convexity_check(const pde::PriceSurface& surface, const CheckConfig& cfg) {
    const pde::Grid& g = surface.grid;
    if (g.nx < 3) throw ConfigError("grid too small for a convexity check (nx < 3)");
    const Window w = window(g, cfg);
    const double scale = surface_scale(surface);
    CheckReport rep;
    rep.property = "convexity";
    rep.atol = cfg.atol_factor * scale;
    rep.h2_allowance = cfg.c * cfg.kappa * g.h() * g.h() * scale;
    rep.surface_hash = surface.config_hash;

    double worst = 0.0;
    for (int j = 0; j <= g.nt; ++j) {
        const double* u = surface.column(j);
        for (int i = std::max(w.i_lo, 1); i <= std::min(w.i_hi, g.nx - 2); ++i) {
            const double d2 = u[i - 1] + u[i + 1] - 2.0 * u[i];
            if (-d2 > worst) {
                worst = -d2;
                rep.x = g.x(i);
                rep.tau = g.tau(j);
            }
        }
    }
    rep.violation = worst;
    rep.pass = worst <= rep.tolerance();
    return rep;
}

CheckReport log_curvature_check(const pde::PriceSurface& surface, LogMode mode,
                                const CheckConfig& cfg) {
    const pde::Grid& g = surface.grid;
    if (g.nx < 3) throw ConfigError("grid too small for a log-curvature check (nx < 3)");
    const Window w = window(g, cfg);

    double logscale = 1.0;
    for (int j = 0; j <= g.nt; ++j) {
        const double* u = surface.column(j);
        for (int i = w.i_lo; i <= w.i_hi; ++i) {
            if (!(u[i] > 0.0))
                throw NumericError("log-curvature check: non-positive value in region at x=" +
                                   std::to_string(g.x(i)));
            logscale = std::max(logscale, std::fabs(std::log(u[i])));
        }
    }

    CheckReport rep;
    rep.property = mode == LogMode::Convex ? "log-convexity" : "log-concavity";
    rep.atol = cfg.atol_factor * logscale;
    rep.h2_allowance = cfg.c * cfg.kappa * g.h() * g.h() * logscale;
    rep.surface_hash = surface.config_hash;

    double worst = 0.0;
    for (int j = 0; j <= g.nt; ++j) {
        const double* u = surface.column(j);
        for (int i = std::max(w.i_lo, 1); i <= std::min(w.i_hi, g.nx - 2); ++i) {
            const double d2 = std::log(u[i - 1]) + std::log(u[i + 1]) - 2.0 * std::log(u[i]);
            const double viol = mode == LogMode::Convex ? -d2 : d2;
            if (viol > worst) {
                worst = viol;
                rep.x = g.x(i);
                rep.tau = g.tau(j);
            }
        }
    }
    rep.violation = worst;
    rep.pass = worst <= rep.tolerance();
    return rep;
}

CheckReport monotonicity_x_check(const pde::PriceSurface& surface, const CheckConfig& cfg) {
    const pde::Grid& g = surface.grid;
    const Window w = window(g, cfg);
    const double scale = surface_scale(surface);
    CheckReport rep;
    rep.property = "monotone-decreasing-x";
    rep.atol = cfg.atol_factor * scale;
    rep.h2_allowance = cfg.c * cfg.kappa * g.h() * g.h() * scale;
    rep.surface_hash = surface.config_hash;

    double worst = 0.0;
    for (int j = 0; j <= g.nt; ++j) {
        const double* u = surface.column(j);
        for (int i = w.i_lo; i < w.i_hi; ++i) {
            const double inc = u[i + 1] - u[i];
            if (inc > worst) {
                worst = inc;
                rep.x = g.x(i);
                rep.tau = g.tau(j);
            }
        }
    }
    rep.violation = worst;
    rep.pass = worst <= rep.tolerance();
    return rep;
}

CheckReport dominance_check(const pde::PriceSurface& hi, const pde::PriceSurface& lo,
                            const CheckConfig& cfg) {
    const pde::Grid& g = hi.grid;
    const pde::Grid& g2 = lo.grid;
    if (g.nx != g2.nx || g.nt != g2.nt || g.x_min != g2.x_min || g.x_max != g2.x_max ||
        g.T != g2.T)
        throw ConfigError("dominance check: grid mismatch");
    const Window w = window(g, cfg);
    const double scale = std::max(surface_scale(hi), surface_scale(lo));
    CheckReport rep;
    rep.property = "dominance";
    rep.atol = cfg.atol_factor * scale;
    rep.h2_allowance = cfg.c * cfg.kappa * g.h() * g.h() * scale;
    rep.surface_hash = hi.config_hash ^ (lo.config_hash << 1);

    double worst = 0.0;
    for (int j = 0; j <= g.nt; ++j) {
        const double* a = hi.column(j);
        const double* b = lo.column(j);
        for (int i = w.i_lo; i <= w.i_hi; ++i) {
            const double gap = b[i] - a[i];
            if (gap > worst) {
                worst = gap;
                rep.x = g.x(i);
                rep.tau = g.tau(j);
            }
        }
    }
    rep.violation = worst;
    rep.pass = worst <= rep.tolerance();
    return rep;
}

std::vector<double> duration(const pde::PriceSurface& surface) {
    const pde::Grid& g = surface.grid;
    for (double v : surface.values)
        if (!(v > 0.0)) throw NumericError("duration: surface has non-positive values");
    std::vector<double> out(surface.values.size());
    const double h = g.h();
    for (int j = 0; j <= g.nt; ++j) {
        const double* u = surface.column(j);
        double* d = out.data() + static_cast<std::size_t>(j) * g.nx;
        d[0] = -(std::log(u[1]) - std::log(u[0])) / h;
        for (int i = 1; i < g.nx - 1; ++i)
            d[i] = -(std::log(u[i + 1]) - std::log(u[i - 1])) / (2.0 * h);
        d[g.nx - 1] = -(std::log(u[g.nx - 1]) - std::log(u[g.nx - 2])) / h;
    }
    return out;
}

namespace {

// compact C-infinity bump, psi(0) = 1/e, psi''(0) = -2/e
double bump_psi(double s) {
    if (std::fabs(s) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - s * s));
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z))); }

}  // namespace

CounterexampleResult necessity_counterexample(double x0, double bump_curvature,
                                              const CheckConfig& cfg, double tau_max) {
    const double r = 0.5;
    const double sig = 0.05;
    const double amp = 0.5 * bump_curvature * std::exp(1.0) * r * r;
    if (bump_curvature < 0.0) throw ConfigError("bump curvature must be >= 0");

    models::Coeff drift = [amp, x0, r](double x, double) { return -amp * bump_psi((x - x0) / r); };
    models::Coeff vol = [sig](double, double) { return sig; };
    models::AnalyticDerivs d;
    d.alpha_x = [](double, double) { return 0.0; };
    d.alpha_xx = [](double, double) { return 0.0; };
    const double D = std::max(amp * std::exp(-1.0), sig) + 1.0;
    const models::ShortRateModel model("necessity-bump", models::Domain::FullLine, drift, vol, D,
                                       false, d);

    // convex, decreasing, locally linear (slope -1) at x0, flat to the right
    const double smooth = 0.1;
    const double shift = x0 + 1.5;
    models::Payoff payoff;
    payoff.name = "softplus";
    payoff.g = [smooth, shift](double x) { return smooth * softplus((shift - x) / smooth); };
    payoff.decreasing = true;
    payoff.convex = true;
    payoff.growth_M = 8.0 * (1.0 + std::fabs(shift));
    payoff.growth_K = 1.0;

    pde::Grid grid;
    grid.x_min = x0 - 3.0;
    grid.x_max = x0 + 3.0;
    grid.nx = 1201;
    grid.T = tau_max;
    grid.nt = 200;

    pde::SolverConfig scfg;
    CounterexampleResult res;
    res.surface = pde::solve(model, payoff, grid, scfg);

    const double scale = surface_scale(res.surface);
    const double h = grid.h();
    CheckReport rep;
    rep.property = "necessity-counterexample";
    rep.atol = cfg.atol_factor * scale;
    rep.h2_allowance = cfg.c * cfg.kappa * h * h * scale;
    rep.surface_hash = res.surface.config_hash;
    const double threshold = rep.tolerance();

    const Window w = window(grid, cfg);
    for (int j = 1; j <= grid.nt && !rep.pass; ++j) {
        const double* u = res.surface.column(j);
        for (int i = std::max(w.i_lo, 1); i <= std::min(w.i_hi, grid.nx - 2); ++i) {
            const double uxx = (u[i - 1] - 2.0 * u[i] + u[i + 1]) / (h * h);
            if (uxx < -threshold) {
                rep.pass = true;  // violation detected: the theorem's prediction
                rep.violation = -uxx;
                rep.x = grid.x(i);
                rep.tau = grid.tau(j);
                res.first_violation_tau = grid.tau(j);
                break;
            }
        }
    }
    if (!rep.pass) rep.note = "no convexity violation detected up to tau_max";
    res.report = rep;
    return res;
}

}  // namespace termshape::checks
