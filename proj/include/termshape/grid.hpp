#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "termshape/errors.hpp"
#include "termshape/models.hpp"

namespace termshape::pde {

struct Grid {
    double x_min = 0.0, x_max = 1.0;
    int nx = 801;
    double T = 1.0;
    int nt = 400;

    void validate(models::Domain domain) const {
        if (!(x_min < x_max)) throw ConfigError("grid: x_min must be < x_max");
        if (nx < 3) throw ConfigError("grid too small: nx must be >= 3");
        if (nt < 1) throw ConfigError("grid too small: nt must be >= 1");
        if (!(T > 0.0)) throw ConfigError("grid: T must be positive");
        if (domain == models::Domain::HalfLine && x_min != 0.0)
            throw ConfigError("grid: half-line models require x_min = 0");
    }

    double h() const { return (x_max - x_min) / (nx - 1); }
    double dtau() const { return T / nt; }
    double x(int i) const { return x_min + i * h(); }
    double tau(int j) const { return j * dtau(); }
};

/// Truncation wide enough that boundary influence on rate-sized report
/// regions is negligible; certified at run time by boundary_influence_probe.
inline Grid default_grid(const models::ShortRateModel& model, double x0, double T, int nx = 801,
                         int nt = 400) {
    Grid g;
    const double s0 = std::fabs(model.sigma(x0, 0.0));
    const double D = model.growth_constant();
    const double span = 5.0 + 8.0 * s0 * std::sqrt(T) * (1.0 + D * T);
    g.x_max = x0 + span;
    g.x_min = model.domain() == models::Domain::HalfLine ? 0.0 : x0 - span;
    g.nx = nx;
    g.T = T;
    g.nt = nt;
    return g;
}

/// u(x_i, tau_j) with tau = T - t; column j is the solution after j time
/// steps, column 0 the payoff. Immutable once returned by a solver.
struct PriceSurface {
    Grid grid;
    std::string model_name;
    std::string solver_id;
    std::uint64_t config_hash = 0;
    std::vector<double> values;  // values[j*nx + i]

    double boundary_probe = -1.0;     // filled by boundary_influence_probe runs
    double max_explicit_load = 0.0;   // CFL-style diagnostic
    double min_value = 0.0;
    double growth_fit_M = 0.0;        // smallest M with u <= M max(1, e^{-Mx}) on the grid

    double at(int i, int j) const { return values[static_cast<std::size_t>(j) * grid.nx + i]; }
    double& at(int i, int j) { return values[static_cast<std::size_t>(j) * grid.nx + i]; }

    const double* column(int j) const { return values.data() + static_cast<std::size_t>(j) * grid.nx; }

    /// Linear interpolation in x within column j.
    double interpolate(double x, int j) const {
        const double h = grid.h();
        if (x < grid.x_min || x > grid.x_max) throw ConfigError("interpolate: x outside grid");
        double fi = (x - grid.x_min) / h;
        int i = static_cast<int>(fi);
        if (i >= grid.nx - 1) i = grid.nx - 2;
        const double w = fi - i;
        return (1.0 - w) * at(i, j) + w * at(i + 1, j);
    }
};

}  // namespace termshape::pde
