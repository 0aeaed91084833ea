#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "termshape/grid.hpp"
#include "termshape/pde.hpp"

namespace termshape::checks {

enum class LogMode { Convex, Concave };

struct CheckConfig {
    // tolerance = atol_factor*scale + c*kappa*h^2*scale; kappa is the measured
    // second-difference error constant of the scheme, c the safety factor
    double atol_factor = 1e-10;
    double c = 10.0;
    double kappa = 0.01;
    // report region: explicit [x_lo, x_hi] clip on top of a trim that drops
    // the fraction of grid points nearest each truncation boundary
    std::optional<double> x_lo, x_hi;
    double trim_fraction = 0.05;
};

struct CheckReport {
    std::string property;
    bool pass = false;
    double violation = 0.0;  // worst violation magnitude (0 if none)
    double x = 0.0, tau = 0.0;
    double atol = 0.0, h2_allowance = 0.0;
    std::uint64_t surface_hash = 0;
    std::string note;

    double tolerance() const { return atol + h2_allowance; }
};

/// Index window [first, last] of the report region on a grid.
std::pair<int, int> region_indices(const pde::Grid& grid, const CheckConfig& cfg);

/// Default pricing report region: rates within +-1 of the spot, clipped to
/// the trimmed grid.
CheckConfig default_region(double x0, double half_width = 1.0);

/// min over the region of u[i-1][j] + u[i+1][j] - 2 u[i][j] >= -tolerance.
CheckReport convexity_check(const pde::PriceSurface& surface, const CheckConfig& cfg = {});

/// Second-difference test applied to ln u; requires u > 0 on the region.
CheckReport log_curvature_check(const pde::PriceSurface& surface, LogMode mode,
                                const CheckConfig& cfg = {});

/// u non-increasing in x across the region, all tau.
CheckReport monotonicity_x_check(const pde::PriceSurface& surface, const CheckConfig& cfg = {});

/// surface_hi >= surface_lo - tolerance pointwise (identical grids).
CheckReport dominance_check(const pde::PriceSurface& hi, const pde::PriceSurface& lo,
                            const CheckConfig& cfg = {});

/// -d/dx ln u by central differences (one-sided at the grid ends).
/// Same layout as the surface values.
std::vector<double> duration(const pde::PriceSurface& surface);

struct CounterexampleResult {
    CheckReport report;        // pass = a convexity violation was detected
    double first_violation_tau = -1.0;
    pde::PriceSurface surface;
};

/// Theorem-5.2 experiment: a compact smooth drift bump with beta_xx(x0) =
/// bump_curvature, constant sigma = 0.05, and a convex decreasing payoff that
/// is locally linear at x0. With bump_curvature > 2 the price develops
/// U_xx < 0 at small tau; with 0 it must not.
CounterexampleResult necessity_counterexample(double x0, double bump_curvature,
                                              const CheckConfig& cfg = {},
                                              double tau_max = 0.5);

}  // namespace termshape::checks
