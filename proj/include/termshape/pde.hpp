#pragma once

#include <optional>

#include "termshape/grid.hpp"
#include "termshape/models.hpp"

namespace termshape::pde {

enum class Advection {
    Central,  // second order; default
    Auto,     // central, switching to first-order upwind where |beta| h / (2 alpha) > 1
    Upwind    // first-order upwind everywhere
};

enum class BoundaryKind {
    AsymptoticLinearity,  // u_xx = 0 rows with one-sided advection
    SpecifiedValue        // Dirichlet rows held at boundary_value
};

struct SolverConfig {
    double theta = 0.5;       // theta-scheme weight; 1/2 = Crank-Nicolson, 1 = implicit
    int rannacher_steps = 2;  // startup steps run fully implicit
    int rannacher_substeps = 4;
    std::optional<models::RateCap> rate_cap;  // discount f(x) in place of x
    BoundaryKind boundary = BoundaryKind::AsymptoticLinearity;
    double boundary_value = 0.0;
    Advection advection = Advection::Central;
    // graded fourth-difference dissipation coefficient; damps grid-frequency
    // modes that the reaction term amplifies at negative rates. 0 disables.
    double dissipation = 1.0 / 16.0;
    // rows with dtau*(2 alpha/h^2 + x+) above this limit get extra implicit
    // weighting (theta_i = max(theta, 1 - limit/z)); far-field only.
    double stiffness_theta_limit = 20.0;
    int substeps = 1;  // internal time substeps per reported step
};

/// Theta-scheme solve of U_tau = alpha U_xx + beta U_x - f(x) U, U(x,0) = g(x),
/// backward in time via tau = T - t. Second-order in space on smooth regions;
/// tridiagonal systems by direct elimination. Half-line models get the
/// degenerate transport row at x = 0 (no boundary data imposed there).
PriceSurface solve(const models::ShortRateModel& model, const models::Payoff& payoff,
                   const Grid& grid, const SolverConfig& config = {});

/// solve() with the half-line preconditions alpha(0,t) = 0, beta(0,t) >= 0
/// validated explicitly.
PriceSurface solve_halfline(const models::ShortRateModel& model, const models::Payoff& payoff,
                            const Grid& grid, const SolverConfig& config = {});

struct BondOptionPrice {
    PriceSurface inner;  // T2-bond on [0, T2-T1] (tau measured from T2)
    PriceSurface outer;  // call surface on [0, T1]
};

/// Two-stage European call on a T2-bond: inner bond solve, terminal payoff
/// (u_inner - K)^+ carried onto the outer grid by monotone cubic
/// interpolation, then the outer solve on [0, T1].
BondOptionPrice price_bond_option(const models::ShortRateModel& model, double strike, double T1,
                                  double T2, const Grid& grid, const SolverConfig& config = {});

/// Truncation-adequacy certificate: re-solve on a domain extended by 50% on
/// each truncated side and return the max relative change on [x_lo, x_hi].
double boundary_influence_probe(const models::ShortRateModel& model,
                                const models::Payoff& payoff, const Grid& grid,
                                const SolverConfig& config, double x_lo, double x_hi);

}  // namespace termshape::pde
