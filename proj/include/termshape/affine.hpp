#pragma once

#include <functional>
#include <vector>

#include "termshape/errors.hpp"
#include "termshape/models.hpp"

namespace termshape::affine {

using TimeFn = std::function<double(double t)>;

// Affine coefficient family: beta(x,t) = a(t) - b(t) x, alpha(x,t) = (c(t) + d(t) x)/2.
// Bond prices take the form exp(-A(tau) - B(tau) x).
struct AffineParams {
    TimeFn a, b, c, d;

    static AffineParams vasicek(double k, double theta, double sigma);
    static AffineParams cir(double k, double theta, double sigma);
    static AffineParams hull_white(double k, models::PiecewiseLinear theta, double sigma);
};

struct RiccatiSolution {
    std::vector<double> tau, A, B;

    double bond(double x, std::size_t j) const;
    /// Linear interpolation of (A, B) between integration nodes.
    double bond_at(double x, double tau_query) const;
    double A_at(double tau_query) const;
    double B_at(double tau_query) const;
};

/// Integrate B' = 1 - b B - (d/2) B^2, A' = a B - (c/2) B^2 from A(0)=B(0)=0
/// with the classical 4th-order one-step method. Time-dependent coefficients
/// are evaluated at t = tau_max - tau, so the solution prices the bond with
/// maturity T = tau_max.
RiccatiSolution riccati_bond(const AffineParams& params, double tau_max, int n_steps);

/// Exact duration -d/dx ln u = B(tau) for affine models.
double affine_duration(const AffineParams& params, double tau, int n_steps = 2048);

}  // namespace termshape::affine
