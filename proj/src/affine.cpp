#include "termshape/affine.hpp"

#include <algorithm>
#include <cmath>

namespace termshape::affine {

AffineParams AffineParams::vasicek(double k, double theta, double sigma) {
    return {[k, theta](double) { return k * theta; }, [k](double) { return k; },
            [sigma](double) { return sigma * sigma; }, [](double) { return 0.0; }};
}

AffineParams AffineParams::cir(double k, double theta, double sigma) {
    return {[k, theta](double) { return k * theta; }, [k](double) { return k; },
            [](double) { return 0.0; }, [sigma](double) { return sigma * sigma; }};
}

AffineParams AffineParams::hull_white(double k, models::PiecewiseLinear theta, double sigma) {
    return {[k, theta](double t) { return k * theta(t); }, [k](double) { return k; },
            [sigma](double) { return sigma * sigma; }, [](double) { return 0.0; }};
}

double RiccatiSolution::bond(double x, std::size_t j) const {
    return std::exp(-A[j] - B[j] * x);
}

namespace {

double interp(const std::vector<double>& tau, const std::vector<double>& y, double q) {
    if (q <= tau.front()) return y.front();
    if (q >= tau.back()) return y.back();
    const auto it = std::upper_bound(tau.begin(), tau.end(), q);
    const std::size_t i = static_cast<std::size_t>(it - tau.begin());
    const double w = (q - tau[i - 1]) / (tau[i] - tau[i - 1]);
    return y[i - 1] + w * (y[i] - y[i - 1]);
}

}  // namespace

double RiccatiSolution::A_at(double q) const { return interp(tau, A, q); }
double RiccatiSolution::B_at(double q) const { return interp(tau, B, q); }
double RiccatiSolution::bond_at(double x, double q) const {
    return std::exp(-A_at(q) - B_at(q) * x);
}

RiccatiSolution riccati_bond(const AffineParams& p, double tau_max, int n_steps) {
    if (n_steps < 1) throw ConfigError("riccati_bond: n_steps must be >= 1");
    if (!(tau_max >= 0.0)) throw ConfigError("riccati_bond: tau_max must be >= 0");
    RiccatiSolution out;
    out.tau.resize(static_cast<std::size_t>(n_steps) + 1);
    out.A.resize(out.tau.size());
    out.B.resize(out.tau.size());
    const double h = tau_max / n_steps;

    double A = 0.0, B = 0.0;
    out.tau[0] = 0.0;
    out.A[0] = 0.0;
    out.B[0] = 0.0;

    auto fB = [&](double tau, double B_) {
        const double t = tau_max - tau;
        return 1.0 - p.b(t) * B_ - 0.5 * p.d(t) * B_ * B_;
    };
    auto fA = [&](double tau, double B_) {
        const double t = tau_max - tau;
        return p.a(t) * B_ - 0.5 * p.c(t) * B_ * B_;
    };

    for (int i = 0; i < n_steps; ++i) {
        const double tau = i * h;
        const double kB1 = fB(tau, B);
        const double kA1 = fA(tau, B);
        const double kB2 = fB(tau + 0.5 * h, B + 0.5 * h * kB1);
        const double kA2 = fA(tau + 0.5 * h, B + 0.5 * h * kB1);
        const double kB3 = fB(tau + 0.5 * h, B + 0.5 * h * kB2);
        const double kA3 = fA(tau + 0.5 * h, B + 0.5 * h * kB2);
        const double kB4 = fB(tau + h, B + h * kB3);
        const double kA4 = fA(tau + h, B + h * kB3);
        B += h / 6.0 * (kB1 + 2.0 * kB2 + 2.0 * kB3 + kB4);
        A += h / 6.0 * (kA1 + 2.0 * kA2 + 2.0 * kA3 + kA4);
        if (!std::isfinite(B) || std::fabs(B) > 1e6)
            throw NumericError("riccati_bond: B blew up at tau=" + std::to_string(tau + h));
        const std::size_t j = static_cast<std::size_t>(i) + 1;
        out.tau[j] = (i + 1 == n_steps) ? tau_max : (tau + h);
        out.A[j] = A;
        out.B[j] = B;
    }
    return out;
}

double affine_duration(const AffineParams& p, double tau, int n_steps) {
    if (tau == 0.0) return 0.0;
    const RiccatiSolution sol = riccati_bond(p, tau, n_steps);
    return sol.B.back();
}

}  // namespace termshape::affine
