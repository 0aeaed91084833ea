#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "termshape/models.hpp"
#include "termshape/rng.hpp"

namespace termshape::mc {

enum class Scheme { Euler, FullTruncationEuler, ExactOu };

struct McConfig {
    std::int64_t n_paths = 100000;
    int n_steps = 250;
    std::uint64_t seed = 1;
    Scheme scheme = Scheme::Euler;
    bool antithetic = false;
    std::optional<models::RateCap> rate_cap;  // discount f(X) instead of X
};

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::int64_t n_paths = 0;
    std::uint64_t config_hash = 0;
};

/// Feynman-Kac price E[exp(-I) g(X_T)], I the trapezoidal discount integral
/// along the discrete path. Paths use counter-based streams keyed by
/// (seed, path index) and a fixed-order block reduction, so estimates are
/// bit-identical for any worker count.
McEstimate price(const models::ShortRateModel& model, const models::Payoff& payoff, double x0,
                 double t, double T, const McConfig& cfg);

/// One draw from the exact joint Gaussian law of (X_T, int_t^T X_s ds) for
/// OU-type models dX = k(theta_t - X)dt + sigma dB.
std::pair<double, double> exact_ou_sample(const models::OuParams& ou, double x0, double t,
                                          double T, rng::PathStream& stream);

struct OuMoments {
    double mean_x = 0.0, mean_int = 0.0;
    double var_x = 0.0, cov = 0.0, var_int = 0.0;
};
OuMoments exact_ou_moments(const models::OuParams& ou, double x0, double t, double T);

struct CoupledResult {
    McEstimate a, b;
    double diff_mean = 0.0;    // mean of (payoff_a - payoff_b), paths coupled
    double diff_stderr = 0.0;
};

/// Drive two models with identical Brownian increments and return paired
/// estimates plus the paired difference with its (much smaller) stderr.
CoupledResult coupled_compare(const models::ShortRateModel& model_a,
                              const models::ShortRateModel& model_b,
                              const models::Payoff& payoff, double x0, double t, double T,
                              const McConfig& cfg);

struct ContinuityResult {
    std::vector<McEstimate> mollified;  // U_n in the given order
    std::vector<double> sup_dist_sq;    // E[sup_s |X^n_s - X_s|^2] per model
    McEstimate limit;
};

/// Common-random-number prices of a coefficient-mollification sequence
/// together with the empirical sup-distance moment against the limit model.
ContinuityResult continuity_experiment(const std::vector<models::ShortRateModel>& mollified,
                                       const models::ShortRateModel& limit,
                                       const models::Payoff& payoff, double x0, double t, double T,
                                       const McConfig& cfg);

}  // namespace termshape::mc
