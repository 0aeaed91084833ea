#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "termshape/errors.hpp"
#include "termshape/expr.hpp"

namespace termshape::models {

enum class Domain { FullLine, HalfLine };

using Coeff = std::function<double(double x, double t)>;

// Piecewise-linear table in t with constant extrapolation beyond the ends.
class PiecewiseLinear {
public:
    PiecewiseLinear() = default;
    explicit PiecewiseLinear(double constant) : t_{0.0}, v_{constant} {}
    PiecewiseLinear(std::vector<double> t, std::vector<double> v);

    double operator()(double t) const;
    bool constant() const { return t_.size() <= 1; }
    double max_abs() const;
    const std::vector<double>& knots() const { return t_; }
    const std::vector<double>& values() const { return v_; }

private:
    std::vector<double> t_, v_;
};

// Parameters of an Ornstein-Uhlenbeck type model dX = k(theta_t - X)dt + sigma dB.
// Carried by V and HW so the exact sampler can recognize them.
struct OuParams {
    double k = 0.0;
    PiecewiseLinear theta;
    double sigma = 0.0;
};

struct AnalyticDerivs {
    Coeff beta_x, beta_xx, alpha_x, alpha_xx;
};

/// A short-rate diffusion dX = beta(X,t)dt + sigma(X,t)dB with domain
/// metadata. Immutable after construction; coefficient evaluation is pure.
class ShortRateModel {
public:
    ShortRateModel(std::string name, Domain domain, Coeff drift, Coeff vol, double growth_D,
                   bool time_dependent, std::optional<AnalyticDerivs> derivs = std::nullopt,
                   std::optional<OuParams> ou = std::nullopt);

    const std::string& name() const { return name_; }
    Domain domain() const { return domain_; }
    bool time_dependent() const { return time_dependent_; }
    double growth_constant() const { return growth_D_; }
    /// Custom models re-estimate their envelope constant on each run grid
    /// (the stored value is a scan-based default); registry constants are firm.
    bool growth_from_grid() const { return growth_from_grid_; }
    ShortRateModel with_growth_from_grid() const {
        ShortRateModel m = *this;
        m.growth_from_grid_ = true;
        return m;
    }
    const std::optional<OuParams>& ou_params() const { return ou_; }
    bool has_analytic_derivs() const { return derivs_.has_value(); }

    double beta(double x, double t) const { return drift_(x, t); }
    double sigma(double x, double t) const { return vol_(x, t); }
    double alpha(double x, double t) const {
        const double s = vol_(x, t);
        return 0.5 * s * s;
    }

    // Analytic when available, otherwise central finite differences.
    double beta_x(double x, double t) const;
    double beta_xx(double x, double t) const;
    double alpha_x(double x, double t) const;
    double alpha_xx(double x, double t) const;

    /// Assumption envelope |sigma| <= D(1+x+), |beta| <= D(1+|x|) at one point.
    bool growth_bounds_ok(double x, double t) const;

    ShortRateModel renamed(std::string name) const;

private:
    std::string name_;
    Domain domain_;
    Coeff drift_, vol_;
    std::optional<AnalyticDerivs> derivs_;
    double growth_D_;
    bool time_dependent_;
    bool growth_from_grid_ = false;
    std::optional<OuParams> ou_;
};

struct Payoff {
    std::string name = "unit";
    std::function<double(double)> g;
    bool decreasing = true;
    bool convex = true;
    // growth bound 0 <= g(x) <= M * max(exp(-K x), 1)
    double growth_M = 1.0;
    double growth_K = 0.0;
    std::optional<double> lipschitz_Ck;  // eq-(ql) truncation constant, metadata only
};

Payoff unit_payoff();

/// Verify the declared decreasing/convex flags by discrete midpoint tests on
/// a 1001-point grid over [lo, hi]. Throws ConfigError on a violated flag.
void validate_payoff_flags(const Payoff& payoff, double lo, double hi);

/// Smooth concave cap f: identity below the cap level, constant above
/// cap_level + width, cubic Hermite join in between (value/slope matched at
/// the cap level, slope 0 at the far end). f(x) <= x everywhere and f is
/// non-decreasing and concave.
struct RateCap {
    double cap_level = 1.0;  // K'
    double width = 1.0;

    double operator()(double x) const;
};

using RegistryScalars = std::map<std::string, double>;

struct RegistryParams {
    RegistryScalars scalars;                    // k, theta, sigma, b, eta, a, lambda, gamma
    std::optional<PiecewiseLinear> theta_table; // HW theta_t / BK, MM eta_t
};

/// Construct one of the named reference models: V, CIR, D, EV, HW, BK, MM.
/// Parameter constraints (positivity, lambda >= gamma) are enforced.
ShortRateModel registry(const std::string& name, const RegistryParams& params);

/// Model from drift/vol expressions in x and t. Derivatives fall back to
/// finite differences; the growth constant is the smallest envelope constant
/// on the standard domain times 1.1.
ShortRateModel custom(const expr::Expression& drift, const expr::Expression& vol, Domain domain,
                      const expr::ParamMap& params, const std::string& name = "custom");

}  // namespace termshape::models
