#include "termshape/models.hpp"

#include <algorithm>
#include <cmath>

namespace termshape::models {

PiecewiseLinear::PiecewiseLinear(std::vector<double> t, std::vector<double> v)
    : t_(std::move(t)), v_(std::move(v)) {
    if (t_.empty() || t_.size() != v_.size())
        throw ConfigError("piecewise-linear table needs matching non-empty knots/values");
    for (std::size_t i = 1; i < t_.size(); ++i)
        if (!(t_[i] > t_[i - 1])) throw ConfigError("piecewise-linear knots must increase");
}

double PiecewiseLinear::operator()(double t) const {
    if (t_.empty()) return 0.0;
    if (t <= t_.front()) return v_.front();
    if (t >= t_.back()) return v_.back();
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - t_.begin());
    const double w = (t - t_[i - 1]) / (t_[i] - t_[i - 1]);
    return v_[i - 1] + w * (v_[i] - v_[i - 1]);
}

double PiecewiseLinear::max_abs() const {
    double m = 0.0;
    for (double v : v_) m = std::max(m, std::fabs(v));
    return m;
}

ShortRateModel::ShortRateModel(std::string name, Domain domain, Coeff drift, Coeff vol,
                               double growth_D, bool time_dependent,
                               std::optional<AnalyticDerivs> derivs, std::optional<OuParams> ou)
    : name_(std::move(name)),
      domain_(domain),
      drift_(std::move(drift)),
      vol_(std::move(vol)),
      derivs_(std::move(derivs)),
      growth_D_(growth_D),
      time_dependent_(time_dependent),
      ou_(std::move(ou)) {
    if (!(growth_D_ > 0.0)) throw ConfigError("growth constant must be positive");
}

namespace {

double fd_step(double x) { return 1e-5 * std::max(1.0, std::fabs(x)); }

}  // namespace

double ShortRateModel::beta_x(double x, double t) const {
    if (derivs_ && derivs_->beta_x) return derivs_->beta_x(x, t);
    const double h = fd_step(x);
    return (beta(x + h, t) - beta(x - h, t)) / (2.0 * h);
}

double ShortRateModel::beta_xx(double x, double t) const {
    if (derivs_ && derivs_->beta_xx) return derivs_->beta_xx(x, t);
    const double h = fd_step(x);
    return (beta(x + h, t) - 2.0 * beta(x, t) + beta(x - h, t)) / (h * h);
}

double ShortRateModel::alpha_x(double x, double t) const {
    if (derivs_ && derivs_->alpha_x) return derivs_->alpha_x(x, t);
    const double h = fd_step(x);
    return (alpha(x + h, t) - alpha(x - h, t)) / (2.0 * h);
}

double ShortRateModel::alpha_xx(double x, double t) const {
    if (derivs_ && derivs_->alpha_xx) return derivs_->alpha_xx(x, t);
    const double h = fd_step(x);
    return (alpha(x + h, t) - 2.0 * alpha(x, t) + alpha(x - h, t)) / (h * h);
}

bool ShortRateModel::growth_bounds_ok(double x, double t) const {
    const double xp = std::max(x, 0.0);
    return std::fabs(sigma(x, t)) <= growth_D_ * (1.0 + xp) * (1.0 + 1e-12) &&
           std::fabs(beta(x, t)) <= growth_D_ * (1.0 + std::fabs(x)) * (1.0 + 1e-12);
}

ShortRateModel ShortRateModel::renamed(std::string name) const {
    ShortRateModel m = *this;
    m.name_ = std::move(name);
    return m;
}

Payoff unit_payoff() {
    Payoff p;
    p.name = "unit";
    p.g = [](double) { return 1.0; };
    p.decreasing = true;
    p.convex = true;
    p.growth_M = 1.0;
    p.growth_K = 0.0;
    return p;
}

void validate_payoff_flags(const Payoff& payoff, double lo, double hi) {
    if (!payoff.g) throw ConfigError("payoff has no function");
    const int n = 1001;
    const double h = (hi - lo) / (n - 1);
    double scale = 0.0;
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) {
        g[i] = payoff.g(lo + i * h);
        scale = std::max(scale, std::fabs(g[i]));
    }
    const double tol = 1e-12 * std::max(scale, 1.0);
    for (int i = 0; i + 1 < n; ++i) {
        if (payoff.decreasing && g[i + 1] > g[i] + tol)
            throw ConfigError("payoff '" + payoff.name + "' is not decreasing near x=" +
                              std::to_string(lo + i * h));
        if (payoff.convex && i >= 1 && g[i - 1] + g[i + 1] - 2.0 * g[i] < -tol)
            throw ConfigError("payoff '" + payoff.name + "' is not midpoint-convex near x=" +
                              std::to_string(lo + i * h));
    }
}

double RateCap::operator()(double x) const {
    if (x <= cap_level) return x;
    const double s = std::min((x - cap_level) / width, 1.0);
    // Hermite cubic: value/slope continuous at s=0, slope 0 and curvature 0 at s=1
    return cap_level + width * (s - s * s + s * s * s / 3.0);
}

namespace {

double require_positive(const RegistryScalars& s, const std::string& key) {
    auto it = s.find(key);
    if (it == s.end()) throw ConfigError("missing parameter '" + key + "'");
    if (!(it->second > 0.0)) throw ConfigError("parameter '" + key + "' must be positive");
    return it->second;
}

double scan_growth_constant(const Coeff& beta, const Coeff& vol, Domain domain, double t_hi,
                            bool skip_domain_errors = false) {
    // smallest D with |sigma| <= D(1+x+), |beta| <= D(1+|x|) on the standard
    // envelope domain ([-50,50] or [0,50]) x [0, t_hi]
    const double x_lo = domain == Domain::HalfLine ? 0.0 : -50.0;
    const double x_hi = 50.0;
    double D = 0.0;
    long evaluable = 0;
    const int nx = 2001, nt = 21;
    for (int j = 0; j < nt; ++j) {
        const double t = t_hi * j / (nt - 1);
        for (int i = 0; i < nx; ++i) {
            const double x = x_lo + (x_hi - x_lo) * i / (nx - 1);
            const double xp = std::max(x, 0.0);
            try {
                D = std::max(D, std::fabs(vol(x, t)) / (1.0 + xp));
                D = std::max(D, std::fabs(beta(x, t)) / (1.0 + std::fabs(x)));
                ++evaluable;
            } catch (const NumericError&) {
                if (!skip_domain_errors) throw;
            }
        }
    }
    if (evaluable == 0) throw ConfigError("coefficients are nowhere evaluable on the scan domain");
    return D;
}

// drift of the lognormal family x(eta_t - a_t ln x), extended by 0 for x <= 0
double lognormal_drift(double x, double eta, double a) {
    if (x <= 0.0) return 0.0;
    return x * (eta - a * std::log(x));
}

ShortRateModel make_lognormal(const std::string& name, std::function<double(double)> eta_t,
                              std::function<double(double)> a_t, double sig, bool time_dep,
                              double t_hi) {
    Coeff drift = [eta_t, a_t](double x, double t) { return lognormal_drift(x, eta_t(t), a_t(t)); };
    Coeff vol = [sig](double x, double) { return x > 0.0 ? sig * x : 0.0; };
    AnalyticDerivs d;
    d.beta_x = [eta_t, a_t](double x, double t) {
        if (x <= 0.0) return 0.0;
        return eta_t(t) - a_t(t) * std::log(x) - a_t(t);
    };
    d.beta_xx = [a_t](double x, double t) { return x > 0.0 ? -a_t(t) / x : 0.0; };
    d.alpha_x = [sig](double x, double) { return x > 0.0 ? sig * sig * x : 0.0; };
    d.alpha_xx = [sig](double x, double) { return x > 0.0 ? sig * sig : 0.0; };
    const double D = 1.02 * scan_growth_constant(drift, vol, Domain::HalfLine, t_hi);
    return ShortRateModel(name, Domain::HalfLine, std::move(drift), std::move(vol), D, time_dep,
                          std::move(d));
}

}  // namespace

ShortRateModel registry(const std::string& name, const RegistryParams& p) {
    const auto& s = p.scalars;
    if (name == "V") {
        const double k = require_positive(s, "k");
        const double theta = require_positive(s, "theta");
        const double sig = require_positive(s, "sigma");
        AnalyticDerivs d;
        d.beta_x = [k](double, double) { return -k; };
        d.beta_xx = [](double, double) { return 0.0; };
        d.alpha_x = [](double, double) { return 0.0; };
        d.alpha_xx = [](double, double) { return 0.0; };
        const double D = std::max({k, k * theta, sig});
        OuParams ou{k, PiecewiseLinear(theta), sig};
        return ShortRateModel("V", Domain::FullLine,
                              [k, theta](double x, double) { return k * (theta - x); },
                              [sig](double, double) { return sig; }, D, false, std::move(d),
                              std::move(ou));
    }
    if (name == "CIR") {
        const double k = require_positive(s, "k");
        const double theta = require_positive(s, "theta");
        const double sig = require_positive(s, "sigma");
        AnalyticDerivs d;
        d.beta_x = [k](double, double) { return -k; };
        d.beta_xx = [](double, double) { return 0.0; };
        d.alpha_x = [sig](double x, double) { return x > 0.0 ? 0.5 * sig * sig : 0.0; };
        d.alpha_xx = [](double, double) { return 0.0; };
        const double D = std::max({k, k * theta, sig});
        return ShortRateModel("CIR", Domain::HalfLine,
                              [k, theta](double x, double) { return k * (theta - x); },
                              [sig](double x, double) { return x > 0.0 ? sig * std::sqrt(x) : 0.0; },
                              D, false, std::move(d));
    }
    if (name == "D") {
        const double b = require_positive(s, "b");
        const double sig = require_positive(s, "sigma");
        AnalyticDerivs d;
        d.beta_x = [b](double, double) { return b; };
        d.beta_xx = [](double, double) { return 0.0; };
        d.alpha_x = [sig](double x, double) { return x > 0.0 ? sig * sig * x : 0.0; };
        d.alpha_xx = [sig](double x, double) { return x > 0.0 ? sig * sig : 0.0; };
        const double D = std::max(b, sig);
        return ShortRateModel("D", Domain::HalfLine,
                              [b](double x, double) { return b * x; },
                              [sig](double x, double) { return x > 0.0 ? sig * x : 0.0; }, D, false,
                              std::move(d));
    }
    if (name == "EV") {
        const double eta = require_positive(s, "eta");
        const double a = require_positive(s, "a");
        const double sig = require_positive(s, "sigma");
        return make_lognormal("EV", [eta](double) { return eta; }, [a](double) { return a; }, sig,
                              false, 10.0);
    }
    if (name == "HW") {
        const double k = require_positive(s, "k");
        const double sig = require_positive(s, "sigma");
        if (!p.theta_table) throw ConfigError("HW needs a theta_table");
        const PiecewiseLinear theta = *p.theta_table;
        AnalyticDerivs d;
        d.beta_x = [k](double, double) { return -k; };
        d.beta_xx = [](double, double) { return 0.0; };
        d.alpha_x = [](double, double) { return 0.0; };
        d.alpha_xx = [](double, double) { return 0.0; };
        const double D = std::max({k, k * theta.max_abs(), sig});
        OuParams ou{k, theta, sig};
        return ShortRateModel("HW", Domain::FullLine,
                              [k, theta](double x, double t) { return k * (theta(t) - x); },
                              [sig](double, double) { return sig; }, D, true, std::move(d),
                              std::move(ou));
    }
    if (name == "BK") {
        const double a = require_positive(s, "a");
        const double sig = require_positive(s, "sigma");
        if (!p.theta_table) throw ConfigError("BK needs an eta_table (theta_table field)");
        const PiecewiseLinear eta = *p.theta_table;
        const double t_hi = std::max(10.0, eta.knots().back());
        return make_lognormal("BK", [eta](double t) { return eta(t); }, [a](double) { return a; },
                              sig, true, t_hi);
    }
    if (name == "MM") {
        const double lambda = require_positive(s, "lambda");
        const double gamma = require_positive(s, "gamma");
        const double sig = require_positive(s, "sigma");
        if (lambda < gamma) throw ConfigError("MM requires lambda >= gamma");
        if (!p.theta_table) throw ConfigError("MM needs an eta_table (theta_table field)");
        const PiecewiseLinear eta = *p.theta_table;
        const double t_hi = std::max(10.0, eta.knots().back());
        auto a_t = [lambda, gamma](double t) { return lambda - gamma / (1.0 + gamma * t); };
        return make_lognormal("MM", [eta](double t) { return eta(t); }, a_t, sig, true, t_hi);
    }
    throw ConfigError("unknown registry model '" + name + "'");
}

ShortRateModel custom(const expr::Expression& drift, const expr::Expression& vol, Domain domain,
                      const expr::ParamMap& params, const std::string& name) {
    const auto bound_drift = drift.bind(params);
    const auto bound_vol = vol.bind(params);
    Coeff beta = [drift, bound_drift](double x, double t) {
        return drift.eval_bound(x, t, bound_drift);
    };
    Coeff sigma = [vol, bound_vol](double x, double t) { return vol.eval_bound(x, t, bound_vol); };
    // provisional envelope constant; the solver re-estimates on its run grid
    const double D =
        1.1 * std::max(scan_growth_constant(beta, sigma, domain, 10.0, true), 1e-12);
    const bool time_dep = drift.uses_time() || vol.uses_time();
    return ShortRateModel(name, domain, std::move(beta), std::move(sigma), D, time_dep)
        .with_growth_from_grid();
}

}  // namespace termshape::models
