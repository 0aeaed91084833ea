#include "termshape/mc.hpp"

#include <algorithm>
#include <cmath>

#include "termshape/parallel.hpp"

namespace termshape::mc {

namespace {

constexpr std::int64_t kBlock = 8192;  // reduction block size; part of the determinism contract

void validate(const models::ShortRateModel& model, const McConfig& cfg) {
    if (cfg.n_paths < 1) throw ConfigError("mc: n_paths must be >= 1");
    if (cfg.n_steps < 1) throw ConfigError("mc: n_steps must be >= 1");
    if (model.domain() == models::Domain::HalfLine && cfg.scheme == Scheme::Euler)
        throw ConfigError("mc: half-line models require the full-truncation-euler scheme");
    if (cfg.scheme == Scheme::ExactOu && !model.ou_params())
        throw ConfigError("mc: exact-ou requires an OU-type model (V or HW)");
    if (cfg.scheme == Scheme::ExactOu && cfg.rate_cap)
        throw ConfigError("mc: rate caps need a path scheme, not exact-ou");
}

struct Sums {
    double s = 0.0, s2 = 0.0;
    Sums operator+(const Sums& o) const { return {s + o.s, s2 + o.s2}; }
};

McEstimate finish(const Sums& acc, std::int64_t n) {
    McEstimate est;
    est.n_paths = n;
    est.mean = acc.s / n;
    if (n > 1) {
        const double var = std::max(0.0, (acc.s2 - acc.s * acc.s / n) / (n - 1));
        est.stderr_ = std::sqrt(var / n);
    }
    return est;
}

// One Euler / full-truncation path; returns the discounted payoff sample.
template <class Normals>
double simulate_path(const models::ShortRateModel& model, const models::Payoff& payoff, double x0,
                     double t, double T, int n_steps, bool full_truncation, Normals&& next_normal,
                     const models::RateCap* cap = nullptr, double* trace = nullptr) {
    const double dt = (T - t) / n_steps;
    const double sdt = std::sqrt(dt);
    double x = x0;
    double integral = 0.0;
    double f_prev = cap ? (*cap)(x) : x;
    if (trace) trace[0] = x;
    for (int i = 0; i < n_steps; ++i) {
        const double tn = t + i * dt;
        const double xe = full_truncation ? std::max(x, 0.0) : x;
        const double z = next_normal();
        const double xn = x + model.beta(xe, tn) * dt + model.sigma(xe, tn) * sdt * z;
        const double f_next = cap ? (*cap)(xn) : xn;
        integral += 0.5 * (f_prev + f_next) * dt;  // trapezoid on the signed state
        f_prev = f_next;
        x = xn;
        if (trace) trace[i + 1] = x;
    }
    const double sample = std::exp(-integral) * payoff.g(x);
    if (!std::isfinite(sample)) throw NumericError("mc: non-finite path value");
    return sample;
}

}  // namespace

OuMoments exact_ou_moments(const models::OuParams& ou, double x0, double t, double T) {
    const double tau = T - t;
    const double k = ou.k;
    const double s2 = ou.sigma * ou.sigma;
    OuMoments m;
    if (tau <= 0.0) {
        m.mean_x = x0;
        return m;
    }
    if (k == 0.0) {
        // driftless: X is Brownian motion started at x0
        m.mean_x = x0;
        m.mean_int = x0 * tau;
        m.var_x = s2 * tau;
        m.cov = 0.5 * s2 * tau * tau;
        m.var_int = s2 * tau * tau * tau / 3.0;
        return m;
    }
    const double e1 = -std::expm1(-k * tau) / k;            // (1 - e^{-k tau})/k
    const double e2 = -std::expm1(-2.0 * k * tau) / (2.0 * k);
    m.var_x = s2 * e2;
    m.cov = 0.5 * s2 * e1 * e1;
    m.var_int = s2 / (k * k) * (tau - 2.0 * e1 + e2);

    // theta-weighted mean integrals, exact per linear segment of the table
    double i_exp = 0.0;   // int theta(s) e^{-k(T-s)} ds
    double i_one = 0.0;   // int theta(s) ds
    std::vector<double> brk{t, T};
    for (double kn : ou.theta.knots())
        if (kn > t && kn < T) brk.push_back(kn);
    std::sort(brk.begin(), brk.end());
    for (std::size_t seg = 0; seg + 1 < brk.size(); ++seg) {
        const double s0 = brk[seg], s1 = brk[seg + 1];
        if (!(s1 > s0)) continue;
        const double th0 = ou.theta(s0), th1 = ou.theta(s1);
        const double slope = (th1 - th0) / (s1 - s0);
        const double E0 = std::exp(-k * (T - s0)), E1 = std::exp(-k * (T - s1));
        i_exp += th0 / k * (E1 - E0);
        i_exp += slope * ((s1 - s0) * E1 / k - (E1 - E0) / (k * k));
        i_one += 0.5 * (th0 + th1) * (s1 - s0);
    }
    m.mean_x = x0 * std::exp(-k * tau) + k * i_exp;
    // int theta (1 - e^{-k(T-s)}) ds = i_one - i_exp
    m.mean_int = x0 * e1 + (i_one - i_exp);
    return m;
}

std::pair<double, double> exact_ou_sample(const models::OuParams& ou, double x0, double t,
                                          double T, rng::PathStream& stream) {
    const OuMoments m = exact_ou_moments(ou, x0, t, T);
    const double z1 = stream.normal();
    const double z2 = stream.normal();
    if (m.var_x <= 0.0) {
        const double si = m.var_int > 0.0 ? std::sqrt(m.var_int) : 0.0;
        return {m.mean_x, m.mean_int + si * z2};
    }
    const double sx = std::sqrt(m.var_x);
    const double c = m.cov / sx;
    const double rest = std::max(0.0, m.var_int - c * c);
    return {m.mean_x + sx * z1, m.mean_int + c * z1 + std::sqrt(rest) * z2};
}

McEstimate price(const models::ShortRateModel& model, const models::Payoff& payoff, double x0,
                 double t, double T, const McConfig& cfg) {
    validate(model, cfg);
    if (!(T > t)) throw ConfigError("mc: need T > t");
    const bool fte = cfg.scheme == Scheme::FullTruncationEuler;
    const bool exact = cfg.scheme == Scheme::ExactOu;

    OuMoments om;
    double ou_sx = 0.0, ou_c = 0.0, ou_rest = 0.0;
    if (exact) {
        om = exact_ou_moments(*model.ou_params(), x0, t, T);
        ou_sx = om.var_x > 0.0 ? std::sqrt(om.var_x) : 0.0;
        ou_c = ou_sx > 0.0 ? om.cov / ou_sx : 0.0;
        ou_rest = std::sqrt(std::max(0.0, om.var_int - ou_c * ou_c));
    }

    if (cfg.antithetic && (cfg.n_paths % 2) != 0)
        throw ConfigError("mc: antithetic sampling needs an even n_paths");

    auto one_leg = [&](std::uint64_t stream_id, double sign) {
        rng::PathStream stream(cfg.seed, stream_id);
        if (exact) {
            const double z1 = sign * stream.normal();
            const double z2 = sign * stream.normal();
            const double x_T = om.mean_x + ou_sx * z1;
            const double integral = om.mean_int + ou_c * z1 + ou_rest * z2;
            const double sample = std::exp(-integral) * payoff.g(x_T);
            if (!std::isfinite(sample)) throw NumericError("mc: non-finite sample");
            return sample;
        }
        return simulate_path(model, payoff, x0, t, T, cfg.n_steps, fte,
                             [&] { return sign * stream.normal(); },
                             cfg.rate_cap ? &*cfg.rate_cap : nullptr);
    };

    // antithetic pairs count as one sample each (the pair average), which is
    // what makes the reported stderr honest under the induced correlation
    const std::int64_t n_samples = cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
    auto block = [&](std::int64_t lo, std::int64_t hi) {
        Sums acc;
        for (std::int64_t s = lo; s < hi; ++s) {
            const std::uint64_t id = static_cast<std::uint64_t>(s);
            const double sample =
                cfg.antithetic ? 0.5 * (one_leg(id, 1.0) + one_leg(id, -1.0)) : one_leg(id, 1.0);
            acc.s += sample;
            acc.s2 += sample * sample;
        }
        return acc;
    };

    const Sums acc = parallel::block_reduce<Sums>(n_samples, kBlock, Sums{}, block,
                                                  [](const Sums& a, const Sums& b) { return a + b; });
    McEstimate est = finish(acc, n_samples);
    est.n_paths = cfg.n_paths;
    return est;
}

CoupledResult coupled_compare(const models::ShortRateModel& model_a,
                              const models::ShortRateModel& model_b,
                              const models::Payoff& payoff, double x0, double t, double T,
                              const McConfig& cfg) {
    validate(model_a, cfg);
    validate(model_b, cfg);
    if (cfg.scheme == Scheme::ExactOu)
        throw ConfigError("coupled_compare: use a path scheme (euler or full truncation)");
    if (cfg.antithetic) throw ConfigError("coupled_compare: antithetic not supported");
    const bool fte = cfg.scheme == Scheme::FullTruncationEuler;

    struct Part {
        Sums a, b, d;
        Part operator+(const Part& o) const { return {a + o.a, b + o.b, d + o.d}; }
    };

    auto block = [&](std::int64_t lo, std::int64_t hi) {
        Part acc;
        for (std::int64_t p = lo; p < hi; ++p) {
            rng::PathStream sa(cfg.seed, static_cast<std::uint64_t>(p));
            rng::PathStream sb(cfg.seed, static_cast<std::uint64_t>(p));  // identical increments
            const models::RateCap* cap = cfg.rate_cap ? &*cfg.rate_cap : nullptr;
            const double va = simulate_path(model_a, payoff, x0, t, T, cfg.n_steps, fte,
                                            [&] { return sa.normal(); }, cap);
            const double vb = simulate_path(model_b, payoff, x0, t, T, cfg.n_steps, fte,
                                            [&] { return sb.normal(); }, cap);
            acc.a.s += va; acc.a.s2 += va * va;
            acc.b.s += vb; acc.b.s2 += vb * vb;
            const double d = va - vb;
            acc.d.s += d; acc.d.s2 += d * d;
        }
        return acc;
    };

    const Part acc = parallel::block_reduce<Part>(cfg.n_paths, kBlock, Part{}, block,
                                                  [](const Part& a, const Part& b) { return a + b; });
    CoupledResult res;
    res.a = finish(acc.a, cfg.n_paths);
    res.b = finish(acc.b, cfg.n_paths);
    const McEstimate d = finish(acc.d, cfg.n_paths);
    res.diff_mean = d.mean;
    res.diff_stderr = d.stderr_;
    return res;
}

ContinuityResult continuity_experiment(const std::vector<models::ShortRateModel>& mollified,
                                       const models::ShortRateModel& limit,
                                       const models::Payoff& payoff, double x0, double t, double T,
                                       const McConfig& cfg) {
    validate(limit, cfg);
    for (const auto& m : mollified) validate(m, cfg);
    if (cfg.antithetic) throw ConfigError("continuity_experiment: antithetic not supported");
    const bool fte = cfg.scheme == Scheme::FullTruncationEuler;
    const std::size_t n_models = mollified.size();

    // partial layout: per model (sum, sumsq, sup_sq sum), then limit (sum, sumsq)
    using Part = std::vector<double>;
    const std::size_t width = 3 * n_models + 2;

    auto block = [&](std::int64_t lo, std::int64_t hi) {
        Part acc(width, 0.0);
        std::vector<double> trace(static_cast<std::size_t>(cfg.n_steps) + 1);
        std::vector<double> trace_n(static_cast<std::size_t>(cfg.n_steps) + 1);
        for (std::int64_t p = lo; p < hi; ++p) {
            rng::PathStream sl(cfg.seed, static_cast<std::uint64_t>(p));
            const models::RateCap* cap = cfg.rate_cap ? &*cfg.rate_cap : nullptr;
            const double vl = simulate_path(limit, payoff, x0, t, T, cfg.n_steps, fte,
                                            [&] { return sl.normal(); }, cap, trace.data());
            acc[3 * n_models] += vl;
            acc[3 * n_models + 1] += vl * vl;
            for (std::size_t m = 0; m < n_models; ++m) {
                rng::PathStream sm(cfg.seed, static_cast<std::uint64_t>(p));
                const double vm = simulate_path(mollified[m], payoff, x0, t, T, cfg.n_steps, fte,
                                                [&] { return sm.normal(); }, cap, trace_n.data());
                double sup2 = 0.0;
                for (std::size_t i = 0; i < trace.size(); ++i) {
                    const double d = trace_n[i] - trace[i];
                    sup2 = std::max(sup2, d * d);
                }
                acc[3 * m] += vm;
                acc[3 * m + 1] += vm * vm;
                acc[3 * m + 2] += sup2;
            }
        }
        return acc;
    };

    const Part acc = parallel::block_reduce<Part>(
        cfg.n_paths, kBlock, Part(width, 0.0), block, [&](const Part& a, const Part& b) {
            Part r(width);
            for (std::size_t i = 0; i < width; ++i) r[i] = a[i] + b[i];
            return r;
        });

    ContinuityResult res;
    for (std::size_t m = 0; m < n_models; ++m) {
        res.mollified.push_back(finish({acc[3 * m], acc[3 * m + 1]}, cfg.n_paths));
        res.sup_dist_sq.push_back(acc[3 * m + 2] / cfg.n_paths);
    }
    res.limit = finish({acc[3 * n_models], acc[3 * n_models + 1]}, cfg.n_paths);
    return res;
}

}  // namespace termshape::mc
