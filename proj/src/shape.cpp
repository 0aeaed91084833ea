#include "termshape/shape.hpp"

#include <cmath>

namespace termshape::shape {

namespace {

constexpr double kTolBase = 1e-8;

struct Scan {
    double max_val = -1e300, min_val = 1e300;
    double max_x = 0.0, max_t = 0.0, min_x = 0.0, min_t = 0.0;
    double scale = 0.0;
};

template <class F>
Scan scan_region(const ShapeRegion& r, F f) {
    Scan s;
    for (int j = 0; j < r.nt; ++j) {
        const double t = r.t_lo + (r.t_hi - r.t_lo) * (r.nt == 1 ? 0.0 : double(j) / (r.nt - 1));
        for (int i = 0; i < r.nx; ++i) {
            const double x = r.x_lo + (r.x_hi - r.x_lo) * (r.nx == 1 ? 0.0 : double(i) / (r.nx - 1));
            const double v = f(x, t);
            s.scale = std::max(s.scale, std::fabs(v));
            if (v > s.max_val) { s.max_val = v; s.max_x = x; s.max_t = t; }
            if (v < s.min_val) { s.min_val = v; s.min_x = x; s.min_t = t; }
        }
    }
    return s;
}

double tol_for(double scale) { return kTolBase * (1.0 + scale); }

}  // namespace

ShapeRegion ShapeRegion::standard(const models::ShortRateModel& model) {
    ShapeRegion r;
    r.x_lo = model.domain() == models::Domain::HalfLine ? 1e-4 : -2.0;
    r.x_hi = 5.0;
    r.t_lo = 0.0;
    r.t_hi = 5.0;
    return r;
}

ConditionResult check_convexity_condition(const models::ShortRateModel& model,
                                          const ShapeRegion& r) {
    const Scan s = scan_region(r, [&](double x, double t) { return model.beta_xx(x, t); });
    ConditionResult res;
    res.pass = s.max_val <= 2.0 + tol_for(s.scale);
    res.witness_x = s.max_x;
    res.witness_t = s.max_t;
    res.witness_value = s.max_val;
    return res;
}

ConditionResult check_lcv_condition(const models::ShortRateModel& model, const ShapeRegion& r) {
    const Scan sa = scan_region(r, [&](double x, double t) { return model.alpha_xx(x, t); });
    const Scan sb = scan_region(r, [&](double x, double t) { return model.beta_xx(x, t); });
    ConditionResult res;
    const bool alpha_convex = sa.min_val >= -tol_for(sa.scale);
    const bool beta_concave = sb.max_val <= tol_for(sb.scale);
    res.pass = alpha_convex && beta_concave;
    if (!alpha_convex) {
        res.witness_x = sa.min_x; res.witness_t = sa.min_t; res.witness_value = sa.min_val;
    } else if (!beta_concave) {
        res.witness_x = sb.max_x; res.witness_t = sb.max_t; res.witness_value = sb.max_val;
    }
    return res;
}

ConditionResult check_lcc_condition(const models::ShortRateModel& model, const ShapeRegion& r) {
    ConditionResult res;
    const Scan sbxx = scan_region(r, [&](double x, double t) { return model.beta_xx(x, t); });
    const bool beta_convex = sbxx.min_val >= -tol_for(sbxx.scale);
    if (model.domain() == models::Domain::FullLine) {
        // alpha only time-dependent
        const Scan sax = scan_region(r, [&](double x, double t) { return model.alpha_x(x, t); });
        const bool alpha_flat = std::max(std::fabs(sax.max_val), std::fabs(sax.min_val)) <=
                                tol_for(sax.scale);
        res.pass = alpha_flat && beta_convex;
        if (!alpha_flat) {
            res.witness_x = sax.max_x; res.witness_t = sax.max_t; res.witness_value = sax.max_val;
        } else if (!beta_convex) {
            res.witness_x = sbxx.min_x; res.witness_t = sbxx.min_t; res.witness_value = sbxx.min_val;
        }
        return res;
    }
    // half line: alpha(0,t)=0, beta(0,t)>=0, alpha concave, beta convex
    bool origin_ok = true;
    double bad_t = 0.0, bad_v = 0.0;
    for (int j = 0; j < r.nt; ++j) {
        const double t = r.t_lo + (r.t_hi - r.t_lo) * (r.nt == 1 ? 0.0 : double(j) / (r.nt - 1));
        const double a0 = model.alpha(0.0, t);
        const double b0 = model.beta(0.0, t);
        if (std::fabs(a0) > 1e-12 || b0 < -1e-12) {
            origin_ok = false; bad_t = t; bad_v = std::fabs(a0) > 1e-12 ? a0 : b0;
            break;
        }
    }
    const Scan saxx = scan_region(r, [&](double x, double t) { return model.alpha_xx(x, t); });
    const bool alpha_concave = saxx.max_val <= tol_for(saxx.scale);
    res.pass = origin_ok && alpha_concave && beta_convex;
    if (!origin_ok) {
        res.witness_x = 0.0; res.witness_t = bad_t; res.witness_value = bad_v;
    } else if (!alpha_concave) {
        res.witness_x = saxx.max_x; res.witness_t = saxx.max_t; res.witness_value = saxx.max_val;
    } else if (!beta_convex) {
        res.witness_x = sbxx.min_x; res.witness_t = sbxx.min_t; res.witness_value = sbxx.min_val;
    }
    return res;
}

ShapeReport shape_report(const models::ShortRateModel& model, const ShapeRegion& r) {
    ShapeReport rep;
    rep.model = model.name();
    rep.region = r;
    rep.c = check_convexity_condition(model, r);
    rep.lcv = check_lcv_condition(model, r);
    rep.lcc = check_lcc_condition(model, r);
    // linear coefficients (beta_xx = alpha_xx = 0) give the log-affine case
    const Scan sbxx = scan_region(r, [&](double x, double t) { return model.beta_xx(x, t); });
    const Scan saxx = scan_region(r, [&](double x, double t) { return model.alpha_xx(x, t); });
    const bool beta_linear = std::max(std::fabs(sbxx.max_val), std::fabs(sbxx.min_val)) <=
                             tol_for(sbxx.scale);
    const bool alpha_linear = std::max(std::fabs(saxx.max_val), std::fabs(saxx.min_val)) <=
                              tol_for(saxx.scale);
    rep.affine = beta_linear && alpha_linear && rep.lcv.pass && rep.lcc.pass;
    return rep;
}

ShapeReport shape_report(const models::ShortRateModel& model) {
    return shape_report(model, ShapeRegion::standard(model));
}

models::RegistryParams stock_params(const std::string& name) {
    models::RegistryParams p;
    if (name == "V") {
        p.scalars = {{"k", 0.86}, {"theta", 0.08}, {"sigma", 0.01}};
    } else if (name == "CIR") {
        p.scalars = {{"k", 0.5}, {"theta", 0.06}, {"sigma", 0.2}};
    } else if (name == "D") {
        p.scalars = {{"b", 0.05}, {"sigma", 0.15}};
    } else if (name == "EV") {
        p.scalars = {{"eta", 0.1}, {"a", 0.1}, {"sigma", 0.2}};
    } else if (name == "HW") {
        p.scalars = {{"k", 0.5}, {"sigma", 0.01}};
        p.theta_table = models::PiecewiseLinear({0.0, 2.0, 5.0, 10.0}, {0.05, 0.06, 0.07, 0.07});
    } else if (name == "BK") {
        p.scalars = {{"a", 0.1}, {"sigma", 0.2}};
        p.theta_table = models::PiecewiseLinear({0.0, 5.0, 10.0}, {0.08, 0.12, 0.12});
    } else if (name == "MM") {
        p.scalars = {{"lambda", 0.6}, {"gamma", 0.5}, {"sigma", 0.2}};
        p.theta_table = models::PiecewiseLinear({0.0, 5.0, 10.0}, {0.08, 0.12, 0.12});
    } else {
        throw ConfigError("no stock parameters for model '" + name + "'");
    }
    return p;
}

std::vector<ShapeReport> table2_report() {
    std::vector<ShapeReport> out;
    for (const char* name : {"V", "CIR", "D", "EV", "HW", "BK", "MM"}) {
        const models::ShortRateModel m = models::registry(name, stock_params(name));
        out.push_back(shape_report(m));
    }
    return out;
}

std::vector<GoldenRow> table2_golden() {
    return {{"V", true, true, true},  {"CIR", true, true, true}, {"D", true, true, false},
            {"EV", true, true, false}, {"HW", true, true, true},  {"BK", true, true, false},
            {"MM", true, true, false}};
}

}  // namespace termshape::shape
