#pragma once

#include <string>
#include <vector>

#include "termshape/models.hpp"

namespace termshape::shape {

struct ShapeRegion {
    double x_lo = 0.0, x_hi = 5.0;
    double t_lo = 0.0, t_hi = 5.0;
    int nx = 2001, nt = 101;

    static ShapeRegion standard(const models::ShortRateModel& model);
};

struct ConditionResult {
    bool pass = true;
    double witness_x = 0.0, witness_t = 0.0, witness_value = 0.0;
};

struct ShapeReport {
    std::string model;
    ConditionResult c, lcv, lcc;
    bool affine = false;
    ShapeRegion region;
};

/// Convexity preservation: sup over the region of beta_xx <= 2 (+ tol).
ConditionResult check_convexity_condition(const models::ShortRateModel& model,
                                          const ShapeRegion& region);

/// Log-convexity preservation: alpha spatially convex, beta spatially concave.
ConditionResult check_lcv_condition(const models::ShortRateModel& model,
                                    const ShapeRegion& region);

/// Log-concavity preservation: full line needs alpha x-independent and beta
/// convex; half line needs alpha(0,t)=0, beta(0,t)>=0, alpha concave, beta convex.
ConditionResult check_lcc_condition(const models::ShortRateModel& model,
                                    const ShapeRegion& region);

ShapeReport shape_report(const models::ShortRateModel& model, const ShapeRegion& region);
ShapeReport shape_report(const models::ShortRateModel& model);

/// The seven reference models with stock parameters, classified on standard
/// regions; reproduces the published verdict matrix.
std::vector<ShapeReport> table2_report();

/// Expected golden verdicts: model -> (C, LCV, LCC).
struct GoldenRow {
    std::string model;
    bool c, lcv, lcc;
};
std::vector<GoldenRow> table2_golden();

/// Stock parameter sets used by table2_report.
models::RegistryParams stock_params(const std::string& name);

}  // namespace termshape::shape
