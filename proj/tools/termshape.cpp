// termshape: price bonds and bond options under short-rate diffusion models
// and machine-check the qualitative properties of the computed surfaces
// (convexity, log-curvature, parameter monotonicity, duration).
//
// Subcommands: price, option, check, table2, compare, converge.
// Exit codes: 0 ok, 1 requested check failed, 2 config error, 3 numeric error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "termshape/affine.hpp"
#include "termshape/checks.hpp"
#include "termshape/mc.hpp"
#include "termshape/pde.hpp"
#include "termshape/serialize.hpp"
#include "termshape/shape.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace termshape;

namespace {

constexpr const char* kVersion = "termshape 0.1.0";

// ---------------------------------------------------------------- config ---

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return j;
}

models::PiecewiseLinear table_from_json(const json& j) {
    std::vector<double> t, v;
    for (const auto& row : j) {
        t.push_back(row.at(0).get<double>());
        v.push_back(row.at(1).get<double>());
    }
    return models::PiecewiseLinear(std::move(t), std::move(v));
}

models::RegistryParams registry_params_from_json(const json& j) {
    models::RegistryParams p;
    if (j.contains("params"))
        for (auto it = j["params"].begin(); it != j["params"].end(); ++it)
            p.scalars[it.key()] = it.value().get<double>();
    if (j.contains("theta_table")) p.theta_table = table_from_json(j["theta_table"]);
    return p;
}

models::ShortRateModel model_from_json(const json& j) {
    const std::string type = j.value("type", "registry");
    if (type == "registry") return models::registry(j.at("name").get<std::string>(),
                                                    registry_params_from_json(j));
    if (type == "custom") {
        const auto drift = expr::Expression::parse(j.at("drift").get<std::string>());
        const auto vol = expr::Expression::parse(j.at("vol").get<std::string>());
        const auto domain = j.value("domain", "full") == std::string("half")
                                ? models::Domain::HalfLine
                                : models::Domain::FullLine;
        expr::ParamMap params;
        if (j.contains("params"))
            for (auto it = j["params"].begin(); it != j["params"].end(); ++it)
                params[it.key()] = it.value().get<double>();
        return models::custom(drift, vol, domain, params, j.value("name", "custom"));
    }
    throw ConfigError("model type must be 'registry' or 'custom'");
}

models::Payoff payoff_from_json(const json& j) {
    if (j.is_null() || j.value("type", "unit") == std::string("unit")) return models::unit_payoff();
    if (j["type"] == "expr") {
        const auto g = expr::Expression::parse(j.at("g").get<std::string>());
        expr::ParamMap params;
        if (j.contains("params"))
            for (auto it = j["params"].begin(); it != j["params"].end(); ++it)
                params[it.key()] = it.value().get<double>();
        const auto bound = g.bind(params);
        models::Payoff p;
        p.name = j.value("name", "expr");
        p.g = [g, bound](double x) { return g.eval_bound(x, 0.0, bound); };
        p.decreasing = j.value("decreasing", true);
        p.convex = j.value("convex", true);
        p.growth_M = j.value("M", 1.0);
        p.growth_K = j.value("K", 0.0);
        return p;
    }
    throw ConfigError("payoff type must be 'unit' or 'expr'");
}

pde::SolverConfig solver_from_json(const json& j) {
    pde::SolverConfig cfg;
    if (j.is_null()) return cfg;
    cfg.theta = j.value("theta", cfg.theta);
    cfg.rannacher_steps = j.value("rannacher_steps", cfg.rannacher_steps);
    cfg.rannacher_substeps = j.value("rannacher_substeps", cfg.rannacher_substeps);
    cfg.dissipation = j.value("dissipation", cfg.dissipation);
    cfg.stiffness_theta_limit = j.value("stiffness_theta_limit", cfg.stiffness_theta_limit);
    cfg.substeps = j.value("substeps", cfg.substeps);
    if (j.contains("advection")) {
        const std::string a = j["advection"];
        cfg.advection = a == "central" ? pde::Advection::Central
                        : a == "auto"  ? pde::Advection::Auto
                        : a == "upwind" ? pde::Advection::Upwind
                                        : throw ConfigError("advection must be central|auto|upwind");
    }
    if (j.contains("boundary")) {
        const std::string b = j["boundary"];
        if (b == "value") cfg.boundary = pde::BoundaryKind::SpecifiedValue;
        else if (b != "linearity") throw ConfigError("boundary must be linearity|value");
    }
    cfg.boundary_value = j.value("boundary_value", cfg.boundary_value);
    if (j.contains("rate_cap") && !j["rate_cap"].is_null()) {
        models::RateCap cap;
        cap.cap_level = j["rate_cap"].value("cap_level", 1.0);
        cap.width = j["rate_cap"].value("width", 1.0);
        cfg.rate_cap = cap;
    }
    return cfg;
}

mc::McConfig mc_from_json(const json& j) {
    mc::McConfig cfg;
    if (j.is_null()) return cfg;
    cfg.n_paths = j.value("n_paths", cfg.n_paths);
    cfg.n_steps = j.value("n_steps", cfg.n_steps);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.antithetic = j.value("antithetic", cfg.antithetic);
    if (j.contains("scheme")) {
        const std::string s = j["scheme"];
        cfg.scheme = s == "euler"                   ? mc::Scheme::Euler
                     : s == "full-truncation-euler" ? mc::Scheme::FullTruncationEuler
                     : s == "exact-ou"
                         ? mc::Scheme::ExactOu
                         : throw ConfigError("scheme must be euler|full-truncation-euler|exact-ou");
    }
    return cfg;
}

struct Run {
    json config;          // effective config (defaults resolved)
    std::uint64_t hash = 0;
    fs::path out_dir;
    json manifest;

    void begin(const std::string& command) {
        hash = serialize::config_hash(config);
        manifest["artifact_version"] = kVersion;
        manifest["command"] = command;
        manifest["config_hash"] = serialize::hash_hex(hash);
        manifest["config"] = config;
        long long epoch = 0;
        if (const char* e = std::getenv("SOURCE_DATE_EPOCH")) epoch = std::atoll(e);
        manifest["timestamp"] = epoch;
        manifest["files"] = json::array();
        if (!out_dir.empty()) fs::create_directories(out_dir);
    }

    void write(const std::string& name, const std::string& content) {
        if (out_dir.empty()) return;
        const fs::path p = out_dir / name;
        std::ofstream out(p, std::ios::binary);
        out << content;
        out.close();
        manifest["files"].push_back({{"name", name}, {"bytes", content.size()}});
    }

    void finish() {
        if (out_dir.empty()) return;
        // the manifest lists itself last with a placeholder size of 0
        manifest["files"].push_back({{"name", "manifest.json"}, {"bytes", 0}});
        std::ofstream out(out_dir / "manifest.json", std::ios::binary);
        out << manifest.dump(2) << '\n';
    }
};

json effective_grid_json(const pde::Grid& g) {
    return {{"x_min", g.x_min}, {"x_max", g.x_max}, {"nx", g.nx}, {"T", g.T}, {"nt", g.nt}};
}

pde::Grid grid_from_json(const json& j, const models::ShortRateModel& model, double x0, double T,
                         const std::string& grid_override) {
    pde::Grid g;
    int nx = 801, nt = 400;
    if (!grid_override.empty()) {
        if (std::sscanf(grid_override.c_str(), "%d,%d", &nx, &nt) != 2)
            throw ConfigError("--grid expects nx,nt");
    } else if (!j.is_null()) {
        nx = j.value("nx", nx);
        nt = j.value("nt", nt);
    }
    if (!j.is_null() && j.contains("x_min") && j.contains("x_max")) {
        g.x_min = j["x_min"];
        g.x_max = j["x_max"];
        g.nx = nx;
        g.T = T;
        g.nt = nt;
    } else {
        g = pde::default_grid(model, x0, T, nx, nt);
    }
    return g;
}

checks::CheckConfig region_from_json(const json& cfg, double x0, const std::string& region_override) {
    checks::CheckConfig c = checks::default_region(x0);
    if (!region_override.empty()) {
        double lo, hi;
        if (std::sscanf(region_override.c_str(), "%lf,%lf", &lo, &hi) != 2)
            throw ConfigError("--region expects xlo,xhi");
        c.x_lo = lo;
        c.x_hi = hi;
    } else if (cfg.contains("region") && cfg["region"].is_array() && cfg["region"].size() == 2) {
        c.x_lo = cfg["region"][0].get<double>();
        c.x_hi = cfg["region"][1].get<double>();
    }
    return c;
}

std::optional<affine::AffineParams> affine_oracle(const json& model_json) {
    if (model_json.value("type", "registry") != std::string("registry")) return std::nullopt;
    const std::string name = model_json.at("name");
    const auto p = registry_params_from_json(model_json);
    if (name == "V")
        return affine::AffineParams::vasicek(p.scalars.at("k"), p.scalars.at("theta"),
                                             p.scalars.at("sigma"));
    if (name == "CIR")
        return affine::AffineParams::cir(p.scalars.at("k"), p.scalars.at("theta"),
                                         p.scalars.at("sigma"));
    if (name == "HW" && p.theta_table)
        return affine::AffineParams::hull_white(p.scalars.at("k"), *p.theta_table,
                                                p.scalars.at("sigma"));
    return std::nullopt;
}

checks::CheckReport run_named_check(const std::string& name, const pde::PriceSurface& surf,
                                    const checks::CheckConfig& ccfg) {
    if (name == "convexity") return checks::convexity_check(surf, ccfg);
    if (name == "log-convex") return checks::log_curvature_check(surf, checks::LogMode::Convex, ccfg);
    if (name == "log-concave")
        return checks::log_curvature_check(surf, checks::LogMode::Concave, ccfg);
    if (name == "monotone-x") return checks::monotonicity_x_check(surf, ccfg);
    throw ConfigError("unknown check '" + name + "'");
}

// ------------------------------------------------------------ subcommands ---

int cmd_price(Run& run, const json& cfg, const std::string& grid_flag,
              const std::string& region_flag, std::optional<std::uint64_t> seed_flag,
              bool no_probe) {
    const auto model = model_from_json(cfg.at("model"));
    const auto payoff = payoff_from_json(cfg.contains("payoff") ? cfg["payoff"] : json());
    const double x0 = cfg.value("x0", 0.05);
    const double T = cfg.value("T", 5.0);
    const auto scfg = solver_from_json(cfg.contains("solver") ? cfg["solver"] : json());
    const pde::Grid grid = grid_from_json(cfg.contains("grid") ? cfg["grid"] : json(), model, x0,
                                          T, grid_flag);
    const auto region = region_from_json(cfg, x0, region_flag);

    run.config = cfg;
    run.config["x0"] = x0;
    run.config["T"] = T;
    run.config["grid"] = effective_grid_json(grid);
    run.config["region"] = {region.x_lo ? *region.x_lo : grid.x_min,
                            region.x_hi ? *region.x_hi : grid.x_max};
    if (seed_flag && run.config.contains("mc")) run.config["mc"]["seed"] = *seed_flag;
    run.begin("price");

    pde::PriceSurface surf = pde::solve(model, payoff, grid, scfg);
    surf.config_hash = run.hash;
    if (surf.max_explicit_load > 1.0)
        std::cerr << "warning: explicit component dominates (load "
                  << serialize::format_double(surf.max_explicit_load)
                  << "); consider more time steps or theta = 1\n";
    if (!no_probe) {
        surf.boundary_probe = pde::boundary_influence_probe(
            model, payoff, grid, scfg, run.config["region"][0], run.config["region"][1]);
        run.manifest["boundary_probe"] = surf.boundary_probe;
    }
    run.write("surface.csv", serialize::surface_csv(surf));
    run.manifest["surface"] = serialize::surface_envelope(surf);

    if (cfg.contains("mc") && !cfg["mc"].is_null()) {
        auto mcfg = mc_from_json(cfg["mc"]);
        if (seed_flag) mcfg.seed = *seed_flag;
        mc::McEstimate est = mc::price(model, payoff, x0, 0.0, T, mcfg);
        est.config_hash = run.hash;
        run.manifest["estimates"] = json::array({serialize::estimate_json(est)});
        std::cout << "mc mean=" << serialize::format_double(est.mean)
                  << " stderr=" << serialize::format_double(est.stderr_) << "\n";
    }
    std::cout << "price(" << model.name() << ", x0=" << x0 << ", T=" << T
              << ") = " << serialize::format_double(surf.interpolate(x0, grid.nt)) << "\n";
    run.finish();
    return 0;
}

int cmd_option(Run& run, const json& cfg, const std::string& grid_flag,
               const std::string& region_flag) {
    const auto model = model_from_json(cfg.at("model"));
    const json& opt = cfg.at("option");
    const double K = opt.at("strike");
    const double T1 = opt.at("T1");
    const double T2 = opt.at("T2");
    if (!(T2 > T1)) throw ConfigError("option requires T2 > T1");
    const double x0 = cfg.value("x0", 0.05);
    const auto scfg = solver_from_json(cfg.contains("solver") ? cfg["solver"] : json());

    // truncation sized for the T2 horizon, then re-labelled for [0, T1]
    pde::Grid grid = grid_from_json(cfg.contains("grid") ? cfg["grid"] : json(), model, x0, T2,
                                    grid_flag);
    grid.T = T1;
    const auto region = region_from_json(cfg, x0, region_flag);

    run.config = cfg;
    run.config["x0"] = x0;
    run.config["grid"] = effective_grid_json(grid);
    run.begin("option");

    pde::BondOptionPrice res = pde::price_bond_option(model, K, T1, T2, grid, scfg);
    res.inner.config_hash = run.hash;
    res.outer.config_hash = run.hash;
    run.write("inner_bond.csv", serialize::surface_csv(res.inner));
    run.write("option_surface.csv", serialize::surface_csv(res.outer));

    json reports = json::array();
    bool all_pass = true;
    for (const auto* surf : {&res.inner, &res.outer}) {
        const auto rep = checks::convexity_check(*surf, region);
        all_pass = all_pass && rep.pass;
        reports.push_back(serialize::check_report_json(rep));
    }
    run.manifest["checks"] = reports;
    std::cout << "option(" << model.name() << ", K=" << K << ", T1=" << T1 << ", T2=" << T2
              << ") = " << serialize::format_double(res.outer.interpolate(x0, res.outer.grid.nt))
              << (all_pass ? "  [convexity pass]" : "  [convexity FAIL]") << "\n";
    run.finish();
    return all_pass ? 0 : 1;
}

int cmd_check(Run& run, const json& cfg, const std::string& grid_flag,
              const std::string& region_flag) {
    const auto model = model_from_json(cfg.at("model"));
    const auto payoff = payoff_from_json(cfg.contains("payoff") ? cfg["payoff"] : json());
    const double x0 = cfg.value("x0", 0.05);
    const double T = cfg.value("T", 5.0);
    const auto scfg = solver_from_json(cfg.contains("solver") ? cfg["solver"] : json());
    const pde::Grid grid = grid_from_json(cfg.contains("grid") ? cfg["grid"] : json(), model, x0,
                                          T, grid_flag);
    const auto region = region_from_json(cfg, x0, region_flag);
    if (!cfg.contains("checks") || !cfg["checks"].is_array() || cfg["checks"].empty())
        throw ConfigError("check: config must list the checks to run");

    run.config = cfg;
    run.config["grid"] = effective_grid_json(grid);
    run.begin("check");

    pde::PriceSurface surf = pde::solve(model, payoff, grid, scfg);
    surf.config_hash = run.hash;

    std::optional<pde::PriceSurface> surf_b;
    if (cfg.contains("model_b")) {
        const auto model_b = model_from_json(cfg["model_b"]);
        surf_b = pde::solve(model_b, payoff, grid, scfg);
        surf_b->config_hash = run.hash;
    }

    json reports = json::array();
    bool all_pass = true;
    for (const auto& item : cfg["checks"]) {
        const std::string name = item.get<std::string>();
        checks::CheckReport rep;
        if (name == "dominance") {
            if (!surf_b) throw ConfigError("dominance check needs model_b");
            rep = checks::dominance_check(surf, *surf_b, region);
        } else {
            rep = run_named_check(name, surf, region);
        }
        all_pass = all_pass && rep.pass;
        reports.push_back(serialize::check_report_json(rep));
        std::cout << rep.property << ": " << (rep.pass ? "pass" : "FAIL")
                  << " (violation=" << serialize::format_double(rep.violation)
                  << ", tol=" << serialize::format_double(rep.tolerance()) << ")\n";
    }
    run.manifest["checks"] = reports;
    run.write("checks.json", reports.dump(2) + "\n");
    run.finish();
    return all_pass ? 0 : 1;
}

int cmd_table2(Run& run, const json& cfg) {
    std::vector<shape::ShapeReport> rows;
    for (const char* name : {"V", "CIR", "D", "EV", "HW", "BK", "MM"}) {
        models::RegistryParams params = shape::stock_params(name);
        if (cfg.contains("params") && cfg["params"].contains(name)) {
            const auto& o = cfg["params"][name];
            models::RegistryParams po;
            for (auto it = o.begin(); it != o.end(); ++it)
                if (it.key() != "theta_table") po.scalars[it.key()] = it.value().get<double>();
            if (o.contains("theta_table")) po.theta_table = table_from_json(o["theta_table"]);
            else po.theta_table = params.theta_table;
            params = po;
        }
        rows.push_back(shape::shape_report(models::registry(name, params)));
    }

    run.config = cfg.is_null() ? json::object() : cfg;
    run.begin("table2");
    json jout;
    jout["semantics"] = "a failing column means the sufficient condition fails, not that the "
                        "property is disproved";
    jout["rows"] = json::array();
    for (const auto& r : rows) jout["rows"].push_back(serialize::shape_report_json(r));
    run.write("table2.csv", serialize::table2_csv(rows));
    run.write("table2.json", jout.dump(2) + "\n");
    run.manifest["table2"] = jout;
    run.finish();

    bool golden = true;
    const auto want = shape::table2_golden();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const bool row_ok = rows[i].model == want[i].model && rows[i].c.pass == want[i].c &&
                            rows[i].lcv.pass == want[i].lcv && rows[i].lcc.pass == want[i].lcc;
        golden = golden && row_ok;
        std::cout << rows[i].model << ": C=" << (rows[i].c.pass ? "Y" : "N")
                  << " LCV=" << (rows[i].lcv.pass ? "Y" : "N")
                  << " LCC=" << (rows[i].lcc.pass ? "Y" : "N") << (row_ok ? "" : "   <- deviates")
                  << "\n";
    }
    return golden ? 0 : 1;
}

int cmd_compare(Run& run, const json& cfg, std::optional<std::uint64_t> seed_flag) {
    const auto model_a = model_from_json(cfg.at("model"));
    const auto model_b = model_from_json(cfg.at("model_b"));
    const auto payoff = payoff_from_json(cfg.contains("payoff") ? cfg["payoff"] : json());
    const double x0 = cfg.value("x0", 0.05);
    const double T = cfg.value("T", 5.0);
    auto mcfg = mc_from_json(cfg.contains("mc") ? cfg["mc"] : json());
    if (seed_flag) mcfg.seed = *seed_flag;
    const auto scfg = solver_from_json(cfg.contains("solver") ? cfg["solver"] : json());

    run.config = cfg;
    run.begin("compare");

    // PDE dominance on a shared grid
    const pde::Grid grid = pde::default_grid(model_a, x0, T);
    pde::PriceSurface sa = pde::solve(model_a, payoff, grid, scfg);
    pde::PriceSurface sb = pde::solve(model_b, payoff, grid, scfg);
    sa.config_hash = sb.config_hash = run.hash;
    const auto region = checks::default_region(x0);
    const auto dom = checks::dominance_check(sa, sb, region);

    // coupled Monte Carlo
    const auto coupled = mc::coupled_compare(model_a, model_b, payoff, x0, 0.0, T, mcfg);
    const bool mc_sign_ok = coupled.diff_mean >= -3.0 * coupled.diff_stderr;

    json out;
    out["dominance"] = serialize::check_report_json(dom);
    out["mc_a"] = serialize::estimate_json(coupled.a);
    out["mc_b"] = serialize::estimate_json(coupled.b);
    out["paired_diff"] = {{"mean", coupled.diff_mean}, {"stderr", coupled.diff_stderr}};
    run.manifest["compare"] = out;
    run.write("compare.json", out.dump(2) + "\n");
    run.finish();

    std::cout << "dominance: " << (dom.pass ? "pass" : "FAIL")
              << "; paired diff = " << serialize::format_double(coupled.diff_mean) << " +- "
              << serialize::format_double(coupled.diff_stderr)
              << (mc_sign_ok ? " (sign ok)" : " (sign VIOLATION)") << "\n";
    return (dom.pass && mc_sign_ok) ? 0 : 1;
}

int cmd_converge(Run& run, const json& cfg, const std::string& grid_flag) {
    const auto model = model_from_json(cfg.at("model"));
    const auto oracle = affine_oracle(cfg.at("model"));
    if (!oracle) throw ConfigError("converge: model must be an affine registry model (V, CIR, HW)");
    const double x0 = cfg.value("x0", 0.05);
    const double T = cfg.value("T", 5.0);
    const auto scfg = solver_from_json(cfg.contains("solver") ? cfg["solver"] : json());
    const pde::Grid grid = grid_from_json(cfg.contains("grid") ? cfg["grid"] : json(), model, x0,
                                          T, grid_flag);
    const auto region = checks::default_region(x0);

    run.config = cfg;
    run.config["grid"] = effective_grid_json(grid);
    run.begin("converge");

    const auto sol = affine::riccati_bond(*oracle, T, 8 * grid.nt);
    auto max_err = [&](const pde::PriceSurface& s) {
        const auto [ilo, ihi] = checks::region_indices(s.grid, region);
        double worst = 0.0;
        for (int j = 1; j <= s.grid.nt; ++j) {
            const double A = sol.A_at(s.grid.tau(j));
            const double B = sol.B_at(s.grid.tau(j));
            for (int i = ilo; i <= ihi; ++i) {
                const double ex = std::exp(-A - B * s.grid.x(i));
                worst = std::max(worst, std::fabs(s.at(i, j) - ex) / ex);
            }
        }
        return worst;
    };

    const pde::PriceSurface coarse = pde::solve(model, models::unit_payoff(), grid, scfg);
    pde::Grid fine = grid;
    fine.nx = 2 * grid.nx - 1;
    fine.nt = 2 * grid.nt;
    const pde::PriceSurface fined = pde::solve(model, models::unit_payoff(), fine, scfg);

    const double e1 = max_err(coarse), e2 = max_err(fined);
    json out;
    out["err_coarse"] = e1;
    out["err_fine"] = e2;
    out["ratio"] = e1 / std::max(e2, 1e-300);
    run.manifest["converge"] = out;
    run.write("converge.json", out.dump(2) + "\n");
    run.finish();
    std::cout << "err(h)=" << serialize::format_double(e1)
              << " err(h/2)=" << serialize::format_double(e2)
              << " ratio=" << serialize::format_double(out["ratio"].get<double>()) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"term structure pricing and property verification"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir, grid_flag, region_flag;
    std::optional<std::uint64_t> seed_flag;
    bool no_probe = false;
    app.add_option("--config", config_path, "run configuration JSON");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--grid", grid_flag, "grid override nx,nt");
    app.add_option("--region", region_flag, "report region override xlo,xhi");
    std::uint64_t seed_raw = 0;
    auto* seed_opt = app.add_option("--seed", seed_raw, "Monte Carlo seed override");
    app.add_flag("--no-probe", no_probe, "skip the boundary influence probe");

    auto* price = app.add_subcommand("price", "solve a bond/option PDE and optionally price by MC");
    auto* option = app.add_subcommand("option", "nested bond-call pricing with property checks");
    auto* check = app.add_subcommand("check", "run property checks on a priced surface");
    auto* table2 = app.add_subcommand("table2", "classify the reference models (golden table)");
    auto* compare = app.add_subcommand("compare", "coupled comparison of two models");
    auto* converge = app.add_subcommand("converge", "grid-refinement study against the oracle");

    try {
        app.parse(argc, argv);
        if (seed_opt->count() > 0) seed_flag = seed_raw;

        json cfg;
        if (!config_path.empty()) cfg = load_config(config_path);

        Run run;
        run.out_dir = out_dir;

        if (price->parsed()) return cmd_price(run, cfg, grid_flag, region_flag, seed_flag, no_probe);
        if (option->parsed()) return cmd_option(run, cfg, grid_flag, region_flag);
        if (check->parsed()) return cmd_check(run, cfg, grid_flag, region_flag);
        if (table2->parsed()) return cmd_table2(run, cfg);
        if (compare->parsed()) return cmd_compare(run, cfg, seed_flag);
        if (converge->parsed()) return cmd_converge(run, cfg, grid_flag);
        throw ConfigError("no subcommand given");
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad flags are config errors
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
