#include "termshape/serialize.hpp"

#include <cstdio>

namespace termshape::serialize {

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string canonical(const nlohmann::json& j) { return j.dump(); }

std::uint64_t config_hash(const nlohmann::json& j) { return fnv1a64(canonical(j)); }

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string surface_csv(const pde::PriceSurface& s) {
    std::string out = "x";
    for (int j = 0; j <= s.grid.nt; ++j) {
        out += ',';
        out += format_double(s.grid.tau(j));
    }
    out += '\n';
    for (int i = 0; i < s.grid.nx; ++i) {
        out += format_double(s.grid.x(i));
        for (int j = 0; j <= s.grid.nt; ++j) {
            out += ',';
            out += format_double(s.at(i, j));
        }
        out += '\n';
    }
    return out;
}

nlohmann::json surface_envelope(const pde::PriceSurface& s) {
    nlohmann::json j;
    j["model"] = s.model_name;
    j["solver"] = s.solver_id;
    j["config_hash"] = hash_hex(s.config_hash);
    j["grid"] = {{"x_min", s.grid.x_min}, {"x_max", s.grid.x_max}, {"nx", s.grid.nx},
                 {"T", s.grid.T},         {"nt", s.grid.nt}};
    if (s.boundary_probe >= 0.0) j["boundary_probe"] = s.boundary_probe;
    j["max_explicit_load"] = s.max_explicit_load;
    j["min_value"] = s.min_value;
    j["growth_fit_M"] = s.growth_fit_M;
    return j;
}

nlohmann::json check_report_json(const checks::CheckReport& r) {
    nlohmann::json j;
    j["property"] = r.property;
    j["verdict"] = r.pass ? "pass" : "fail";
    j["violation"] = r.violation;
    j["x"] = r.x;
    j["tau"] = r.tau;
    j["atol"] = r.atol;
    j["h2_allowance"] = r.h2_allowance;
    j["surface_hash"] = hash_hex(r.surface_hash);
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

nlohmann::json estimate_json(const mc::McEstimate& e) {
    nlohmann::json j;
    j["mean"] = e.mean;
    j["stderr"] = e.stderr_;
    j["n_paths"] = e.n_paths;
    j["config_hash"] = hash_hex(e.config_hash);
    return j;
}

nlohmann::json shape_report_json(const shape::ShapeReport& r) {
    auto cond = [](const shape::ConditionResult& c) {
        nlohmann::json j;
        j["pass"] = c.pass;
        if (!c.pass) {
            j["witness_x"] = c.witness_x;
            j["witness_t"] = c.witness_t;
            j["witness_value"] = c.witness_value;
        }
        return j;
    };
    nlohmann::json j;
    j["model"] = r.model;
    j["C"] = cond(r.c);
    j["LCV"] = cond(r.lcv);
    j["LCC"] = cond(r.lcc);
    j["affine"] = r.affine;
    j["region"] = {{"x_lo", r.region.x_lo}, {"x_hi", r.region.x_hi},
                   {"t_lo", r.region.t_lo}, {"t_hi", r.region.t_hi},
                   {"nx", r.region.nx},     {"nt", r.region.nt}};
    return j;
}

std::string table2_csv(const std::vector<shape::ShapeReport>& rows) {
    std::string out = "model,C,LCV,LCC,witness_x,witness_t,witness_value\n";
    for (const auto& r : rows) {
        out += r.model;
        out += r.c.pass ? ",Y" : ",N";
        out += r.lcv.pass ? ",Y" : ",N";
        out += r.lcc.pass ? ",Y" : ",N";
        // witness of the first failing condition, blank when all pass
        const shape::ConditionResult* w = nullptr;
        if (!r.c.pass) w = &r.c;
        else if (!r.lcv.pass) w = &r.lcv;
        else if (!r.lcc.pass) w = &r.lcc;
        if (w) {
            out += ',' + format_double(w->witness_x);
            out += ',' + format_double(w->witness_t);
            out += ',' + format_double(w->witness_value);
        } else {
            out += ",,,";
        }
        out += '\n';
    }
    return out;
}

}  // namespace termshape::serialize
