#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "termshape/checks.hpp"
#include "termshape/grid.hpp"
#include "termshape/mc.hpp"
#include "termshape/shape.hpp"

namespace termshape::serialize {

std::uint64_t fnv1a64(std::string_view data);
std::string hash_hex(std::uint64_t h);

/// Canonical form: compact dump with sorted object keys (nlohmann's default
/// object storage) and shortest-round-trip numbers. Equal configs hash equal.
std::string canonical(const nlohmann::json& j);
std::uint64_t config_hash(const nlohmann::json& j);

std::string format_double(double v);  // plain decimal, 17 significant digits

/// Header row of tau values, first column x values.
std::string surface_csv(const pde::PriceSurface& s);

nlohmann::json surface_envelope(const pde::PriceSurface& s);
nlohmann::json check_report_json(const checks::CheckReport& r);
nlohmann::json estimate_json(const mc::McEstimate& e);
nlohmann::json shape_report_json(const shape::ShapeReport& r);

std::string table2_csv(const std::vector<shape::ShapeReport>& rows);

}  // namespace termshape::serialize
