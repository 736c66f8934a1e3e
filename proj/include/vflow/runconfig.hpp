#pragma once

#include <string>

#include <json.hpp>

#include "vflow/surface.hpp"

namespace vflow {

/** Parse a JSON config file; malformed JSON becomes a ConfigError. */
nlohmann::json load_json(const std::string& path);

/** {"a": [ax, ay], "b": [bx, by]} (defaults to the unit square). */
Lattice parse_lattice(const nlohmann::json& j);

/** {"truncation": n, "coefficients": [[m, n, re, im], ...]}; an absent or
 *  empty block means the flat metric. */
ConformalFactor parse_conformal(const nlohmann::json& j);

struct SurfaceConfig {
    Lattice lat;
    ConformalFactor cf;
};

/** {"lattice": {...}, "conformal": {...}}, both optional. */
SurfaceConfig parse_surface(const nlohmann::json& j);

double require_double(const nlohmann::json& j, const std::string& key);
double get_double(const nlohmann::json& j, const std::string& key, double fallback);
int get_int(const nlohmann::json& j, const std::string& key, int fallback);

} // namespace vflow
