#include "vflow/runconfig.hpp"

#include <fstream>

#include "vflow/errors.hpp"

namespace vflow {

using nlohmann::json;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

static Vec2 parse_vec2(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError(what + " must be an array of two numbers");
    return {j[0].get<double>(), j[1].get<double>()};
}

Lattice parse_lattice(const json& j) {
    if (!j.contains("a") || !j.contains("b"))
        throw ConfigError("lattice needs generator vectors a and b");
    const Vec2 a = parse_vec2(j.at("a"), "lattice.a");
    const Vec2 b = parse_vec2(j.at("b"), "lattice.b");
    try {
        return make_lattice(a, b);
    } catch (const Error& e) {
        // a bad lattice in a config file is a config problem, not a numerical one
        throw ConfigError(std::string("lattice: ") + e.what());
    }
}

ConformalFactor parse_conformal(const json& j) {
    int truncation = 64;
    if (j.contains("truncation")) {
        if (!j.at("truncation").is_number_integer())
            throw ConfigError("conformal.truncation must be an integer");
        truncation = j.at("truncation").get<int>();
    }
    std::vector<FourierMode> modes;
    if (j.contains("coefficients")) {
        const json& cs = j.at("coefficients");
        if (!cs.is_array())
            throw ConfigError("conformal.coefficients must be an array");
        for (const json& e : cs) {
            if (!e.is_array() || e.size() != 4)
                throw ConfigError("each coefficient must be [m, n, re, im]");
            FourierMode mode;
            mode.m = e[0].get<int>();
            mode.n = e[1].get<int>();
            mode.c = {e[2].get<double>(), e[3].get<double>()};
            modes.push_back(mode);
        }
    }
    try {
        return make_conformal(truncation, modes);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("conformal: ") + e.what());
    }
}

SurfaceConfig parse_surface(const json& j) {
    if (!j.is_object() || j.empty())
        throw ConfigError("config needs a surface object with a lattice");
    if (!j.contains("lattice"))
        throw ConfigError("missing config key: surface.lattice");
    SurfaceConfig sc;
    sc.lat = parse_lattice(j.at("lattice"));
    sc.cf = j.contains("conformal") ? parse_conformal(j.at("conformal"))
                                    : make_conformal(64, {});
    return sc;
}

double require_double(const json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw ConfigError("missing or non-numeric config key: " + key);
    return j.at(key).get<double>();
}

double get_double(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key))
        return fallback;
    if (!j.at(key).is_number())
        throw ConfigError("config key must be numeric: " + key);
    return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& key, int fallback) {
    if (!j.contains(key))
        return fallback;
    if (!j.at(key).is_number_integer())
        throw ConfigError("config key must be an integer: " + key);
    return j.at(key).get<int>();
}

} // namespace vflow
