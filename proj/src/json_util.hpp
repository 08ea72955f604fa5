#pragma once

// Small helpers for reading validated config fields with dotted-path errors.

#include <cmath>
#include <string>

#include <json.hpp>

#include "fmcf/errors.hpp"

namespace fmcf::detail {

inline std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

inline const nlohmann::json& require(const nlohmann::json& j, const std::string& key,
                                     const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(join(path, key), "missing required field");
    return *it;
}

inline double as_number(const nlohmann::json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
    return x;
}

inline double get_number(const nlohmann::json& j, const std::string& key, const std::string& path) {
    return as_number(require(j, key, path), join(path, key));
}

inline double get_number_or(const nlohmann::json& j, const std::string& key, double fallback,
                            const std::string& path) {
    if (!j.contains(key)) return fallback;
    return as_number(j.at(key), join(path, key));
}

inline long long as_integer(const nlohmann::json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
    return v.get<long long>();
}

inline long long get_integer(const nlohmann::json& j, const std::string& key, const std::string& path) {
    return as_integer(require(j, key, path), join(path, key));
}

inline long long get_integer_or(const nlohmann::json& j, const std::string& key, long long fallback,
                                const std::string& path) {
    if (!j.contains(key)) return fallback;
    return as_integer(j.at(key), join(path, key));
}

inline std::string get_string(const nlohmann::json& j, const std::string& key, const std::string& path) {
    const auto& v = require(j, key, path);
    if (!v.is_string()) throw ConfigError(join(path, key), "expected a string");
    return v.get<std::string>();
}

inline std::string get_string_or(const nlohmann::json& j, const std::string& key,
                                 const std::string& fallback, const std::string& path) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_string()) throw ConfigError(join(path, key), "expected a string");
    return v.get<std::string>();
}

inline bool get_bool_or(const nlohmann::json& j, const std::string& key, bool fallback,
                        const std::string& path) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_boolean()) throw ConfigError(join(path, key), "expected true or false");
    return v.get<bool>();
}

}  // namespace fmcf::detail
