#pragma once

/// @file config.hpp
/// @brief Registry of default parameterisations and the single entry point
/// that runs any registered algorithm by name.
///
/// Defaults:
///   hms        n_pop=50 k=5 c=1 m_low=2 m_high=5
///   hms-os     n_pop=50 k_search=5 k_objective=10 c1=c2=1.5 m_low=2 m_high=10
///   hms-os-v1  hms-os with dual clustering off; movement uses C = c1
///   hms-os-v2  hms-os with adaptive count off; q drawn from [m_low, m_high]
///   pso        n_pop=50 c1=c2=2 inertia 1 -> 0
///   gwo        n_pop=50
/// The HMS family also accepts beta_low / beta_high (default 0.3 / 1.99).

#include <hmsos/baselines.hpp>
#include <hmsos/core.hpp>
#include <hmsos/hms.hpp>
#include <hmsos/hms_os.hpp>

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace hmsos {

using ParameterMap = std::map<std::string, double>;

namespace config_detail {

inline ParameterMap hms_os_family(double c1, double m_high) {
    return {{"n_pop", 50},      {"k_search", 5},       {"k_objective", 10}, {"c1", c1},
            {"c2", 1.5},        {"m_low", 2},          {"m_high", m_high},  {"beta_low", 0.3},
            {"beta_high", 1.99}, {"independent_r", 0}};
}

inline const std::map<std::string, ParameterMap>& registry() {
    static const std::map<std::string, ParameterMap> table = {
        {"hms",
         {{"n_pop", 50}, {"k", 5}, {"c", 1}, {"m_low", 2}, {"m_high", 5}, {"beta_low", 0.3}, {"beta_high", 1.99}}},
        {"hms-os", hms_os_family(1.5, 10)},
        {"hms-os-v1", hms_os_family(1.5, 10)},
        {"hms-os-v2", hms_os_family(1.5, 10)},
        {"pso", {{"n_pop", 50}, {"c1", 2}, {"c2", 2}, {"w_start", 1}, {"w_end", 0}}},
        {"gwo", {{"n_pop", 50}}},
    };
    return table;
}

inline std::int64_t as_integer(const ParameterMap& p, const std::string& key) {
    const double v = p.at(key);
    if (!std::isfinite(v) || v != std::floor(v) || v < 0)
        throw ConfigurationError("parameter '" + key + "' must be a non-negative integer");
    return static_cast<std::int64_t>(v);
}

inline bool as_flag(const ParameterMap& p, const std::string& key) {
    const double v = p.at(key);
    if (v != 0.0 && v != 1.0) throw ConfigurationError("parameter '" + key + "' must be 0 or 1");
    return v == 1.0;
}

} // namespace config_detail

inline std::vector<std::string> registered_algorithms() {
    std::vector<std::string> out;
    for (const auto& [name, _] : config_detail::registry()) out.push_back(name);
    return out;
}

inline bool is_registered(const std::string& name) { return config_detail::registry().count(name) != 0; }

inline HmsConfig make_hms_config(const ParameterMap& p, std::uint64_t nfe_max);
inline HmsOsConfig make_hms_os_config(const std::string& name, const ParameterMap& p, std::uint64_t nfe_max);
inline PsoConfig make_pso_config(const ParameterMap& p, std::uint64_t nfe_max);
inline GwoConfig make_gwo_config(const ParameterMap& p, std::uint64_t nfe_max);

/// Validates a full parameter map for `name` by building its config struct.
inline void validate_parameters(const std::string& name, const ParameterMap& p) {
    if (name == "hms") make_hms_config(p, 1).validate();
    else if (name == "pso") make_pso_config(p, 1).validate();
    else if (name == "gwo") make_gwo_config(p, 1).validate();
    else make_hms_os_config(name, p, 1).validate();
}

/// Default parameters for `name`, with `overrides` merged on top and the
/// result revalidated. Unknown names and unknown keys are configuration
/// errors.
inline ParameterMap defaults_for(const std::string& name, const ParameterMap& overrides = {}) {
    const auto& reg = config_detail::registry();
    const auto it = reg.find(name);
    if (it == reg.end()) throw ConfigurationError("unknown algorithm '" + name + "'");
    ParameterMap params = it->second;
    for (const auto& [key, value] : overrides) {
        if (!params.count(key)) throw ConfigurationError("algorithm '" + name + "' has no parameter '" + key + "'");
        params[key] = value;
    }
    validate_parameters(name, params);
    return params;
}

inline HmsConfig make_hms_config(const ParameterMap& p, std::uint64_t nfe_max) {
    using namespace config_detail;
    HmsConfig c;
    c.n_pop = static_cast<std::size_t>(as_integer(p, "n_pop"));
    c.k_search = static_cast<std::size_t>(as_integer(p, "k"));
    c.c = p.at("c");
    c.m_low = as_integer(p, "m_low");
    c.m_high = as_integer(p, "m_high");
    c.beta_low = p.at("beta_low");
    c.beta_high = p.at("beta_high");
    c.nfe_max = nfe_max;
    return c;
}

inline HmsOsConfig make_hms_os_config(const std::string& name, const ParameterMap& p, std::uint64_t nfe_max) {
    using namespace config_detail;
    HmsOsConfig c;
    c.base.n_pop = static_cast<std::size_t>(as_integer(p, "n_pop"));
    c.base.k_search = static_cast<std::size_t>(as_integer(p, "k_search"));
    c.base.m_low = as_integer(p, "m_low");
    c.base.m_high = as_integer(p, "m_high");
    c.base.beta_low = p.at("beta_low");
    c.base.beta_high = p.at("beta_high");
    c.base.nfe_max = nfe_max;
    c.k_objective = static_cast<std::size_t>(as_integer(p, "k_objective"));
    c.c1 = p.at("c1");
    c.c2 = p.at("c2");
    c.base.c = c.c1;
    c.independent_r = as_flag(p, "independent_r");
    c.adaptive_count = name == "hms-os" || name == "hms-os-v1";
    c.dual_clustering = name == "hms-os" || name == "hms-os-v2";
    return c;
}

inline PsoConfig make_pso_config(const ParameterMap& p, std::uint64_t nfe_max) {
    PsoConfig c;
    c.n_pop = static_cast<std::size_t>(config_detail::as_integer(p, "n_pop"));
    c.c1 = p.at("c1");
    c.c2 = p.at("c2");
    c.w_start = p.at("w_start");
    c.w_end = p.at("w_end");
    c.nfe_max = nfe_max;
    return c;
}

inline GwoConfig make_gwo_config(const ParameterMap& p, std::uint64_t nfe_max) {
    GwoConfig c;
    c.n_pop = static_cast<std::size_t>(config_detail::as_integer(p, "n_pop"));
    c.nfe_max = nfe_max;
    return c;
}

/// Runs registered algorithm `name` with validated parameters `params`.
inline RunTrace run_algorithm(const std::string& name, const ParameterMap& params, const ObjectiveProblem& problem,
                              std::uint64_t nfe_max, std::uint64_t seed) {
    RunTrace trace;
    if (name == "hms") trace = run_hms(problem, make_hms_config(params, nfe_max), seed);
    else if (name == "pso") trace = run_pso(problem, make_pso_config(params, nfe_max), seed);
    else if (name == "gwo") trace = run_gwo(problem, make_gwo_config(params, nfe_max), seed);
    else if (is_registered(name)) trace = run_hms_os(problem, make_hms_os_config(name, params, nfe_max), seed);
    else throw ConfigurationError("unknown algorithm '" + name + "'");
    trace.algorithm = name;
    return trace;
}

} // namespace hmsos
