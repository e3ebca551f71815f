#pragma once

#include <optional>
#include <string>
#include <vector>

#include "radgreen/io.hpp"

namespace radgreen {

/// Everything a CLI run needs. JSON config first, command-line flags on top.
struct RunConfig {
    int n = 3;
    Boundary bc = Boundary::Neumann;
    std::string potential = "const:1";
    int grid = 2001;
    double eps = 1e-6;
    std::vector<double> ps;
    // box overrides
    std::optional<double> R1, R2, c, target;
    // minimizer
    double tol = 1e-6;
    double mass_tol = 1e-8;
    int max_outer = 40;
    int max_inner = 20000;
    // shooting
    double a_lo = 1e-3, a_hi = 1e3;
    int samples = 121;
    bool cross_check = false;
    // lin-ni
    std::vector<double> lambdas;
    // verify
    std::string only;
    std::optional<double> verify_tol;
    std::string out = ".";

    PotentialSpec potential_spec() const { return parse_potential(potential); }
    GridPtr make_grid_ptr() const { return make_grid(n, grid, eps); }
    MinimizeOptions minimize_options() const {
        MinimizeOptions o;
        o.tol = tol;
        o.mass_tol = mass_tol;
        o.max_outer = max_outer;
        o.max_inner = max_inner;
        return o;
    }
};

inline std::vector<double> default_lambdas() {
    std::vector<double> l;
    for (int k = 0; k <= 10; ++k) l.push_back(1e-3 * std::pow(10.0, 0.5 * k));
    return l;
}

inline std::vector<double> parse_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    if (detail::trim(s).empty()) return out;
    for (const auto& item : detail::split(s, ',')) out.push_back(detail::parse_double(item, what));
    return out;
}

namespace detail {

template <class T>
T get_as(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

inline std::vector<double> get_list(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_string()) return parse_list(v.get<std::string>(), key);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw ConfigError(std::string("config key '") + key + "' must be a list");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError(std::string("config key '") + key + "' must hold numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

}  // namespace detail

inline void apply_json(RunConfig& cfg, const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    using detail::get_as;
    for (const auto& [key, value] : j.items()) {
        const char* k = key.c_str();
        if (key == "n") cfg.n = get_as<int>(j, k);
        else if (key == "bc") cfg.bc = parse_boundary(get_as<std::string>(j, k));
        else if (key == "potential") cfg.potential = get_as<std::string>(j, k);
        else if (key == "grid") cfg.grid = get_as<int>(j, k);
        else if (key == "eps") cfg.eps = get_as<double>(j, k);
        else if (key == "p") cfg.ps = detail::get_list(j, k);
        else if (key == "R1") cfg.R1 = get_as<double>(j, k);
        else if (key == "R2") cfg.R2 = get_as<double>(j, k);
        else if (key == "c") cfg.c = get_as<double>(j, k);
        else if (key == "target") cfg.target = get_as<double>(j, k);
        else if (key == "tol") cfg.tol = get_as<double>(j, k);
        else if (key == "mass_tol") cfg.mass_tol = get_as<double>(j, k);
        else if (key == "max_outer") cfg.max_outer = get_as<int>(j, k);
        else if (key == "max_inner") cfg.max_inner = get_as<int>(j, k);
        else if (key == "a_lo") cfg.a_lo = get_as<double>(j, k);
        else if (key == "a_hi") cfg.a_hi = get_as<double>(j, k);
        else if (key == "samples") cfg.samples = get_as<int>(j, k);
        else if (key == "cross_check") cfg.cross_check = get_as<bool>(j, k);
        else if (key == "lambdas") cfg.lambdas = detail::get_list(j, k);
        else if (key == "only") cfg.only = get_as<std::string>(j, k);
        else if (key == "verify_tol") cfg.verify_tol = get_as<double>(j, k);
        else if (key == "out") cfg.out = get_as<std::string>(j, k);
        else throw ConfigError("unknown config key '" + key + "'");
    }
}

inline RunConfig load_config(const std::string& path) {
    RunConfig cfg;
    apply_json(cfg, read_json(path));
    return cfg;
}

/// Checks what can be checked without building anything; component invariants
/// that need a Green pair are enforced by the components (as DomainError).
inline void validate(const RunConfig& cfg) {
    auto need = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    need(cfg.n >= 2 && cfg.n <= 10, "n must lie in [2, 10]");
    need(cfg.grid >= 11, "grid needs at least 11 points");
    need(cfg.eps > 0 && cfg.eps < 0.01, "eps must lie in (0, 0.01)");
    for (double p : cfg.ps) need(p > 1 && std::isfinite(p), "every p must exceed 1");
    if (cfg.R1) need(*cfg.R1 > cfg.eps && *cfg.R1 < 1, "R1 must lie in (eps, 1)");
    if (cfg.R2) need(*cfg.R2 > 0 && *cfg.R2 <= 1, "R2 must lie in (0, 1]");
    if (cfg.R1 && cfg.R2) need(*cfg.R1 < *cfg.R2, "need R1 < R2");
    need(cfg.R1.has_value() == cfg.R2.has_value(), "R1 and R2 must be given together");
    if (cfg.c) need(*cfg.c > 0 && *cfg.c < 1, "c must lie in (0, 1)");
    if (cfg.target) need(*cfg.target > cfg.eps && *cfg.target <= 1, "target must lie in (eps, 1]");
    if (cfg.bc == Boundary::Dirichlet) {
        need(!(cfg.target && *cfg.target >= 1.0), "Dirichlet problems need r_bar in (0, 1); r_bar = 1 is rejected");
        need(!(cfg.R2 && *cfg.R2 >= 1.0 && !cfg.target), "Dirichlet box with R2 = 1 needs an interior target");
    }
    need(cfg.tol > 0 && cfg.mass_tol > 0, "tolerances must be positive");
    need(cfg.max_outer > 0 && cfg.max_inner > 0, "iteration caps must be positive");
    need(cfg.a_lo > 0 && cfg.a_lo < cfg.a_hi, "need 0 < a_lo < a_hi");
    need(cfg.samples >= 2, "samples must be at least 2");
    for (double l : cfg.lambdas) need(l > 0, "lambdas must be positive");
    if (cfg.verify_tol) need(*cfg.verify_tol > 0, "verify tolerance must be positive");
    cfg.potential_spec();  // throws ConfigError on a bad spec or a missing file
}

inline json to_json(const RunConfig& c) {
    json j{{"n", c.n},
           {"bc", to_string(c.bc)},
           {"potential", c.potential},
           {"grid", c.grid},
           {"eps", c.eps},
           {"p", c.ps},
           {"tol", c.tol},
           {"mass_tol", c.mass_tol},
           {"max_outer", c.max_outer},
           {"max_inner", c.max_inner},
           {"a_lo", c.a_lo},
           {"a_hi", c.a_hi},
           {"samples", c.samples},
           {"cross_check", c.cross_check}};
    if (c.R1) j["R1"] = *c.R1;
    if (c.R2) j["R2"] = *c.R2;
    if (c.c) j["c"] = *c.c;
    if (c.target) j["target"] = *c.target;
    if (!c.lambdas.empty()) j["lambdas"] = c.lambdas;
    return j;
}

}  // namespace radgreen
