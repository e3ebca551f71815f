#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "radgreen/landscape.hpp"
#include "radgreen/minimizer.hpp"
#include "radgreen/shooting.hpp"

namespace radgreen {

using json = nlohmann::json;

/// Header plus numeric rows. Every CSV the tool writes has this shape.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t k = 0; k < header.size(); ++k)
            if (header[k] == name) return k;
        throw ConfigError("csv: no column '" + name + "'");
    }
    std::vector<double> values(const std::string& name) const {
        const auto k = column(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& row : rows) out.push_back(row[k]);
        return out;
    }
};

/// Shortest representation that reads back to the same double.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

inline void write_csv(const std::filesystem::path& path, const CsvTable& t) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    for (std::size_t k = 0; k < t.header.size(); ++k) out << (k ? "," : "") << t.header[k];
    out << '\n';
    for (const auto& row : t.rows) {
        if (row.size() != t.header.size()) throw Error("write_csv: ragged row");
        for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_double(row[k]);
        out << '\n';
    }
}

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("'" + path.string() + "' is empty");
    t.header = detail::split(detail::trim(line), ',');
    while (std::getline(in, line)) {
        line = detail::trim(line);
        if (line.empty()) continue;
        auto cols = detail::split(line, ',');
        if (cols.size() != t.header.size()) throw ConfigError("'" + path.string() + "': row width mismatch");
        std::vector<double> row;
        for (const auto& c : cols) row.push_back(std::strtod(c.c_str(), nullptr));  // strtod reads nan/inf too
        t.rows.push_back(std::move(row));
    }
    return t;
}

// nlohmann writes non-finite doubles as null; keep them as strings so they read back
inline json num(double x) { return std::isfinite(x) ? json(x) : json(format_double(x)); }

inline double to_double(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return std::strtod(j.get<std::string>().c_str(), nullptr);
    throw ConfigError("expected a number, got " + j.dump());
}

inline void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

inline json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + path.string() + "': " + e.what());
    }
}

// ---------------------------------------------------------------------------
// green / landscape

inline CsvTable green_table(const GreenPair& pair) {
    CsvTable t{{"r", "xi", "zeta", "G_diag"}, {}};
    const auto& g = *pair.grid;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = g.node(i);
        t.rows.push_back({r, pair.xi.values[i], pair.zeta.values[i], pair.green_diagonal(r)});
    }
    return t;
}

inline json wronskian_report(const GreenPair& pair) {
    const auto w = wronskian(pair.xi, pair.zeta);
    double worst = 0.0;
    for (double x : w) worst = std::max(worst, std::abs(x - 1.0));
    return {{"n", pair.dimension()},
            {"boundary", to_string(pair.boundary)},
            {"kappa", num(pair.kappa)},
            {"max_abs_deviation", num(worst)},
            {"normalization_residual", num(pair.wronskian_residual)}};
}

inline CsvTable landscape_table(const LandscapeReport& rep) {
    CsvTable t{{"r", "F"}, {}};
    for (std::size_t i = 0; i < rep.r.size(); ++i) t.rows.push_back({rep.r[i], rep.F[i]});
    return t;
}

inline json to_json(const LandscapeReport& rep, std::size_t f_stride = 100) {
    json j;
    j["boundary"] = to_string(rep.boundary);
    j["minima"] = json::array();
    for (const auto& m : rep.minima)
        j["minima"].push_back(
            {{"r", num(m.r)}, {"F", num(m.F)}, {"a", num(m.a)}, {"b", num(m.b)}, {"boundary", m.boundary}});
    j["critical_points"] = json::array();
    for (const auto& c : rep.critical_points)
        j["critical_points"].push_back(
            {{"r", num(c.r)}, {"F", num(c.F)}, {"kind", c.kind == CriticalKind::Minimum ? "min" : "max"}});
    // thinned samples; F.csv has all of them
    j["f_samples"] = json::array();
    for (std::size_t i = 0; i < rep.r.size(); i += f_stride) j["f_samples"].push_back({num(rep.r[i]), num(rep.F[i])});
    if (!rep.r.empty() && (rep.r.size() - 1) % f_stride != 0) j["f_samples"].push_back({num(rep.r.back()), num(rep.F.back())});
    j["fprime_at_1"] = rep.fprime_at_1 ? num(*rep.fprime_at_1) : json(nullptr);
    j["catrina"] = json::array();
    for (const auto& c : rep.catrina)
        j["catrina"].push_back({{"p", num(c.p)},
                                {"increasing", c.increasing},
                                {"decreasing", c.decreasing},
                                {"no_solution_expected", c.no_solution_expected()}});
    j["reflection"] = json::array();
    for (const auto& r : rep.reflection)
        j["reflection"].push_back(
            {{"r", num(r.r)}, {"left", num(r.left)}, {"right", num(r.right)}, {"fprime", num(r.fprime)}});
    return j;
}

inline std::vector<MinimumRecord> minima_from_json(const json& j) {
    std::vector<MinimumRecord> out;
    for (const auto& m : j.at("minima"))
        out.push_back({to_double(m.at("r")), to_double(m.at("F")), to_double(m.at("a")), to_double(m.at("b")),
                       m.at("boundary").get<bool>()});
    return out;
}

// ---------------------------------------------------------------------------
// minimizer

inline json to_json(const ConstraintBox& box) {
    return {{"R1", num(box.R1)},       {"R2", num(box.R2)},         {"c", num(box.c)},
            {"m", num(box.m)},         {"r_bar", num(box.target)},  {"outer_obstacle", box.outer_obstacle}};
}

inline json run_report(const MinimizeResult& r, const ConvergenceRow& row) {
    return {{"p", num(r.p)},
            {"J_p", num(r.J)},
            {"lambda_p", num(r.lambda)},
            {"gamma_p", num(r.gamma)},
            {"kkt_residual", num(r.kkt_residual)},
            {"mass_residual", num(r.mass_residual)},
            {"active_set_size", r.active_set.size()},
            {"sup_dist_to_limit", num(row.sup_dist)},
            {"energy_dist_to_limit", num(row.energy_dist)},
            {"peak_r", num(row.peak_r)},
            {"peak_count", row.peak_count},
            {"obstacle_margin", num(row.obstacle_margin)},
            {"converged", r.converged},
            {"iterations", r.iterations},
            {"outer_iterations", r.outer_iterations},
            {"box", to_json(r.box)}};
}

inline CsvTable profile_table(const MinimizeResult& r) {
    CsvTable t{{"r", "u", "v_rescaled"}, {}};
    const auto& g = *r.u.grid;
    for (std::size_t i = 0; i < g.size(); ++i) t.rows.push_back({g.node(i), r.u.values[i], r.rescaled.values[i]});
    return t;
}

inline json to_json(const ConvergenceRow& row) {
    return {{"p", num(row.p)},
            {"sup_dist", num(row.sup_dist)},
            {"energy_dist", num(row.energy_dist)},
            {"gamma", num(row.gamma)},
            {"peak_r", num(row.peak_r)},
            {"peak_count", row.peak_count},
            {"obstacle_margin", num(row.obstacle_margin)},
            {"J", num(row.J)},
            {"lambda", num(row.lambda)},
            {"kkt", num(row.kkt)}};
}

// ---------------------------------------------------------------------------
// shooting

inline json to_json(const ShootResult& s) {
    return {{"a", num(s.a)},
            {"mismatch", num(s.mismatch)},
            {"converged", s.converged},
            {"nonconstant", s.nonconstant},
            {"peak_radius", num(s.peak_radius)},
            {"max", num(s.u.max_value())},
            {"min", num(s.u.min_value())},
            {"bisections", s.brackets.size()}};
}

inline CsvTable shot_table(const ShootResult& s) {
    CsvTable t{{"r", "u", "du"}, {}};
    const auto& g = *s.u.grid;
    for (std::size_t i = 0; i < g.size(); ++i) t.rows.push_back({g.node(i), s.u.values[i], s.u.derivatives[i]});
    return t;
}

inline CsvTable linni_table(const std::vector<LinNiSweep>& sweeps) {
    CsvTable t{{"lambda", "p", "found", "a_star", "peak_radius"}, {}};
    for (const auto& s : sweeps)
        for (const auto& r : s.rows) t.rows.push_back({r.lambda, r.p, r.found ? 1.0 : 0.0, r.a_star, r.peak_radius});
    return t;
}

inline std::vector<LinNiRow> linni_rows(const CsvTable& t) {
    const auto l = t.column("lambda"), p = t.column("p"), f = t.column("found"), a = t.column("a_star"),
               pk = t.column("peak_radius");
    std::vector<LinNiRow> out;
    for (const auto& row : t.rows) out.push_back({row[l], row[p], row[f] != 0.0, row[a], row[pk]});
    return out;
}

}  // namespace radgreen
