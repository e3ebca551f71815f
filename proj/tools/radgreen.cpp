// radgreen command-line driver
#include <filesystem>
#include <future>
#include <iostream>

#include "CLI11.hpp"
#include "radgreen/acceptance.hpp"
#include "radgreen/config.hpp"

namespace fs = std::filesystem;
using namespace radgreen;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kConfigError = 2, kNumerical = 3 };

std::string p_label(double p) { return format_double(p); }

fs::path out_dir(const RunConfig& cfg) {
    fs::path d(cfg.out);
    std::error_code ec;
    fs::create_directories(d, ec);
    if (ec) throw ConfigError("cannot create output directory '" + cfg.out + "': " + ec.message());
    return d;
}

void need_ps(const RunConfig& cfg) {
    if (cfg.ps.empty()) throw ConfigError("empty p list (use --p 10,50,...)");
}

// ---------------------------------------------------------------------------

int cmd_green(const RunConfig& cfg) {
    auto pair = build_green_pair(cfg.make_grid_ptr(), cfg.potential_spec(), cfg.bc);
    auto dir = out_dir(cfg);
    write_csv(dir / "green.csv", green_table(pair));
    auto w = wronskian_report(pair);
    w["potential"] = cfg.potential_spec().describe();
    write_json(dir / "wronskian.json", w);
    std::cout << "wronskian max |r^{n-1} W - 1| = " << format_double(w["max_abs_deviation"].get<double>()) << '\n';
    return kOk;
}

int cmd_landscape(const RunConfig& cfg) {
    const auto V = cfg.potential_spec();
    auto pair = build_green_pair(cfg.make_grid_ptr(), V, cfg.bc);
    auto rep = find_local_minima(pair);
    if (cfg.bc == Boundary::Dirichlet && !cfg.ps.empty()) rep.catrina = catrina_flag(pair, cfg.ps);
    auto dir = out_dir(cfg);
    write_csv(dir / "F.csv", landscape_table(rep));
    auto j = to_json(rep);
    j["config"] = to_json(cfg);
    write_json(dir / "landscape.json", j);
    for (const auto& m : rep.minima)
        std::cout << "minimum r = " << format_double(m.r) << "  F = " << format_double(m.F)
                  << (m.boundary ? "  (boundary)" : "") << '\n';
    for (const auto& c : rep.catrina)
        std::cout << "catrina p = " << p_label(c.p) << ": " << (c.no_solution_expected() ? "flag raised" : "not raised")
                  << '\n';
    return kOk;
}

// box from overrides, or from the landscape minimum closest to the requested target
// (lowest F when no target is given)
ConstraintBox choose_box(const GreenPair& pair, const RunConfig& cfg) {
    ConstraintBox box;
    if (cfg.R1) {
        double target = cfg.target.value_or(NAN);
        if (!cfg.target) {
            auto rep = find_local_minima(pair);
            for (const auto& m : rep.minima)
                if (m.r >= *cfg.R1 && m.r <= *cfg.R2 && (std::isnan(target) || m.F < eval_F(pair, target))) target = m.r;
            if (std::isnan(target)) throw ConfigError("no minimum of F inside [R1, R2]; give a target");
        }
        if (pair.boundary == Boundary::Dirichlet && target >= 1.0)
            throw ConfigError("Dirichlet problems need r_bar in (0, 1)");
        box = make_constraint_box(pair, target, *cfg.R1, *cfg.R2);
    } else {
        auto rep = find_local_minima(pair);
        if (rep.minima.empty()) throw NumericalError("F has no local minimum to concentrate at");
        const MinimumRecord* pick = &rep.minima.front();
        for (const auto& m : rep.minima) {
            const bool better = cfg.target ? std::abs(m.r - *cfg.target) < std::abs(pick->r - *cfg.target) : m.F < pick->F;
            if (better) pick = &m;
        }
        box = build_constraint_box(pair, *pick);
    }
    if (cfg.c) {
        if (!(*cfg.c > box.m && *cfg.c < 1.0))
            throw ConfigError("c must lie in (m, 1) = (" + format_double(box.m) + ", 1)");
        box.c = *cfg.c;
    }
    return box;
}

json cross_check(const RunConfig& cfg, const PotentialSpec& V, const MinimizeResult& r) {
    json block{{"p", num(r.p)}};
    const ShootOptions sopt;
    if (r.p > sopt.p_cap) {
        block["skipped"] = "p above the shooting cap " + format_double(sopt.p_cap);
        return block;
    }
    auto found = scan_and_shoot_split(V, r.p, cfg.bc, cfg.a_lo, cfg.a_hi, cfg.samples, r.u.grid, sopt);
    std::vector<std::pair<double, std::vector<double>>> cand;
    for (const auto& s : found) cand.emplace_back(s.a, s.u.values);
    if (V.is_constant() && cfg.bc == Boundary::Neumann) {
        const double eq = std::pow(V.constant_value(), 1 / (r.p - 1));
        cand.emplace_back(eq, std::vector<double>(r.u.size(), eq));
    }
    double best = INFINITY, best_a = NAN;
    for (const auto& [a, u] : cand) {
        double d = 0;
        for (std::size_t i = 0; i < u.size(); ++i) d = std::max(d, std::abs(u[i] - r.rescaled.values[i]));
        if (d < best) best = d, best_a = a;
    }
    block["solutions_found"] = found.size();
    block["solutions"] = json::array();
    for (const auto& s : found) block["solutions"].push_back(to_json(s));
    block["nearest_a"] = num(best_a);
    block["nearest_sup_dist"] = num(best);
    try {
        auto est = extract_lambda(r.u, V, r.p, r.box);
        block["lambda_least_squares"] = num(est.least_squares);
        block["lambda_energy_ratio"] = num(est.energy_ratio);
        block["lambda_gap"] = num(est.relative_gap());
    } catch (const NumericalError& e) {
        block["lambda_error"] = e.what();
    }
    return block;
}

int cmd_solve(const RunConfig& cfg) {
    need_ps(cfg);
    const auto V = cfg.potential_spec();
    auto pair = build_green_pair(cfg.make_grid_ptr(), V, cfg.bc);
    const auto box = choose_box(pair, cfg);
    auto results = minimize_sweep(pair, V, box, cfg.ps, cfg.minimize_options());
    auto rows = convergence_report(results, pair, box);
    auto dir = out_dir(cfg);

    json report{{"config", to_json(cfg)}, {"box", to_json(box)}, {"rows", json::array()}};
    bool all_converged = true;
    for (std::size_t k = 0; k < results.size(); ++k) {
        const auto& r = results[k];
        all_converged = all_converged && r.converged;
        write_json(dir / ("run_p" + p_label(r.p) + ".json"), run_report(r, rows[k]));
        write_csv(dir / ("profile_p" + p_label(r.p) + ".csv"), profile_table(r));
        report["rows"].push_back(to_json(rows[k]));
        std::cout << "p = " << p_label(r.p) << "  J = " << format_double(r.J) << "  lambda = " << format_double(r.lambda)
                  << "  sup dist = " << format_double(rows[k].sup_dist) << (r.converged ? "" : "  NOT CONVERGED") << '\n';
    }
    try {
        auto lim = solve_Jinfty(pair, V, box);
        auto exact = green_profile(pair, box.target);
        double d = 0;
        for (std::size_t i = 0; i < exact.size(); ++i) d = std::max(d, std::abs(lim.u.values[i] - exact.values[i]));
        report["limit"] = {{"r_hat", num(lim.r_hat)}, {"energy", num(lim.energy)}, {"sup_dist_to_green", num(d)},
                           {"F_r_bar", num(eval_F(pair, box.target))}};
    } catch (const NumericalError& e) {
        report["limit"] = {{"error", e.what()}};
    }
    if (cfg.cross_check) {
        report["cross_check"] = json::array();
        for (const auto& r : results) report["cross_check"].push_back(cross_check(cfg, V, r));
    }
    write_json(dir / "convergence.json", report);
    return all_converged ? kOk : kNumerical;
}

int cmd_shoot(const RunConfig& cfg) {
    need_ps(cfg);
    const auto V = cfg.potential_spec();
    auto grid = cfg.make_grid_ptr();
    std::vector<std::future<std::vector<ShootResult>>> jobs;
    for (double p : cfg.ps)
        jobs.push_back(std::async(std::launch::async, [&, p] {
            return scan_and_shoot_split(V, p, cfg.bc, cfg.a_lo, cfg.a_hi, cfg.samples, grid);
        }));
    auto dir = out_dir(cfg);
    json report{{"config", to_json(cfg)}, {"runs", json::array()}};
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        const double p = cfg.ps[k];
        auto found = jobs[k].get();
        json run{{"p", num(p)}, {"solutions", json::array()}};
        for (std::size_t i = 0; i < found.size(); ++i) {
            run["solutions"].push_back(to_json(found[i]));
            write_csv(dir / ("shoot_p" + p_label(p) + "_" + std::to_string(i) + ".csv"), shot_table(found[i]));
        }
        report["runs"].push_back(run);
        std::cout << "p = " << p_label(p) << ": " << found.size() << " nonconstant solutions";
        for (const auto& s : found) std::cout << "  a = " << format_double(s.a) << " (peak r = " << format_double(s.peak_radius) << ")";
        std::cout << '\n';
    }
    write_json(dir / "shoot.json", report);
    return kOk;
}

int cmd_linni(const RunConfig& cfg) {
    need_ps(cfg);
    LinNiOptions opt;
    opt.grid_points = cfg.grid;
    opt.epsilon = cfg.eps;
    opt.samples = cfg.samples;
    const auto lambdas = cfg.lambdas.empty() ? default_lambdas() : cfg.lambdas;
    std::vector<LinNiSweep> sweeps;
    for (double p : cfg.ps) sweeps.push_back(linni_sweep(cfg.n, p, lambdas, opt));
    auto dir = out_dir(cfg);
    write_csv(dir / "linni.csv", linni_table(sweeps));
    json report{{"config", to_json(cfg)}, {"edges", json::array()}, {"warnings", json::array()}};
    for (std::size_t k = 0; k < sweeps.size(); ++k) {
        report["edges"].push_back(
            {{"p", num(cfg.ps[k])}, {"edge_none", num(sweeps[k].edge_none)}, {"edge_found", num(sweeps[k].edge_found)}});
        std::cout << "p = " << p_label(cfg.ps[k]) << ": edge in [" << format_double(sweeps[k].edge_none) << ", "
                  << format_double(sweeps[k].edge_found) << "]\n";
        // the edge should move down as p grows
        for (std::size_t i = 0; i < k; ++i)
            if (cfg.ps[i] < cfg.ps[k] && sweeps[k].edge_none > sweeps[i].edge_none) {
                std::string w = "edge at p = " + p_label(cfg.ps[k]) + " above edge at p = " + p_label(cfg.ps[i]);
                report["warnings"].push_back(w);
                std::cerr << "warning: " << w << '\n';
            }
    }
    write_json(dir / "linni.json", report);
    return kOk;
}

int cmd_verify(const RunConfig& cfg) {
    AcceptanceOptions opt;
    opt.grid_points = cfg.grid;
    opt.epsilon = cfg.eps;
    opt.tol = cfg.verify_tol;
    opt.only = cfg.only;
    json report{{"criteria", json::array()}};
    std::vector<int> failed;
    auto results = run_acceptance(opt, [](const CriterionResult& r) {
        std::cout << "criterion " << r.id << ' ' << (r.pass ? "PASS" : "FAIL") << "  [" << r.suite << "] " << r.title
                  << ": " << r.detail << std::endl;
        for (const auto& w : r.warnings) std::cout << "  warning: " << w << std::endl;
    });
    for (const auto& r : results) {
        report["criteria"].push_back({{"id", r.id}, {"suite", r.suite}, {"title", r.title}, {"pass", r.pass},
                                      {"detail", r.detail}, {"warnings", r.warnings}});
        if (!r.pass) failed.push_back(r.id);
    }
    report["failed"] = failed;
    write_json(out_dir(cfg) / "verify.json", report);
    if (!failed.empty()) {
        std::cout << "failed criteria:";
        for (int id : failed) std::cout << ' ' << id;
        std::cout << '\n';
    }
    return failed.empty() ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"radial Green functions, landscape analysis and supercritical minimizers"};
    app.require_subcommand(1);

    std::string config_path, bc, potential, p_list, only, out;
    int n = 0, grid = 0;
    double eps = 0, tol = 0;
    bool cross = false;
    for (const char* name : {"green", "landscape", "solve", "shoot", "linni", "verify"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--n", n, "space dimension");
        sub->add_option("--bc", bc, "neumann|dirichlet");
        sub->add_option("--potential", potential, "const:L | bump:BASE,AMP,CENTER,WIDTH | file:PATH");
        sub->add_option("--grid", grid, "grid points");
        sub->add_option("--eps", eps, "inner radius");
        sub->add_option("--p", p_list, "comma-separated exponents");
        sub->add_option("--out", out, "output directory");
        sub->add_flag("--cross-check", cross, "compare minimizers with shooting (solve)");
        sub->add_option("--only", only, "suite or criterion ids (verify)");
        sub->add_option("--tol", tol, "override every verification threshold (verify)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }
    auto* sub = app.get_subcommands().front();
    const std::string cmd = sub->get_name();

    try {
        RunConfig cfg;
        if (sub->count("--config")) cfg = load_config(config_path);
        if (sub->count("--n")) cfg.n = n;
        if (sub->count("--bc")) cfg.bc = parse_boundary(bc);
        if (sub->count("--potential")) cfg.potential = potential;
        if (sub->count("--grid")) cfg.grid = grid;
        if (sub->count("--eps")) cfg.eps = eps;
        if (sub->count("--p")) cfg.ps = parse_list(p_list, "p");
        if (sub->count("--out")) cfg.out = out;
        if (cross) cfg.cross_check = true;
        if (sub->count("--only")) cfg.only = only;
        if (sub->count("--tol")) cfg.verify_tol = tol;
        validate(cfg);

        if (cmd == "green") return cmd_green(cfg);
        if (cmd == "landscape") return cmd_landscape(cfg);
        if (cmd == "solve") return cmd_solve(cfg);
        if (cmd == "shoot") return cmd_shoot(cfg);
        if (cmd == "linni") return cmd_linni(cfg);
        return cmd_verify(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
}
