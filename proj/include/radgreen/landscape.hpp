#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "radgreen/green.hpp"
#include "radgreen/quadrature.hpp"

namespace radgreen {

/// F(r) = |dB_1| r^{n-1}/G(r, r) = |dB_1|/(xi(r) zeta(r)). +inf at r = 1 for Dirichlet.
inline double eval_F(const GreenPair& pair, double r) {
    require(pair.grid->contains(r), "eval_F: radius outside [eps, 1]");
    if (pair.boundary == Boundary::Dirichlet && r >= 1.0) return std::numeric_limits<double>::infinity();
    return sphere_area(pair.dimension()) / (pair.xi_at(r) * pair.zeta_at(r));
}

/// xi' zeta + xi zeta'; F' = -|dB_1| (xi' zeta + xi zeta')/(xi zeta)^2 has the opposite sign.
inline double criticality(const GreenPair& pair, double r) {
    return pair.xi_prime_at(r) * pair.zeta_at(r) + pair.xi_at(r) * pair.zeta_prime_at(r);
}

inline double eval_F_derivative(const GreenPair& pair, double r) {
    const double prod = pair.xi_at(r) * pair.zeta_at(r);
    return -sphere_area(pair.dimension()) * criticality(pair, r) / (prod * prod);
}

/// F_p(r) = r^{(p-1)(n-1)/(p+3)}/G(r, r), without the |dB_1| factor carried by F.
inline double eval_Fp(const GreenPair& pair, double r, double p) {
    require(p > 1.0, "eval_Fp: p must exceed 1");
    require(r > pair.grid->epsilon() && r <= 1.0, "eval_Fp: radius outside (eps, 1]");
    const int n = pair.dimension();
    const double e = (p - 1.0) * (n - 1.0) / (p + 3.0);
    const double g = pair.green_diagonal(r);
    if (g == 0.0) return std::numeric_limits<double>::infinity();
    return std::pow(r, e) / g;
}

/// |dB_1| F_p(r), directly comparable with F(r).
inline double eval_Fp_scaled(const GreenPair& pair, double r, double p) {
    return sphere_area(pair.dimension()) * eval_Fp(pair, r, p);
}

/// |Q(G(., r)/G(r, r)) - F(r)|/F(r). The energy quadrature splits the cell holding r.
inline double check_F_energy_identity(const GreenPair& pair, const PotentialSpec& V, double r) {
    const auto profile = green_profile(pair, r);
    const double q = energy_Q(V, profile);
    const double f = eval_F(pair, r);
    return std::abs(q - f) / f;
}

/// Golden-section search for a minimum of f on [a, b].
template <class Fn>
double golden_section_min(Fn&& f, double a, double b, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

/// Root of xi' zeta + xi zeta' (a critical point of F) in [a, b] by bisection.
/// Returns nullopt when the endpoints do not bracket a sign change.
inline std::optional<double> locate_critical_point(const GreenPair& pair, double a, double b) {
    double ha = criticality(pair, a), hb = criticality(pair, b);
    if (ha == 0.0) return a;
    if (hb == 0.0) return b;
    if ((ha > 0.0) == (hb > 0.0)) return std::nullopt;
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        const double m = 0.5 * (a + b);
        const double hm = criticality(pair, m);
        if (hm == 0.0) return m;
        if ((hm > 0.0) == (ha > 0.0)) {
            a = m;
            ha = hm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

enum class CriticalKind { Minimum, Maximum };

struct CriticalPoint {
    double r = 0.0;
    double F = 0.0;
    CriticalKind kind = CriticalKind::Minimum;
};

/// A local minimum r_bar of F together with a bracket [a, b] on which it is the strict
/// global minimum. `boundary` marks r_bar = 1 (Neumann only).
struct MinimumRecord {
    double r = 0.0;
    double F = 0.0;
    double a = 0.0;
    double b = 0.0;
    bool boundary = false;
};

struct ReflectionResult {
    double r = 0.0;
    double left = 0.0;   // lim_{t -> r-} G_t(t, r) = r^{n-1} xi'(r) zeta(r)
    double right = 0.0;  // lim_{t -> r+} G_t(t, r) = r^{n-1} xi(r) zeta'(r)
    double fprime = 0.0;
    double sum() const { return left - right; }
};

struct CatrinaVerdict {
    double p = 0.0;
    bool increasing = false;
    bool decreasing = false;
    /// F_p strictly monotone on the sampled range: no positive Dirichlet solution expected.
    bool no_solution_expected() const { return increasing || decreasing; }
};

struct LandscapeReport {
    GridPtr grid;
    Boundary boundary = Boundary::Neumann;
    std::vector<double> r;
    std::vector<double> F;
    std::vector<MinimumRecord> minima;
    std::vector<CriticalPoint> critical_points;  // interior minima and maxima, sorted by r
    std::optional<double> fprime_at_1;
    std::vector<CatrinaVerdict> catrina;
    std::vector<ReflectionResult> reflection;
};

struct LandscapeOptions {
    double r_lo = 0.05;
    double golden_tol = 1e-6;
    double plateau_tol = 1e-10;
    double fd_step = 0.005;  // one-sided stencil for F'(1-) spans the last 1% of the radius
};

/// Second-order one-sided estimate of F'(1-) for Neumann pairs.
inline double boundary_slope_fd(const GreenPair& pair, double h = 0.005) {
    return (3.0 * eval_F(pair, 1.0) - 4.0 * eval_F(pair, 1.0 - h) + eval_F(pair, 1.0 - 2.0 * h)) / (2.0 * h);
}

struct BoundaryDescent {
    double finite_difference = 0.0;
    double analytic = 0.0;
    bool negative() const { return finite_difference < 0.0 && analytic < 0.0; }
    double relative_gap() const { return std::abs(finite_difference - analytic) / std::abs(analytic); }
    bool consistent(double rel = 0.05) const { return negative() && relative_gap() <= rel; }
};

/// F'(1-) = -|dB_1| (xi'(1)/xi(1))^2 for Neumann pairs, plus a finite-difference estimate.
inline BoundaryDescent boundary_descent_check(const GreenPair& pair, double h = 0.005) {
    if (pair.boundary != Boundary::Neumann) throw DomainError("boundary_descent_check: Neumann pair required");
    const double ratio = pair.xi.derivatives.back() / pair.xi.values.back();
    return {boundary_slope_fd(pair, h), -sphere_area(pair.dimension()) * ratio * ratio};
}

/// One-sided radial derivatives of G(., r) at a critical point r of F.
inline ReflectionResult reflection_values(const GreenPair& pair, double r) {
    const double rn = std::pow(r, pair.dimension() - 1);
    ReflectionResult out;
    out.r = r;
    out.left = rn * pair.xi_prime_at(r) * pair.zeta_at(r);
    out.right = rn * pair.xi_at(r) * pair.zeta_prime_at(r);
    out.fprime = eval_F_derivative(pair, r);
    return out;
}

inline ReflectionResult reflection_check(const GreenPair& pair, double r, double critical_tol = 1e-6) {
    require(r > pair.grid->epsilon() && r < 1.0, "reflection_check: radius must lie in (eps, 1)");
    auto out = reflection_values(pair, r);
    if (std::abs(out.fprime) > critical_tol)
        throw DomainError("reflection_check: r = " + std::to_string(r) + " is not a critical point of F (|F'| = " +
                          std::to_string(std::abs(out.fprime)) + ")");
    return out;
}

namespace detail {

inline std::vector<std::size_t> nodes_in(const RadialGrid& grid, double lo, double hi, bool include_hi) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid.node(i);
        if (r < lo) continue;
        if (r > hi || (!include_hi && r >= hi)) break;
        idx.push_back(i);
    }
    return idx;
}

inline void check_plateau(std::span<const double> f, double tol, const char* what) {
    for (std::size_t i = 0; i + 2 < f.size(); ++i) {
        const double lo = std::min({f[i], f[i + 1], f[i + 2]});
        const double hi = std::max({f[i], f[i + 1], f[i + 2]});
        if (hi - lo < tol)
            throw NumericalError(std::string(what) + ": plateau detected (strict extrema expected), numerical breakdown");
    }
}

}  // namespace detail

/// Per-p monotonicity of F_p on [r_lo, 1) for Dirichlet pairs.
inline std::vector<CatrinaVerdict> catrina_flag(const GreenPair& pair, std::span<const double> ps, double r_lo = 0.05,
                                                double slope_tol = 1e-10) {
    if (pair.boundary != Boundary::Dirichlet) throw DomainError("catrina_flag: Dirichlet pair required");
    const auto idx = detail::nodes_in(*pair.grid, r_lo, 1.0, false);
    require(idx.size() >= 3, "catrina_flag: too few nodes in range");
    std::vector<CatrinaVerdict> out;
    for (double p : ps) {
        std::vector<double> fp(idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) fp[k] = eval_Fp(pair, pair.grid->node(idx[k]), p);
        bool all_up = true, all_down = true, all_flat = true;
        for (std::size_t k = 0; k + 1 < fp.size(); ++k) {
            const double d = fp[k + 1] - fp[k];
            all_up = all_up && d > slope_tol;
            all_down = all_down && d < -slope_tol;
            all_flat = all_flat && std::abs(d) <= slope_tol;
        }
        if (all_flat) throw NumericalError("catrina_flag: F_p is constant (degenerate input)");
        out.push_back({p, all_up, all_down});
    }
    return out;
}

/// Scans F on the grid, refines every interior extremum, classifies r = 1 for Neumann
/// pairs, and brackets each local minimum.
inline LandscapeReport find_local_minima(const GreenPair& pair, const LandscapeOptions& opt = {}) {
    require(opt.r_lo >= 0.05, "find_local_minima: r_lo must be >= 0.05");
    const auto& grid = *pair.grid;
    const bool neumann = pair.boundary == Boundary::Neumann;
    const auto idx = detail::nodes_in(grid, opt.r_lo, 1.0, neumann);
    require(idx.size() >= 4, "find_local_minima: too few nodes above r_lo");

    LandscapeReport rep;
    rep.grid = pair.grid;
    rep.boundary = pair.boundary;
    for (auto i : idx) {
        rep.r.push_back(grid.node(i));
        rep.F.push_back(eval_F(pair, grid.node(i)));
    }
    detail::check_plateau(rep.F, opt.plateau_tol, "find_local_minima");

    auto F = [&pair](double r) { return eval_F(pair, r); };
    const std::size_t K = rep.r.size();
    for (std::size_t k = 1; k + 1 < K; ++k) {
        const double dl = rep.F[k] - rep.F[k - 1], dr = rep.F[k + 1] - rep.F[k];
        const bool is_min = dl < 0.0 && dr >= 0.0;
        const bool is_max = dl > 0.0 && dr <= 0.0;
        if (!is_min && !is_max) continue;
        const double a = rep.r[k - 1], b = rep.r[k + 1];
        double r = is_min ? golden_section_min(F, a, b, opt.golden_tol)
                          : golden_section_min([&](double x) { return -F(x); }, a, b, opt.golden_tol);
        const double w = 4.0 * opt.golden_tol;
        if (auto polished = locate_critical_point(pair, std::max(a, r - w), std::min(b, r + w))) r = *polished;
        else if (auto wide = locate_critical_point(pair, a, b)) r = *wide;
        rep.critical_points.push_back({r, F(r), is_min ? CriticalKind::Minimum : CriticalKind::Maximum});
    }

    if (neumann) {
        rep.fprime_at_1 = boundary_slope_fd(pair, opt.fd_step);
    }

    // Brackets: between the neighbouring maxima (shrunk by one node so that brackets
    // of adjacent minima are disjoint), or the ends of the scanned range.
    const double h = grid.cell_width(grid.cells() - 1);
    const double r_first = rep.r.front(), r_last = rep.r.back();
    auto prev_max = [&](double r) -> std::optional<double> {
        std::optional<double> best;
        for (const auto& c : rep.critical_points)
            if (c.kind == CriticalKind::Maximum && c.r < r) best = c.r;
        return best;
    };
    auto next_max = [&](double r) -> std::optional<double> {
        for (const auto& c : rep.critical_points)
            if (c.kind == CriticalKind::Maximum && c.r > r) return c.r;
        return std::nullopt;
    };
    for (const auto& c : rep.critical_points) {
        if (c.kind != CriticalKind::Minimum) continue;
        MinimumRecord m;
        m.r = c.r;
        m.F = c.F;
        auto pm = prev_max(c.r), nm = next_max(c.r);
        m.a = pm ? *pm + h : r_first;
        m.b = nm ? *nm - h : r_last;
        rep.minima.push_back(m);
    }
    if (neumann && rep.fprime_at_1 && *rep.fprime_at_1 < 0.0) {
        MinimumRecord m;
        m.r = 1.0;
        m.F = eval_F(pair, 1.0);
        auto pm = prev_max(1.0);
        m.a = pm ? *pm + h : r_first;
        m.b = 1.0;
        m.boundary = true;
        rep.minima.push_back(m);
    }
    for (const auto& m : rep.minima) {
        if (!(m.F < F(m.a)) || (!m.boundary && !(m.F < F(m.b))))
            throw NumericalError("find_local_minima: bracket does not isolate the minimum at r = " + std::to_string(m.r));
    }
    for (const auto& c : rep.critical_points) rep.reflection.push_back(reflection_values(pair, c.r));
    return rep;
}

/// Obstacle data of the constrained problem: |u| <= c on [eps, R1] (and on [R2, 1]
/// unless the target is the boundary point r = 1).
struct ConstraintBox {
    double R1 = 0.0;
    double R2 = 1.0;
    double c = 0.5;
    double m = 0.0;       // max{G(R1, r_bar), G(R2, r_bar)}/G(r_bar, r_bar)
    double target = 1.0;  // r_bar
    bool outer_obstacle = true;

    bool in_obstacle(double r) const { return r <= R1 || (outer_obstacle && r >= R2); }
};

/// Box for a given target and radii; c is the midpoint of (m, 1).
inline ConstraintBox make_constraint_box(const GreenPair& pair, double target, double R1, double R2) {
    require(R1 > pair.grid->epsilon() && R1 < R2 && R2 <= 1.0, "make_constraint_box: need eps < R1 < R2 <= 1");
    require(target >= R1 && target <= R2, "make_constraint_box: target outside [R1, R2]");
    ConstraintBox box;
    box.R1 = R1;
    box.R2 = R2;
    box.target = target;
    box.outer_obstacle = target < 1.0;
    const double diag = pair.green(target, target);
    double m = pair.green(R1, target) / diag;
    if (box.outer_obstacle) m = std::max(m, pair.green(R2, target) / diag);
    if (!(m < 1.0)) throw NumericalError("make_constraint_box: G(R, r_bar) >= G(r_bar, r_bar) (broken Green pair)");
    box.m = m;
    box.c = 0.5 * (1.0 + m);
    return box;
}

/// True when F(target) <= F(r) at every grid node in [R1, R2].
inline bool box_isolates_minimum(const GreenPair& pair, const ConstraintBox& box) {
    const double ft = eval_F(pair, box.target);
    for (auto i : detail::nodes_in(*pair.grid, box.R1, box.R2, true)) {
        const double r = pair.grid->node(i);
        if (pair.boundary == Boundary::Dirichlet && r >= 1.0) continue;
        if (eval_F(pair, r) < ft) return false;
    }
    return true;
}

/// Box from a minimum record: the bracket, shrunk node by node until the minimum is
/// the strict global minimum of F on [R1, R2].
inline ConstraintBox build_constraint_box(const GreenPair& pair, const MinimumRecord& rec) {
    const auto& grid = *pair.grid;
    double R1 = rec.a, R2 = rec.boundary ? 1.0 : rec.b;
    if (pair.boundary == Boundary::Dirichlet && rec.boundary)
        throw DomainError("build_constraint_box: r_bar = 1 is not admissible for Dirichlet problems");
    const double h = grid.cell_width(grid.cells() - 1);
    for (int guard = 0; guard < static_cast<int>(grid.size()); ++guard) {
        auto box = make_constraint_box(pair, rec.r, R1, R2);
        if (box_isolates_minimum(pair, box)) return box;
        if (eval_F(pair, R1) <= rec.F) R1 += h;
        if (!rec.boundary && eval_F(pair, R2) <= rec.F) R2 -= h;
        if (!(R1 < rec.r) && !rec.boundary) break;
    }
    throw NumericalError("build_constraint_box: could not isolate the minimum");
}

}  // namespace radgreen
