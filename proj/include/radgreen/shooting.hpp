#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <vector>

#include "radgreen/green.hpp"
#include "radgreen/ode.hpp"

namespace radgreen {

/// No sign change of the terminal mismatch over the bracket. For existence sweeps
/// this is data rather than a failure.
class NoBracketError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

struct ShootOptions {
    OdeTolerances ode{};
    double blowup = 1e10;
    double nonconstant_ratio = 1e-4;  // max/min above 1 + this is a nonconstant solution
    double p_cap = 50.0;              // the IVP gets too stiff for bisection beyond this
    int max_bisections = 200;
};

/// Outcome of one initial value problem from the center.
struct CenterShot {
    double a = 0.0;
    std::vector<double> r, u, du;  // samples up to the stopping radius
    bool complete = false;         // reached r = 1
    bool crossed_zero = false;
    bool blew_up = false;
    double stop_radius = 1.0;
    double u_end = 0.0, du_end = 0.0;

    /// Signed terminal mismatch: u'(1) (Neumann) or u(1) (Dirichlet). A zero crossing
    /// counts as negative and a blow-up as positive.
    double mismatch(Boundary bc) const {
        if (crossed_zero) return -INFINITY;
        if (blew_up) return INFINITY;
        return bc == Boundary::Neumann ? du_end : u_end;
    }
};

namespace detail {
inline void check_exponent(double p, const ShootOptions& opt) {
    require(p > 1.0, "shooting: p must exceed 1");
    require(p <= opt.p_cap, "shooting: p above the stiffness cap");
}
}  // namespace detail

/// Integrates -u'' - (n-1)/r u' + V u = u^p from r = eps with u(0) = a, u'(0) = 0,
/// sampling at the grid nodes; stops when u crosses zero or |u| exceeds the blow-up level.
inline CenterShot integrate_from_center(const PotentialSpec& V, double p, double a, const RadialGrid& grid,
                                        const ShootOptions& opt = {}) {
    detail::check_exponent(p, opt);
    require(a > 0.0, "integrate_from_center: a must be positive");
    const int n = grid.dimension();
    const double eps = grid.epsilon();
    // series start: u = a + (V(0) a - a^p) r^2/(2n) + ..., taken closer to the center
    // than eps when the quadratic term would not be a small correction there
    const double curvature = (V(0.0) * a - std::pow(a, p)) / n;
    double r0 = eps;
    if (std::abs(curvature) * eps * eps / 2.0 > 1e-6 * a) r0 = std::sqrt(2e-6 * a / std::abs(curvature));
    RadialState y0{a + curvature * r0 * r0 / 2.0, curvature * r0 * r0};
    auto source = [&](double r, double u, double) { return V(r) * u - std::copysign(std::pow(std::abs(u), p), u); };
    const double cap = opt.blowup;
    auto event = [cap](double u, double) { return u <= 0.0 || std::abs(u) > cap; };
    CenterShot shot;
    shot.a = a;
    auto traj = integrate_radial(n, source, r0, y0, grid.nodes(), event, opt.ode, true);

    shot.u = std::move(traj.u);
    shot.du = std::move(traj.du);
    shot.r.assign(grid.nodes().begin(), grid.nodes().begin() + static_cast<std::ptrdiff_t>(shot.u.size()));
    if (traj.stopped) {
        shot.stop_radius = traj.stop_radius;
        const auto& y = traj.final_state;
        // an overflow stop leaves the last finite state; its slope tells the direction
        if (y[0] <= 0.0 || (y[0] <= cap && y[1] < 0.0))
            shot.crossed_zero = true;
        else
            shot.blew_up = true;
    } else {
        shot.complete = true;
    }
    shot.u_end = traj.final_state[0];
    shot.du_end = traj.final_state[1] / (traj.stopped ? traj.stop_radius : 1.0);
    return shot;
}

struct ShootResult {
    double a = 0.0;
    Profile u;
    double mismatch = 0.0;
    std::vector<std::pair<double, double>> brackets;  // bisection history
    bool converged = false;
    bool nonconstant = false;
    double peak_radius = 0.0;
};

/// Bisection on the central value a over [a_lo, a_hi], then secant polish.
inline ShootResult shoot(const PotentialSpec& V, double p, Boundary bc, double a_lo, double a_hi,
                         const GridPtr& grid, const ShootOptions& opt = {}) {
    detail::check_exponent(p, opt);
    require(0.0 < a_lo && a_lo < a_hi, "shoot: need 0 < a_lo < a_hi");
    auto lo = integrate_from_center(V, p, a_lo, *grid, opt);
    auto hi = integrate_from_center(V, p, a_hi, *grid, opt);
    double m_lo = lo.mismatch(bc), m_hi = hi.mismatch(bc);
    if (m_lo == 0.0) hi = lo;
    else if (m_hi == 0.0) lo = hi;
    else if ((m_lo > 0.0) == (m_hi > 0.0))
        throw NoBracketError("shoot: terminal mismatch has the same sign at both ends of the bracket");

    ShootResult res;
    for (int it = 0; it < opt.max_bisections && lo.a != hi.a; ++it) {
        res.brackets.emplace_back(lo.a, hi.a);
        const double mid = 0.5 * (lo.a + hi.a);
        if (mid <= lo.a || mid >= hi.a) break;
        if (hi.a - lo.a <= 1e-15 * hi.a) break;
        auto s = integrate_from_center(V, p, mid, *grid, opt);
        const double m = s.mismatch(bc);
        if (m == 0.0) {
            lo = hi = s;
            break;
        }
        if ((m > 0.0) == (m_lo > 0.0)) {
            lo = std::move(s);
            m_lo = m;
        } else {
            hi = std::move(s);
            m_hi = m;
        }
        if (lo.complete && hi.complete && std::abs(hi.a - lo.a) < 1e-6 * hi.a) break;
    }
    // secant polish once both ends reach r = 1
    CenterShot best = std::abs(lo.mismatch(bc)) <= std::abs(hi.mismatch(bc)) ? lo : hi;
    if (lo.complete && hi.complete && lo.a != hi.a) {
        CenterShot x0 = lo, x1 = hi;
        for (int it = 0; it < 30; ++it) {
            const double f0 = x0.mismatch(bc), f1 = x1.mismatch(bc);
            if (f1 == f0) break;
            double a2 = x1.a - f1 * (x1.a - x0.a) / (f1 - f0);
            // keep the polish inside the last bisection bracket
            if (!(a2 > std::min(lo.a, hi.a) && a2 < std::max(lo.a, hi.a))) break;
            auto s = integrate_from_center(V, p, a2, *grid, opt);
            if (!s.complete) break;
            x0 = std::move(x1);
            x1 = std::move(s);
            if (std::abs(x1.mismatch(bc)) < std::abs(best.mismatch(bc))) best = x1;
            if (std::abs(x1.a - x0.a) <= 1e-15 * x1.a) break;
        }
    }
    if (!best.complete) throw NumericalError("shoot: bracket collapsed onto a blow-up or zero crossing");
    res.a = best.a;
    res.mismatch = best.mismatch(bc);
    res.u = Profile(grid, best.u, best.du);
    const auto [mn, mx] = std::minmax_element(best.u.begin(), best.u.end());
    res.converged = std::abs(res.mismatch) <= 1e-8 * std::max(std::abs(*mx), 1.0) && *mn > 0.0;
    res.nonconstant = *mx > (1.0 + opt.nonconstant_ratio) * *mn;
    res.peak_radius = grid->node(static_cast<std::size_t>(mx - best.u.begin()));
    return res;
}

/// Scans log-spaced central values over [a_lo, a_hi] for sign changes of the mismatch
/// and shoots on each; returns the nonconstant solutions found (ascending a).
inline std::vector<ShootResult> scan_and_shoot(const PotentialSpec& V, double p, Boundary bc, double a_lo, double a_hi,
                                               int samples, const GridPtr& grid, const ShootOptions& opt = {}) {
    require(samples >= 2, "scan_and_shoot: need at least two samples");
    std::vector<double> as(samples), ms(samples);
    for (int k = 0; k < samples; ++k) {
        as[k] = a_lo * std::pow(a_hi / a_lo, double(k) / (samples - 1));
        ms[k] = integrate_from_center(V, p, as[k], *grid, opt).mismatch(bc);
    }
    std::vector<ShootResult> found;
    for (int k = 0; k + 1 < samples; ++k) {
        if ((ms[k] > 0.0) == (ms[k + 1] > 0.0)) continue;
        try {
            auto s = shoot(V, p, bc, as[k], as[k + 1], grid, opt);
            if (s.converged && s.nonconstant) found.push_back(std::move(s));
        } catch (const NumericalError&) {
        }
    }
    return found;
}

/// scan_and_shoot that keeps a relative gap around the constant solution of a constant
/// Neumann potential: a root next to it would share a sample interval with it and cancel.
inline std::vector<ShootResult> scan_and_shoot_split(const PotentialSpec& V, double p, Boundary bc, double a_lo,
                                                     double a_hi, int samples, const GridPtr& grid,
                                                     const ShootOptions& opt = {}, double gap = 1e-3) {
    if (!V.is_constant() || bc != Boundary::Neumann) return scan_and_shoot(V, p, bc, a_lo, a_hi, samples, grid, opt);
    detail::check_exponent(p, opt);
    const double eq = std::pow(V.constant_value(), 1.0 / (p - 1.0));
    const double lo_end = eq * (1 - gap), hi_start = eq * (1 + gap);
    if (!(a_lo < lo_end && hi_start < a_hi)) return scan_and_shoot(V, p, bc, a_lo, a_hi, samples, grid, opt);
    auto found = scan_and_shoot(V, p, bc, a_lo, lo_end, samples, grid, opt);
    auto above = scan_and_shoot(V, p, bc, hi_start, a_hi, samples, grid, opt);
    found.insert(found.end(), above.begin(), above.end());
    return found;
}

struct LinNiRow {
    double lambda = 0.0;
    double p = 0.0;
    bool found = false;
    double a_star = 0.0;
    double peak_radius = 0.0;
};

struct LinNiSweep {
    std::vector<LinNiRow> rows;
    // [largest lambda with no find, smallest lambda with a find]; NaN when absent
    double edge_none = NAN, edge_found = NAN;
};

struct LinNiOptions {
    int grid_points = 2001;
    double epsilon = 1e-6;
    double decades = 3.0;  // a scanned over equilibrium * 10^{-decades .. decades}
    int samples = 121;     // per side of the equilibrium
    double gap = 1e-3;     // relative distance kept from the equilibrium
    ShootOptions shoot{};
};

/// Existence of nonconstant positive radial Neumann solutions of -Delta u + lambda u = u^p,
/// one shooting scan per lambda around the constant solution lambda^{1/(p-1)}.
inline LinNiSweep linni_sweep(int n, double p, std::vector<double> lambdas, const LinNiOptions& opt = {}) {
    std::sort(lambdas.begin(), lambdas.end());
    auto grid = make_grid(n, opt.grid_points, opt.epsilon);
    std::vector<std::future<LinNiRow>> jobs;
    for (double lambda : lambdas) {
        jobs.push_back(std::async(std::launch::async, [=, &opt] {
            require(lambda > 0.0, "linni_sweep: lambda must be positive");
            LinNiRow row{lambda, p, false, 0.0, 0.0};
            const auto V = PotentialSpec::constant(lambda);
            const double eq = std::pow(lambda, 1.0 / (p - 1.0));
            const double f = std::pow(10.0, opt.decades);
            auto found = scan_and_shoot_split(V, p, Boundary::Neumann, eq / f, eq * f, opt.samples, grid, opt.shoot, opt.gap);
            if (!found.empty()) {
                row.found = true;
                row.a_star = found.front().a;
                row.peak_radius = found.front().peak_radius;
            }
            return row;
        }));
    }
    LinNiSweep out;
    for (auto& j : jobs) out.rows.push_back(j.get());
    for (const auto& row : out.rows)
        if (row.found) {
            out.edge_found = row.lambda;
            break;
        }
    for (const auto& row : out.rows)
        if (!row.found && (std::isnan(out.edge_found) || row.lambda < out.edge_found)) out.edge_none = row.lambda;
    return out;
}

}  // namespace radgreen
