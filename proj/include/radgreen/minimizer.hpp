#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "radgreen/fem.hpp"
#include "radgreen/landscape.hpp"

namespace radgreen {

struct MinimizeOptions {
    double tol = 1e-6;        // KKT residual (strong form) at termination
    double mass_tol = 1e-8;   // |N(u) - 1|, N = normalized L^{p+1} mass to the power p+1
    int max_outer = 40;
    int max_inner = 20000;    // per outer iteration
    double rho_safety = 4.0;  // penalty relative to the curvature bound 2Q(p-1)/(p+1)^2
    std::optional<std::vector<double>> initial;  // warm start on the pair's grid
};

struct MinimizeResult {
    double p = 0.0;
    Profile u;
    double J = 0.0;
    double lambda = 0.0;
    double gamma = 0.0;
    double kkt_residual = 0.0;
    double mass_residual = 0.0;
    std::vector<std::size_t> active_set;
    Profile rescaled;
    int iterations = 0;  // inner iterations, summed
    int outer_iterations = 0;
    bool converged = false;
    std::vector<double> energy_history;  // Q of the mass-normalized iterate after each outer step
    ConstraintBox box;
};

namespace detail {

inline double pow_safe(double u, double q) { return u > 0.0 ? std::exp(q * std::log(u)) : 0.0; }

// Largest value an iterate may take; feasible minimizers stay far below.
constexpr double kValueCap = 10.0;

struct Bounds {
    std::vector<double> lo, hi;
};

inline Bounds make_bounds(const RadialGrid& grid, const ConstraintBox& box, Boundary bc) {
    Bounds b;
    b.lo.assign(grid.size(), 0.0);
    b.hi.assign(grid.size(), kValueCap);
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (box.in_obstacle(grid.node(i))) b.hi[i] = box.c;
    if (bc == Boundary::Dirichlet) b.hi.back() = 0.0;
    return b;
}

inline void clip(std::vector<double>& u, const Bounds& b) {
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::clamp(u[i], b.lo[i], b.hi[i]);
}

}  // namespace detail

/// N(u) = n int_0^1 u^{p+1} r^{n-1} dr (so N = 1 is membership in K_p).
inline double mass_N(const RadialGrid& grid, std::span<const double> u, double p) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += grid.weight(i) * detail::pow_safe(u[i], p + 1.0);
    return grid.dimension() * s;
}

/// Scales u by the t > 0 for which N(clip(t u)) = 1.
inline std::vector<double> mass_retract(const RadialGrid& grid, std::vector<double> u, double p,
                                        const detail::Bounds& bounds) {
    // nodes sitting on an upper bound stay there; the rest are scaled
    auto trial = [&](double t) {
        std::vector<double> v(u);
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] < bounds.hi[i]) v[i] = std::min(v[i] * t, bounds.hi[i]);
        return v;
    };
    auto f = [&](double t) { return mass_N(grid, trial(t), p) - 1.0; };
    double hi = 1.0;
    for (int k = 0; f(hi) < 0.0; ++k) {
        if (k > 200) throw DomainError("mass_retract: box admits no profile of unit mass (c too small)");
        hi *= 1.5;
    }
    double lo = hi;
    while (f(lo) > 0.0) lo /= 1.5;
    if (lo == hi) lo = hi / 1.5;
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t iters = 200;
    auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
    const double fa = std::abs(f(a)), fb = std::abs(f(b));
    return trial(fa <= fb ? a : b);
}

/// gamma_p = (|A|^{-1} int_A u^{p+1})^{1/(p+1)}, A = {R1 < |x| < R2}.
inline double gamma_mass(const RadialGrid& grid, std::span<const double> u, double p, const ConstraintBox& box) {
    double umax = 0.0;
    for (double x : u) umax = std::max(umax, std::abs(x));
    if (umax == 0.0) return 0.0;
    std::vector<double> f(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) f[i] = detail::pow_safe(std::abs(u[i]) / umax, p + 1.0);
    const int n = grid.dimension();
    const double vol = (std::pow(box.R2, n) - std::pow(box.R1, n)) / n;  // |A|/|dB_1|
    const double integral = quad_interval(grid, f, box.R1, box.R2);
    return umax * std::pow(integral / vol, 1.0 / (p + 1.0));
}

inline double gamma_mass(const Profile& u, double p, const ConstraintBox& box) {
    return gamma_mass(*u.grid, u.values, p, box);
}

/// v = lambda^{1/(p-1)} u solves -Delta v + V v = v^p when -Delta u + V u = lambda u^p.
inline Profile rescale_to_pde(const Profile& u, double lambda, double p) {
    require(lambda > 0.0, "rescale_to_pde: lambda must be positive");
    require(p > 1.0, "rescale_to_pde: p must exceed 1");
    const double s = std::pow(lambda, 1.0 / (p - 1.0));
    Profile v = u;
    for (auto& x : v.values) x *= s;
    for (auto& x : v.derivatives) x *= s;
    return v;
}

struct LambdaEstimate {
    double least_squares = 0.0;
    double energy_ratio = 0.0;
    std::size_t nodes = 0;
    double relative_gap() const { return std::abs(least_squares - energy_ratio) / std::abs(energy_ratio); }
};

/// Lagrange multiplier from the discrete equation -Delta u + V u = lambda u^p on the
/// annulus nodes off the active set: a weighted least-squares fit and the ratio
/// <u, -Delta u + V u>/<u^{p+1}>. Disagreement above 5% is an error.
inline LambdaEstimate extract_lambda(const Profile& u, const PotentialSpec& V, double p, const ConstraintBox& box) {
    require(p > 1.0, "extract_lambda: p must exceed 1");
    const auto& grid = *u.grid;
    FemOperator op(u.grid, V);
    const auto Lu = op.strong_form(u.values);
    double umax = 0.0;
    for (double x : u.values) umax = std::max(umax, x);
    double num_ls = 0.0, den_ls = 0.0, num_e = 0.0, den_e = 0.0;
    LambdaEstimate est;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const double r = grid.node(i);
        if (r <= box.R1 || r >= box.R2) continue;
        const double up = detail::pow_safe(u.values[i], p);
        if (up < 1e-12 * detail::pow_safe(umax, p)) continue;
        const double w = grid.weight(i);
        num_ls += w * Lu[i] * up;
        den_ls += w * up * up;
        num_e += w * u.values[i] * Lu[i];
        den_e += w * up * u.values[i];
        ++est.nodes;
    }
    if (est.nodes < 3) throw NumericalError("extract_lambda: too few annulus nodes");
    est.least_squares = num_ls / den_ls;
    est.energy_ratio = num_e / den_e;
    if (est.relative_gap() > 0.05)
        throw NumericalError("extract_lambda: estimators disagree by " + std::to_string(100 * est.relative_gap()) +
                             "% (unconverged minimizer?)");
    return est;
}

/// Strong-form KKT residual of -Delta u + V u = lambda u^p under 0 <= u <= hi:
/// two-sided off the bounds, one-sided where a bound is attained.
inline double kkt_residual(const FemOperator& op, std::span<const double> u, double lambda, double p,
                           const detail::Bounds& b, std::vector<double>* pointwise = nullptr) {
    const auto Lu = op.strong_form(u);
    double worst = 0.0;
    if (pointwise) pointwise->assign(u.size(), 0.0);
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (b.lo[i] == b.hi[i]) continue;
        double r = Lu[i] - lambda * detail::pow_safe(u[i], p);
        if (u[i] <= b.lo[i] && r > 0.0) r = 0.0;
        if (u[i] >= b.hi[i] && r < 0.0) r = 0.0;
        if (pointwise) (*pointwise)[i] = r;
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

/// Minimizes Q over K_p = {N(u) = 1, 0 <= u, u <= c on the obstacle region}.
///
/// Augmented Lagrangian on the scalar mass constraint,
///   L(u) = Q(u) - mu (N(u) - 1) + rho/2 (N(u) - 1)^2,
/// each subproblem solved by a two-metric projected gradient method: on the free
/// nodes the step is preconditioned by the tridiagonal Hessian of Q, nodes held at a
/// bound by the gradient stay there, and the step length comes from Barzilai-Borwein
/// with a nonmonotone Armijo test.
inline MinimizeResult minimize_Jp(const GreenPair& pair, const PotentialSpec& V, const ConstraintBox& box, double p,
                                  const MinimizeOptions& opt = {}) {
    require(p > 1.0, "minimize_Jp: p must exceed 1");
    require(box.c > 0.0 && box.c < 1.0, "minimize_Jp: obstacle height must lie in (0, 1)");
    if (pair.boundary == Boundary::Dirichlet && !box.outer_obstacle)
        throw DomainError("minimize_Jp: r_bar = 1 is not admissible for Dirichlet problems");
    const auto& grid = *pair.grid;
    const std::size_t N = grid.size();
    const int n = grid.dimension();
    FemOperator op(pair.grid, V);
    const auto bounds = detail::make_bounds(grid, box, pair.boundary);

    {
        // feasibility: the free region must be able to carry unit mass
        std::vector<double> top(bounds.hi);
        if (mass_N(grid, top, p) < 1.0) throw DomainError("minimize_Jp: infeasible box (c too small for unit mass)");
    }

    std::vector<double> u;
    if (opt.initial) {
        require(opt.initial->size() == N, "minimize_Jp: warm start has the wrong length");
        u = *opt.initial;
    } else {
        u = green_profile(pair, box.target).values;
    }
    detail::clip(u, bounds);
    u = mass_retract(grid, std::move(u), p, bounds);

    std::vector<double> pdiag, poff;
    op.hessian(pdiag, poff);

    std::vector<double> gQ(N), gN(N), g(N);
    auto evaluate = [&](const std::vector<double>& x, double mu, double rho, std::vector<double>& grad) {
        op.gradient(x, gQ);
        double mass = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double xp = detail::pow_safe(x[i], p);
            gN[i] = n * (p + 1.0) * grid.weight(i) * xp;
            mass += grid.weight(i) * xp * x[i];
        }
        mass *= n;
        const double q = op.energy(x);
        const double mu_t = mu - rho * (mass - 1.0);
        for (std::size_t i = 0; i < N; ++i) grad[i] = gQ[i] - mu_t * gN[i];
        const double L = q - mu * (mass - 1.0) + 0.5 * rho * (mass - 1.0) * (mass - 1.0);
        return std::tuple{L, q, mass};
    };
    auto projected_sup = [&](const std::vector<double>& x, const std::vector<double>& grad) {
        double worst = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            if (bounds.lo[i] == bounds.hi[i]) continue;
            double r = grad[i] / (2.0 * op.area() * grid.weight(i));
            if (x[i] <= bounds.lo[i] && r > 0.0) r = 0.0;
            if (x[i] >= bounds.hi[i] && r < 0.0) r = 0.0;
            worst = std::max(worst, std::abs(r));
        }
        return worst;
    };

    MinimizeResult res;
    res.p = p;
    res.box = box;
    double Q0 = op.energy(u);
    double mu = 2.0 * Q0 / ((p + 1.0) * mass_N(grid, u, p));
    // The curvature bound alone leaves L(0) = mu + rho/2 far below Q for large p, and
    // the iteration can slide to u = 0; rho >= 2 Q keeps the feasible basin the lowest.
    double rho = opt.rho_safety * std::max(2.0 * Q0 * (p - 1.0) / ((p + 1.0) * (p + 1.0)), 0.5 * Q0);
    double prev_violation = INFINITY;
    double inner_tol = std::max(1e-2, opt.tol);
    double mu_final = mu;

    std::vector<double> d(N), z(N), rhs_diag(N), rhs_off(N - 1), trial(N), g_trial(N);
    for (int outer = 0; outer < opt.max_outer; ++outer) {
        res.outer_iterations = outer + 1;
        auto [L, q, mass] = evaluate(u, mu, rho, g);
        std::deque<double> recent{L};
        double alpha = 1.0;
        for (int it = 0; it < opt.max_inner; ++it) {
            if (projected_sup(u, g) <= inner_tol) break;
            ++res.iterations;
            // binding set: at a bound with the gradient pushing outward
            for (std::size_t i = 0; i < N; ++i) {
                const bool fixed = bounds.lo[i] == bounds.hi[i] || (u[i] <= bounds.lo[i] && g[i] > 0.0) ||
                                   (u[i] >= bounds.hi[i] && g[i] < 0.0);
                rhs_diag[i] = fixed ? 1.0 : pdiag[i];
                d[i] = fixed ? 0.0 : -g[i];
            }
            for (std::size_t c = 0; c + 1 < N; ++c)
                rhs_off[c] = (rhs_diag[c] == 1.0 && d[c] == 0.0) || (rhs_diag[c + 1] == 1.0 && d[c + 1] == 0.0) ? 0.0 : poff[c];
            solve_tridiagonal(rhs_diag, rhs_off, d);
            // rank-one penalty term rho gN gN' through Sherman-Morrison
            for (std::size_t i = 0; i < N; ++i) z[i] = (rhs_diag[i] == 1.0 && d[i] == 0.0) ? 0.0 : gN[i];
            std::vector<double> a(z);
            solve_tridiagonal(rhs_diag, rhs_off, z);
            double ad = 0.0, az = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                ad += a[i] * d[i];
                az += a[i] * z[i];
            }
            const double sm = rho * ad / (1.0 + rho * az);
            for (std::size_t i = 0; i < N; ++i) d[i] -= sm * z[i];
            const double Lref = *std::max_element(recent.begin(), recent.end());
            const double res_now = projected_sup(u, g);
            double L_trial = 0.0, q_trial = 0.0, mass_trial = 0.0;
            bool accepted = false;
            for (int ls = 0; ls < 60; ++ls) {
                for (std::size_t i = 0; i < N; ++i) trial[i] = u[i] + alpha * d[i];
                detail::clip(trial, bounds);
                double decrease = 0.0;
                for (std::size_t i = 0; i < N; ++i) decrease += g[i] * (trial[i] - u[i]);
                std::tie(L_trial, q_trial, mass_trial) = evaluate(trial, mu, rho, g_trial);
                // below roundoff in L the Armijo test is noise; ask for a smaller residual instead
                const bool resolvable = std::abs(decrease) > 1e-12 * std::max(1.0, std::abs(Lref));
                if (resolvable ? L_trial <= Lref + 1e-4 * decrease : projected_sup(trial, g_trial) < res_now) {
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!accepted) break;
            // Barzilai-Borwein step in the metric of the preconditioner
            double sPs = 0.0, sy = 0.0, as = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const double s = trial[i] - u[i];
                as += gN[i] * s;
                sy += s * (g_trial[i] - g[i]);
                double ps = pdiag[i] * s;
                if (i > 0) ps += poff[i - 1] * (trial[i - 1] - u[i - 1]);
                if (i + 1 < N) ps += poff[i] * (trial[i + 1] - u[i + 1]);
                sPs += s * ps;
            }
            sPs += rho * as * as;
            alpha = sy > 0.0 ? std::clamp(sPs / sy, 1e-4, 1e4) : 1.0;
            u.swap(trial);
            g.swap(g_trial);
            recent.push_back(L_trial);
            if (recent.size() > 10) recent.pop_front();
            mass = mass_trial;
            q = q_trial;
        }
        mu_final = mu - rho * (mass - 1.0);
        const double violation = std::abs(mass - 1.0);
        mu = mu_final;
        if (violation > 0.25 * prev_violation) rho *= 4.0;
        prev_violation = violation;

        auto normalized = mass_retract(grid, u, p, bounds);
        res.energy_history.push_back(op.energy(normalized));

        const double lambda = mu_final * n * (p + 1.0) / (2.0 * op.area());
        const double kkt = kkt_residual(op, u, lambda, p, bounds);
        if (violation <= 0.1 * opt.mass_tol && kkt <= opt.tol) {
            res.converged = true;
            break;
        }
        inner_tol = std::max(0.1 * inner_tol, 0.2 * opt.tol);
    }

    // Scaling the free nodes against nodes held at c shows up in the strong residual
    // amplified by 1/h^2, so only retract when the mass is actually off.
    if (std::abs(mass_N(grid, u, p) - 1.0) > opt.mass_tol) u = mass_retract(grid, std::move(u), p, bounds);
    for (double x : u)
        if (x >= detail::kValueCap) throw NumericalError("minimize_Jp: iterate reached the value cap");
    res.lambda = mu_final * n * (p + 1.0) / (2.0 * op.area());
    res.kkt_residual = kkt_residual(op, u, res.lambda, p, bounds);
    res.mass_residual = std::abs(mass_N(grid, u, p) - 1.0);
    res.converged = res.converged && res.kkt_residual <= opt.tol && res.mass_residual <= opt.mass_tol;
    res.J = op.energy(u);
    for (std::size_t i = 0; i < N; ++i)
        if (bounds.hi[i] < detail::kValueCap && bounds.hi[i] > 0.0 && u[i] >= bounds.hi[i] - 1e-12)
            res.active_set.push_back(i);
    res.u = Profile(pair.grid, u, finite_difference(grid, u));
    res.gamma = gamma_mass(res.u, p, box);
    if (res.lambda > 0.0) res.rescaled = rescale_to_pde(res.u, res.lambda, p);
    return res;
}

/// Continuation over ascending p, each run warm-started from the previous one.
inline std::vector<MinimizeResult> minimize_sweep(const GreenPair& pair, const PotentialSpec& V, const ConstraintBox& box,
                                                  std::vector<double> ps, MinimizeOptions opt = {}) {
    std::sort(ps.begin(), ps.end());
    std::vector<MinimizeResult> out;
    for (double p : ps) {
        out.push_back(minimize_Jp(pair, V, box, p, opt));
        opt.initial = out.back().u.values;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Limit problem

namespace detail {

/// min 1/2 u'Au - b'u subject to lo <= u <= hi (entries with lo == hi are fixed), for a
/// tridiagonal M-matrix A; primal-dual active set iteration, one solve per sweep.
inline std::vector<double> obstacle_solve(std::span<const double> diag, std::span<const double> off,
                                          std::span<const double> b, std::span<const double> lo,
                                          std::span<const double> hi) {
    const std::size_t N = diag.size();
    std::vector<int> state(N, 0);  // 0 free, -1 at lo, +1 at hi
    for (std::size_t i = 0; i < N; ++i)
        if (lo[i] == hi[i]) state[i] = -1;
    std::vector<double> u(N), dd(N), oo(N - 1), rhs(N);
    for (int sweep = 0; sweep < 200; ++sweep) {
        for (std::size_t i = 0; i < N; ++i) {
            if (state[i] != 0) {
                dd[i] = 1.0;
                rhs[i] = state[i] < 0 ? lo[i] : hi[i];
            } else {
                dd[i] = diag[i];
                rhs[i] = b[i];
                if (i > 0 && state[i - 1] != 0) rhs[i] -= off[i - 1] * (state[i - 1] < 0 ? lo[i - 1] : hi[i - 1]);
                if (i + 1 < N && state[i + 1] != 0) rhs[i] -= off[i] * (state[i + 1] < 0 ? lo[i + 1] : hi[i + 1]);
            }
        }
        for (std::size_t c = 0; c + 1 < N; ++c) oo[c] = (state[c] == 0 && state[c + 1] == 0) ? off[c] : 0.0;
        u.assign(rhs.begin(), rhs.end());
        solve_tridiagonal(dd, oo, u);
        bool changed = false;
        for (std::size_t i = 0; i < N; ++i) {
            if (lo[i] == hi[i]) continue;
            double r = b[i] - diag[i] * u[i];
            if (i > 0) r -= off[i - 1] * u[i - 1];
            if (i + 1 < N) r -= off[i] * u[i + 1];
            int next = state[i];
            if (state[i] == 0) {
                if (u[i] > hi[i]) next = 1;
                else if (u[i] < lo[i]) next = -1;
            } else if (state[i] > 0 && r < 0.0) {
                next = 0;  // multiplier b - Au of the upper bound must be >= 0
            } else if (state[i] < 0 && r > 0.0) {
                next = 0;
            }
            if (next != state[i]) {
                state[i] = next;
                changed = true;
            }
        }
        if (!changed) return u;
    }
    throw NumericalError("obstacle_solve: active set did not settle");
}

}  // namespace detail

struct JinftyOptions {
    int refine = 16;
    double golden_tol = 1e-7;
    std::size_t scan_points = 17;
};

struct JinftyResult {
    double r_hat = 0.0;
    Profile fine;        // solution on the refined grid (r_hat is a node)
    Profile u;           // restriction to the original grid
    double energy = 0.0; // Q_h of the solution
    bool tie = false;    // golden-section ended on (numerically) equal values
    bool boundary_peak = false;
};

namespace detail {

struct PeakSolve {
    GridPtr grid;
    std::vector<double> u;
    std::size_t peak = 0;
    double energy = 0.0;
    double flux_left = 0.0;   // r^{n-1} u'(r_hat-) in the variational sense
    double flux_right = 0.0;  // r^{n-1} u'(r_hat+)
};

inline PeakSolve solve_with_peak(const RadialGrid& base, int refine, const PotentialSpec& V, Boundary bc,
                                 const ConstraintBox& box, double r_hat) {
    const double extra[] = {r_hat};
    PeakSolve out;
    out.grid = refine_grid(base, refine, std::span<const double>(extra, 1));
    const auto& g = *out.grid;
    const std::size_t N = g.size();
    const std::size_t c0 = g.locate(r_hat);
    const std::size_t k = std::abs(g.node(c0) - r_hat) <= std::abs(g.node(c0 + 1) - r_hat) ? c0 : c0 + 1;
    if (std::abs(g.node(k) - r_hat) > 1e-12) throw NumericalError("solve_with_peak: peak is not a node");
    out.peak = k;
    FemOperator op(out.grid, V);
    std::vector<double> diag, off;
    op.hessian(diag, off);
    std::vector<double> lo(N, 0.0), hi(N, 1.0), b(N, 0.0);
    for (std::size_t i = 0; i < N; ++i)
        if (box.in_obstacle(g.node(i))) hi[i] = std::min(hi[i], box.c);
    lo[k] = hi[k] = 1.0;
    if (bc == Boundary::Dirichlet) {
        if (k == N - 1) throw DomainError("solve_Jinfty: peak at r = 1 with a Dirichlet condition");
        lo.back() = hi.back() = 0.0;
    }
    out.u = obstacle_solve(diag, off, b, lo, hi);
    out.energy = op.energy(out.u);
    // weak form on each side of the peak tested with the peak's hat function
    const double Vk = V(g.node(k));
    if (k > 0) {
        const double h = g.cell_width(k - 1);
        out.flux_left = g.cell_moment(k - 1) / (h * h) * (out.u[k] - out.u[k - 1]) + Vk * out.u[k] * g.cell_right_moment(k - 1);
    }
    if (k + 1 < N) {
        const double h = g.cell_width(k);
        out.flux_right = -(g.cell_moment(k) / (h * h) * (out.u[k] - out.u[k + 1]) + Vk * out.u[k] * g.cell_left_moment(k));
    }
    return out;
}

}  // namespace detail

/// Limit problem: min Q over {0 <= u <= 1, u <= c on the obstacle region, max u = 1},
/// solved as min over r_hat in [R1, R2] of the linear obstacle problem with u(r_hat) = 1.
/// The peak is located by golden-section search on the discrete energy and then
/// refined on the balance of the one-sided fluxes at the peak.
inline JinftyResult solve_Jinfty(const GreenPair& pair, const PotentialSpec& V, const ConstraintBox& box,
                                 const JinftyOptions& opt = {}) {
    const auto& base = *pair.grid;
    const Boundary bc = pair.boundary;
    if (bc == Boundary::Dirichlet && !box.outer_obstacle)
        throw DomainError("solve_Jinfty: r_bar = 1 is not admissible for Dirichlet problems");
    auto energy = [&](double r) { return detail::solve_with_peak(base, opt.refine, V, bc, box, r).energy; };
    double lo_end = box.R1, hi_end = box.R2;
    if (bc == Boundary::Dirichlet) hi_end = std::min(hi_end, 1.0 - 1e-9);
    // golden-section is local: a coarse scan picks the bracket of the smallest sample
    std::size_t best = 0;
    std::vector<double> scan(opt.scan_points);
    {
        double fbest = INFINITY;
        for (std::size_t k = 0; k < scan.size(); ++k) {
            scan[k] = lo_end + (hi_end - lo_end) * double(k) / double(scan.size() - 1);
            const double e = energy(scan[k]);
            if (e < fbest) {
                fbest = e;
                best = k;
            }
        }
    }
    double a = scan[best > 0 ? best - 1 : 0], b = scan[std::min(best + 1, scan.size() - 1)];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = energy(x1), f2 = energy(x2);
    bool tie = false;
    while (b - a > opt.golden_tol) {
        tie = std::abs(f1 - f2) <= 1e-15 * std::abs(f1);
        if (f1 <= f2) {  // ties go to the smaller radius
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = energy(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = energy(x2);
        }
    }
    double r_hat = 0.5 * (a + b);
    JinftyResult res;
    res.tie = tie;
    const bool at_right = box.R2 - r_hat <= 4.0 * opt.golden_tol;
    const bool at_left = r_hat - box.R1 <= 4.0 * opt.golden_tol;
    if (at_right && !box.outer_obstacle && box.R2 == 1.0) {
        if (energy(1.0) <= energy(r_hat)) r_hat = 1.0;
    } else if (at_left || at_right) {
        throw NumericalError("solve_Jinfty: minimizing peak hits the bracket boundary (box does not isolate the minimum)");
    }
    if (r_hat < 1.0) {
        // balance of one-sided fluxes: r^{n-1}(u'(r-) + u'(r+)) = 0 at the minimizing peak
        auto imbalance = [&](double r) {
            auto s = detail::solve_with_peak(base, opt.refine, V, bc, box, r);
            return s.flux_left + s.flux_right;
        };
        const double w = 8.0 * opt.golden_tol;
        double lo = std::max(box.R1, r_hat - w), hi = std::min(box.R2, r_hat + w);
        double flo = imbalance(lo), fhi = imbalance(hi);
        if ((flo > 0.0) != (fhi > 0.0)) {
            for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = imbalance(mid);
                if ((fm > 0.0) == (flo > 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            r_hat = 0.5 * (lo + hi);
        }
    }
    auto sol = detail::solve_with_peak(base, opt.refine, V, bc, box, r_hat);
    // an isolating box leaves the limit profile strictly below c off the annulus
    for (std::size_t i = 0; i < sol.u.size(); ++i)
        if (i != sol.peak && box.in_obstacle(sol.grid->node(i)) && sol.u[i] >= box.c - 1e-12)
            throw NumericalError("solve_Jinfty: obstacle active at the minimizing peak (box does not isolate the minimum)");
    res.r_hat = r_hat;
    res.boundary_peak = r_hat == 1.0;
    res.energy = sol.energy;
    res.fine = Profile(sol.grid, sol.u);
    res.fine.kink = Kink{r_hat, 1.0, 0.0, 0.0};
    std::vector<double> coarse(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) coarse[i] = res.fine.at(base.node(i));
    res.u = Profile(pair.grid, std::move(coarse));
    return res;
}

// ---------------------------------------------------------------------------
// Diagnostics

struct ConvergenceRow {
    double p = 0.0;
    double sup_dist = 0.0;     // max |u_p - u_inf| on the grid
    double energy_dist = 0.0;  // |J_p - F(r_bar)|
    double gamma = 0.0;
    double peak_r = 0.0;
    int peak_count = 0;        // local maxima of u_p in [R1, R2]
    double obstacle_margin = 0.0;  // c - max u_p on the obstacle region
    double J = 0.0;
    double lambda = 0.0;
    double kkt = 0.0;
};

inline int count_local_maxima(const RadialGrid& grid, std::span<const double> u, double R1, double R2) {
    int count = 0;
    const std::size_t N = u.size();
    for (std::size_t i = 0; i < N; ++i) {
        const double r = grid.node(i);
        if (r < R1 || r > R2) continue;
        const bool left_ok = i == 0 || u[i] > u[i - 1];
        // plateaus count once: compare with the next different value
        std::size_t j = i + 1;
        while (j < N && u[j] == u[i]) ++j;
        const bool right_ok = j == N || u[j] < u[i];
        if (left_ok && right_ok) ++count;
    }
    return count;
}

inline std::vector<ConvergenceRow> convergence_report(const std::vector<MinimizeResult>& results, const GreenPair& pair,
                                                      const ConstraintBox& box) {
    const auto limit = green_profile(pair, box.target);
    const double F = eval_F(pair, box.target);
    const auto& grid = *pair.grid;
    std::vector<ConvergenceRow> rows;
    for (const auto& r : results) {
        ConvergenceRow row;
        row.p = r.p;
        row.J = r.J;
        row.lambda = r.lambda;
        row.kkt = r.kkt_residual;
        row.gamma = r.gamma;
        row.energy_dist = std::abs(r.J - F);
        double best = -INFINITY, margin = INFINITY;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            row.sup_dist = std::max(row.sup_dist, std::abs(r.u.values[i] - limit.values[i]));
            if (r.u.values[i] > best) {
                best = r.u.values[i];
                row.peak_r = grid.node(i);
            }
            if (box.in_obstacle(grid.node(i))) margin = std::min(margin, box.c - r.u.values[i]);
        }
        row.obstacle_margin = margin;
        row.peak_count = count_local_maxima(grid, r.u.values, box.R1, box.R2);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace radgreen
