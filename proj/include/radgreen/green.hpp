#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "radgreen/grid.hpp"
#include "radgreen/ode.hpp"
#include "radgreen/potential.hpp"
#include "radgreen/profile.hpp"

namespace radgreen {

enum class Boundary { Neumann, Dirichlet };

inline std::string to_string(Boundary b) { return b == Boundary::Neumann ? "neumann" : "dirichlet"; }

inline Boundary parse_boundary(const std::string& s) {
    if (s == "neumann") return Boundary::Neumann;
    if (s == "dirichlet") return Boundary::Dirichlet;
    throw ConfigError("boundary must be 'neumann' or 'dirichlet', got '" + s + "'");
}

/// Wronskian-normalized pair (xi, zeta) of positive solutions of
///   -u'' - (n-1)/r u' + V u = 0,   xi'(0) = 0,  zeta'(1) = 0 (Neumann) or zeta(1) = 0 (Dirichlet),
/// with r^{n-1}(xi' zeta - xi zeta') = 1. The Green function factorizes as
///   G(r, s) = s^{n-1} xi(min(r, s)) zeta(max(r, s)).
struct GreenPair {
    GridPtr grid;
    Boundary boundary = Boundary::Neumann;
    Profile xi;
    Profile zeta;
    double wronskian_residual = 0.0;
    double kappa = 1.0;  // Wronskian constant before normalization

    int dimension() const { return grid->dimension(); }
    double xi_at(double r) const { return xi.at(r); }
    double xi_prime_at(double r) const { return xi.derivative_at(r); }
    double zeta_at(double r) const {
        if (boundary == Boundary::Dirichlet && r == 1.0) return 0.0;
        return zeta.at(r);
    }
    double zeta_prime_at(double r) const { return zeta.derivative_at(r); }

    /// G(r, s) via the factorization.
    double green(double r, double s) const {
        require(grid->contains(r) && grid->contains(s), "green: arguments must lie in [eps, 1]");
        const double w = std::pow(s, dimension() - 1);
        return r <= s ? w * xi_at(r) * zeta_at(s) : w * xi_at(s) * zeta_at(r);
    }

    /// G(r, r) = r^{n-1} xi(r) zeta(r).
    double green_diagonal(double r) const { return green(r, r); }
};

/// Wronskian r^{n-1}(xi' zeta - xi zeta') at every node.
inline std::vector<double> wronskian(const Profile& xi, const Profile& zeta) {
    require(xi.has_derivatives() && zeta.has_derivatives(), "wronskian: derivative samples required");
    require(xi.size() == zeta.size(), "wronskian: length mismatch");
    const auto& grid = *xi.grid;
    std::vector<double> w(xi.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double rn = std::pow(grid.node(i), grid.dimension() - 1);
        w[i] = rn * (xi.derivatives[i] * zeta.values[i] - xi.values[i] * zeta.derivatives[i]);
    }
    return w;
}

/// Regular solution: forward integration from eps with the two-term series
/// u(eps) = 1 + V(0) eps^2/(2n), u'(eps) = V(0) eps/n. Not normalized.
inline Profile solve_xi(GridPtr grid, const PotentialSpec& V, const OdeTolerances& tol = {}) {
    const int n = grid->dimension();
    V.sample(*grid);
    const double eps = grid->epsilon();
    const double v0 = V(0.0);
    const RadialState y0{1.0 + v0 * eps * eps / (2.0 * n), eps * (v0 * eps / n)};
    auto source = [&V](double r, double u, double) { return V(r) * u; };
    auto traj = integrate_radial(n, source, eps, y0, grid->nodes(), [](double u, double) { return u <= 0.0; }, tol);
    if (traj.stopped)
        throw NumericalError("solve_xi: solution lost positivity at r = " + std::to_string(traj.stop_radius) +
                             " (inadmissible potential?)");
    return Profile(grid, std::move(traj.u), std::move(traj.du));
}

/// Solution satisfying the outer boundary condition: backward integration from r = 1
/// with (zeta, zeta') = (1, 0) (Neumann) or (0, -1) (Dirichlet). Not normalized.
inline Profile solve_zeta(GridPtr grid, const PotentialSpec& V, Boundary boundary, const OdeTolerances& tol = {}) {
    const int n = grid->dimension();
    V.sample(*grid);
    std::vector<double> radii(grid->nodes().rbegin(), grid->nodes().rend());
    const RadialState y0 = boundary == Boundary::Neumann ? RadialState{1.0, 0.0} : RadialState{0.0, -1.0};
    auto source = [&V](double r, double u, double) { return V(r) * u; };
    auto traj = integrate_radial(n, source, 1.0, y0, radii, [](double u, double) { return u < 0.0; }, tol);
    if (traj.stopped)
        throw NumericalError("solve_zeta: solution lost positivity at r = " + std::to_string(traj.stop_radius));
    std::reverse(traj.u.begin(), traj.u.end());
    std::reverse(traj.du.begin(), traj.du.end());
    for (std::size_t i = 0; i + 1 < traj.u.size(); ++i)
        if (!(traj.u[i] > 0.0)) throw NumericalError("solve_zeta: non-positive value in the interior");
    return Profile(grid, std::move(traj.u), std::move(traj.du));
}

/// Fixes the scale of the pair: xi is normalized to xi(0) = 1 (extrapolated from the
/// first node, xi(eps) = 1 + O(eps^2)) and zeta is divided by kappa, the median of the
/// node-wise Wronskian, so that r^{n-1}(xi' zeta - xi zeta') = 1. The relative spread of
/// the Wronskian must stay below `constancy_tol`.
inline GreenPair normalize_pair(Profile xi, Profile zeta, Boundary boundary, double constancy_tol = 1e-6) {
    require(xi.grid && zeta.grid && xi.grid->size() == zeta.grid->size(),
            "normalize_pair: profiles live on different grids");
    const double xi0 = xi.values.front();
    require(xi0 > 0.0, "normalize_pair: xi must be positive");
    for (auto& x : xi.values) x /= xi0;
    for (auto& x : xi.derivatives) x /= xi0;

    auto w = wronskian(xi, zeta);
    std::vector<double> sorted = w;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
    const double kappa = sorted[sorted.size() / 2];

    double scale = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double rn = std::pow(xi.grid->node(i), xi.grid->dimension() - 1);
        scale = std::max(scale, rn * std::abs(xi.derivatives[i] * zeta.values[i]) +
                                    rn * std::abs(xi.values[i] * zeta.derivatives[i]));
    }
    if (!(std::abs(kappa) > 1e-12 * scale)) throw NumericalError("normalize_pair: solutions are linearly dependent");

    double mean = 0.0;
    for (double x : w) mean += x;
    mean /= static_cast<double>(w.size());
    double var = 0.0;
    for (double x : w) var += (x - mean) * (x - mean);
    const double stdev = std::sqrt(var / static_cast<double>(w.size()));
    if (stdev > constancy_tol * std::abs(kappa))
        throw NumericalError("normalize_pair: Wronskian is not constant (relative spread " +
                             std::to_string(stdev / std::abs(kappa)) + ")");

    for (auto& x : zeta.values) x /= kappa;
    for (auto& x : zeta.derivatives) x /= kappa;
    GreenPair pair;
    pair.grid = xi.grid;
    pair.boundary = boundary;
    pair.kappa = kappa * xi0;
    double residual = 0.0;
    for (double x : w) residual = std::max(residual, std::abs(x / kappa - 1.0));
    pair.wronskian_residual = residual;
    pair.xi = std::move(xi);
    pair.zeta = std::move(zeta);
    return pair;
}

/// Full construction: integrate both solutions and normalize.
inline GreenPair build_green_pair(GridPtr grid, const PotentialSpec& V, Boundary boundary, const OdeTolerances& tol = {}) {
    auto xi = solve_xi(grid, V, tol);
    auto zeta = solve_zeta(grid, V, boundary, tol);
    return normalize_pair(std::move(xi), std::move(zeta), boundary);
}

inline double green_eval(const GreenPair& pair, double r, double s) { return pair.green(r, s); }

/// G(r, 1)/G(1, 1) = xi(r)/xi(1); only defined when zeta(1) != 0 (Neumann).
inline Profile green_boundary_profile(const GreenPair& pair) {
    if (pair.boundary != Boundary::Neumann)
        throw DomainError("green_boundary_profile: undefined for Dirichlet (zeta(1) = 0)");
    const double x1 = pair.xi.values.back();
    std::vector<double> v(pair.xi.values), d(pair.xi.derivatives);
    for (auto& x : v) x /= x1;
    for (auto& x : d) x /= x1;
    v.back() = 1.0;
    return Profile(pair.grid, std::move(v), std::move(d));
}

/// Normalized Green profile G(., s)/G(s, s) with the derivative kink at s recorded.
inline Profile green_profile(const GreenPair& pair, double s) {
    const auto& grid = *pair.grid;
    require(s > grid.epsilon() && s <= 1.0, "green_profile: center must lie in (eps, 1]");
    if (s == 1.0) return green_boundary_profile(pair);
    const double xs = pair.xi_at(s), zs = pair.zeta_at(s);
    const double dxs = pair.xi_prime_at(s), dzs = pair.zeta_prime_at(s);
    std::vector<double> v(grid.size()), d(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.node(i) <= s) {
            v[i] = pair.xi.values[i] / xs;
            d[i] = pair.xi.derivatives[i] / xs;
        } else {
            v[i] = pair.zeta.values[i] / zs;
            d[i] = pair.zeta.derivatives[i] / zs;
        }
    }
    Profile u(pair.grid, std::move(v), std::move(d));
    u.kink = Kink{s, 1.0, dxs / xs, dzs / zs};
    return u;
}

struct PicardOptions {
    double tolerance = 1e-12;
    int max_iterations = 500;
    int nodes = 20000;  // geometric nodes in s = r^{2-n}
};

struct PicardResult {
    Profile xi;             // phi(r^{2-n})/(n-2), with derivatives
    double phi_at_one = 0;  // phi(1), i.e. (n-2) xi(1)
    int iterations = 0;
    double last_change = 0;
};

/// Fixed-point construction of the regular solution for n >= 3 in s = r^{2-n}:
///   phi(s) = 1 + int_s^Smax (1 - s/t) V~(t)/(n-2)^2 phi(t) t^{n/(2-n)} dt,  Smax = eps^{2-n}.
/// With t = e^tau the weight t^{n/(2-n)} dt becomes r(t)^2 dtau / t, so the integral is
/// the trapezoid rule in tau of r^2 V phi (1 - s/t)/(n-2)^2.
inline PicardResult picard_xi(GridPtr grid, const PotentialSpec& V, const PicardOptions& opt = {}) {
    const int n = grid->dimension();
    require(n >= 3, "picard_xi: requires n >= 3");
    require(opt.nodes >= 16, "picard_xi: too few nodes");
    const double eps = grid->epsilon();
    const double T = (n - 2) * std::log(1.0 / eps);
    const std::size_t M = static_cast<std::size_t>(opt.nodes);
    const double dtau = T / static_cast<double>(M - 1);
    const double c = 1.0 / ((n - 2.0) * (n - 2.0));

    std::vector<double> tau(M), s(M), kernel(M);
    for (std::size_t j = 0; j < M; ++j) {
        tau[j] = dtau * static_cast<double>(j);
        s[j] = std::exp(tau[j]);
        const double r = std::exp(-tau[j] / (n - 2));
        kernel[j] = c * r * r * V(r);
    }

    std::vector<double> phi(M, 1.0), next(M), A(M), B(M);
    PicardResult res;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        // A_j = int_{tau_j}^T g, B_j = int_{tau_j}^T g e^{-tau}, g = kernel * phi
        A[M - 1] = B[M - 1] = 0.0;
        for (std::size_t j = M - 1; j-- > 0;) {
            const double g0 = kernel[j] * phi[j], g1 = kernel[j + 1] * phi[j + 1];
            A[j] = A[j + 1] + 0.5 * dtau * (g0 + g1);
            B[j] = B[j + 1] + 0.5 * dtau * (g0 / s[j] + g1 / s[j + 1]);
        }
        double change = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            next[j] = 1.0 + A[j] - s[j] * B[j];
            change = std::max(change, std::abs(next[j] - phi[j]));
        }
        phi.swap(next);
        res.iterations = it;
        res.last_change = change;
        if (change < opt.tolerance) break;
        if (it == opt.max_iterations)
            throw NumericalError("picard_xi: no convergence within the iteration cap (fall back to solve_xi)");
    }
    // phi'(s_j) = -B_j for the converged phi; recompute B with the final iterate.
    B[M - 1] = 0.0;
    for (std::size_t j = M - 1; j-- > 0;)
        B[j] = B[j + 1] + 0.5 * dtau * (kernel[j] * phi[j] / s[j] + kernel[j + 1] * phi[j + 1] / s[j + 1]);

    // Resample on the grid with cubic Hermite in tau: dphi/dtau = s phi'(s) = -s B.
    std::vector<double> xi(grid->size()), dxi(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double r = grid->node(i);
        const double t = std::clamp((n - 2) * std::log(1.0 / r), 0.0, T);
        std::size_t j = std::min(static_cast<std::size_t>(t / dtau), M - 2);
        const auto h = detail::hermite(tau[j], tau[j + 1], phi[j], phi[j + 1], -s[j] * B[j], -s[j + 1] * B[j + 1], t);
        xi[i] = h.value / (n - 2);
        // dphi/ds = (dphi/dtau)/s, xi' = phi'(s) (2-n) r^{1-n}/(n-2) = -phi'(s) r^{1-n}
        const double sval = std::exp(t);
        dxi[i] = -(h.slope / sval) * std::pow(r, 1 - n);
    }
    res.xi = Profile(grid, std::move(xi), std::move(dxi));
    res.phi_at_one = phi[0];
    return res;
}

/// Closed-form pair for V == lambda, n = 3: with k = sqrt(lambda),
///   xi = sinh(k r)/r,  zeta = (alpha sinh(k r) + cosh(k r)/k)/r,
/// alpha fixed by the boundary condition; the Wronskian is exactly 1.
inline GreenPair closed_form_constant(double lambda, GridPtr grid, Boundary boundary) {
    require(lambda > 0.0, "closed_form_constant: lambda must be positive");
    require(grid->dimension() == 3, "closed_form_constant: only n = 3 has this closed form");
    const double k = std::sqrt(lambda);
    const double beta = 1.0 / k;
    double alpha;
    if (boundary == Boundary::Neumann)
        alpha = beta * (std::cosh(k) - k * std::sinh(k)) / (k * std::cosh(k) - std::sinh(k));
    else
        alpha = -beta * std::cosh(k) / std::sinh(k);

    const std::size_t N = grid->size();
    std::vector<double> xv(N), xd(N), zv(N), zd(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double r = grid->node(i);
        const double S = std::sinh(k * r), C = std::cosh(k * r);
        xv[i] = S / r;
        xd[i] = k * C / r - S / (r * r);
        const double E = alpha * S + beta * C, dE = k * (alpha * C + beta * S);
        zv[i] = E / r;
        zd[i] = dE / r - E / (r * r);
    }
    if (boundary == Boundary::Dirichlet) {
        // alpha S + beta C = beta sinh(k(1 - r))/sinh(k); evaluate in that form to avoid cancellation
        for (std::size_t i = 0; i < N; ++i) {
            const double r = grid->node(i);
            zv[i] = beta * std::sinh(k * (1.0 - r)) / (r * std::sinh(k));
            zd[i] = -beta * k * std::cosh(k * (1.0 - r)) / (r * std::sinh(k)) - zv[i] / r;
        }
    }
    GreenPair pair;
    pair.grid = grid;
    pair.boundary = boundary;
    pair.xi = Profile(grid, std::move(xv), std::move(xd));
    pair.zeta = Profile(grid, std::move(zv), std::move(zd));
    double residual = 0.0;
    for (double w : wronskian(pair.xi, pair.zeta)) residual = std::max(residual, std::abs(w - 1.0));
    pair.wronskian_residual = residual;
    return pair;
}

}  // namespace radgreen
