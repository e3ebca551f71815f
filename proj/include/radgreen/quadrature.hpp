#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "radgreen/grid.hpp"
#include "radgreen/potential.hpp"
#include "radgreen/profile.hpp"

namespace radgreen {

/// sum_i w_i f_i, approximating int_0^1 f(r) r^{n-1} dr.
inline double quad(const RadialGrid& grid, std::span<const double> f) {
    require(f.size() == grid.size(), "quad: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += grid.weight(i) * f[i];
    return s;
}

inline double quad(const Profile& f) { return quad(*f.grid, f.values); }

/// int_a^b f r^{n-1} dr for the piecewise-linear interpolant of the node samples f.
/// Partial cells are integrated exactly, so f == 1 gives (b^n - a^n)/n.
inline double quad_interval(const RadialGrid& grid, std::span<const double> f, double a, double b) {
    require(f.size() == grid.size(), "quad_interval: length mismatch");
    a = std::max(a, grid.epsilon());
    b = std::min(b, 1.0);
    if (!(b > a)) return 0.0;
    const int m = grid.dimension() - 1;
    double s = 0.0;
    for (std::size_t c = grid.locate(a); c < grid.cells(); ++c) {
        const double x0 = grid.node(c), x1 = grid.node(c + 1);
        if (x0 >= b) break;
        const double lo = std::max(a, x0), hi = std::min(b, x1);
        if (hi <= lo) continue;
        if (lo == x0 && hi == x1) {
            s += grid.cell_left_moment(c) * f[c] + grid.cell_right_moment(c) * f[c + 1];
            continue;
        }
        const double h = x1 - x0;
        const double flo = f[c] + (f[c + 1] - f[c]) * (lo - x0) / h;
        const double fhi = f[c] + (f[c + 1] - f[c]) * (hi - x0) / h;
        const auto mom = detail::hat_moments(lo, hi, m);
        s += mom.left * flo + mom.right * fhi;
    }
    return s;
}

/// Q(u) = |dB_1| int_0^1 (u'^2 + V u^2) r^{n-1} dr.
///
/// Uses the profile's derivative samples (centered differences when absent). If the
/// profile carries a kink, the cell containing it is split and the one-sided slopes
/// are used on each side.
inline double energy_Q(const RadialGrid& grid, const PotentialSpec& V, const Profile& u) {
    require(u.size() == grid.size(), "energy_Q: length mismatch");
    const std::vector<double> fd = u.has_derivatives() ? std::vector<double>{} : finite_difference(grid, u.values);
    std::span<const double> du = u.has_derivatives() ? std::span<const double>(u.derivatives) : std::span<const double>(fd);
    const int m = grid.dimension() - 1;

    auto integrand = [&](double r, double value, double slope) { return slope * slope + V(r) * value * value; };

    std::size_t kink_cell = grid.cells();
    bool kink_on_node = false;
    std::size_t kink_node = 0;
    if (u.kink) {
        const double rk = u.kink->r;
        const std::size_t c = grid.locate(rk);
        const double tol = 1e-12;
        if (std::abs(rk - grid.node(c)) < tol) {
            kink_on_node = true;
            kink_node = c;
        } else if (std::abs(rk - grid.node(c + 1)) < tol) {
            kink_on_node = true;
            kink_node = c + 1;
        } else {
            kink_cell = c;
        }
    }

    double s = 0.0;
    for (std::size_t c = 0; c < grid.cells(); ++c) {
        const double a = grid.node(c), b = grid.node(c + 1);
        double da = du[c], db = du[c + 1];
        if (kink_on_node) {
            if (kink_node == c) da = u.kink->slope_right;
            if (kink_node == c + 1) db = u.kink->slope_left;
        }
        const double fa = integrand(a, u.values[c], da);
        const double fb = integrand(b, u.values[c + 1], db);
        if (c != kink_cell) {
            s += grid.cell_left_moment(c) * fa + grid.cell_right_moment(c) * fb;
            continue;
        }
        const Kink& k = *u.kink;
        const auto left = detail::hat_moments(a, k.r, m);
        const auto right = detail::hat_moments(k.r, b, m);
        s += left.left * fa + left.right * integrand(k.r, k.value, k.slope_left);
        s += right.left * integrand(k.r, k.value, k.slope_right) + right.right * fb;
    }
    return sphere_area(grid.dimension()) * s;
}

inline double energy_Q(const PotentialSpec& V, const Profile& u) { return energy_Q(*u.grid, V, u); }

/// (|B_1|^{-1} int_{B_1} |u|^q)^{1/q} = (n int_0^1 |u|^q r^{n-1} dr)^{1/q}.
/// Evaluated relative to max|u| so that large q does not overflow.
inline double norm_lq_normalized(const RadialGrid& grid, std::span<const double> u, double q) {
    require(q > 1.0, "norm_lq_normalized: q must exceed 1");
    require(std::isfinite(q), "norm_lq_normalized: q must be finite");
    require(u.size() == grid.size(), "norm_lq_normalized: length mismatch");
    double umax = 0.0;
    for (double x : u) umax = std::max(umax, std::abs(x));
    if (umax == 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += grid.weight(i) * std::pow(std::abs(u[i]) / umax, q);
    return umax * std::pow(grid.dimension() * s, 1.0 / q);
}

inline double norm_lq_normalized(const Profile& u, double q) { return norm_lq_normalized(*u.grid, u.values, q); }

}  // namespace radgreen
