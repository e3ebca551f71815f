#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "radgreen/grid.hpp"
#include "radgreen/potential.hpp"

namespace radgreen {

/// Piecewise-linear elements on a radial grid:
///   Q_h(u) = |dB_1| [ sum_c M_c ((u_{c+1} - u_c)/h_c)^2 + sum_i w_i V_i u_i^2 ],
/// M_c = int_cell r^{n-1} dr. The potential term uses the lumped (nodal) mass.
class FemOperator {
public:
    FemOperator(GridPtr grid, const PotentialSpec& V) : grid_(std::move(grid)) {
        const auto& g = *grid_;
        area_ = sphere_area(g.dimension());
        stiff_.resize(g.cells());
        for (std::size_t c = 0; c < g.cells(); ++c) {
            const double h = g.cell_width(c);
            stiff_[c] = g.cell_moment(c) / (h * h);
        }
        const auto v = V.sample(g);
        mass_.resize(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) mass_[i] = g.weight(i) * v[i];
    }

    const GridPtr& grid() const { return grid_; }
    std::size_t size() const { return mass_.size(); }
    double area() const { return area_; }

    double energy(std::span<const double> u) const {
        double s = 0.0;
        for (std::size_t c = 0; c < stiff_.size(); ++c) {
            const double d = u[c + 1] - u[c];
            s += stiff_[c] * d * d;
        }
        for (std::size_t i = 0; i < mass_.size(); ++i) s += mass_[i] * u[i] * u[i];
        return area_ * s;
    }

    /// out = grad Q_h(u) = 2 |dB_1| (K + W V) u.
    void gradient(std::span<const double> u, std::span<double> out) const {
        const std::size_t N = size();
        for (std::size_t i = 0; i < N; ++i) out[i] = mass_[i] * u[i];
        for (std::size_t c = 0; c + 1 < N; ++c) {
            const double f = stiff_[c] * (u[c + 1] - u[c]);
            out[c] -= f;
            out[c + 1] += f;
        }
        for (auto& x : out) x *= 2.0 * area_;
    }

    /// Discrete -Delta u + V u at the nodes: grad Q_h(u)_i/(2 |dB_1| w_i).
    std::vector<double> strong_form(std::span<const double> u) const {
        std::vector<double> g(size());
        gradient(u, g);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] /= 2.0 * area_ * grid_->weight(i);
        return g;
    }

    /// Tridiagonal entries of the Hessian 2|dB_1|(K + W V): diag[i], off[c] couples c and c+1.
    void hessian(std::vector<double>& diag, std::vector<double>& off) const {
        const std::size_t N = size();
        diag.assign(N, 0.0);
        off.assign(N - 1, 0.0);
        for (std::size_t i = 0; i < N; ++i) diag[i] = 2.0 * area_ * mass_[i];
        for (std::size_t c = 0; c + 1 < N; ++c) {
            const double k = 2.0 * area_ * stiff_[c];
            diag[c] += k;
            diag[c + 1] += k;
            off[c] = -k;
        }
    }

private:
    GridPtr grid_;
    double area_ = 0.0;
    std::vector<double> stiff_;
    std::vector<double> mass_;
};

/// Thomas algorithm for a symmetric tridiagonal system; `off[i]` couples i and i+1.
/// Overwrites rhs with the solution.
inline void solve_tridiagonal(std::span<const double> diag, std::span<const double> off, std::span<double> rhs) {
    const std::size_t N = diag.size();
    std::vector<double> c(N);
    double beta = diag[0];
    if (beta == 0.0) throw NumericalError("solve_tridiagonal: zero pivot");
    rhs[0] /= beta;
    for (std::size_t i = 1; i < N; ++i) {
        c[i] = off[i - 1] / beta;
        beta = diag[i] - off[i - 1] * c[i];
        if (beta == 0.0) throw NumericalError("solve_tridiagonal: zero pivot");
        rhs[i] = (rhs[i] - off[i - 1] * rhs[i - 1]) / beta;
    }
    for (std::size_t i = N - 1; i-- > 0;) rhs[i] -= c[i + 1] * rhs[i + 1];
}

}  // namespace radgreen
