#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

#include "radgreen/error.hpp"

namespace radgreen {

/// Surface measure of the unit sphere in R^n, 2 pi^{n/2} / Gamma(n/2).
inline double sphere_area(int n) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Volume of the unit ball in R^n.
inline double ball_volume(int n) { return sphere_area(n) / n; }

namespace detail {

/// Moments of the two hat functions of the cell [a, b] against r^m:
///   left  = int_a^b (b - r)/(b - a) r^m dr,  right = int_a^b (r - a)/(b - a) r^m dr.
/// Expanded around a so that every term is positive (no cancellation for thin cells).
struct HatMoments {
    double left = 0.0;
    double right = 0.0;
    double total() const { return left + right; }
};

inline HatMoments hat_moments(double a, double b, int m) {
    const double h = b - a;
    HatMoments out;
    double binom = 1.0;
    double hpow = h;  // h^{k+1}
    for (int k = 0; k <= m; ++k) {
        const double apow = std::pow(a, m - k);
        out.left += binom * apow * hpow / ((k + 1.0) * (k + 2.0));
        out.right += binom * apow * hpow / (k + 2.0);
        binom = binom * (m - k) / (k + 1.0);
        hpow *= h;
    }
    return out;
}

}  // namespace detail

/// Radial nodes on [eps, 1] with quadrature weights for int_0^1 f(r) r^{n-1} dr.
///
/// The weight of node i is the r^{n-1}-moment of its hat function, so the rule is
/// exact for functions that are piecewise linear between nodes. The nodes need not
/// be uniform (the limit-problem solver inserts the peak radius as a node), but
/// make_grid always produces a uniform grid.
class RadialGrid {
public:
    RadialGrid(int dimension, std::vector<double> nodes) : n_(dimension), r_(std::move(nodes)) {
        require(n_ >= 2, "dimension must be >= 2");
        require(r_.size() >= 2, "grid needs at least two nodes");
        require(r_.front() > 0.0, "grid nodes must be positive");
        for (std::size_t i = 1; i < r_.size(); ++i)
            require(r_[i] > r_[i - 1], "grid nodes must be strictly increasing");
        require(r_.back() == 1.0, "last grid node must be exactly 1");

        const std::size_t cells = r_.size() - 1;
        left_.resize(cells);
        right_.resize(cells);
        weights_.assign(r_.size(), 0.0);
        for (std::size_t c = 0; c < cells; ++c) {
            auto mom = detail::hat_moments(r_[c], r_[c + 1], n_ - 1);
            left_[c] = mom.left;
            right_[c] = mom.right;
            weights_[c] += mom.left;
            weights_[c + 1] += mom.right;
        }
    }

    int dimension() const { return n_; }
    std::size_t size() const { return r_.size(); }
    std::size_t cells() const { return r_.size() - 1; }
    double epsilon() const { return r_.front(); }

    std::span<const double> nodes() const { return r_; }
    std::span<const double> weights() const { return weights_; }
    double node(std::size_t i) const { return r_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    double cell_width(std::size_t c) const { return r_[c + 1] - r_[c]; }
    /// int over cell c of r^{n-1}.
    double cell_moment(std::size_t c) const { return left_[c] + right_[c]; }
    /// Hat moments of cell c (left node, right node).
    double cell_left_moment(std::size_t c) const { return left_[c]; }
    double cell_right_moment(std::size_t c) const { return right_[c]; }

    /// Index c of the cell [r_c, r_{c+1}] containing r (clamped to the grid).
    std::size_t locate(double r) const {
        if (r <= r_.front()) return 0;
        if (r >= r_.back()) return cells() - 1;
        auto it = std::upper_bound(r_.begin(), r_.end(), r);
        return static_cast<std::size_t>(it - r_.begin()) - 1;
    }

    bool contains(double r) const { return r >= r_.front() && r <= r_.back(); }

private:
    int n_;
    std::vector<double> r_;
    std::vector<double> left_, right_;
    std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Uniform grid on [epsilon, 1] with `points` nodes.
inline GridPtr make_grid(int n, int points, double epsilon) {
    require(n >= 2, "make_grid: dimension must be >= 2");
    require(points >= 64, "make_grid: at least 64 points are required");
    require(epsilon > 0.0, "make_grid: epsilon must be positive");
    require(epsilon <= 1e-4, "make_grid: epsilon must not exceed 1e-4");
    std::vector<double> r(static_cast<std::size_t>(points));
    const double h = (1.0 - epsilon) / (points - 1);
    for (int i = 0; i < points; ++i) r[static_cast<std::size_t>(i)] = epsilon + h * i;
    r.back() = 1.0;
    return std::make_shared<const RadialGrid>(n, std::move(r));
}

/// Refine every cell of `grid` into `factor` equal sub-cells and optionally insert
/// extra nodes (ignored when they coincide with an existing node to 1e-12).
inline GridPtr refine_grid(const RadialGrid& grid, int factor, std::span<const double> extra = {}) {
    require(factor >= 1, "refine_grid: factor must be >= 1");
    std::vector<double> r;
    r.reserve(grid.cells() * static_cast<std::size_t>(factor) + 1 + extra.size());
    for (std::size_t c = 0; c < grid.cells(); ++c) {
        const double a = grid.node(c), h = grid.cell_width(c) / factor;
        for (int k = 0; k < factor; ++k) r.push_back(a + h * k);
    }
    r.push_back(1.0);
    for (double x : extra) {
        require(x > grid.epsilon() && x <= 1.0, "refine_grid: inserted node outside grid");
        auto it = std::lower_bound(r.begin(), r.end(), x);
        const bool near_next = it != r.end() && std::abs(*it - x) < 1e-12;
        const bool near_prev = it != r.begin() && std::abs(*(it - 1) - x) < 1e-12;
        if (!near_next && !near_prev) r.insert(it, x);
    }
    return std::make_shared<const RadialGrid>(grid.dimension(), std::move(r));
}

}  // namespace radgreen
