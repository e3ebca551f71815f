#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "radgreen/grid.hpp"

namespace radgreen {

/// Location where a profile is continuous but its derivative jumps (the peak of a
/// normalized Green function). Quadratures split the containing cell there.
struct Kink {
    double r = 0.0;
    double value = 0.0;
    double slope_left = 0.0;
    double slope_right = 0.0;
};

/// Samples of a radial function u(r_i), optionally with u'(r_i).
struct Profile {
    GridPtr grid;
    std::vector<double> values;
    std::vector<double> derivatives;  // empty when absent
    std::optional<Kink> kink;

    Profile() = default;
    Profile(GridPtr g, std::vector<double> v, std::vector<double> d = {})
        : grid(std::move(g)), values(std::move(v)), derivatives(std::move(d)) {
        require(grid != nullptr, "profile needs a grid");
        require(values.size() == grid->size(), "profile length does not match grid");
        require(derivatives.empty() || derivatives.size() == values.size(),
                "derivative samples do not match grid");
    }

    std::size_t size() const { return values.size(); }
    bool has_derivatives() const { return !derivatives.empty(); }
    double operator[](std::size_t i) const { return values[i]; }

    /// Piecewise cubic Hermite evaluation when derivatives are present, linear otherwise.
    double at(double r) const;
    /// Derivative of the interpolant at r.
    double derivative_at(double r) const;

    double max_value() const;
    double min_value() const;
};

/// Centered second-order differences, one-sided second-order at both ends.
inline std::vector<double> finite_difference(const RadialGrid& grid, std::span<const double> u) {
    require(u.size() == grid.size(), "finite_difference: length mismatch");
    const std::size_t N = u.size();
    std::vector<double> d(N);
    auto r = grid.nodes();
    for (std::size_t i = 1; i + 1 < N; ++i) {
        const double hl = r[i] - r[i - 1], hr = r[i + 1] - r[i];
        d[i] = (hl * hl * (u[i + 1] - u[i]) + hr * hr * (u[i] - u[i - 1])) / (hl * hr * (hl + hr));
    }
    {
        const double h1 = r[1] - r[0], h2 = r[2] - r[1];
        const double s = h1 + h2;
        d[0] = (-(2 * h1 + h2) * h2 * u[0] + s * s * u[1] - h1 * h1 * u[2]) / (h1 * h2 * s);
    }
    {
        const double h1 = r[N - 1] - r[N - 2], h2 = r[N - 2] - r[N - 3];
        const double s = h1 + h2;
        d[N - 1] = ((2 * h1 + h2) * h2 * u[N - 1] - s * s * u[N - 2] + h1 * h1 * u[N - 3]) / (h1 * h2 * s);
    }
    return d;
}

namespace detail {

struct HermiteSample {
    double value;
    double slope;
};

inline HermiteSample hermite(double a, double b, double ua, double ub, double da, double db, double r) {
    const double h = b - a;
    const double t = (r - a) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    const double value = h00 * ua + h10 * h * da + h01 * ub + h11 * h * db;
    const double g00 = 6 * t2 - 6 * t, g10 = 3 * t2 - 4 * t + 1;
    const double g01 = -6 * t2 + 6 * t, g11 = 3 * t2 - 2 * t;
    const double slope = (g00 * ua + g01 * ub) / h + g10 * da + g11 * db;
    return {value, slope};
}

}  // namespace detail

namespace detail {

// Hermite piece on the cell holding r; a cell that contains the kink is split there
// and each half uses the one-sided slope.
inline HermiteSample profile_sample(const Profile& u, double r) {
    const auto& grid = *u.grid;
    const std::size_t c = grid.locate(r);
    double a = grid.node(c), b = grid.node(c + 1);
    double ua = u.values[c], ub = u.values[c + 1];
    double da = u.derivatives[c], db = u.derivatives[c + 1];
    if (u.kink && u.kink->r > a && u.kink->r < b) {
        const Kink& k = *u.kink;
        if (r <= k.r) {
            b = k.r;
            ub = k.value;
            db = k.slope_left;
        } else {
            a = k.r;
            ua = k.value;
            da = k.slope_right;
        }
    }
    return hermite(a, b, ua, ub, da, db, r);
}

}  // namespace detail

inline double Profile::at(double r) const {
    require(grid->contains(r), "Profile::at: radius outside grid");
    if (kink && r == kink->r) return kink->value;
    if (has_derivatives()) return detail::profile_sample(*this, r).value;
    const std::size_t c = grid->locate(r);
    const double a = grid->node(c), b = grid->node(c + 1);
    const double t = (r - a) / (b - a);
    return (1 - t) * values[c] + t * values[c + 1];
}

inline double Profile::derivative_at(double r) const {
    require(grid->contains(r), "Profile::derivative_at: radius outside grid");
    if (has_derivatives()) return detail::profile_sample(*this, r).slope;
    const std::size_t c = grid->locate(r);
    const double a = grid->node(c), b = grid->node(c + 1);
    return (values[c + 1] - values[c]) / (b - a);
}

inline double Profile::max_value() const {
    double m = values.front();
    for (double v : values) m = std::max(m, v);
    return m;
}

inline double Profile::min_value() const {
    double m = values.front();
    for (double v : values) m = std::min(m, v);
    return m;
}

/// Attach finite-difference derivative samples when a profile has none.
inline Profile with_derivatives(Profile u) {
    if (!u.has_derivatives()) u.derivatives = finite_difference(*u.grid, u.values);
    return u;
}

}  // namespace radgreen
