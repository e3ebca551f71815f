#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "radgreen/error.hpp"

namespace radgreen {

/// Radial ODE state in log-radius form: (u, r u').
using RadialState = std::array<double, 2>;

struct OdeTolerances {
    double rtol = 1e-10;
    double atol = 1e-14;
    long max_steps = 2'000'000;
    // Largest step in ln r. Without a cap the stepper can stride over a narrow bump
    // in V when it starts in a region where V is negligible.
    double max_step = 0.01;
};

/// Samples of an integrated trajectory. Entries past the stopping radius are absent
/// (values.size() may be shorter than the requested sample list).
struct RadialTrajectory {
    std::vector<double> u;
    std::vector<double> du;  // u'(r)
    bool stopped = false;    // event fired before the last sample
    double stop_radius = 0.0;
    RadialState final_state{};  // (u, r u') at the last sample or at the event
    long steps = 0;
};

/// Integrates u'' + (n-1)/r u' = g(r, u, u') written in t = ln r:
///   du/dt = w,  dw/dt = -(n-2) w + r^2 g(r, u, w/r),  w = r u'.
///
/// `radii` must be monotone (increasing or decreasing) and start at `r_start`.
/// `event(u, du)` is checked after every step; when it becomes true the first radius
/// where it holds is located on the dense output by bisection and integration stops.
/// With `nonfinite_is_event` an overflowing state stops the integration like the event
/// does (final_state is then the last finite state); otherwise it is an error.
template <class Source, class Event>
RadialTrajectory integrate_radial(int n, Source&& source, double r_start, RadialState y0,
                                  std::span<const double> radii, Event&& event, const OdeTolerances& tol = {},
                                  bool nonfinite_is_event = false) {
    namespace odeint = boost::numeric::odeint;
    require(!radii.empty(), "integrate_radial: no sample radii");
    const double t_start = std::log(r_start);
    const double t_end = std::log(radii.back());
    const double direction = t_end >= t_start ? 1.0 : -1.0;

    auto system = [&](const RadialState& y, RadialState& dy, double t) {
        const double r = std::exp(t);
        dy[0] = y[1];
        dy[1] = -(n - 2) * y[1] + r * r * source(r, y[0], y[1] / r);
    };

    RadialTrajectory out;
    out.u.reserve(radii.size());
    out.du.reserve(radii.size());

    // odeint resets rejected steps to max_dt verbatim, so the cap carries the direction
    auto stepper = odeint::make_dense_output(tol.atol, tol.rtol, direction * tol.max_step,
                                             odeint::runge_kutta_dopri5<RadialState>());
    const double span_t = std::max(std::abs(t_end - t_start), 1e-3);
    stepper.initialize(y0, t_start, direction * span_t * 1e-4);

    auto record = [&](double r, const RadialState& y) {
        out.u.push_back(y[0]);
        out.du.push_back(y[1] / r);
    };

    std::size_t k = 0;
    while (k < radii.size() && std::abs(radii[k] - r_start) <= 1e-15 * std::max(1.0, r_start)) {
        record(radii[k], y0);
        ++k;
    }
    out.final_state = y0;

    auto passed = [direction](double t_sample, double t_now) { return direction * (t_now - t_sample) >= 0.0; };

    RadialState y{};
    while (k < radii.size()) {
        if (++out.steps > tol.max_steps) throw NumericalError("integrate_radial: step limit exceeded");
        const auto [t0, t1] = stepper.do_step(system);
        const RadialState& y1 = stepper.current_state();
        const bool finite = std::isfinite(y1[0]) && std::isfinite(y1[1]);
        if (!finite && !nonfinite_is_event) throw NumericalError("integrate_radial: non-finite state");
        auto fired = [&](const RadialState& s, double t) {
            return !std::isfinite(s[0]) || !std::isfinite(s[1]) || event(s[0], s[1] / std::exp(t));
        };
        if (fired(y1, t1)) {
            // bisection for the first event time inside the step
            double lo = t0, hi = t1;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                stepper.calc_state(mid, y);
                if (fired(y, mid))
                    hi = mid;
                else
                    lo = mid;
            }
            while (k < radii.size() && passed(std::log(radii[k]), lo)) {
                stepper.calc_state(std::log(radii[k]), y);
                record(radii[k], y);
                ++k;
            }
            stepper.calc_state(hi, y);
            if (!std::isfinite(y[0]) || !std::isfinite(y[1])) stepper.calc_state(lo, y);
            out.stopped = true;
            out.stop_radius = std::exp(hi);
            out.final_state = y;
            return out;
        }
        while (k < radii.size() && passed(std::log(radii[k]), t1)) {
            stepper.calc_state(std::log(radii[k]), y);
            record(radii[k], y);
            ++k;
        }
    }
    stepper.calc_state(t_end, y);
    out.final_state = y;
    return out;
}

template <class Source>
RadialTrajectory integrate_radial(int n, Source&& source, double r_start, RadialState y0, std::span<const double> radii,
                                  const OdeTolerances& tol = {}) {
    return integrate_radial(n, std::forward<Source>(source), r_start, y0, radii, [](double, double) { return false; }, tol);
}

}  // namespace radgreen
