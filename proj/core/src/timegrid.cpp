#include "wgfb/timegrid.hpp"

#include <cmath>

#include "wgfb/types.hpp"

namespace wgfb {

TimeGrid build_grid(double dt, double horizon, double tau) {
    if (!(dt > 0.0)) throw Error("grid.dt must be > 0");
    if (!(horizon > 0.0)) throw Error("grid.horizon must be > 0");
    if (!(tau >= 0.0)) throw Error("system.tau must be >= 0");

    TimeGrid g;
    g.requested_dt = dt;
    g.dt = dt;
    if (tau > 0.0) {
        if (0.5 * tau < dt) throw Error("delay unresolvable at this step size");
        g.k_half_tau = static_cast<std::size_t>(std::llround(0.5 * tau / dt));
        g.dt = 0.5 * tau / static_cast<double>(g.k_half_tau);
    }
    g.n_steps = static_cast<std::size_t>(std::llround(horizon / g.dt));
    if (g.n_steps < 1) g.n_steps = 1;
    return g;
}

std::vector<double> trapezoid_weights(std::size_t n, double h) {
    std::vector<double> w(n, h);
    if (n == 0) return w;
    if (n == 1) {
        w[0] = 0.0;
        return w;
    }
    w.front() = 0.5 * h;
    w.back() = 0.5 * h;
    return w;
}

std::vector<double> quad_weights(const TimeGrid& grid) { return trapezoid_weights(grid.n_aux(), grid.dt); }

}  // namespace wgfb
