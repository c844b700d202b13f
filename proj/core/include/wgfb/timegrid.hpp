#pragma once

#include <cstddef>
#include <vector>

namespace wgfb {

/// Uniform time grid aligned with the round-trip delay.
///
/// Physical time runs over steps 0..n_steps (t = step * dt). The
/// auxiliary axis labels input photons and spans [-tau/2, T + tau/2]
/// with the same spacing; node j sits at aux_min + j * dt. Because
/// tau = 2 * k_half_tau * dt exactly, a delayed value is always a
/// stored grid value and the impulses of r_{t,tau} hit grid nodes.
struct TimeGrid {
    double dt = 0.0;
    std::size_t n_steps = 0;
    std::size_t k_half_tau = 0;
    double requested_dt = 0.0;

    double horizon() const { return static_cast<double>(n_steps) * dt; }
    double tau() const { return 2.0 * static_cast<double>(k_half_tau) * dt; }
    std::size_t delay_steps() const { return 2 * k_half_tau; }
    double aux_min() const { return -static_cast<double>(k_half_tau) * dt; }
    double aux_max() const { return static_cast<double>(n_steps + k_half_tau) * dt; }
    std::size_t n_aux() const { return n_steps + 2 * k_half_tau + 1; }

    double time(std::size_t step) const { return static_cast<double>(step) * dt; }
    double aux_time(std::size_t node) const { return aux_min() + static_cast<double>(node) * dt; }

    /// Aux node carrying label t - tau/2 at time step `step` (always step).
    std::size_t aux_early(std::size_t step) const { return step; }
    /// Aux node carrying label t + tau/2 at time step `step`.
    std::size_t aux_late(std::size_t step) const { return step + 2 * k_half_tau; }

    bool dt_adjusted() const { return dt != requested_dt; }
};

/// Builds the grid for a requested step, horizon and delay. dt is shrunk
/// or stretched minimally so that tau/2 is an integer number of steps.
/// Throws wgfb::Error when tau > 0 but tau/2 < dt.
TimeGrid build_grid(double dt, double horizon, double tau);

/// Trapezoidal weights over the auxiliary axis.
std::vector<double> quad_weights(const TimeGrid& grid);

/// Trapezoidal weights for `n` nodes of spacing h.
std::vector<double> trapezoid_weights(std::size_t n, double h);

}  // namespace wgfb
