#pragma once

#include <cstddef>

#include "wgfb/params.hpp"
#include "wgfb/pulse.hpp"
#include "wgfb/trajectory.hpp"
#include "wgfb/types.hpp"

namespace wgfb::oracle {

/// Wigner-Weisskopf population e^{-2 Gamma t}.
double ww_decay(double gamma, double t);

/// Amplitude c(t) of dc/dt = -G c + G e^{i phi} c(t - tau) Theta(t - tau),
/// c(0) = 1, summed in closed form interval by interval:
///   c(t) = sum_{k <= t/tau} (G e^{i phi})^k (t - k tau)^k / k! e^{-G (t - k tau)}.
/// Throws beyond 50 delay intervals.
cplx vacuum_feedback_exact(double gamma, double tau, double phi, double t);

/// Long-time population (1 + G tau)^{-2} for phi = 2 pi m, from the residue
/// of 1 / (s + G - G e^{-s tau}) at s = 0.
double bound_state_population(double gamma, double tau);

struct TimeBinOptions {
    double horizon = 10.0;
    /// Bins spanning [-tau/2, horizon + tau/2); the width is adjusted so
    /// that tau is an even number of bins.
    std::size_t n_bins = 200;
    double norm_tolerance = 1e-8;
};

/// Full state-vector collision model over waveguide time bins. At each
/// step the emitter meets the bin leaving towards the mirror and the bin
/// returning from it through the exact two-mode exchange unitary
/// exp(sqrt(G dt) (L^dag s- - s+ L)), L = e^{i phi/2} b_early - e^{-i phi/2} b_late.
/// Supports |e,0> and |g,n> for n <= 3. Without a mirror only |e,0> is
/// modelled (the delay is pushed past the horizon).
Trajectory brute_force_timebin(const SystemParams& params, const Pulse& pulse, const TimeBinOptions& options);

}  // namespace wgfb::oracle
