#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "wgfb/hierarchy.hpp"
#include "wgfb/trajectory.hpp"

namespace wgfb {

struct RunOptions {
    /// Markov reference instead of the feedback hierarchy.
    bool markov = false;
    HierarchyOptions hierarchy;
    /// Steady-state window; 0 picks the default 5 tau (5 / Gamma without a
    /// mirror).
    double steady_window = 0.0;
    double steady_rel_tol = 1e-2;
};

double default_steady_window(const SystemParams& p);

/// Integrates one configuration over the whole grid. Throws wgfb::Error
/// for inconsistent parameters or a population leaving its bounds.
Trajectory run_scenario(const SystemParams& params, const Pulse& pulse, const TimeGrid& grid,
                        const RunOptions& options = {});

/// Mean over the final `window` if max - min there is below
/// rel_tol * max(mean, 1e-6); empty if the trajectory is shorter than the
/// window or the plateau test fails.
std::optional<double> detect_steady_state(const Trajectory& traj, double window, double rel_tol);

/// Mean over the final window regardless of convergence.
double tail_mean(const Trajectory& traj, double window);

enum class PulseFamily { rectangular, gaussian, exponential };

std::string to_string(PulseFamily f);

/// Pulse of a sweep family at a given width parameter: duration tD
/// (t0 = 0), sigma (mu = 4 sigma) or Gamma / Gamma_pulse (t0 = 0).
PulseSpec family_pulse(PulseFamily family, double width, double gamma);

struct SweepSpec {
    PulseFamily family = PulseFamily::rectangular;
    std::vector<double> widths;
    std::vector<double> taus;
    SystemParams base;      // n_photons, phi, gamma, ...; tau is overwritten
    double settle = 80.0;   // horizon before the steady-state window
    double max_dt = 0.02;
    double steps_per_tau = 40.0;
    double rel_tol = 1e-2;
};

struct SweepCell {
    double width = 0.0;
    double tau = 0.0;
    double dt = 0.0;
    double horizon = 0.0;
    double value = 0.0;       // final-window mean
    bool converged = false;   // plateau test passed
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepCell> cells;  // row-major: width index, then tau index
    const SweepCell& at(std::size_t iw, std::size_t it) const { return cells[iw * spec.taus.size() + it]; }
};

/// Steady-state map over pulse width x delay. Cells run in parallel and
/// are stored by index, so the result does not depend on the thread count.
SweepResult sweep_steady_state(const SweepSpec& spec);

struct Discrepancy {
    double sup = 0.0;       // max |a - b|
    double l2 = 0.0;        // sqrt(int |a - b|^2 dt)
    double peak = 0.0;      // max |a|
    double t_max = 0.0;     // end of the compared interval
    std::size_t points = 0;
};

/// Compares `other` against `reference` at the sample times of `other`
/// in [0, t_max), interpolating `reference` linearly. t_max < 0 means the
/// common horizon (inclusive).
Discrepancy compare_trajectories(const Trajectory& reference, const Trajectory& other, double t_max = -1.0);

/// Evenly spaced values from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace wgfb
