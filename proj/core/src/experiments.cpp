#include "wgfb/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wgfb/numeric.hpp"

namespace wgfb {

double default_steady_window(const SystemParams& p) {
    if (p.feedback && p.tau > 0.0) return 5.0 * p.tau;
    return 5.0 / p.gamma;
}

Trajectory run_scenario(const SystemParams& params, const Pulse& pulse, const TimeGrid& grid,
                        const RunOptions& options) {
    params.validate();
    auto prop = options.markov ? make_markov(params, pulse, grid)
                               : make_propagator(params, pulse, grid, options.hierarchy);
    Trajectory tr;
    tr.params = params;
    tr.pulse = pulse.spec();
    tr.grid = grid;
    tr.source = options.markov ? Source::markov : Source::hierarchy;
    tr.integrator = prop->name();
    tr.store = prop->store().report();
    tr.times.reserve(grid.n_steps + 1);
    tr.population.reserve(grid.n_steps + 1);
    auto record = [&] {
        const double p = prop->population();
        if (!population_in_bounds(p, grid.dt)) {
            std::ostringstream os;
            os << "population " << p << " left [-10 dt^2, 1 + 10 dt^2] at t = " << grid.time(prop->step());
            throw Error(os.str());
        }
        tr.times.push_back(grid.time(prop->step()));
        tr.population.push_back(p);
    };
    record();
    while (prop->step() < grid.n_steps) {
        prop->advance();
        record();
    }
    const double window = options.steady_window > 0.0 ? options.steady_window : default_steady_window(params);
    tr.steady_state = detect_steady_state(tr, window, options.steady_rel_tol);
    return tr;
}

namespace {

// First index of the final window, or npos when the trajectory is too short.
std::size_t window_start(const Trajectory& traj, double window) {
    if (traj.times.size() < 2 || !(window > 0.0)) return std::string::npos;
    const double t_end = traj.times.back();
    const double t0 = t_end - window;
    if (t0 < traj.times.front() - 1e-12 * std::max(1.0, t_end)) return std::string::npos;
    const auto it = std::lower_bound(traj.times.begin(), traj.times.end(), t0 - 1e-12 * std::max(1.0, t_end));
    return static_cast<std::size_t>(it - traj.times.begin());
}

}  // namespace

double tail_mean(const Trajectory& traj, double window) {
    std::size_t b = window_start(traj, window);
    if (b == std::string::npos) b = 0;
    std::span<const double> tail(traj.population.data() + b, traj.population.size() - b);
    return pairwise_sum(tail) / static_cast<double>(tail.size());
}

std::optional<double> detect_steady_state(const Trajectory& traj, double window, double rel_tol) {
    const std::size_t b = window_start(traj, window);
    if (b == std::string::npos) return std::nullopt;
    std::span<const double> tail(traj.population.data() + b, traj.population.size() - b);
    const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
    const double mean = pairwise_sum(tail) / static_cast<double>(tail.size());
    if (*hi - *lo < rel_tol * std::max(mean, 1e-6)) return mean;
    return std::nullopt;
}

std::string to_string(PulseFamily f) {
    switch (f) {
    case PulseFamily::gaussian: return "gaussian";
    case PulseFamily::exponential: return "exponential";
    default: return "rectangular";
    }
}

PulseSpec family_pulse(PulseFamily family, double width, double gamma) {
    switch (family) {
    case PulseFamily::gaussian: return GaussianPulse{4.0 * width, width};
    case PulseFamily::exponential: return ExponentialPulse{0.0, gamma / width};
    default: return RectangularPulse{0.0, width};
    }
}

Discrepancy compare_trajectories(const Trajectory& reference, const Trajectory& other, double t_max) {
    if (reference.times.size() < 2 || other.times.empty()) throw Error("compare: empty trajectory");
    const bool inclusive = t_max < 0.0;
    const double end = std::min(reference.times.back(), other.times.back());
    if (inclusive) t_max = end;
    t_max = std::min(t_max, end + 1e-12);
    const double eps = 1e-9 * std::max(1.0, t_max);
    Discrepancy d;
    d.t_max = t_max;
    const auto& rt = reference.times;
    const auto& rp = reference.population;
    std::vector<double> ts, diff2;
    for (std::size_t i = 0; i < other.times.size(); ++i) {
        const double t = other.times[i];
        if (inclusive ? t > t_max + eps : t >= t_max - eps) break;
        auto it = std::upper_bound(rt.begin(), rt.end(), t);
        std::size_t k = it == rt.begin() ? 0 : static_cast<std::size_t>(it - rt.begin()) - 1;
        k = std::min(k, rt.size() - 2);
        const double a = (t - rt[k]) / (rt[k + 1] - rt[k]);
        const double ref = (1.0 - a) * rp[k] + a * rp[k + 1];
        const double e = std::abs(ref - other.population[i]);
        d.sup = std::max(d.sup, e);
        d.peak = std::max(d.peak, std::abs(ref));
        ts.push_back(t);
        diff2.push_back(e * e);
    }
    d.points = ts.size();
    std::vector<double> parts;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) parts.push_back(0.5 * (ts[i + 1] - ts[i]) * (diff2[i] + diff2[i + 1]));
    d.l2 = std::sqrt(pairwise_sum(std::span<const double>(parts)));
    return d;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

SweepResult sweep_steady_state(const SweepSpec& spec) {
    if (spec.widths.empty() || spec.taus.empty()) throw Error("sweep: empty axis");
    for (double t : spec.taus)
        if (!(t > 0.0)) throw Error("sweep: every tau must be positive");
    SweepResult res;
    res.spec = spec;
    const std::size_t nt = spec.taus.size();
    res.cells.resize(spec.widths.size() * nt);
    std::vector<std::string> errors(res.cells.size());
    parallel_for(res.cells.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            SweepCell& c = res.cells[i];
            c.width = spec.widths[i / nt];
            c.tau = spec.taus[i % nt];
            SystemParams p = spec.base;
            p.tau = c.tau;
            p.feedback = true;
            const double window = default_steady_window(p);
            c.horizon = spec.settle + window;
            try {
                const TimeGrid g = build_grid(std::min(spec.max_dt, c.tau / spec.steps_per_tau), c.horizon, c.tau);
                c.dt = g.dt;
                RunOptions o;
                o.steady_window = window;
                o.steady_rel_tol = spec.rel_tol;
                const Trajectory tr = run_scenario(p, Pulse(family_pulse(spec.family, c.width, p.gamma)), g, o);
                c.value = tail_mean(tr, window);
                c.converged = tr.steady_state.has_value();
            } catch (const Error& ex) {
                errors[i] = ex.what();
            }
        }
    });
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty())
            throw Error("sweep cell (width " + std::to_string(res.cells[i].width) + ", tau " +
                        std::to_string(res.cells[i].tau) + "): " + errors[i]);
    return res;
}

}  // namespace wgfb
