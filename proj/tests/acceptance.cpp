// Acceptance run: one PASS/FAIL line per criterion.
// Usage: wgfb_acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "wgfb/experiments.hpp"
#include "wgfb/numeric.hpp"
#include "wgfb/oracle.hpp"

using namespace wgfb;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [miss]");
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

SystemParams excited(double tau, double phi = 0.0, double gpd = 0.0) {
    SystemParams p;
    p.tau = tau;
    p.phi = phi;
    p.gamma_pd = gpd;
    return p;
}

SystemParams photons(int n, double tau, double phi = 0.0) {
    SystemParams p;
    p.n_photons = n;
    p.initial = InitialState::ground_with_pulse;
    p.tau = tau;
    p.phi = phi;
    return p;
}

double sup_against(const Trajectory& t, const std::function<double(double)>& f, double t_max) {
    double d = 0.0;
    for (std::size_t i = 0; i < t.times.size() && t.times[i] <= t_max + 1e-12; ++i)
        d = std::max(d, std::abs(t.population[i] - f(t.times[i])));
    return d;
}

// Relative sup-norm of hierarchy vs Markov recursion on [0, tau).
double pre_delay_mismatch(int n, double dt) {
    const auto p = photons(n, 2.0);
    const Pulse f(RectangularPulse{0.0, 2.0});
    const auto g = build_grid(dt, 2.0, p.tau);
    RunOptions m;
    m.markov = true;
    const auto a = run_scenario(p, f, g), b = run_scenario(p, f, g, m);
    const auto d = compare_trajectories(b, a, p.tau);
    return d.sup / d.peak;
}

// 1. Wigner-Weisskopf decay without a mirror.
void wigner_weisskopf(Outcome& o) {
    auto p = excited(2.0);
    p.feedback = false;
    const auto t0 = Clock::now();
    const auto tr = run_scenario(p, Pulse(RectangularPulse{}), build_grid(1e-3, 10.0, p.tau));
    const double secs = seconds_since(t0);
    const double d = sup_against(tr, [](double t) { return std::exp(-2.0 * t); }, 10.0);
    o.require(d < 1e-4, "sup |P - e^{-2t}| = " + fmt(d));
    o.require(secs < 1.0, "runtime " + fmt(secs) + " s");
}

// 2. Bound state behind the mirror.
void bound_state(Outcome& o) {
    const auto p = excited(2.0);
    const auto t0 = Clock::now();
    const auto tr = run_scenario(p, Pulse(RectangularPulse{}), build_grid(0.01, 200.0, p.tau));
    const double secs = seconds_since(t0);
    const double late = std::abs(tr.population.back() - 1.0 / 9.0);
    const double d = sup_against(
        tr, [](double t) { return std::norm(oracle::vacuum_feedback_exact(1.0, 2.0, 0.0, t)); }, 20.0);
    o.require(late < 1e-3, "|P(200) - 1/9| = " + fmt(late));
    o.require(d < 1e-4, "sup on [0,20] vs closed form " + fmt(d));
    o.require(secs < 5.0, "runtime " + fmt(secs) + " s");
}

// 3. Before the first round trip the hierarchy equals the Markov recursion.
void decomposition(Outcome& o) {
    for (int n = 1; n <= 3; ++n) {
        const double r = pre_delay_mismatch(n, 0.01);
        o.require(r < 1e-3, "n=" + std::to_string(n) + " relative sup " + fmt(r));
    }
}

// 4. Hierarchy vs time-bin oracle with feedback.
void oracle_benchmark(Outcome& o) {
    const Pulse f(RectangularPulse{0.0, 2.0});
    const double horizon = 10.0;
    for (int n = 1; n <= 2; ++n) {
        const auto p = photons(n, 2.0);
        std::vector<double> rel;
        double secs = 0.0;
        for (auto [bins, dt] : {std::pair<std::size_t, double>{80, 0.04}, {160, 0.02}, {320, 0.01}}) {
            const auto t0 = Clock::now();
            const auto h = run_scenario(p, f, build_grid(dt, horizon, p.tau));
            oracle::TimeBinOptions ob;
            ob.horizon = horizon;
            ob.n_bins = bins;
            const auto tb = oracle::brute_force_timebin(p, f, ob);
            secs += seconds_since(t0);
            const auto d = compare_trajectories(h, tb);
            rel.push_back(d.sup / d.peak);
        }
        const std::string tag = "n=" + std::to_string(n) + " ";
        o.require(rel.back() < 0.02, tag + "sup/peak at 320 bins " + fmt(rel.back()) + " (80: " + fmt(rel[0]) +
                                         ", 160: " + fmt(rel[1]) + ")");
        o.require(rel[2] < rel[1] && rel[1] < rel[0], tag + "shrinks under refinement");
        if (n == 2) o.require(secs < 300.0, tag + "runtime " + fmt(secs) + " s");
    }
}

// 5. A single photon arriving from outside never stays trapped. Pulses start
// at t0 = tau/2, the first time the emitter sees label t0 on the incoming leg;
// earlier labels are already between emitter and mirror at t = 0.
void single_photon_empties(Outcome& o) {
    const double tau = 2.0;
    const std::vector<std::pair<std::string, PulseSpec>> shapes{{"rectangular", RectangularPulse{tau / 2, 2.0}},
                                                                {"gaussian", GaussianPulse{4.0, 1.0}},
                                                                {"exponential", ExponentialPulse{tau / 2, 1.0}}};
    for (const auto& [name, spec] : shapes) {
        const auto p = photons(1, tau);
        const auto tr = run_scenario(p, Pulse(spec), build_grid(0.01, 30.0, p.tau));
        o.require(tr.population.back() < 1e-3, name + " P(30) = " + fmt(tr.population.back()));
    }
    const auto early = run_scenario(photons(1, tau), Pulse(RectangularPulse{0.0, 2.0}), build_grid(0.01, 30.0, tau));
    o.detail << "; for reference, t0 = 0 keeps P(30) = " << fmt(early.population.back()) << " (closed form "
             << fmt(0.5 / ((1.0 + tau) * (1.0 + tau))) << ")";
}

// 6. Three photons excite the trapped state more than two.
void three_photon_ordering(Outcome& o) {
    const Pulse f(RectangularPulse{0.0, 2.0});
    const auto g = build_grid(0.05, 12.0, 2.0);
    const double window = 2.0;  // last round trip of the short horizon
    const auto t0 = Clock::now();
    const auto p3 = run_scenario(photons(3, 2.0), f, g);
    const double secs = seconds_since(t0);
    const auto p2 = run_scenario(photons(2, 2.0), f, g);
    // T = 12 leaves a few percent of ripple, so the whole final round trip of
    // n=3 must lie above the whole final round trip of n=2
    auto tail = [&](const Trajectory& t) {
        const auto b = t.population.end() - static_cast<std::ptrdiff_t>(g.delay_steps() + 1);
        return std::minmax_element(b, t.population.end());
    };
    const auto [lo3, hi3] = tail(p3);
    const auto [lo2, hi2] = tail(p2);
    const double m3 = tail_mean(p3, window), m2 = tail_mean(p2, window);
    o.require(*lo3 > *hi2, "final round trip n=3 in [" + fmt(*lo3) + ", " + fmt(*hi3) + "] above n=2 in [" +
                               fmt(*lo2) + ", " + fmt(*hi2) + "], means " + fmt(m3) + " vs " + fmt(m2));
    const double r = pre_delay_mismatch(3, 0.05);
    o.require(r < 1e-2, "n=3 vs Markov on [0,tau) " + fmt(r));
    o.detail << "; n=3 runtime " << fmt(secs) << " s";
}

// 7. Steady-state map over pulse width and delay.
void sweep_structure(Outcome& o) {
    SweepSpec s;
    s.family = PulseFamily::rectangular;
    s.widths = linspace(0.5, 6.0, 16);
    s.taus = linspace(0.1, 6.0, 16);
    s.base = photons(2, 1.0);
    const auto t0 = Clock::now();
    const auto r = sweep_steady_state(s);
    const double secs = seconds_since(t0);
    const double cell = s.taus[1] - s.taus[0];
    std::size_t within = 0;
    std::ostringstream misses;
    double small_tau_max = 0.0, lo = 1.0, hi = 0.0;
    for (std::size_t iw = 0; iw < s.widths.size(); ++iw) {
        std::size_t best = 0;
        for (std::size_t it = 0; it < s.taus.size(); ++it) {
            const double v = r.at(iw, it).value;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            if (v > r.at(iw, best).value) best = it;
        }
        const double off = (s.taus[best] - s.widths[iw]) / cell;
        if (std::abs(off) <= 1.0 + 1e-9)
            ++within;
        else
            misses << (misses.tellp() > 0 ? " " : "") << "tD=" << fmt(s.widths[iw]) << "->" << fmt(s.taus[best]);
        small_tau_max = std::max(small_tau_max, r.at(iw, 0).value);
    }
    o.require(within == s.widths.size(), "(a) argmax within one cell of tD in " + std::to_string(within) +
                                             "/16 rows" + (within < 16 ? " (" + misses.str() + ")" : ""));
    o.require(small_tau_max < 1e-2, "(b) tau=" + fmt(s.taus[0]) + " column max " + fmt(small_tau_max));
    o.require(lo >= 0.0 && hi <= 1.0, "entries in [0,1]");
    o.require(secs < 1800.0, "runtime " + fmt(secs) + " s on " + std::to_string(thread_count()) + " threads");
}

// 8. Pure dephasing with |e,0>.
void dephasing_suite(Outcome& o) {
    RunOptions forced;
    forced.hierarchy.force_dephasing_path = true;
    const auto g = build_grid(0.01, 6.0, 1.2);
    std::vector<Trajectory> runs;
    for (double gpd : {0.0, 0.1, 1.0}) runs.push_back(run_scenario(excited(1.2, 0.0, gpd), Pulse(RectangularPulse{}), g, forced));
    double before = 0.0;
    for (std::size_t i = 0; i < g.delay_steps(); ++i)
        for (const auto& r : runs) before = std::max(before, std::abs(r.population[i] - runs[0].population[i]));
    const double a0 = runs[0].population.back(), a1 = runs[1].population.back(), a2 = runs[2].population.back();
    o.require(before < 1e-10, "(a) spread on [0,tau) " + fmt(before));
    o.require(a0 > a1 && a1 > a2, "(a) P(6) = " + fmt(a0) + " > " + fmt(a1) + " > " + fmt(a2));

    const auto std_path = run_scenario(excited(1.2), Pulse(RectangularPulse{}), g);
    double d = 0.0;
    for (std::size_t i = 0; i < g.n_steps + 1; ++i) d = std::max(d, std::abs(std_path.population[i] - runs[0].population[i]));
    o.require(d < 1e-12, "(b) gamma=0 vs standard path " + fmt(d));

    const auto g10 = build_grid(0.01, 10.0, 1.2);
    auto ww = [](double t) { return std::exp(-2.0 * t); };
    const double d0 = sup_against(run_scenario(excited(1.2, kPi, 0.0), Pulse(RectangularPulse{}), g10, forced), ww, 10.0);
    const double d10 = sup_against(run_scenario(excited(1.2, kPi, 10.0), Pulse(RectangularPulse{}), g10), ww, 10.0);
    o.require(d10 < d0, "(c) distance to WW: gamma=10 " + fmt(d10) + " < gamma=0 " + fmt(d0));
}

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Best of `reps` wall-clock timings of one run.
double time_run(const SystemParams& p, const Pulse& f, const TimeGrid& g, const RunOptions& o, int reps) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = Clock::now();
        run_scenario(p, f, g, o);
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

// 9. Step-size convergence and runtime scaling with the step count.
void convergence_scaling(Outcome& o) {
    const Pulse f(RectangularPulse{0.0, 2.0});
    const auto p2 = photons(2, 2.0);
    const auto a = run_scenario(p2, f, build_grid(0.02, 20.0, 2.0));
    const auto b = run_scenario(p2, f, build_grid(0.01, 20.0, 2.0));
    const auto d = compare_trajectories(b, a);
    o.require(d.sup / d.peak < 1e-2, "n=2 dt 0.02 -> 0.01 changes P by " + fmt(100.0 * d.sup / d.peak) + "% of peak");

    const unsigned saved = thread_count();
    set_thread_count(1);
    std::vector<double> n1, t1, n2, t2;
    for (double dt : {0.004, 0.002, 0.001, 0.0005}) {
        const auto g = build_grid(dt, 20.0, 2.0);
        n1.push_back(static_cast<double>(g.n_steps));
        t1.push_back(time_run(photons(1, 2.0), f, g, {}, 3));
    }
    RunOptions direct;
    direct.hierarchy.contraction = Contraction::direct;
    for (double dt : {0.04, 0.028, 0.02, 0.014}) {
        const auto g = build_grid(dt, 20.0, 2.0);
        n2.push_back(static_cast<double>(g.n_steps));
        t2.push_back(time_run(p2, f, g, direct, 1));
    }
    set_thread_count(saved);
    const double s1 = loglog_slope(n1, t1), s2 = loglog_slope(n2, t2);
    o.require(std::abs(s1 - 1.0) <= 0.3, "n=1 runtime slope " + fmt(s1));
    o.require(std::abs(s2 - 3.0) <= 0.3, "n=2 runtime slope " + fmt(s2) + " (direct contraction)");
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"Wigner-Weisskopf decay", wigner_weisskopf},
        {"bound-state residue", bound_state},
        {"decomposition identity before tau", decomposition},
        {"feedback benchmark vs time-bin oracle", oracle_benchmark},
        {"single-photon emptying", single_photon_empties},
        {"three-photon ordering", three_photon_ordering},
        {"sweep structure", sweep_structure},
        {"dephasing suite", dephasing_suite},
        {"convergence and scaling", convergence_scaling},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    set_thread_count(std::max(1u, std::thread::hardware_concurrency()));

    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (!only.empty() && !only.count(id)) continue;
        Outcome o;
        const auto t0 = Clock::now();
        try {
            criteria[k].second(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << (o.detail.tellp() > 0 ? "; " : "") << "exception: " << e.what();
        }
        failed += !o.pass;
        std::printf("criterion %d %s: %s (%s) [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                    o.detail.str().c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
