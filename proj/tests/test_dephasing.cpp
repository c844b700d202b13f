#include "doctest.h"

#include <cmath>

#include "wgfb/experiments.hpp"

using namespace wgfb;

namespace {

Trajectory excited(double tau, double phi, double gpd, bool force, double dt = 0.01, double T = 6.0) {
    SystemParams p;
    p.tau = tau;
    p.phi = phi;
    p.gamma_pd = gpd;
    RunOptions o;
    o.hierarchy.force_dephasing_path = force;
    return run_scenario(p, Pulse(RectangularPulse{}), build_grid(dt, T, tau), o);
}

}  // namespace

TEST_CASE("zero dephasing path matches the standard vacuum path") {
    auto a = excited(1.2, 0.0, 0.0, false);
    auto b = excited(1.2, 0.0, 0.0, true);
    CHECK(a.integrator != b.integrator);
    double d = 0.0;
    for (std::size_t i = 0; i < a.population.size(); ++i) d = std::max(d, std::abs(a.population[i] - b.population[i]));
    CHECK(d < 1e-12);
}

TEST_CASE("dephasing does not act before the delay") {
    auto a = excited(1.2, 0.0, 0.0, true);
    auto b = excited(1.2, 0.0, 1.0, true);
    for (std::size_t i = 0; i < a.grid.delay_steps(); ++i) CHECK(std::abs(a.population[i] - b.population[i]) < 1e-10);
    CHECK(b.population.back() < a.population.back());
}

TEST_CASE("strong dephasing approaches Wigner-Weisskopf") {
    const double pi = kPi;
    auto d = [](const Trajectory& t) {
        double m = 0.0;
        for (std::size_t i = 0; i < t.times.size(); ++i) m = std::max(m, std::abs(t.population[i] - std::exp(-2.0 * t.times[i])));
        return m;
    };
    const double d0 = d(excited(1.2, pi, 0.0, true)), d10 = d(excited(1.2, pi, 10.0, true));
    MESSAGE("distance to WW: gamma 0 " << d0 << ", gamma 10 " << d10);
    CHECK(d10 < d0);
}

TEST_CASE("two-photon dephasing converges at second order") {
    SystemParams p;
    p.n_photons = 2;
    p.initial = InitialState::ground_with_pulse;
    p.tau = 1.0;
    p.gamma_pd = 0.5;
    Pulse f(RectangularPulse{0.0, 1.0});
    auto run = [&](double dt) { return run_scenario(p, f, build_grid(dt, 4.0, 1.0)); };
    auto a = run(0.1), b = run(0.05), c = run(0.025);
    const double e1 = compare_trajectories(c, a).sup, e2 = compare_trajectories(c, b).sup;
    MESSAGE("self-convergence " << e1 << " " << e2);
    // errors against the h/4 run: ratio 5 for second order, 3 for first
    CHECK(e1 / e2 > 4.0);
}

TEST_CASE("three photons with dephasing are rejected") {
    SystemParams p;
    p.n_photons = 3;
    p.initial = InitialState::ground_with_pulse;
    p.gamma_pd = 0.1;
    CHECK_THROWS_AS(run_scenario(p, Pulse(RectangularPulse{}), build_grid(0.1, 1.0, 2.0)), Error);
}
