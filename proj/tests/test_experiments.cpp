#include "doctest.h"

#include <cmath>

#include "wgfb/experiments.hpp"
#include "wgfb/numeric.hpp"
#include "wgfb/oracle.hpp"

using namespace wgfb;

namespace {

Trajectory synthetic(double dt, std::size_t n, double (*f)(double)) {
    Trajectory t;
    t.grid.dt = t.grid.requested_dt = dt;
    t.grid.n_steps = n;
    for (std::size_t i = 0; i <= n; ++i) {
        t.times.push_back(dt * static_cast<double>(i));
        t.population.push_back(f(t.times.back()));
    }
    return t;
}

SystemParams two_photons(double tau) {
    SystemParams p;
    p.n_photons = 2;
    p.initial = InitialState::ground_with_pulse;
    p.tau = tau;
    return p;
}

}  // namespace

TEST_CASE("steady-state detection") {
    auto flat = synthetic(0.1, 200, [](double t) { return 0.25 + 1e-4 * std::sin(t); });
    auto v = detect_steady_state(flat, 5.0, 1e-2);
    REQUIRE(v);
    CHECK(*v == doctest::Approx(0.25).epsilon(1e-3));

    auto decaying = synthetic(0.1, 200, [](double t) { return std::exp(-0.1 * t); });
    CHECK_FALSE(detect_steady_state(decaying, 5.0, 1e-2));
    CHECK(tail_mean(decaying, 5.0) > 0.0);

    auto empty = synthetic(0.1, 200, [](double) { return 0.0; });
    REQUIRE(detect_steady_state(empty, 5.0, 1e-2));
    CHECK(*detect_steady_state(empty, 5.0, 1e-2) == 0.0);

    CHECK_FALSE(detect_steady_state(flat, 50.0, 1e-2));
}

TEST_CASE("trajectory comparison interpolates the reference") {
    auto fine = synthetic(0.01, 1000, [](double t) { return t; });
    auto coarse = synthetic(0.1, 100, [](double t) { return t + 0.5; });
    auto d = compare_trajectories(fine, coarse);
    CHECK(d.sup == doctest::Approx(0.5));
    CHECK(d.peak == doctest::Approx(10.0));
    CHECK(d.points == 101);
    CHECK(d.l2 == doctest::Approx(0.5 * std::sqrt(10.0)).epsilon(1e-6));
    auto head = compare_trajectories(fine, coarse, 2.0);
    CHECK(head.points == 20);
}

TEST_CASE("linspace") {
    CHECK(linspace(0, 1, 3) == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(linspace(2, 2, 1) == std::vector<double>{2.0});
}

TEST_CASE("bound-state plateau decreases with the delay") {
    double last = 1.0;
    for (double tau : {0.5, 1.0, 2.0, 3.0}) {
        SystemParams p;
        p.tau = tau;
        auto tr = run_scenario(p, Pulse(RectangularPulse{}), build_grid(0.01, 40.0 + 10.0 * tau, tau));
        REQUIRE(tr.steady_state);
        CHECK(*tr.steady_state == doctest::Approx(oracle::bound_state_population(1.0, tau)).epsilon(1e-3));
        CHECK(*tr.steady_state < last);
        last = *tr.steady_state;
    }
}

TEST_CASE("single-photon residue from photon labels inside the delay line") {
    // linear n=1 equation at phi = 0: c(inf) = -sqrt(G) int_{-tau/2}^{tau/2} f / (1 + G tau)
    const double tau = 2.0;
    struct Case {
        PulseSpec spec;
        double inside;  // int_{-tau/2}^{tau/2} f
    };
    const Case cases[] = {{RectangularPulse{0.0, 2.0}, 1.0 / std::sqrt(2.0)},
                          {ExponentialPulse{0.0, 1.0}, std::sqrt(2.0) * (1.0 - std::exp(-1.0))},
                          {RectangularPulse{1.0, 2.0}, 0.0}};
    for (const auto& c : cases) {
        auto p = two_photons(tau);
        p.n_photons = 1;
        auto one = run_scenario(p, Pulse(c.spec), build_grid(0.01, 40.0, tau));
        const double want = c.inside * c.inside / ((1.0 + tau) * (1.0 + tau));
        CHECK(one.population.back() == doctest::Approx(want).epsilon(1e-3).scale(1e-6));
    }
}

TEST_CASE("results do not depend on the thread count") {
    Pulse f(RectangularPulse{0.0, 1.5});
    auto g = build_grid(0.05, 6.0, 1.0);
    RunOptions o;
    o.hierarchy.contraction = Contraction::direct;
    set_thread_count(1);
    auto a = run_scenario(two_photons(1.0), f, g, o);
    SweepSpec s;
    s.widths = {1.0, 2.0};
    s.taus = {0.5, 1.0};
    s.base = two_photons(1.0);
    s.settle = 5.0;
    s.max_dt = 0.05;
    auto sa = sweep_steady_state(s);
    set_thread_count(3);
    auto b = run_scenario(two_photons(1.0), f, g, o);
    auto sb = sweep_steady_state(s);
    set_thread_count(1);
    CHECK(a.population == b.population);
    for (std::size_t i = 0; i < sa.cells.size(); ++i) CHECK(sa.cells[i].value == sb.cells[i].value);
}

TEST_CASE("second-order self-convergence for n <= 2") {
    for (int n = 1; n <= 2; ++n) {
        auto p = two_photons(1.0);
        p.n_photons = n;
        p.phi = 0.4;
        Pulse f(RectangularPulse{0.0, 1.0});
        auto run = [&](double dt) { return run_scenario(p, f, build_grid(dt, 5.0, 1.0)); };
        auto a = run(0.1), b = run(0.05), c = run(0.025);
        const double e1 = compare_trajectories(c, a).sup, e2 = compare_trajectories(c, b).sup;
        MESSAGE("n=" << n << " errors vs dt/4: " << e1 << " " << e2);
        // ratio 5 for second order, 3 for first
        CHECK(e1 / e2 > 4.0);
    }
}

TEST_CASE("sweep cells keep tau aligned and flag slow cells") {
    SweepSpec s;
    s.widths = {1.0};
    s.taus = {0.3, 3.0};
    s.base = two_photons(1.0);
    s.settle = 2.0;
    auto r = sweep_steady_state(s);
    for (const auto& c : r.cells) {
        CHECK(c.dt <= s.max_dt);
        const double k = c.tau / (2.0 * c.dt);
        CHECK(std::abs(k - std::round(k)) < 1e-9);
        CHECK(c.horizon == doctest::Approx(s.settle + 5.0 * c.tau));
        CHECK(c.value >= 0.0);
        CHECK(c.value <= 1.0);
    }
    CHECK_FALSE(r.at(0, 1).converged);
}
