#include "doctest.h"

#include <cmath>

#include "wgfb/element_store.hpp"
#include "wgfb/experiments.hpp"
#include "wgfb/oracle.hpp"

using namespace wgfb;

TEST_CASE("packed index enumerates the upper triangle") {
    const std::size_t n = 7;
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            CHECK(packed_index(i, j, n) == k);
            CHECK(packed_index(j, i, n) == k);
            ++k;
        }
    CHECK(k == packed_size(n));
}

TEST_CASE("store allocates once and reports its size") {
    ElementStore s;
    s.add("a", 0, 1, 3);
    auto& b = s.add("b", 1, 10, 2);
    b.at(0)[3] = 1.0;
    b.at(2)[3] += 1.0;
    CHECK(b.at(0)[3] == cplx(2.0));
    CHECK(s.contains("a"));
    CHECK_FALSE(s.contains("c"));
    CHECK_THROWS(s.get("c"));
    const auto r = s.report();
    CHECK(r.families == 2);
    CHECK(r.elements_per_step == 11);
    CHECK(r.bytes == (3 + 20) * sizeof(cplx));
}

TEST_CASE("closed-form feedback amplitude") {
    // before tau the mirror is invisible
    CHECK(std::abs(oracle::vacuum_feedback_exact(1.0, 2.0, 0.0, 1.5) - std::exp(-1.5)) < 1e-15);
    // second interval: e^{-t} + (t - tau) e^{-(t - tau)}
    const double t = 3.1;
    CHECK(std::abs(oracle::vacuum_feedback_exact(1.0, 2.0, 0.0, t) - (std::exp(-t) + (t - 2.0) * std::exp(-(t - 2.0)))) <
          1e-14);
    CHECK(oracle::bound_state_population(1.0, 2.0) == doctest::Approx(1.0 / 9.0));
    CHECK(std::norm(oracle::vacuum_feedback_exact(1.0, 2.0, 0.0, 60.0)) == doctest::Approx(1.0 / 9.0).epsilon(1e-3));
}

TEST_CASE("time-bin oracle reproduces Wigner-Weisskopf within 1% at 200 bins") {
    SystemParams p;
    p.feedback = false;
    oracle::TimeBinOptions o;
    o.horizon = 5.0;
    o.n_bins = 200;
    auto tr = oracle::brute_force_timebin(p, Pulse(RectangularPulse{}), o);
    double d = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i) d = std::max(d, std::abs(tr.population[i] - std::exp(-2.0 * tr.times[i])));
    MESSAGE("sup |P - e^{-2t}| = " << d);
    CHECK(d < 1e-2);
}

TEST_CASE("time-bin oracle converges to the feedback closed form") {
    SystemParams p;
    p.tau = 1.0;
    auto err = [&](std::size_t bins) {
        oracle::TimeBinOptions o;
        o.horizon = 5.0;
        o.n_bins = bins;
        auto tr = oracle::brute_force_timebin(p, Pulse(RectangularPulse{}), o);
        double d = 0.0;
        for (std::size_t i = 0; i < tr.times.size(); ++i)
            d = std::max(d, std::abs(tr.population[i] - std::norm(oracle::vacuum_feedback_exact(1.0, 1.0, 0.0, tr.times[i]))));
        return d;
    };
    const double e1 = err(120), e2 = err(240);
    MESSAGE("errors " << e1 << " " << e2);
    CHECK(e1 < 2e-2);
    CHECK(e2 < 0.6 * e1);
}

TEST_CASE("hierarchy and oracle agree for three photons") {
    SystemParams p;
    p.n_photons = 3;
    p.initial = InitialState::ground_with_pulse;
    p.tau = 1.0;
    Pulse f(GaussianPulse{1.5, 0.5});
    auto g = build_grid(0.05, 4.0, p.tau);
    auto h = run_scenario(p, f, g);
    oracle::TimeBinOptions o;
    o.horizon = 4.0;
    o.n_bins = 100;
    auto tr = oracle::brute_force_timebin(p, f, o);
    const auto d = compare_trajectories(h, tr);
    MESSAGE("n=3 sup " << d.sup << " peak " << d.peak);
    CHECK(d.sup < 0.02 * d.peak);
}

TEST_CASE("oracle rejects four photons") {
    SystemParams p;
    p.n_photons = 4;
    p.initial = InitialState::ground_with_pulse;
    CHECK_THROWS_AS(oracle::brute_force_timebin(p, Pulse(RectangularPulse{}), {}), Error);
}
