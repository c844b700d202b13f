#include "doctest.h"

#include <cmath>

#include "wgfb/hierarchy.hpp"

using namespace wgfb;

namespace {

std::vector<double> run(Propagator& p, const TimeGrid& g) {
    std::vector<double> out{p.population()};
    for (std::size_t n = 0; n < g.n_steps; ++n) {
        p.advance();
        out.push_back(p.population());
    }
    return out;
}

SystemParams pulse_params(int n, double tau, double phi = 0.0) {
    SystemParams p;
    p.n_photons = n;
    p.initial = InitialState::ground_with_pulse;
    p.tau = tau;
    p.phi = phi;
    return p;
}

}  // namespace

TEST_CASE("element count for two photons") {
    auto g = build_grid(0.01, 10.0, 2.0);
    auto s = init_elements(pulse_params(2, 2.0), g);
    CHECK(g.n_aux() == 1201);
    CHECK(s.report().elements_per_step == 2405);
    CHECK(s.report().families == 5);
}

TEST_CASE("excited vacuum store") {
    auto g = build_grid(0.1, 1.0, 2.0);
    SystemParams p;
    auto s = init_elements(p, g);
    CHECK(s.report().families == 1);
    CHECK(s.report().elements_per_step == 1);
}

TEST_CASE("four photons rejected") {
    auto g = build_grid(0.1, 1.0, 2.0);
    auto p = pulse_params(3, 2.0);
    p.n_photons = 4;
    CHECK_THROWS_WITH(init_elements(p, g), "unsupported excitation number");
}

TEST_CASE("vacuum decay before the delay is Wigner-Weisskopf") {
    auto g = build_grid(0.01, 3.0, 2.0);
    SystemParams p;
    p.tau = 2.0;
    Pulse f(RectangularPulse{0.0, 1.0});
    auto prop = make_propagator(p, f, g);
    auto pop = run(*prop, g);
    for (std::size_t n = 0; n < g.delay_steps(); ++n) CHECK(pop[n] == doctest::Approx(std::exp(-2.0 * g.time(n))).epsilon(1e-5));
}

TEST_CASE("pulse runs agree with the Markov recursion before tau") {
    Pulse f(RectangularPulse{0.0, 2.0});
    for (int n = 1; n <= 2; ++n) {
        auto g = build_grid(0.02, 4.0, 3.0);
        auto p = pulse_params(n, 3.0, 0.7);
        auto a = make_propagator(p, f, g);
        auto m = make_markov(p, f, g);
        auto pa = run(*a, g);
        auto pm = run(*m, g);
        double d = 0;
        for (std::size_t k = 0; k < g.delay_steps(); ++k) d = std::max(d, std::abs(pa[k] - pm[k]));
        MESSAGE("n=" << n << " maxdiff before tau " << d << " P(tau-)=" << pa[g.delay_steps() - 1]);
        CHECK(d < 10 * g.dt * g.dt);
    }
}

TEST_CASE("factored and direct contraction agree") {
    Pulse f(RectangularPulse{0.0, 2.0});
    auto g = build_grid(0.05, 8.0, 2.0);
    auto p = pulse_params(2, 2.0);
    HierarchyOptions o;
    auto a = make_propagator(p, f, g, o);
    o.contraction = Contraction::direct;
    auto b = make_propagator(p, f, g, o);
    auto pa = run(*a, g);
    auto pb = run(*b, g);
    for (std::size_t k = 0; k < pa.size(); ++k) CHECK(pa[k] == doctest::Approx(pb[k]).epsilon(1e-12));
    MESSAGE("P(8) = " << pa.back());
}
