#include "doctest.h"

#include <cmath>
#include <sstream>

#include "wgfb/config.hpp"
#include "wgfb/pulse.hpp"
#include "wgfb/timegrid.hpp"

using namespace wgfb;

namespace {

double norm_by_quadrature(const Pulse& f, double a, double b, std::size_t n) {
    const double h = (b - a) / static_cast<double>(n);
    double s = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        const double t = a + h * static_cast<double>(i);
        s += w * 0.5 * (std::norm(f.left_limit(t)) + std::norm(f.right_limit(t)));
    }
    return s * h;
}

}  // namespace

TEST_CASE("built-in shapes are normalized") {
    CHECK(norm_by_quadrature(Pulse(RectangularPulse{0.5, 2.0}), -1.0, 4.0, 20000) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(norm_by_quadrature(Pulse(GaussianPulse{3.0, 0.7}), -5.0, 11.0, 40000) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(norm_by_quadrature(Pulse(ExponentialPulse{0.0, 1.5}), -1.0, 40.0, 410000) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("rectangular edges") {
    Pulse f(RectangularPulse{1.0, 2.0});
    const double a = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(f(1.0) - a) < 1e-15);
    CHECK(std::abs(f(3.0) - a) < 1e-15);
    CHECK(std::abs(f.left_limit(1.0)) == 0.0);
    CHECK(std::abs(f.right_limit(3.0)) == 0.0);
    CHECK(std::abs(f.midpoint(1.0) - 0.5 * a) < 1e-15);
    CHECK(std::abs(f(0.5)) == 0.0);
}

TEST_CASE("ftau combination") {
    Pulse f(GaussianPulse{2.0, 0.5});
    const double tau = 1.0, phi = 0.3, t = 2.2;
    const cplx want = f(t - 0.5) * std::polar(1.0, 0.15) - f(t + 0.5) * std::polar(1.0, -0.15);
    CHECK(std::abs(evaluate_ftau(f, t, tau, phi) - want) < 1e-15);
}

TEST_CASE("tabulated pulse is renormalized and drops negative times") {
    std::istringstream in("-1 5\n0 0\n1 1\n2 0\n");
    Pulse f(read_pulse_table(in));
    // trapezoid over the samples 0, 1, 0 is one, so the peak keeps amplitude 1
    CHECK(std::abs(f(1.0) - 1.0) < 1e-15);
    CHECK(std::abs(f(-0.5)) == 0.0);
    CHECK(std::abs(f(0.5) / f(1.0) - 0.5) < 1e-12);

    std::ostringstream dense;
    for (int i = 0; i <= 1000; ++i) dense << 0.01 * i << ' ' << 3.0 * std::exp(-std::pow(0.01 * i - 5.0, 2)) << '\n';
    std::istringstream din(dense.str());
    Pulse g(read_pulse_table(din));
    CHECK(norm_by_quadrature(g, 0.0, 10.0, 1000) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("grid aligns tau to whole steps") {
    auto g = build_grid(0.013, 10.0, 2.0);
    CHECK(g.tau() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(g.k_half_tau * g.dt == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g.dt_adjusted());
    CHECK(std::abs(g.dt - 0.013) / 0.013 < 0.02);
    CHECK(g.horizon() >= 10.0 - g.dt);

    auto e = build_grid(0.01, 10.0, 2.0);
    CHECK(e.k_half_tau == 100);
    CHECK(e.n_steps == 1000);
    CHECK(e.n_aux() == 1201);
    CHECK(e.aux_time(e.aux_early(7)) == doctest::Approx(e.time(7) - 1.0));
    CHECK(e.aux_time(e.aux_late(7)) == doctest::Approx(e.time(7) + 1.0));
}

TEST_CASE("grid rejects a delay below one step") {
    CHECK_THROWS_AS(build_grid(0.1, 1.0, 0.15), Error);
}

TEST_CASE("trapezoid weights integrate linear functions exactly") {
    auto w = trapezoid_weights(11, 0.1);
    double s = 0.0, m = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        s += w[i];
        m += w[i] * 0.1 * static_cast<double>(i);
    }
    CHECK(s == doctest::Approx(1.0));
    CHECK(m == doctest::Approx(0.5));
}
