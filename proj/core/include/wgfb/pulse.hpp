#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wgfb/types.hpp"

namespace wgfb {

/// Box envelope A on [t0, t0 + duration].
struct RectangularPulse {
    double t0 = 0.0;
    double duration = 1.0;
};

/// A exp(-(t - mu)^2 / (2 sigma^2)).
struct GaussianPulse {
    double mu = 0.0;
    double sigma = 1.0;
};

/// A exp(-rate (t - t0)) for t >= t0.
struct ExponentialPulse {
    double t0 = 0.0;
    double rate = 1.0;
};

/// Piecewise-linear envelope through (time, amplitude) samples.
struct TabulatedPulse {
    std::vector<std::pair<double, cplx>> samples;
};

using PulseSpec = std::variant<RectangularPulse, GaussianPulse, ExponentialPulse, TabulatedPulse>;

std::string pulse_kind(const PulseSpec& spec);

/// A normalized single-photon temporal mode f(t), \int |f|^2 dt = 1.
///
/// Closed-form shapes carry their analytic normalization constant.
/// Tabulated shapes drop samples before t = 0 (the simulation starts
/// there), are interpolated linearly and rescaled so that the
/// trapezoidal norm over the remaining samples is exactly one.
/// Outside the sample range a tabulated pulse is zero.
class Pulse {
public:
    explicit Pulse(PulseSpec spec);

    const PulseSpec& spec() const { return spec_; }
    cplx amplitude() const { return amplitude_; }

    /// f(t). Support intervals are closed, so a rectangular pulse
    /// returns A at both edges.
    cplx operator()(double t) const;

    cplx left_limit(double t) const;
    cplx right_limit(double t) const;

    /// Mean of the one-sided limits. Used for sampling on a grid, where
    /// a jump landing on a node must enter trapezoid sums with weight 1/2.
    cplx midpoint(double t) const { return 0.5 * (left_limit(t) + right_limit(t)); }

    /// Earliest and latest time of nonzero support; for the Gaussian a
    /// +-12 sigma window.
    std::pair<double, double> support() const;

private:
    enum class Side { left, right, exact };
    cplx eval(double t, Side side) const;

    PulseSpec spec_;
    cplx amplitude_{1.0, 0.0};
};

/// f_tau(t) = f(t - tau/2) e^{i phi/2} - f(t + tau/2) e^{-i phi/2}.
cplx evaluate_ftau(const Pulse& f, double t, double tau, double phi);

/// Same combination built from Pulse::midpoint samples.
cplx evaluate_ftau_midpoint(const Pulse& f, double t, double tau, double phi);

/// One-sided limits {f_tau(t-), f_tau(t+)}.
std::pair<cplx, cplx> evaluate_ftau_limits(const Pulse& f, double t, double tau, double phi);

}  // namespace wgfb
