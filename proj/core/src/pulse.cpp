#include "wgfb/pulse.hpp"

#include <algorithm>
#include <cmath>

namespace wgfb {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

cplx interpolate(const std::vector<std::pair<double, cplx>>& s, double t) {
    auto hi = std::upper_bound(s.begin(), s.end(), t,
                               [](double v, const auto& p) { return v < p.first; });
    if (hi == s.begin()) return s.front().second;
    if (hi == s.end()) return s.back().second;
    auto lo = std::prev(hi);
    const double w = (t - lo->first) / (hi->first - lo->first);
    return (1.0 - w) * lo->second + w * hi->second;
}

TabulatedPulse clip_and_sort(TabulatedPulse tab) {
    auto& s = tab.samples;
    if (s.size() < 2) throw Error("tabulated pulse needs at least two samples");
    std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < s.size(); ++i)
        if (!(s[i].first > s[i - 1].first)) throw Error("tabulated pulse has duplicate sample times");
    if (s.front().first < 0.0) {
        if (s.back().first <= 0.0) throw Error("tabulated pulse has no support at t >= 0");
        const cplx at_zero = interpolate(s, 0.0);
        std::erase_if(s, [](const auto& p) { return p.first <= 0.0; });
        s.insert(s.begin(), {0.0, at_zero});
    }
    return tab;
}

}  // namespace

std::string pulse_kind(const PulseSpec& spec) {
    return std::visit(overloaded{
                          [](const RectangularPulse&) { return std::string("rectangular"); },
                          [](const GaussianPulse&) { return std::string("gaussian"); },
                          [](const ExponentialPulse&) { return std::string("exponential"); },
                          [](const TabulatedPulse&) { return std::string("tabulated"); },
                      },
                      spec);
}

Pulse::Pulse(PulseSpec spec) : spec_(std::move(spec)) {
    std::visit(overloaded{
                   [&](const RectangularPulse& p) {
                       if (!(p.duration > 0.0)) throw Error("rectangular pulse: duration must be > 0");
                       amplitude_ = 1.0 / std::sqrt(p.duration);
                   },
                   [&](const GaussianPulse& p) {
                       if (!(p.sigma > 0.0)) throw Error("gaussian pulse: sigma must be > 0");
                       amplitude_ = std::pow(kPi * p.sigma * p.sigma, -0.25);
                   },
                   [&](const ExponentialPulse& p) {
                       if (!(p.rate > 0.0)) throw Error("exponential pulse: rate must be > 0");
                       amplitude_ = std::sqrt(2.0 * p.rate);
                   },
                   [&](TabulatedPulse& p) {
                       p = clip_and_sort(std::move(p));
                       double norm = 0.0;
                       for (std::size_t i = 1; i < p.samples.size(); ++i) {
                           const double h = p.samples[i].first - p.samples[i - 1].first;
                           norm += 0.5 * h * (std::norm(p.samples[i].second) + std::norm(p.samples[i - 1].second));
                       }
                       if (!(norm > 0.0)) throw Error("tabulated pulse has zero norm");
                       const double scale = 1.0 / std::sqrt(norm);
                       for (auto& [t, v] : p.samples) v *= scale;
                       amplitude_ = 1.0;
                   },
               },
               spec_);
}

cplx Pulse::eval(double t, Side side) const {
    // inside(a, b): membership of t in the support [a, b] seen from `side`.
    auto inside = [&](double a, double b) {
        switch (side) {
            case Side::left: return t > a && t <= b;
            case Side::right: return t >= a && t < b;
            case Side::exact: return t >= a && t <= b;
        }
        return false;
    };
    return std::visit(overloaded{
                          [&](const RectangularPulse& p) -> cplx {
                              return inside(p.t0, p.t0 + p.duration) ? amplitude_ : cplx{};
                          },
                          [&](const GaussianPulse& p) -> cplx {
                              const double x = (t - p.mu) / p.sigma;
                              return amplitude_ * std::exp(-0.5 * x * x);
                          },
                          [&](const ExponentialPulse& p) -> cplx {
                              if (!inside(p.t0, INFINITY)) return {};
                              return amplitude_ * std::exp(-p.rate * (t - p.t0));
                          },
                          [&](const TabulatedPulse& p) -> cplx {
                              if (!inside(p.samples.front().first, p.samples.back().first)) return {};
                              return interpolate(p.samples, t);
                          },
                      },
                      spec_);
}

cplx Pulse::operator()(double t) const { return eval(t, Side::exact); }
cplx Pulse::left_limit(double t) const { return eval(t, Side::left); }
cplx Pulse::right_limit(double t) const { return eval(t, Side::right); }

std::pair<double, double> Pulse::support() const {
    return std::visit(overloaded{
                          [](const RectangularPulse& p) { return std::pair{p.t0, p.t0 + p.duration}; },
                          [](const GaussianPulse& p) { return std::pair{p.mu - 12.0 * p.sigma, p.mu + 12.0 * p.sigma}; },
                          [](const ExponentialPulse& p) { return std::pair{p.t0, p.t0 + 40.0 / p.rate}; },
                          [](const TabulatedPulse& p) { return std::pair{p.samples.front().first, p.samples.back().first}; },
                      },
                      spec_);
}

cplx evaluate_ftau(const Pulse& f, double t, double tau, double phi) {
    const cplx half = std::polar(1.0, 0.5 * phi);
    return f(t - 0.5 * tau) * half - f(t + 0.5 * tau) * std::conj(half);
}

cplx evaluate_ftau_midpoint(const Pulse& f, double t, double tau, double phi) {
    const cplx half = std::polar(1.0, 0.5 * phi);
    return f.midpoint(t - 0.5 * tau) * half - f.midpoint(t + 0.5 * tau) * std::conj(half);
}

std::pair<cplx, cplx> evaluate_ftau_limits(const Pulse& f, double t, double tau, double phi) {
    const cplx half = std::polar(1.0, 0.5 * phi);
    const double a = t - 0.5 * tau, b = t + 0.5 * tau;
    return {f.left_limit(a) * half - f.left_limit(b) * std::conj(half),
            f.right_limit(a) * half - f.right_limit(b) * std::conj(half)};
}

}  // namespace wgfb
