#include "wgfb/params.hpp"

#include <cmath>

#include "wgfb/trajectory.hpp"
#include "wgfb/types.hpp"

namespace wgfb {

std::string to_string(InitialState s) {
    return s == InitialState::excited_vacuum ? "excited_vacuum" : "ground_with_pulse";
}

std::string to_string(Source s) {
    switch (s) {
    case Source::markov: return "markov";
    case Source::oracle: return "oracle";
    default: return "hierarchy";
    }
}

std::vector<ParamViolation> SystemParams::violations() const {
    std::vector<ParamViolation> v;
    if (!(gamma > 0.0) || !std::isfinite(gamma)) v.push_back({"system.gamma", "Gamma must be positive"});
    if (!(tau >= 0.0) || !std::isfinite(tau)) v.push_back({"system.tau", "tau must be non-negative"});
    if (!(gamma_pd >= 0.0) || !std::isfinite(gamma_pd)) v.push_back({"system.gammaPD", "gammaPD must be non-negative"});
    if (!std::isfinite(phi)) v.push_back({"system.phi", "phi must be finite"});
    if (n_photons < 0 || n_photons > 3) {
        v.push_back({"system.nPhotons", "unsupported excitation number"});
        return v;
    }
    if (initial == InitialState::excited_vacuum && n_photons != 0)
        v.push_back({"system.initial", "excited_vacuum requires nPhotons = 0"});
    if (initial == InitialState::ground_with_pulse && n_photons == 0)
        v.push_back({"system.initial", "ground_with_pulse requires nPhotons >= 1"});
    if (feedback && tau == 0.0) v.push_back({"system.feedback", "feedback requires tau > 0"});
    if (gamma_pd > 0.0 && n_photons == 3) v.push_back({"system.gammaPD", "dephasing unsupported at n=3"});
    return v;
}

void SystemParams::validate() const {
    const auto v = violations();
    if (!v.empty()) throw Error(v.front().message);
}

}  // namespace wgfb
