#pragma once

#include <string>
#include <vector>

namespace wgfb {

enum class InitialState { ground_with_pulse, excited_vacuum };

std::string to_string(InitialState s);

/// Emitter/waveguide parameters in units where the time unit is 1/Gamma
/// if gamma == 1. `phi` is the round-trip phase omega_0 tau.
/// Without a mirror (`feedback == false`) every delayed term is dropped
/// while tau still fixes the two-sided source f_tau.
struct ParamViolation {
    std::string key;  // config key path, e.g. "system.nPhotons"
    std::string message;
};

struct SystemParams {
    double gamma = 1.0;
    double tau = 2.0;
    double phi = 0.0;
    double gamma_pd = 0.0;
    int n_photons = 0;
    InitialState initial = InitialState::excited_vacuum;
    bool feedback = true;

    /// Every violated constraint, in a fixed order.
    std::vector<ParamViolation> violations() const;
    /// Throws wgfb::Error with the first violation.
    void validate() const;
};

}  // namespace wgfb
