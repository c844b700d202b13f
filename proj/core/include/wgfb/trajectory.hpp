#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wgfb/element_store.hpp"
#include "wgfb/params.hpp"
#include "wgfb/pulse.hpp"
#include "wgfb/timegrid.hpp"

namespace wgfb {

enum class Source { hierarchy, markov, oracle };

std::string to_string(Source s);

/// Emitter population sampled on a uniform time grid, with the inputs
/// that produced it.
struct Trajectory {
    std::vector<double> times;
    std::vector<double> population;
    SystemParams params;
    PulseSpec pulse;
    TimeGrid grid;
    std::optional<double> steady_state;
    Source source = Source::hierarchy;
    std::string integrator;  // propagator name, for provenance
    StoreReport store;       // zero for the oracle
};

}  // namespace wgfb
