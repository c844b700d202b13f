#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "wgfb/element_store.hpp"
#include "wgfb/params.hpp"
#include "wgfb/pulse.hpp"
#include "wgfb/timegrid.hpp"
#include "wgfb/types.hpp"

namespace wgfb {

/// How the t'-integral in the two-photon feedback terms is evaluated.
/// `factored` pulls the t'-independent factor out of the integral
/// (O(N) per step); `direct` evaluates the integral separately for every
/// t' as the equations are written (O(N^2) per step). Both give the same
/// numbers up to rounding.
enum class Contraction { factored, direct };

struct HierarchyOptions {
    Contraction contraction = Contraction::factored;
    /// Route |e,0> and n <= 2 runs through the separate coherence /
    /// population integrator even when gamma_pd == 0.
    bool force_dephasing_path = false;
};

/// Families required by a configuration, allocated with their history
/// depth. Throws for n > 3 or n = 3 with dephasing.
ElementStore init_elements(const SystemParams& params, const TimeGrid& grid,
                           const HierarchyOptions& options = {});

/// Advances one closed set of element families on a TimeGrid.
class Propagator {
public:
    virtual ~Propagator() = default;

    /// Moves from step() to step() + 1.
    virtual void advance() = 0;
    /// Emitter population at step().
    virtual double population() const = 0;
    virtual std::string name() const = 0;

    std::size_t step() const { return step_; }
    const ElementStore& store() const { return store_; }
    ElementStore& store() { return store_; }
    /// Rough complex multiply-adds per step at the final step count.
    virtual double work_per_step() const = 0;

protected:
    explicit Propagator(ElementStore store) : store_(std::move(store)) {}
    std::size_t step_ = 0;
    ElementStore store_;
};

/// Markovian reference: the closed recursion over <g,k|E|g,k> and
/// <g,k-1|s-|g,k>, k = 1..n, with all delayed terms absent.
std::unique_ptr<Propagator> make_markov(const SystemParams& params, const Pulse& pulse, const TimeGrid& grid);

/// Feedback integrator selected from params (vacuum decay, n = 1, 2, 3,
/// or the dephasing variant when gamma_pd > 0).
std::unique_ptr<Propagator> make_propagator(const SystemParams& params, const Pulse& pulse, const TimeGrid& grid,
                                            const HierarchyOptions& options = {});

/// Tolerance band for populations: [-10 dt^2, 1 + 10 dt^2].
bool population_in_bounds(double p, double dt);

}  // namespace wgfb
