#include "wgfb/hierarchy.hpp"

#include <algorithm>
#include <cmath>

#include "blocks.hpp"

namespace wgfb {

namespace detail {

bool uses_dephasing_path(const SystemParams& p, const HierarchyOptions& o) {
    return p.gamma_pd > 0.0 || (o.force_dephasing_path && p.n_photons <= 2);
}

}  // namespace detail

ElementStore init_elements(const SystemParams& params, const TimeGrid& grid, const HierarchyOptions& options) {
    namespace L = detail::label;
    params.validate();
    const std::size_t ring = std::max<std::size_t>(grid.delay_steps() + 1, 2);
    const std::size_t full = grid.n_steps + 1;
    const std::size_t na = grid.n_aux();
    const bool deph = detail::uses_dephasing_path(params, options);

    ElementStore s;
    auto add_line_sector = [&](std::size_t depth) {
        s.add(L::vac, 0, 1, depth).scalar(0) = 1.0;
        s.add(L::one, 0, 1, ring);
        s.add(L::line0, 1, na, depth);
    };

    switch (params.n_photons) {
    case 0:
        s.add(L::vac, 0, 1, ring).scalar(0) = 1.0;
        if (deph) s.add(L::pop_e0, 0, 1, 2).scalar(0) = 1.0;
        break;
    case 1:
        s.add(L::one, 0, 1, ring);
        if (deph) s.add(L::pop_1, 0, 1, 2);
        break;
    case 2:
        add_line_sector(ring);
        s.add(L::two_e, 0, 1, ring);
        s.add(L::two_g, 1, na, ring);
        if (deph) {
            // Dense <a|E|b> over S1 = {|e,0>} + {|g,t'>}; Hermitian, kept square.
            // Filled by the integrator from the t = 0+ row (c, D).
            s.add(L::e_sheet, 2, (na + 1) * (na + 1), 2);
            s.add(L::pop_2, 0, 1, 2);
        }
        break;
    case 3:
        // The three-excitation closure reads c, D and the delayed two-excitation
        // contraction over the whole past, so these keep full histories.
        s.add(L::vac, 0, 1, full).scalar(0) = 1.0;
        s.add(L::line0, 1, na, full);
        s.add(L::pair_e, 1, na, full);
        s.add(L::pair_g, 2, packed_size(na), full);
        s.add(L::three_e, 1, na, ring);
        s.add(L::three_g, 2, packed_size(na), ring);
        break;
    default:
        throw Error("unsupported excitation number");
    }
    // The D line of a |g,...> ket starts with the t = 0 impulses already
    // applied (right limit at t = 0).
    if (s.contains(L::line0)) {
        auto d0 = s.get(L::line0).at(0);
        const double sg = std::sqrt(params.gamma);
        const cplx half = std::polar(1.0, 0.5 * params.phi);
        d0[grid.aux_early(0)] += -sg * half;
        d0[grid.aux_late(0)] += sg * std::conj(half);
    }
    return s;
}

std::unique_ptr<Propagator> make_propagator(const SystemParams& params, const Pulse& pulse, const TimeGrid& grid,
                                            const HierarchyOptions& options) {
    params.validate();
    if (detail::uses_dephasing_path(params, options)) return detail::make_dephasing(params, pulse, grid);
    if (params.n_photons == 3) return detail::make_three_photon(params, pulse, grid);
    return detail::make_standard(params, pulse, grid, options);
}

bool population_in_bounds(double p, double dt) {
    const double eps = 10.0 * dt * dt;
    return std::isfinite(p) && p >= -eps && p <= 1.0 + eps;
}

}  // namespace wgfb
