#pragma once

// Building blocks shared by the feedback integrators. Not installed.

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "wgfb/element_store.hpp"
#include "wgfb/hierarchy.hpp"
#include "wgfb/numeric.hpp"

namespace wgfb::detail {

namespace label {
inline constexpr const char* vac = "<g,0|s-|e,0>";
inline constexpr const char* one = "<g,0|s-|g,1>";
inline constexpr const char* line0 = "<g,0|s-|g,t'>";
inline constexpr const char* two_e = "<e,0|s-|g,2>";
inline constexpr const char* two_g = "<g,t'|s-|g,2>";
inline constexpr const char* three_e = "<e,t'|s-|g,3>";
inline constexpr const char* three_g = "<g,t',t''|s-|g,3>";
inline constexpr const char* pair_e = "<g,0|s-(t)s-(t-tau)|e,t'>";
inline constexpr const char* pair_g = "<g,0|s-(t)s-(t-tau)|g,t',t''>";
inline constexpr const char* pop_e0 = "<e,0|E|e,0>";
inline constexpr const char* pop_1 = "<g,1|E|g,1>";
inline constexpr const char* pop_2 = "<g,2|E|g,2>";
inline constexpr const char* coh_12 = "<g,1|s-|g,2>";
inline constexpr const char* e_sheet = "<S1|E|S1>";
}  // namespace label

/// Heun step for dy/dt = -lambda y + s(t) where s does not depend on y.
inline cplx heun_linear(cplx y, double lambda, cplx s0, cplx s1, double h) {
    const double lh = lambda * h;
    return (1.0 - lh + 0.5 * lh * lh) * y + 0.5 * h * (s0 + s1) - 0.5 * lambda * h * h * s0;
}

inline double heun_factor(double lambda, double h) {
    const double lh = lambda * h;
    return 1.0 - lh + 0.5 * lh * lh;
}

/// Heun step for a whole line; s1 must hold left limits at the step end.
inline void heun_line(std::span<const cplx> y0, std::span<cplx> y1, double lambda, const std::vector<cplx>& s0,
                      const std::vector<cplx>* s1, double h) {
    const double a = heun_factor(lambda, h);
    const double c0 = 0.5 * h - 0.5 * lambda * h * h;
    if (s1) {
        for (std::size_t j = 0; j < y1.size(); ++j) y1[j] = a * y0[j] + c0 * s0[j] + 0.5 * h * (*s1)[j];
    } else {
        for (std::size_t j = 0; j < y1.size(); ++j) y1[j] = a * y0[j] + c0 * s0[j];
    }
}

/// Quantities that every family equation reads: rates, phases, the
/// sampled pulse and quadrature weights.
///
/// Sources are piecewise smooth in t with jumps only at grid times (pulse
/// edges, the switch-on of delayed terms at t = tau, the impulses of
/// r_{t,tau}). Each Heun step takes the right limit at its start and the
/// left limit at its end, which keeps the scheme second order.
struct Context {
    Context(const SystemParams& p, const Pulse& pulse, const TimeGrid& g);

    SystemParams params;
    TimeGrid grid;
    double h;
    std::size_t k2;            // delay in steps
    double sqrt_gamma;
    cplx feedback_factor;      // Gamma e^{i phi}
    cplx half_phase;           // e^{i phi/2}
    std::vector<cplx> ftau_l;  // f_tau(t_n -)
    std::vector<cplx> ftau_r;  // f_tau(t_n +)
    std::vector<cplx> f_aux;   // f at every aux node (mean of one-sided limits)
    std::vector<double> w;     // trapezoid weights on the aux axis

    /// Aux nodes where f jumps, with its one-sided limits there.
    struct Edge {
        std::size_t node;
        cplx left, right;
    };
    std::vector<Edge> f_edges;

    /// Delayed terms at step n, right limit (t >= tau).
    bool delayed(std::size_t n) const { return params.feedback && n >= k2; }
    /// Delayed terms at step n, left limit (t > tau); at t = tau- they read
    /// values from before t = 0, which vanish.
    bool delayed_left(std::size_t n) const { return params.feedback && n > k2; }
};

/// Excitation-one sector: c(t) = <g,0|s-|e,0>, x(t) = <g,0|s-|g,1> and the
/// line D(t,s) = <g,0|s-(t)|g,s>. D picks up the r_{t,tau} impulses
/// -sqrt(G) e^{i phi/2} at node s = t - tau/2 and +sqrt(G) e^{-i phi/2}
/// at s = t + tau/2.
class OneExcitation {
public:
    /// Binds to whichever of c, x and D the store holds.
    OneExcitation(const Context& ctx, ElementStore& store, double lambda);

    void advance(std::size_t n);  // n -> n+1

    cplx c(std::size_t n) const { return c_ ? c_->scalar(n) : cplx{}; }
    cplx x(std::size_t n) const { return x_ ? x_->scalar(n) : cplx{}; }
    std::span<const cplx> D(std::size_t n) const { return D_->at(n); }

    cplx jump_early() const { return -ctx_.sqrt_gamma * ctx_.half_phase; }
    cplx jump_late() const { return ctx_.sqrt_gamma * std::conj(ctx_.half_phase); }

    /// D(n, .) with jump nodes replaced by the mean of their one-sided
    /// limits in s, for use inside quadratures over s.
    void D_quadrature(std::size_t n, std::span<cplx> out) const;

    /// Labels below tau/2 never meet the late impulse, so every line over
    /// t' is discontinuous at t' = tau/2 (node 2k). Stored values there are
    /// right limits; the jump of D is jump_late() * c(t).
    std::size_t static_node() const { return ctx_.grid.aux_late(0); }
    cplx static_jump(std::size_t n) const { return jump_late() * c(n); }

private:
    const Context& ctx_;
    double lambda_;
    Family* c_;
    Family* x_;
    Family* D_;
    cplx sc_{}, sx_{};
    std::vector<cplx> sd_, sd_next_;
};

/// Excitation-two sector for a |g,2> ket: A(t) = <e,0|s-|g,2> and
/// B(t,t') = <g,t'|s-|g,2>. Their equations read the one-excitation row
/// (c, D) at t through the projector 1 - 2 E_1.
class TwoExcitation {
public:
    TwoExcitation(const Context& ctx, ElementStore& store, const OneExcitation& one, double lambda, Contraction mode);

    void advance(std::size_t n);  // call after one.advance(n)
    double population(std::size_t n) const;

    cplx A(std::size_t n) const { return A_->scalar(n); }
    std::span<const cplx> B(std::size_t n) const { return B_->at(n); }
    /// B's jump at t' = tau/2 (node 2k).
    cplx static_jump(std::size_t n) const;

private:
    cplx beta(std::size_t n);
    cplx static_fix(std::size_t n, std::size_t m) const;
    /// Right-limit sources at step n; returns X(n+).
    cplx sources(std::size_t n, cplx& sa, std::vector<cplx>& sb);

    const Context& ctx_;
    const OneExcitation& one_;
    double lambda_;
    Contraction mode_;
    Family* A_;
    Family* B_;
    cplx sa_{};
    std::vector<cplx> sb_, sb_next_, dq_;
};

/// Trapezoid correction at a node where u and v jump by du and dv, given
/// the averaged node value u_mean and v's right limit v_right:
/// w * (mean of u v over both sides - u_mean * v_right).
inline cplx two_sided_product_fix(double w, cplx u_mean, cplx du, cplx dv) {
    return w * (-0.5 * u_mean * dv + 0.25 * du * dv);
}

/// w * (mean of |v|^2 over both sides - |v_right|^2).
inline double two_sided_norm_fix(double w, cplx v_right, cplx dv) {
    return w * 0.5 * (std::norm(v_right - dv) - std::norm(v_right));
}

/// Weighted norm of a packed symmetric sheet with measure (1/2) dt' dt''.
double half_sheet_norm2(std::span<const double> w, std::span<const cplx> sheet, std::size_t n);

}  // namespace wgfb::detail

namespace wgfb::detail {

bool uses_dephasing_path(const SystemParams& p, const HierarchyOptions& o);

std::unique_ptr<Propagator> make_standard(const SystemParams& p, const Pulse& pulse, const TimeGrid& g,
                                          const HierarchyOptions& o);
std::unique_ptr<Propagator> make_three_photon(const SystemParams& p, const Pulse& pulse, const TimeGrid& g);
std::unique_ptr<Propagator> make_dephasing(const SystemParams& p, const Pulse& pulse, const TimeGrid& g);

}  // namespace wgfb::detail
