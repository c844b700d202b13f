#include <cmath>
#include <vector>

#include "blocks.hpp"

namespace wgfb::detail {

namespace {

// Pure dephasing damps every s- element at Gamma + gamma while populations
// <a|E|b> keep the bare rate 2 Gamma. Populations are advanced from the
// coherence increments so that at gamma = 0 they reproduce |coherence|^2:
//   E_{n+1} = a0^2 E_n + a0 (conj(y_n) b_n + c.c.) + |b_n|^2,
//   b_n = y_{n+1} - a_lambda y_n,
// which is a consistent second-order step for dE/dt = -2G E + 2 Re(conj(y) S)
// with S the source of y.
class Dephasing final : public Propagator {
public:
    Dephasing(const SystemParams& p, const Pulse& pulse, const TimeGrid& g)
        : Propagator(init_elements(p, g, HierarchyOptions{Contraction::factored, true})),
          ctx_(p, pulse, g),
          lambda_(p.gamma + p.gamma_pd),
          a0_(heun_factor(p.gamma, g.dt)),
          al_(heun_factor(lambda_, g.dt)),
          one_(ctx_, store_, lambda_) {
        if (p.n_photons == 0) pop_ = &store_.get(label::pop_e0);
        if (p.n_photons == 1) pop_ = &store_.get(label::pop_1);
        if (p.n_photons == 2) init_two();
    }

    void advance() override {
        if (step_ >= ctx_.grid.n_steps) throw Error("propagator advanced past the horizon");
        const std::size_t n = step_;
        if (ctx_.params.n_photons < 2) {
            const cplx y0 = coherence(n);
            one_.advance(n);
            const cplx y1 = coherence(n + 1);
            const cplx b = y1 - al_ * y0;
            const double e = pop_->scalar(n).real();
            pop_->scalar(n + 1) = a0_ * a0_ * e + 2.0 * a0_ * (std::conj(y0) * b).real() + std::norm(b);
        } else {
            advance_two(n);
        }
        ++step_;
    }

    double population() const override {
        if (ctx_.params.n_photons < 2) return pop_->scalar(step_).real();
        return E2_->scalar(step_).real();
    }

    std::string name() const override { return "dephasing"; }

    double work_per_step() const override {
        if (ctx_.params.n_photons < 2) return 1.0;
        const double na = static_cast<double>(ctx_.grid.n_aux());
        return 3.0 * na * na;
    }

private:
    cplx coherence(std::size_t n) const { return ctx_.params.n_photons == 0 ? one_.c(n) : one_.x(n); }

    // ---- two photons -------------------------------------------------
    //
    // E1 = <a|E|b> over S1 = {|e,0>, |g,t'>} is evolved as its own family.
    // A = <e,0|s-|g,2> and B = <g,t'|s-|g,2> follow
    //   dT/dt = -(G + gamma) T + (1 - 2 E1) rho,
    //   rho_e = G e^{i phi} A(t - tau),  rho_t' = G e^{i phi} B(t - tau, t') - sqrt(2G) f_tau f(t'),
    // and E2 = <g,2|E|g,2> follows dE2/dt = -2G E2 + 2 Re(conj(T) . rho).
    //
    // Lines over t' jump at t' = t -+ tau/2 (impulses) and at t' = tau/2.
    // E1 inherits the latter exactly: its column there jumps by E1(., e) J_late.

    std::size_t dim() const { return ctx_.grid.n_aux() + 1; }

    void row(std::size_t n, std::vector<cplx>& r) const {
        auto d = one_.D(n);
        r[0] = one_.c(n);
        std::copy(d.begin(), d.end(), r.begin() + 1);
    }

    void init_two() {
        A_ = &store_.get(label::two_e);
        B_ = &store_.get(label::two_g);
        E1_ = &store_.get(label::e_sheet);
        E2_ = &store_.get(label::pop_2);
        const std::size_t m = dim();
        r0_.resize(m);
        r1_.resize(m);
        rho_.resize(m);
        u_.resize(m);
        sb_.resize(m - 1);
        sb_next_.resize(m - 1);
        row(0, r0_);
        auto e = E1_->at(0);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) e[a * m + b] = std::conj(r0_[a]) * r0_[b];
        cplx X{};
        sources(0, ctx_.ftau_r[0], sa_, sb_, X);
        q_ = population_rate(0, ctx_.ftau_r[0]);
    }

    /// Fills rho at step n for the given f_tau value.
    void fill_rho(std::size_t n, cplx ftau) {
        const bool del = ctx_.delayed(n);
        const cplx fb = ctx_.feedback_factor;
        const cplx drive = std::sqrt(2.0 * ctx_.params.gamma) * ftau;
        rho_[0] = del ? fb * A_->scalar(n - ctx_.k2) : cplx{};
        const cplx* bd = del ? B_->at(n - ctx_.k2).data() : nullptr;
        for (std::size_t j = 0; j + 1 < rho_.size(); ++j)
            rho_[j + 1] = (bd ? fb * bd[j] : cplx{}) - drive * ctx_.f_aux[j];
    }

    /// Jump of rho at t' = tau/2 (from the delayed B).
    cplx rho_static_jump(std::size_t n) const {
        if (!ctx_.delayed(n)) return {};
        return ctx_.feedback_factor * std::conj(one_.jump_late()) * A_->scalar(n - ctx_.k2);
    }

    /// Sources at step n for A and B. X returns (c, D) . rho, the S1
    /// contraction used for impulse-row corrections.
    void sources(std::size_t n, cplx ftau, cplx& sa, std::vector<cplx>& sb, cplx& X) {
        fill_rho(n, ftau);
        const std::size_t m = dim();
        const auto& w = ctx_.w;
        auto E = E1_->at(n);
        row(n, r1_);
        const std::size_t je = 1 + ctx_.grid.aux_early(n), jl = 1 + ctx_.grid.aux_late(n);
        const std::size_t js = 1 + one_.static_node();
        const cplx Je = one_.jump_early(), Jl = one_.jump_late();
        const cplx drho = rho_static_jump(n);

        // u = (E1 averaged over jump nodes) . (w rho)
        parallel_for(m, [&](std::size_t lo, std::size_t hi) {
            std::vector<cplx> tmp(m);
            for (std::size_t a = lo; a < hi; ++a) {
                const cplx* ea = E.data() + a * m;
                tmp[0] = ea[0] * rho_[0];
                for (std::size_t b = 1; b < m; ++b) tmp[b] = ea[b] * (w[b - 1] * rho_[b]);
                cplx s = pairwise_sum(std::span<const cplx>(tmp));
                const cplx ca = std::conj(r1_[a]);
                s -= 0.5 * ca * Je * w[je - 1] * rho_[je];
                s -= 0.5 * ca * Jl * w[jl - 1] * rho_[jl];
                const cplx e_left = ea[js] - ea[0] * Jl;
                s += 0.5 * w[js - 1] * (e_left * (rho_[js] - drho) - ea[js] * rho_[js]);
                u_[a] = s;
            }
        });

        sa = rho_[0] - 2.0 * u_[0];
        for (std::size_t j = 0; j + 1 < m; ++j) sb[j] = rho_[j + 1] - 2.0 * u_[j + 1];

        // X = (c, D) . rho with quadrature means
        std::vector<cplx> dq(m - 1);
        one_.D_quadrature(n, dq);
        std::span<const cplx> rg(rho_.data() + 1, m - 1);
        X = r1_[0] * rho_[0] + weighted_dot(w, dq, rg) +
            two_sided_product_fix(w[js - 1], dq[js - 1], one_.static_jump(n), drho);

    }

    /// E2 rate 2 Re(conj(T) . rho) at step n (A, B already advanced), with
    /// two-sided means where both factors jump.
    double population_rate(std::size_t n, cplx ftau) {
        fill_rho(n, ftau);
        const std::size_t m = dim();
        const auto& w = ctx_.w;
        const std::size_t js = 1 + one_.static_node();
        const cplx drho = rho_static_jump(n);
        std::span<const cplx> rg(rho_.data() + 1, m - 1);
        auto B = B_->at(n);
        const cplx A = A_->scalar(n);
        cplx tr = std::conj(A) * rho_[0] + weighted_cdot(w, B, rg);
        const cplx dB = std::conj(one_.jump_late()) * A;
        tr += 0.5 * w[js - 1] * (std::conj(B[js - 1] - dB) * (rho_[js] - drho) - std::conj(B[js - 1]) * rho_[js]);
        // B = sqrt2 f(t') x(t) + continuous, so both B and rho jump where f does
        const double r2 = std::sqrt(2.0);
        const cplx bf = r2 * one_.x(n);
        cplx rf = -std::sqrt(2.0 * ctx_.params.gamma) * ftau;
        if (ctx_.delayed(n)) rf += ctx_.feedback_factor * r2 * one_.x(n - ctx_.k2);
        for (const auto& e : ctx_.f_edges) {
            const cplx df = e.right - e.left;
            tr += w[e.node] * 0.25 * std::conj(bf * df) * (rf * df);
        }
        return 2.0 * tr.real();
    }

    void advance_two(std::size_t n) {
        const std::size_t n1 = n + 1;
        const double h = ctx_.h;
        const std::size_t m = dim();

        row(n, r0_);
        one_.advance(n);
        row(n1, r1_);

        // E1 step from the smooth row increment, then the impulses as an exact
        // rank-2 update so that the jump multiplies the current coherence
        {
            const std::size_t je = 1 + ctx_.grid.aux_early(n1), jl = 1 + ctx_.grid.aux_late(n1);
            const cplx Je = one_.jump_early(), Jl = one_.jump_late();
            std::vector<cplx> pre = r1_;
            pre[je] -= Je;
            pre[jl] -= Jl;
            auto e0 = E1_->at(n);
            auto e1 = E1_->at(n1);
            std::vector<cplx> b(m);
            for (std::size_t a = 0; a < m; ++a) b[a] = pre[a] - al_ * r0_[a];
            const double a2 = a0_ * a0_;
            parallel_for(m, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t a = lo; a < hi; ++a) {
                    const cplx ya = std::conj(r0_[a]), ba = std::conj(b[a]);
                    const cplx* src = e0.data() + a * m;
                    cplx* dst = e1.data() + a * m;
                    for (std::size_t k = 0; k < m; ++k)
                        dst[k] = a2 * src[k] + a0_ * (ya * b[k] + ba * r0_[k]) + ba * b[k];
                }
            });
            std::vector<cplx> jv(m);
            jv[je] += Je;
            jv[jl] += Jl;
            std::vector<std::size_t> nodes{je};
            if (jl != je) nodes.push_back(jl);
            for (std::size_t j : nodes) {
                for (std::size_t a = 0; a < m; ++a) {
                    e1[a * m + j] += std::conj(pre[a]) * jv[j];
                    e1[j * m + a] += std::conj(jv[j]) * pre[a];
                }
            }
            for (std::size_t i : nodes)
                for (std::size_t j : nodes) e1[i * m + j] += std::conj(jv[i]) * jv[j];
        }

        // A, B: right limits at n1, then left limits for the trapezoid
        cplx sa{}, X{};
        sources(n1, ctx_.ftau_r[n1], sa, sb_next_, X);
        cplx saL = sa, XL = X;
        const bool edge = ctx_.ftau_l[n1] != ctx_.ftau_r[n1];
        std::vector<cplx> sbL;
        if (edge) {
            sbL.resize(sb_next_.size());
            sources(n1, ctx_.ftau_l[n1], saL, sbL, XL);
        } else {
            sbL = sb_next_;
        }
        sbL[ctx_.grid.aux_early(n1)] += 2.0 * std::conj(one_.jump_early()) * XL;
        sbL[ctx_.grid.aux_late(n1)] += 2.0 * std::conj(one_.jump_late()) * XL;
        A_->scalar(n1) = heun_linear(A_->scalar(n), lambda_, sa_, saL, h);
        heun_line(B_->at(n), B_->at(n1), lambda_, sb_, &sbL, h);

        const double q_right = population_rate(n1, ctx_.ftau_r[n1]);
        const double q_left = edge ? population_rate(n1, ctx_.ftau_l[n1]) : q_right;
        const double lam2 = 2.0 * ctx_.params.gamma;
        E2_->scalar(n1) = heun_linear(E2_->scalar(n), lam2, q_, q_left, h).real();

        sa_ = sa;
        q_ = q_right;
        std::swap(sb_, sb_next_);
    }

    Context ctx_;
    double lambda_;
    double a0_, al_;
    OneExcitation one_;
    Family* pop_ = nullptr;

    Family* A_ = nullptr;
    Family* B_ = nullptr;
    Family* E1_ = nullptr;
    Family* E2_ = nullptr;
    std::vector<cplx> r0_, r1_, rho_, u_, sb_, sb_next_;
    cplx sa_{};
    double q_ = 0.0;
};

}  // namespace

std::unique_ptr<Propagator> make_dephasing(const SystemParams& p, const Pulse& pulse, const TimeGrid& g) {
    if (p.n_photons > 2) throw Error("dephasing unsupported at n=3");
    return std::make_unique<Dephasing>(p, pulse, g);
}

}  // namespace wgfb::detail
