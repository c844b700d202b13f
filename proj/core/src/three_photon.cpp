#include <cmath>
#include <vector>

#include "blocks.hpp"

namespace wgfb::detail {

namespace {

// Three photons in |g,3>. The row t3 = (F(t,s), G(t,s1,s2)) over
// S2 = {|e,s>, |g,s1,s2>} obeys
//   dt3/dt = -G t3 + (1 - 2 T2^+ T2) rho3,
//   rho3 = G e^{i phi} t3(t - tau) - sqrt(3G) f_tau <.|g,2>.
// T2 = <S1|s-(t)|S2> is never stored. Each column w_c solves a scalar-kernel
// delay equation whose Green's function is c(t), so
//   w_c(t) = w_c^lin(t) + 2 sqrt(G) sum_i h_i c(t - u_i) tau1(u_i)^+
//            - 2 G e^{i phi} int_tau^t c(t - u) tau1(u)^+ beta_c(u) du
// with tau1 = (c, D), the impulses (u_i, h_i) of r_{u,tau} on |c> and
// beta_c(u) = tau1(u) . w_c(u - tau), which is kept for the whole past.
// Everything T2 does is a contraction against rows tau1(u) and beta(u).
//
// Discontinuities in s and u are taken at their mean values (first order
// near them); pulse edges in f_tau use one-sided limits.
class ThreePhoton final : public Propagator {
public:
    ThreePhoton(const SystemParams& p, const Pulse& pulse, const TimeGrid& g)
        : Propagator(init_elements(p, g)),
          ctx_(p, pulse, g),
          one_(ctx_, store_, p.gamma),
          na_(g.n_aux()),
          np_(packed_size(na_)),
          F_(&store_.get(label::three_e)),
          G_(&store_.get(label::three_g)),
          Be_(&store_.get(label::pair_e)),
          Bg_(&store_.get(label::pair_g)),
          Dq_(g.n_steps + 1, std::vector<cplx>(na_)),
          pw_(np_) {
        for (std::size_t i = 0; i < na_; ++i)
            for (std::size_t j = i; j < na_; ++j)
                pw_[packed_index(i, j, na_)] = i == j ? 0.5 * ctx_.w[i] * ctx_.w[i] : ctx_.w[i] * ctx_.w[j];
        rf_.resize(na_);
        rg_.resize(np_);
        sf_.resize(na_);
        sg_.resize(np_);
        sf1_.resize(na_);
        sg1_.resize(np_);
        one_.D_quadrature(0, Dq_[0]);
        sources(0, ctx_.ftau_r[0], sf_, sg_);
        if (!ctx_.f_edges.empty()) {
            pf_.assign(g.n_steps + 1, cplx{});
            pg_.assign(g.n_steps + 1, std::vector<cplx>(na_));
            qg_.resize(na_);
            qg1_.resize(na_);
            edge_sources(0, ctx_.ftau_r[0], qf_, qg_);
        } else {
            pg_.assign(g.n_steps + 1, {});
        }
    }

    void advance() override {
        if (step_ >= ctx_.grid.n_steps) throw Error("propagator advanced past the horizon");
        const std::size_t n = step_, n1 = n + 1;
        one_.advance(n);
        one_.D_quadrature(n1, Dq_[n1]);
        if (ctx_.delayed(n1)) beta(n1);
        const bool edge = ctx_.ftau_l[n1] != ctx_.ftau_r[n1];
        sources(n1, ctx_.ftau_l[n1], sf1_, sg1_);
        heun_line(F_->at(n), F_->at(n1), ctx_.params.gamma, sf_, &sf1_, ctx_.h);
        heun_line(G_->at(n), G_->at(n1), ctx_.params.gamma, sg_, &sg1_, ctx_.h);
        if (edge) {
            sources(n1, ctx_.ftau_r[n1], sf_, sg_);
        } else {
            std::swap(sf_, sf1_);
            std::swap(sg_, sg1_);
        }
        if (!ctx_.f_edges.empty()) {
            cplx qf1;
            edge_sources(n1, ctx_.ftau_l[n1], qf1, qg1_);
            pf_[n1] = heun_linear(pf_[n], ctx_.params.gamma, qf_, qf1, ctx_.h);
            heun_line(pg_[n], pg_[n1], ctx_.params.gamma, qg_, &qg1_, ctx_.h);
            if (edge) {
                edge_sources(n1, ctx_.ftau_r[n1], qf_, qg_);
            } else {
                qf_ = qf1;
                std::swap(qg_, qg1_);
            }
        }
        ++step_;
    }

    double population() const override {
        // Across a pulse edge e, F(t, e) and G(t, e, s) jump by
        // (f(e+) - f(e-)) times P_F(t) and P_G(t, s); |F|^2 and |G|^2 on the
        // edge lines are averaged over both limits.
        auto f = F_->at(step_);
        auto g = G_->at(step_);
        const auto& pg = pg_[step_];
        double edge = 0.0;
        for (const auto& e : ctx_.f_edges) {
            const cplx dl = e.left - ctx_.f_aux[e.node], dr = e.right - ctx_.f_aux[e.node];
            double line = 0.0;
            for (std::size_t s = 0; s < na_; ++s) {
                if (s == e.node) continue;
                const cplx v = g[packed_index(e.node, s, na_)];
                line += ctx_.w[s] * (0.5 * (std::norm(v + dl * pg[s]) + std::norm(v + dr * pg[s])) - std::norm(v));
            }
            const cplx v = f[e.node];
            line += 0.5 * (std::norm(v + dl * pf_[step_]) + std::norm(v + dr * pf_[step_])) - std::norm(v);
            edge += ctx_.w[e.node] * line;
        }
        return weighted_norm2(ctx_.w, f) + weighted_norm2(pw_, g) + edge;
    }

    std::string name() const override { return "three_photon"; }

    double work_per_step() const override {
        const double np = static_cast<double>(np_);
        return 3.0 * np * static_cast<double>(ctx_.grid.n_steps);
    }

private:
    cplx c(std::size_t n) const { return one_.c(n); }

    /// Weight of an impulse at step u seen from step t: interior impulses
    /// count fully, one landing exactly at t > 0 counts half (mean value).
    static double impulse_weight(std::size_t u, std::size_t t) {
        if (u > t) return 0.0;
        return (u < t || u == 0) ? 1.0 : 0.5;
    }

    /// Trapezoid weight of node v on [a, b] with spacing h.
    double trap(std::size_t v, std::size_t a, std::size_t b) const {
        if (v < a || v > b || a == b) return 0.0;
        return (v == a || v == b) ? 0.5 * ctx_.h : ctx_.h;
    }

    /// sum_i h_i c(t - u_i) q(u_i) over the impulses of r on |e, s_j>, seen
    /// from step t.
    template <class Q>
    cplx impulses_e(std::size_t j, std::size_t t, const Q& q) const {
        const std::size_t k2 = ctx_.k2;
        cplx acc{};
        if (j <= t) acc += impulse_weight(j, t) * ctx_.half_phase * c(j) * c(t - j) * q(j);
        if (j >= k2 && j - k2 <= t) {
            const std::size_t u = j - k2;
            acc -= impulse_weight(u, t) * std::conj(ctx_.half_phase) * c(u) * c(t - u) * q(u);
        }
        return acc;
    }

    /// Same for |g, s_i, s_j>.
    template <class Q>
    cplx impulses_g(std::size_t i, std::size_t j, std::size_t t, const Q& q) const {
        const std::size_t k2 = ctx_.k2;
        cplx acc{};
        auto one_side = [&](std::size_t a, std::size_t b) {
            if (a <= t) acc += impulse_weight(a, t) * ctx_.half_phase * Dq_[a][b] * c(t - a) * q(a);
            if (a >= k2 && a - k2 <= t) {
                const std::size_t u = a - k2;
                acc -= impulse_weight(u, t) * std::conj(ctx_.half_phase) * Dq_[u][b] * c(t - u) * q(u);
            }
        };
        one_side(i, j);
        one_side(j, i);
        return acc;
    }

    /// out[c] = sum_v K[v - a] * beta_c(v), v in [a, a + K.size()).
    void history_sum(const std::vector<cplx>& K, std::size_t a, std::vector<cplx>& oute,
                     std::vector<cplx>& outg) const {
        oute.assign(na_, cplx{});
        outg.assign(np_, cplx{});
        for (std::size_t v = 0; v < K.size(); ++v) {
            if (K[v] == cplx{}) continue;
            auto be = Be_->at(a + v);
            for (std::size_t j = 0; j < na_; ++j) oute[j] += K[v] * be[j];
        }
        parallel_for(np_, [&](std::size_t b, std::size_t e) {
            for (std::size_t v = 0; v < K.size(); ++v) {
                if (K[v] == cplx{}) continue;
                auto bg = Bg_->at(a + v);
                for (std::size_t p = b; p < e; ++p) outg[p] += K[v] * bg[p];
            }
        });
    }

    /// beta_c(t_n) = tau1(t_n) . w_c(t_n - tau) for every column c.
    void beta(std::size_t n) {
        const std::size_t k2 = ctx_.k2, m = n - k2;
        const cplx fb = ctx_.feedback_factor;
        const double s2 = 2.0 * ctx_.sqrt_gamma;
        // overlaps O(v) = tau1(t_n) . tau1(v)^+
        std::vector<cplx> O(m + 1);
        parallel_for(m + 1, [&](std::size_t b, std::size_t e) {
            for (std::size_t v = b; v < e; ++v)
                O[v] = c(n) * std::conj(c(v)) + weighted_cdot(ctx_.w, Dq_[v], Dq_[n]);
        });
        std::vector<cplx> K;
        if (m > k2) {
            K.resize(m - k2 + 1);
            for (std::size_t v = k2; v <= m; ++v) K[v - k2] = trap(v, k2, m) * c(m - v) * O[v];
        }
        history_sum(K, k2, tmp_e_, tmp_g_);
        const auto& dn = Dq_[n];
        const auto& dm = Dq_[m];
        auto q = [&](std::size_t u) { return O[u]; };
        auto be = Be_->at(n);
        for (std::size_t j = 0; j < na_; ++j)
            be[j] = dn[j] * c(m) + c(n) * dm[j] + s2 * impulses_e(j, m, q) - 2.0 * fb * tmp_e_[j];
        auto bg = Bg_->at(n);
        parallel_for(na_, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i)
                for (std::size_t j = i; j < na_; ++j) {
                    const std::size_t p = packed_index(i, j, na_);
                    bg[p] = dn[j] * dm[i] + dn[i] * dm[j] + s2 * impulses_g(i, j, m, q) - 2.0 * fb * tmp_g_[p];
                }
        });
    }

    /// Sources of P_F = dF(t, e)/df(e) and P_G(s) = dG(t, e, s)/df(e). Only
    /// the terms where row e enters with unit weight survive; the result does
    /// not depend on e.
    void edge_sources(std::size_t n, cplx ftau, cplx& qf, std::vector<cplx>& qg) const {
        const bool on = ctx_.delayed(n);
        const std::size_t m = on ? n - ctx_.k2 : 0;
        const cplx fb = ctx_.feedback_factor;
        const cplx drive = -std::sqrt(6.0 * ctx_.params.gamma) * ftau;
        const cplx rf = on ? fb * pf_[m] : cplx{};
        for (std::size_t s = 0; s < na_; ++s) qg[s] = (on ? fb * pg_[m][s] : cplx{}) + drive * ctx_.f_aux[s];
        const auto& dn = Dq_[n];
        const cplx dv = c(n) * rf + weighted_dot(ctx_.w, dn, qg);
        qf = rf - 2.0 * dv * std::conj(c(n));
        for (std::size_t s = 0; s < na_; ++s) qg[s] -= 2.0 * dv * std::conj(dn[s]);
    }

    /// rho_G(a, .) unpacked.
    void sheet_row(const std::vector<cplx>& g, std::size_t a, std::vector<cplx>& out) const {
        out.resize(na_);
        for (std::size_t s = 0; s < na_; ++s) out[s] = g[packed_index(a, s, na_)];
    }

    void sources(std::size_t n, cplx ftau, std::vector<cplx>& outf, std::vector<cplx>& outg) {
        const std::size_t k2 = ctx_.k2;
        const cplx fb = ctx_.feedback_factor;
        const double s2 = 2.0 * ctx_.sqrt_gamma;
        const bool on = ctx_.delayed(n);
        const std::size_t m = on ? n - k2 : 0;

        // rho3
        const cplx drive = -std::sqrt(6.0 * ctx_.params.gamma) * ftau;
        if (on) {
            auto f = F_->at(m);
            auto g = G_->at(m);
            for (std::size_t j = 0; j < na_; ++j) rf_[j] = fb * f[j];
            for (std::size_t p = 0; p < np_; ++p) rg_[p] = fb * g[p];
        } else {
            std::fill(rf_.begin(), rf_.end(), cplx{});
            std::fill(rg_.begin(), rg_.end(), cplx{});
        }
        if (drive != cplx{}) {
            for (std::size_t i = 0; i < na_; ++i)
                for (std::size_t j = i; j < na_; ++j)
                    rg_[packed_index(i, j, na_)] += drive * ctx_.f_aux[i] * ctx_.f_aux[j];
        }

        // v = T2 rho3 over S1
        const auto& dn = Dq_[n];
        cplx ve = weighted_dot(ctx_.w, dn, rf_);
        std::vector<cplx> vg(na_);
        parallel_for(na_, [&](std::size_t b, std::size_t e) {
            std::vector<cplx> row;
            for (std::size_t s = b; s < e; ++s) {
                sheet_row(rg_, s, row);
                vg[s] = c(n) * rf_[s] + weighted_dot(ctx_.w, dn, row);
            }
        });
        std::vector<cplx> coef(n + 1);
        parallel_for(n + 1, [&](std::size_t b, std::size_t e) {
            std::vector<cplx> row;
            for (std::size_t u = b; u < e; ++u) {
                cplx g{};
                if (n > 0) {
                    sheet_row(rg_, ctx_.grid.aux_early(u), row);
                    const cplx ke = c(u) * rf_[ctx_.grid.aux_early(u)] + weighted_dot(ctx_.w, Dq_[u], row);
                    sheet_row(rg_, ctx_.grid.aux_late(u), row);
                    const cplx kl = c(u) * rf_[ctx_.grid.aux_late(u)] + weighted_dot(ctx_.w, Dq_[u], row);
                    g += trap(u, 0, n) * s2 * (ctx_.half_phase * ke - std::conj(ctx_.half_phase) * kl);
                }
                if (on && u >= k2 && n > k2) {
                    const cplx br = weighted_dot(ctx_.w, Be_->at(u), rf_) + weighted_dot(pw_, Bg_->at(u), rg_);
                    g -= trap(u, k2, n) * 2.0 * fb * br;
                }
                coef[u] = c(n - u) * g;
            }
        });
        for (std::size_t u = 0; u <= n; ++u) {
            if (coef[u] == cplx{}) continue;
            ve += coef[u] * std::conj(c(u));
            const auto& du = Dq_[u];
            for (std::size_t s = 0; s < na_; ++s) vg[s] += coef[u] * std::conj(du[s]);
        }

        // z = T2^+ v, i.e. conj(a . w_c) with the row a = conj(v)
        std::vector<cplx> alpha(n + 1);
        parallel_for(n + 1, [&](std::size_t b, std::size_t e) {
            for (std::size_t u = b; u < e; ++u)
                alpha[u] = std::conj(c(u) * ve + weighted_dot(ctx_.w, Dq_[u], vg));
        });
        std::vector<cplx> K;
        if (on && n > k2) {
            K.resize(n - k2 + 1);
            for (std::size_t v = k2; v <= n; ++v) K[v - k2] = trap(v, k2, n) * c(n - v) * alpha[v];
        }
        history_sum(K, k2, tmp_e_, tmp_g_);
        auto q = [&](std::size_t u) { return alpha[u]; };
        const cplx cve = std::conj(ve);
        for (std::size_t j = 0; j < na_; ++j) {
            const cplx aw = std::conj(vg[j]) * c(n) + cve * dn[j] + s2 * impulses_e(j, n, q) - 2.0 * fb * tmp_e_[j];
            outf[j] = rf_[j] - 2.0 * std::conj(aw);
        }
        parallel_for(na_, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i)
                for (std::size_t j = i; j < na_; ++j) {
                    const std::size_t p = packed_index(i, j, na_);
                    const cplx aw = std::conj(vg[j]) * dn[i] + std::conj(vg[i]) * dn[j] +
                                    s2 * impulses_g(i, j, n, q) - 2.0 * fb * tmp_g_[p];
                    outg[p] = rg_[p] - 2.0 * std::conj(aw);
                }
        });
    }

    Context ctx_;
    OneExcitation one_;
    std::size_t na_, np_;
    Family* F_;
    Family* G_;
    Family* Be_;
    Family* Bg_;
    std::vector<std::vector<cplx>> Dq_;
    std::vector<double> pw_;
    std::vector<cplx> rf_, rg_, sf_, sg_, sf1_, sg1_, tmp_e_, tmp_g_;
    std::vector<cplx> pf_;
    std::vector<std::vector<cplx>> pg_;
    cplx qf_{};
    std::vector<cplx> qg_, qg1_;
};

}  // namespace

std::unique_ptr<Propagator> make_three_photon(const SystemParams& p, const Pulse& pulse, const TimeGrid& g) {
    return std::make_unique<ThreePhoton>(p, pulse, g);
}

}  // namespace wgfb::detail
