#include <cmath>
#include <tuple>

#include "blocks.hpp"

namespace wgfb::detail {

Context::Context(const SystemParams& p, const Pulse& pulse, const TimeGrid& g)
    : params(p),
      grid(g),
      h(g.dt),
      k2(g.delay_steps()),
      sqrt_gamma(std::sqrt(p.gamma)),
      feedback_factor(p.gamma * std::polar(1.0, p.phi)),
      half_phase(std::polar(1.0, 0.5 * p.phi)),
      w(quad_weights(g)) {
    ftau_l.resize(g.n_steps + 1);
    ftau_r.resize(g.n_steps + 1);
    for (std::size_t n = 0; n <= g.n_steps; ++n)
        std::tie(ftau_l[n], ftau_r[n]) = evaluate_ftau_limits(pulse, g.time(n), p.tau, p.phi);
    f_aux.resize(g.n_aux());
    for (std::size_t j = 0; j < f_aux.size(); ++j) {
        const double s = g.aux_time(j);
        f_aux[j] = pulse.midpoint(s);
        const cplx l = pulse.left_limit(s), r = pulse.right_limit(s);
        if (std::abs(l - r) > 1e-14 * std::abs(pulse.amplitude())) f_edges.push_back({j, l, r});
    }
}

double half_sheet_norm2(std::span<const double> w, std::span<const cplx> sheet, std::size_t n) {
    // sum over the full square = diagonal + 2 * strict upper triangle; times 1/2
    std::vector<double> rows(n);
    parallel_for(n, [&](std::size_t b, std::size_t e) {
        std::vector<double> tmp;
        for (std::size_t i = b; i < e; ++i) {
            tmp.assign(n - i, 0.0);
            const std::size_t base = packed_index(i, i, n);
            tmp[0] = 0.5 * w[i] * w[i] * std::norm(sheet[base]);
            for (std::size_t j = i + 1; j < n; ++j) tmp[j - i] = w[i] * w[j] * std::norm(sheet[base + j - i]);
            rows[i] = pairwise_sum(std::span<const double>(tmp));
        }
    });
    return pairwise_sum(std::span<const double>(rows));
}

OneExcitation::OneExcitation(const Context& ctx, ElementStore& store, double lambda)
    : ctx_(ctx), lambda_(lambda) {
    c_ = store.contains(label::vac) ? &store.get(label::vac) : nullptr;
    x_ = store.contains(label::one) ? &store.get(label::one) : nullptr;
    D_ = store.contains(label::line0) ? &store.get(label::line0) : nullptr;
    if (D_) {
        sd_.assign(D_->length(), cplx{});
        sd_next_.assign(D_->length(), cplx{});
    }
    if (x_) sx_ = -ctx_.sqrt_gamma * ctx_.ftau_r[0];
    // delayed terms at t = 0 are active only for a zero delay, which is
    // rejected with feedback on
}

void OneExcitation::advance(std::size_t n) {
    const std::size_t n1 = n + 1;
    const double h = ctx_.h;
    const cplx fb = ctx_.feedback_factor;
    const bool on = ctx_.delayed(n1), on_left = ctx_.delayed_left(n1);
    const std::size_t m = on ? n1 - ctx_.k2 : 0;

    if (c_) {
        const cplx right = on ? fb * c_->scalar(m) : cplx{};
        const cplx left = on_left ? right : cplx{};
        c_->scalar(n1) = heun_linear(c_->scalar(n), lambda_, sc_, left, h);
        sc_ = right;
    }
    if (x_) {
        const cplx del = on ? fb * x_->scalar(m) : cplx{};
        const cplx left = -ctx_.sqrt_gamma * ctx_.ftau_l[n1] + (on_left ? del : cplx{});
        x_->scalar(n1) = heun_linear(x_->scalar(n), lambda_, sx_, left, h);
        sx_ = -ctx_.sqrt_gamma * ctx_.ftau_r[n1] + del;
    }
    if (D_) {
        if (on) {
            auto old = D_->at(m);
            for (std::size_t j = 0; j < sd_next_.size(); ++j) sd_next_[j] = fb * old[j];
        }
        auto nxt = D_->at(n1);
        if (on_left) {
            // the delayed line jumped at this step's end on two nodes
            const std::size_t je = ctx_.grid.aux_early(m), jl = ctx_.grid.aux_late(m);
            const cplx se = sd_next_[je], sl = sd_next_[jl];
            sd_next_[je] -= fb * jump_early();
            sd_next_[jl] -= fb * jump_late();
            heun_line(D_->at(n), nxt, lambda_, sd_, &sd_next_, h);
            sd_next_[je] = se;
            sd_next_[jl] = sl;
        } else {
            heun_line(D_->at(n), nxt, lambda_, sd_, nullptr, h);
        }
        nxt[ctx_.grid.aux_early(n1)] += jump_early();
        nxt[ctx_.grid.aux_late(n1)] += jump_late();
        std::swap(sd_, sd_next_);
    }
}

void OneExcitation::D_quadrature(std::size_t n, std::span<cplx> out) const {
    auto d = D_->at(n);
    std::copy(d.begin(), d.end(), out.begin());
    out[ctx_.grid.aux_early(n)] -= 0.5 * jump_early();
    out[ctx_.grid.aux_late(n)] -= 0.5 * jump_late();
    out[static_node()] -= 0.5 * static_jump(n);
}

TwoExcitation::TwoExcitation(const Context& ctx, ElementStore& store, const OneExcitation& one, double lambda,
                             Contraction mode)
    : ctx_(ctx), one_(one), lambda_(lambda), mode_(mode) {
    A_ = &store.get(label::two_e);
    B_ = &store.get(label::two_g);
    const std::size_t na = B_->length();
    sb_.resize(na);
    sb_next_.resize(na);
    dq_.resize(na);
    sources(0, sa_, sb_);
}

cplx TwoExcitation::static_jump(std::size_t n) const {
    return std::conj(one_.jump_late()) * A_->scalar(n);
}

cplx TwoExcitation::static_fix(std::size_t n, std::size_t m) const {
    const std::size_t s = one_.static_node();
    return two_sided_product_fix(ctx_.w[s], dq_[s], one_.static_jump(n), static_jump(m));
}

cplx TwoExcitation::beta(std::size_t n) {
    one_.D_quadrature(n, dq_);
    const std::size_t m = n - ctx_.k2;
    return one_.c(n) * A_->scalar(m) + weighted_dot(ctx_.w, dq_, B_->at(m)) + static_fix(n, m);
}

cplx TwoExcitation::sources(std::size_t n, cplx& sa, std::vector<cplx>& sb) {
    const bool del = ctx_.delayed(n);
    const cplx fb = ctx_.feedback_factor;
    const cplx drive = std::sqrt(2.0 * ctx_.params.gamma) * ctx_.ftau_r[n];
    const cplx c = one_.c(n);
    auto D = one_.D(n);
    const std::size_t na = sb.size();

    if (mode_ == Contraction::factored || !del) {
        const cplx X = (del ? fb * beta(n) : cplx{}) - drive * one_.x(n);
        sa = (del ? fb * A_->scalar(n - ctx_.k2) : cplx{}) - 2.0 * std::conj(c) * X;
        const cplx* bd = del ? B_->at(n - ctx_.k2).data() : nullptr;
        for (std::size_t j = 0; j < na; ++j)
            sb[j] = (bd ? fb * bd[j] : cplx{}) - drive * ctx_.f_aux[j] - 2.0 * std::conj(D[j]) * X;
        return X;
    }

    // Direct route: every t' evaluates its own kernel conj(D(t,t')) D(t,t1)
    // against B(t - tau, t1).
    const std::size_t m = n - ctx_.k2;
    one_.D_quadrature(n, dq_);
    auto bdel = B_->at(m);
    const cplx adel = A_->scalar(m);
    const cplx x = one_.x(n);
    const cplx X = fb * (c * adel + weighted_dot(ctx_.w, dq_, bdel) + static_fix(n, m)) - drive * x;
    sa = fb * adel - 2.0 * std::conj(c) * X;
    const std::size_t s = one_.static_node();
    const cplx bjump = static_jump(m), djump = one_.static_jump(n);
    parallel_for(na, [&](std::size_t b, std::size_t e) {
        std::vector<cplx> kern(na);
        for (std::size_t j = b; j < e; ++j) {
            const cplx dj = std::conj(D[j]);
            for (std::size_t i = 0; i < na; ++i) kern[i] = dj * dq_[i];
            const cplx integral = weighted_dot(ctx_.w, kern, bdel) +
                                  two_sided_product_fix(ctx_.w[s], kern[s], dj * djump, bjump);
            const cplx Xj = fb * (dj * c * adel + integral) - drive * dj * x;
            sb[j] = fb * bdel[j] - drive * ctx_.f_aux[j] - 2.0 * Xj;
        }
    });
    return X;
}

void TwoExcitation::advance(std::size_t n) {
    const std::size_t n1 = n + 1;
    const double h = ctx_.h;
    cplx sa{};
    const cplx X = sources(n1, sa, sb_next_);

    // Left limits at the step end. Delayed A and B vanish at t = 0, so the
    // switch-on at t = tau needs no correction; f_tau edges and the D
    // impulses do.
    const cplx dl = ctx_.ftau_l[n1] - ctx_.ftau_r[n1];
    const cplx r2 = std::sqrt(2.0 * ctx_.params.gamma);
    const cplx XL = X - r2 * dl * one_.x(n1);
    const cplx dX = XL - X;
    const cplx saL = sa - 2.0 * std::conj(one_.c(n1)) * dX;
    A_->scalar(n1) = heun_linear(A_->scalar(n), lambda_, sa_, saL, h);

    const std::size_t je = ctx_.grid.aux_early(n1), jl = ctx_.grid.aux_late(n1);
    const cplx se = sb_next_[je], sl = sb_next_[jl];
    std::vector<cplx> saved;
    if (dX != cplx{}) {
        saved = sb_next_;
        auto D = one_.D(n1);
        for (std::size_t j = 0; j < sb_next_.size(); ++j)
            sb_next_[j] += -r2 * dl * ctx_.f_aux[j] - 2.0 * std::conj(D[j]) * dX;
    }
    sb_next_[je] += 2.0 * std::conj(one_.jump_early()) * XL;
    sb_next_[jl] += 2.0 * std::conj(one_.jump_late()) * XL;
    heun_line(B_->at(n), B_->at(n1), lambda_, sb_, &sb_next_, h);
    if (!saved.empty()) {
        sb_next_.swap(saved);
    } else {
        sb_next_[je] = se;
        sb_next_[jl] = sl;
    }
    std::swap(sb_, sb_next_);
    sa_ = sa;
}

double TwoExcitation::population(std::size_t n) const {
    // B(t,t') = sqrt(2) f(t') x(t) + (continuous in t'); where f jumps the
    // node value is the mean of both limits, so |B|^2 is averaged over them.
    auto b = B_->at(n);
    double edge = 0.0;
    const cplx x2 = std::sqrt(2.0) * one_.x(n);
    for (const auto& e : ctx_.f_edges) {
        const cplx smooth = b[e.node] - x2 * ctx_.f_aux[e.node];
        const double avg = 0.5 * (std::norm(smooth + x2 * e.left) + std::norm(smooth + x2 * e.right));
        edge += ctx_.w[e.node] * (avg - std::norm(b[e.node]));
    }
    const std::size_t s = one_.static_node();
    edge += two_sided_norm_fix(ctx_.w[s], b[s], static_jump(n));
    return std::norm(A_->scalar(n)) + weighted_norm2(ctx_.w, b) + edge;
}

namespace {

class Standard final : public Propagator {
public:
    Standard(const SystemParams& p, const Pulse& pulse, const TimeGrid& g, const HierarchyOptions& o)
        : Propagator(init_elements(p, g, o)),
          ctx_(p, pulse, g),
          one_(ctx_, store_, p.gamma),
          mode_(o.contraction) {
        if (p.n_photons == 2) two_ = std::make_unique<TwoExcitation>(ctx_, store_, one_, p.gamma, o.contraction);
    }

    void advance() override {
        if (step_ >= ctx_.grid.n_steps) throw Error("propagator advanced past the horizon");
        one_.advance(step_);
        if (two_) two_->advance(step_);
        ++step_;
    }

    double population() const override {
        switch (ctx_.params.n_photons) {
        case 0: return std::norm(one_.c(step_));
        case 1: return std::norm(one_.x(step_));
        default: return two_->population(step_);
        }
    }

    std::string name() const override {
        static const char* names[] = {"vacuum_decay", "single_photon", "two_photon"};
        std::string s = names[ctx_.params.n_photons];
        if (two_ && mode_ == Contraction::direct) s += "_direct";
        return s;
    }

    double work_per_step() const override {
        const double na = static_cast<double>(ctx_.grid.n_aux());
        if (ctx_.params.n_photons < 2) return 1.0;
        return mode_ == Contraction::direct ? na * na : 4.0 * na;
    }

private:
    Context ctx_;
    OneExcitation one_;
    Contraction mode_;
    std::unique_ptr<TwoExcitation> two_;
};

}  // namespace

std::unique_ptr<Propagator> make_standard(const SystemParams& p, const Pulse& pulse, const TimeGrid& g,
                                          const HierarchyOptions& o) {
    return std::make_unique<Standard>(p, pulse, g, o);
}

}  // namespace wgfb::detail
