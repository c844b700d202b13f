#include <algorithm>
#include <array>
#include <cmath>
#include <tuple>

#include "blocks.hpp"

namespace wgfb {

namespace {

// Closed recursion without delayed terms: for k = 1..n
//   dE_k/dt = -2 G E_k - sqrt(k G) [conj(f_tau) y_k + c.c.]
//   dy_k/dt = -G y_k - sqrt(k G) f_tau (1 - 2 E_{k-1}),   E_0 = 0,
// with E_k = <g,k|E|g,k> and y_k = <g,k-1|s-|g,k>. |e,0> decays as e^{-2Gt}.
class Markov final : public Propagator {
public:
    Markov(const SystemParams& p, const Pulse& pulse, const TimeGrid& g)
        : Propagator(make_store(p)), p_(p), g_(g) {
        ftau_l_.resize(g.n_steps + 1);
        ftau_r_.resize(g.n_steps + 1);
        for (std::size_t n = 0; n <= g.n_steps; ++n)
            std::tie(ftau_l_[n], ftau_r_[n]) = evaluate_ftau_limits(pulse, g.time(n), p.tau, p.phi);
        if (p.n_photons == 0) E_[1] = &store_.get(detail::label::pop_e0);
        for (int k = 1; k <= p.n_photons; ++k) {
            E_[k] = &store_.get(pop_label(k));
            y_[k] = &store_.get(coh_label(k));
        }
    }

    void advance() override {
        if (step_ >= g_.n_steps) throw Error("propagator advanced past the horizon");
        const double h = g_.dt;
        const int n = p_.n_photons;
        if (n == 0) {
            const double lh = 2.0 * p_.gamma * h;
            E_[1]->scalar(step_ + 1) = (1.0 - lh + 0.5 * lh * lh) * E_[1]->scalar(step_).real();
            ++step_;
            return;
        }
        State s0{}, k1{}, s1{}, k2{};
        for (int k = 1; k <= n; ++k) {
            s0.E[k] = E_[k]->scalar(step_).real();
            s0.y[k] = y_[k]->scalar(step_);
        }
        rhs(s0, ftau_r_[step_], k1);
        for (int k = 1; k <= n; ++k) {
            s1.E[k] = s0.E[k] + h * k1.E[k];
            s1.y[k] = s0.y[k] + h * k1.y[k];
        }
        rhs(s1, ftau_l_[step_ + 1], k2);
        for (int k = 1; k <= n; ++k) {
            E_[k]->scalar(step_ + 1) = s0.E[k] + 0.5 * h * (k1.E[k] + k2.E[k]);
            y_[k]->scalar(step_ + 1) = s0.y[k] + 0.5 * h * (k1.y[k] + k2.y[k]);
        }
        ++step_;
    }

    double population() const override { return E_[std::max(p_.n_photons, 1)]->scalar(step_).real(); }
    std::string name() const override { return "markov"; }
    double work_per_step() const override { return static_cast<double>(std::max(p_.n_photons, 1)); }

private:
    struct State {
        std::array<double, 4> E{};
        std::array<cplx, 4> y{};
    };

    static std::string pop_label(int k) { return "<g," + std::to_string(k) + "|E|g," + std::to_string(k) + ">"; }
    static std::string coh_label(int k) {
        return "<g," + std::to_string(k - 1) + "|s-|g," + std::to_string(k) + ">";
    }

    static ElementStore make_store(const SystemParams& p) {
        p.validate();
        ElementStore s;
        if (p.n_photons == 0) {
            s.add(detail::label::pop_e0, 0, 1, 2).scalar(0) = 1.0;
            return s;
        }
        for (int k = 1; k <= p.n_photons; ++k) {
            s.add(pop_label(k), 0, 1, 2);
            s.add(coh_label(k), 0, 1, 2);
        }
        return s;
    }

    void rhs(const State& s, cplx ftau, State& out) const {
        const double G = p_.gamma;
        for (int k = 1; k <= p_.n_photons; ++k) {
            const double r = std::sqrt(k * G);
            const double prev = k > 1 ? s.E[k - 1] : 0.0;
            out.E[k] = -2.0 * G * s.E[k] - 2.0 * r * (std::conj(ftau) * s.y[k]).real();
            out.y[k] = -G * s.y[k] - r * ftau * (1.0 - 2.0 * prev);
        }
    }

    SystemParams p_;
    TimeGrid g_;
    std::vector<cplx> ftau_l_, ftau_r_;  // one-sided limits at grid times
    std::array<Family*, 4> E_{};
    std::array<Family*, 4> y_{};
};

}  // namespace

std::unique_ptr<Propagator> make_markov(const SystemParams& params, const Pulse& pulse, const TimeGrid& grid) {
    return std::make_unique<Markov>(params, pulse, grid);
}

}  // namespace wgfb
