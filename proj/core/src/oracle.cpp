#include "wgfb/oracle.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include "wgfb/numeric.hpp"

namespace wgfb::oracle {

double ww_decay(double gamma, double t) {
    if (t < 0.0) throw Error("ww_decay: t must be non-negative");
    return std::exp(-2.0 * gamma * t);
}

cplx vacuum_feedback_exact(double gamma, double tau, double phi, double t) {
    if (t < 0.0) throw Error("vacuum_feedback_exact: t must be non-negative");
    if (tau == 0.0) return std::exp(gamma * (std::polar(1.0, phi) - 1.0) * t);
    const auto kmax = static_cast<std::size_t>(std::floor(t / tau));
    if (kmax > 50) throw Error("vacuum_feedback_exact: more than 50 delay intervals; use the residue limit");
    cplx sum = 0.0;
    for (std::size_t k = 0; k <= kmax; ++k) {
        const double u = t - static_cast<double>(k) * tau;
        const double kd = static_cast<double>(k);
        const double logmag = (k == 0 ? 0.0 : kd * std::log(gamma * u)) - std::lgamma(kd + 1.0) - gamma * u;
        if (k > 0 && u <= 0.0) continue;
        sum += std::polar(std::exp(logmag), kd * phi);
    }
    return sum;
}

double bound_state_population(double gamma, double tau) {
    const double r = 1.0 + gamma * tau;
    return 1.0 / (r * r);
}

namespace {

// Local space: emitter (g,e) x two bins with up to three photons each.
constexpr int kMaxOcc = 3;
constexpr int kLocal = 2 * (kMaxOcc + 1) * (kMaxOcc + 1);
int local_index(int e, int na, int nb) { return (e * (kMaxOcc + 1) + na) * (kMaxOcc + 1) + nb; }

using LocalMatrix = Eigen::Matrix<cplx, kLocal, kLocal>;

LocalMatrix exchange_unitary(double theta, double phi) {
    LocalMatrix gen = LocalMatrix::Zero();
    const cplx pa = std::polar(1.0, 0.5 * phi), pb = -std::polar(1.0, -0.5 * phi);
    // gen = theta (L^dag s- - s+ L), L = pa b_a + pb b_b
    for (int na = 0; na <= kMaxOcc; ++na) {
        for (int nb = 0; nb <= kMaxOcc; ++nb) {
            const int e = local_index(1, na, nb);
            // L^dag s- |e,na,nb> -> |g,na+1,nb>, |g,na,nb+1>
            if (na < kMaxOcc) gen(local_index(0, na + 1, nb), e) += theta * std::conj(pa) * std::sqrt(na + 1.0);
            if (nb < kMaxOcc) gen(local_index(0, na, nb + 1), e) += theta * std::conj(pb) * std::sqrt(nb + 1.0);
            // -s+ L |g,na,nb>
            const int g = local_index(0, na, nb);
            if (na > 0) gen(local_index(1, na - 1, nb), g) -= theta * pa * std::sqrt(double(na));
            if (nb > 0) gen(local_index(1, na, nb - 1), g) -= theta * pb * std::sqrt(double(nb));
        }
    }
    const LocalMatrix H = cplx(0.0, 1.0) * gen;  // Hermitian
    Eigen::SelfAdjointEigenSolver<LocalMatrix> es(H);
    const auto& V = es.eigenvectors();
    Eigen::Matrix<cplx, kLocal, 1> ph;
    for (int i = 0; i < kLocal; ++i) ph(i) = std::polar(1.0, -es.eigenvalues()(i));
    return V * ph.asDiagonal() * V.adjoint();
}

template <std::size_t M>
using Block = std::array<std::array<cplx, M>, M>;

template <std::size_t M>
Block<M> extract(const LocalMatrix& U, const std::array<int, M>& idx) {
    Block<M> b{};
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < M; ++j) b[i][j] = U(idx[i], idx[j]);
    return b;
}

template <std::size_t M>
void apply_block(const Block<M>& u, const std::array<cplx*, M>& amp) {
    std::array<cplx, M> in{};
    for (std::size_t i = 0; i < M; ++i) in[i] = *amp[i];
    for (std::size_t i = 0; i < M; ++i) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < M; ++j) s += u[i][j] * in[j];
        *amp[i] = s;
    }
}

// Two-photon basis |j,k>, j <= k, enumerated row by row.
std::size_t pair_index(std::size_t j, std::size_t k, std::size_t n) {
    if (j > k) std::swap(j, k);
    return j * n - j * (j - 1) / 2 + (k - j);
}
std::size_t pair_count(std::size_t n) { return n * (n + 1) / 2; }

// Three-photon basis |i,j,k>, i <= j <= k.
class TripleIndex {
public:
    explicit TripleIndex(std::size_t n) : n_(n), off_(n + 1, 0) {
        for (std::size_t i = 0; i < n; ++i) off_[i + 1] = off_[i] + pair_count(n - i);
    }
    std::size_t operator()(std::size_t i, std::size_t j, std::size_t k) const {
        if (i > j) std::swap(i, j);
        if (j > k) std::swap(j, k);
        if (i > j) std::swap(i, j);
        return off_[i] + pair_index(j - i, k - i, n_ - i);
    }
    std::size_t size() const { return off_[n_]; }

private:
    std::size_t n_;
    std::vector<std::size_t> off_;
};

struct Layout {
    double dt;
    std::size_t steps, offset, bins;
};

Layout layout(const SystemParams& p, const TimeBinOptions& o) {
    if (!(o.horizon > 0.0)) throw Error("oracle: horizon must be positive");
    if (o.n_bins < 4) throw Error("oracle: need at least 4 bins");
    Layout l{};
    if (!p.feedback) {
        if (p.initial != InitialState::excited_vacuum)
            throw Error("oracle: without a mirror only the excited_vacuum state is modelled");
        l.steps = o.n_bins / 2;
        l.dt = o.horizon / static_cast<double>(l.steps);
        l.offset = l.steps;  // returning bins arrive after the horizon
    } else {
        if (!(p.tau > 0.0)) throw Error("oracle: tau must be positive with a mirror");
        const double d0 = (o.horizon + p.tau) / static_cast<double>(o.n_bins);
        const auto half = std::max<long long>(1, std::llround(0.5 * p.tau / d0));
        l.offset = 2 * static_cast<std::size_t>(half);
        l.dt = p.tau / static_cast<double>(l.offset);
        l.steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(o.horizon / l.dt)));
    }
    l.bins = l.steps + l.offset;
    return l;
}

}  // namespace

Trajectory brute_force_timebin(const SystemParams& p, const Pulse& pulse, const TimeBinOptions& o) {
    p.validate();
    if (p.gamma_pd > 0.0) throw Error("oracle: pure dephasing is not modelled");
    const Layout l = layout(p, o);
    const int N = p.initial == InitialState::excited_vacuum ? 1 : p.n_photons;
    const std::size_t nb = l.bins;
    const TripleIndex triple(N == 3 ? nb : 0);
    const std::size_t gsize = N == 1 ? nb : N == 2 ? pair_count(nb) : triple.size();
    const std::size_t esize = N == 1 ? 1 : N == 2 ? nb : pair_count(nb);
    const std::size_t dim = gsize + esize;
    if (dim > 10'000'000) {
        std::ostringstream os;
        os << "oracle: state dimension " << dim << " exceeds 1e7; reduce the bin count (dimension ~ bins^n/n! for "
           << "n photons)";
        throw Error(os.str());
    }

    // Amplitudes in the occupation basis: photons-only sector g[] and
    // emitter-excited sector e[].
    std::vector<cplx> g(gsize), e(esize);
    std::vector<cplx> phi(nb);
    const double tau_bins = static_cast<double>(l.offset) * l.dt;
    for (std::size_t j = 0; j < nb; ++j)
        phi[j] = pulse(-0.5 * tau_bins + (static_cast<double>(j) + 0.5) * l.dt) * std::sqrt(l.dt);
    if (p.initial == InitialState::excited_vacuum) {
        e[0] = 1.0;
    } else if (N == 1) {
        g = phi;
    } else if (N == 2) {
        const double r2 = std::sqrt(2.0);
        for (std::size_t j = 0; j < nb; ++j) {
            g[pair_index(j, j, nb)] = phi[j] * phi[j];
            for (std::size_t k = j + 1; k < nb; ++k) g[pair_index(j, k, nb)] = r2 * phi[j] * phi[k];
        }
    } else {
        // (a^dag)^3 / sqrt(6) on occupation states |3>, |2,1>, |1,1,1>
        const double r3 = std::sqrt(3.0), r6 = std::sqrt(6.0);
        for (std::size_t i = 0; i < nb; ++i)
            for (std::size_t j = i; j < nb; ++j)
                for (std::size_t k = j; k < nb; ++k) {
                    const double m = i == k ? 1.0 : (i == j || j == k) ? r3 : r6;
                    g[triple(i, j, k)] = m * phi[i] * phi[j] * phi[k];
                }
    }
    auto norm2 = [&] {
        std::vector<double> parts(2);
        std::vector<double> tmp(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) tmp[i] = std::norm(g[i]);
        parts[0] = pairwise_sum(std::span<const double>(tmp));
        tmp.resize(e.size());
        for (std::size_t i = 0; i < e.size(); ++i) tmp[i] = std::norm(e[i]);
        parts[1] = pairwise_sum(std::span<const double>(tmp));
        return parts[0] + parts[1];
    };
    const double n0 = norm2();
    if (!(n0 > 0.0)) throw Error("oracle: pulse has no weight on the bin grid");
    const double scale = 1.0 / std::sqrt(n0);
    for (auto& v : g) v *= scale;
    for (auto& v : e) v *= scale;

    const LocalMatrix U = exchange_unitary(std::sqrt(p.gamma * l.dt), p.phi);
    const auto u1 = extract<3>(U, {local_index(0, 1, 0), local_index(0, 0, 1), local_index(1, 0, 0)});
    const auto u2 = extract<5>(U, {local_index(0, 2, 0), local_index(0, 1, 1), local_index(0, 0, 2),
                                   local_index(1, 1, 0), local_index(1, 0, 1)});
    const auto u3 = extract<7>(U, {local_index(0, 3, 0), local_index(0, 2, 1), local_index(0, 1, 2),
                                   local_index(0, 0, 3), local_index(1, 2, 0), local_index(1, 1, 1),
                                   local_index(1, 0, 2)});

    auto excited = [&] {
        if (N == 1) return std::norm(e[0]);
        std::vector<double> tmp(e.size());
        for (std::size_t i = 0; i < e.size(); ++i) tmp[i] = std::norm(e[i]);
        return pairwise_sum(std::span<const double>(tmp));
    };

    Trajectory tr;
    tr.params = p;
    tr.pulse = pulse.spec();
    tr.source = Source::oracle;
    tr.integrator = "timebin";
    tr.grid.dt = l.dt;
    tr.grid.requested_dt = l.dt;
    tr.grid.n_steps = l.steps;
    tr.grid.k_half_tau = p.feedback ? l.offset / 2 : 0;
    tr.times.push_back(0.0);
    tr.population.push_back(excited());

    for (std::size_t k = 0; k < l.steps; ++k) {
        const std::size_t a = k, b = k + l.offset;
        if (N == 1) {
            apply_block<3>(u1, {&g[a], &g[b], &e[0]});
        } else if (N == 3) {
            apply_block<7>(u3, {&g[triple(a, a, a)], &g[triple(a, a, b)], &g[triple(a, b, b)], &g[triple(b, b, b)],
                                &e[pair_index(a, a, nb)], &e[pair_index(a, b, nb)], &e[pair_index(b, b, nb)]});
            parallel_for(nb, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t x = lo; x < hi; ++x) {
                    if (x == a || x == b) continue;
                    apply_block<5>(u2, {&g[triple(a, a, x)], &g[triple(a, b, x)], &g[triple(b, b, x)],
                                        &e[pair_index(a, x, nb)], &e[pair_index(b, x, nb)]});
                    for (std::size_t y = x; y < nb; ++y) {
                        if (y == a || y == b) continue;
                        apply_block<3>(u1, {&g[triple(a, x, y)], &g[triple(b, x, y)], &e[pair_index(x, y, nb)]});
                    }
                }
            });
        } else {
            apply_block<5>(u2, {&g[pair_index(a, a, nb)], &g[pair_index(a, b, nb)], &g[pair_index(b, b, nb)], &e[a],
                          &e[b]});
            parallel_for(nb, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t r = lo; r < hi; ++r) {
                    if (r == a || r == b) continue;
                    apply_block<3>(u1, {&g[pair_index(a, r, nb)], &g[pair_index(b, r, nb)], &e[r]});
                }
            });
        }
        const double nrm = norm2();
        if (std::abs(nrm - 1.0) > o.norm_tolerance) {
            std::ostringstream os;
            os << "oracle: norm drifted to " << nrm << " at step " << k + 1;
            throw Error(os.str());
        }
        tr.times.push_back(static_cast<double>(k + 1) * l.dt);
        tr.population.push_back(excited());
    }
    return tr;
}

}  // namespace wgfb::oracle
