#include <cassert>

#include "wgfb/numeric.hpp"

namespace wgfb {

namespace {

constexpr std::size_t kBlock = 32;

template <class T, class Term>
T cascade(std::size_t lo, std::size_t hi, const Term& term) {
    if (hi - lo <= kBlock) {
        T acc{};
        for (std::size_t i = lo; i < hi; ++i) acc += term(i);
        return acc;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return cascade<T>(lo, mid, term) + cascade<T>(mid, hi, term);
}

}  // namespace

double pairwise_sum(std::span<const double> v) {
    return cascade<double>(0, v.size(), [&](std::size_t i) { return v[i]; });
}

cplx pairwise_sum(std::span<const cplx> v) {
    return cascade<cplx>(0, v.size(), [&](std::size_t i) { return v[i]; });
}

cplx weighted_dot(std::span<const double> w, std::span<const cplx> a, std::span<const cplx> b) {
    assert(w.size() == a.size() && a.size() == b.size());
    return cascade<cplx>(0, w.size(), [&](std::size_t i) { return w[i] * a[i] * b[i]; });
}

cplx weighted_cdot(std::span<const double> w, std::span<const cplx> a, std::span<const cplx> b) {
    assert(w.size() == a.size() && a.size() == b.size());
    return cascade<cplx>(0, w.size(), [&](std::size_t i) { return w[i] * std::conj(a[i]) * b[i]; });
}

double weighted_norm2(std::span<const double> w, std::span<const cplx> a) {
    assert(w.size() == a.size());
    return cascade<double>(0, w.size(), [&](std::size_t i) { return w[i] * std::norm(a[i]); });
}

}  // namespace wgfb
