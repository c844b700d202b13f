#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "wgfb/types.hpp"

namespace wgfb {

// Pairwise (cascade) summation. The tree shape depends only on the input
// length, so results do not depend on thread count or call site.
double pairwise_sum(std::span<const double> v);
cplx pairwise_sum(std::span<const cplx> v);

/// sum_i w_i a_i b_i with pairwise reduction.
cplx weighted_dot(std::span<const double> w, std::span<const cplx> a, std::span<const cplx> b);
/// sum_i w_i conj(a_i) b_i.
cplx weighted_cdot(std::span<const double> w, std::span<const cplx> a, std::span<const cplx> b);
/// sum_i w_i |a_i|^2.
double weighted_norm2(std::span<const double> w, std::span<const cplx> a);

/// Worker count used by parallel_for. Defaults to 1.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Calls body(begin, end) on contiguous static chunks of [0, n). Each
/// index is owned by exactly one worker, so any per-index result is
/// bit-identical for every thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace wgfb
