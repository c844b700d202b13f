#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

#include "wgfb/numeric.hpp"

namespace wgfb {

namespace {
std::atomic<unsigned> g_threads{1};
// Nested calls from inside a worker run serially.
thread_local bool t_in_worker = false;

struct WorkerScope {
    bool saved = t_in_worker;
    WorkerScope() { t_in_worker = true; }
    ~WorkerScope() { t_in_worker = saved; }
};
}

void set_thread_count(unsigned n) { g_threads = std::max(1u, n); }
unsigned thread_count() { return g_threads; }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    const std::size_t workers = t_in_worker ? 1 : std::min<std::size_t>(g_threads, n);
    if (workers <= 1) {
        if (n > 0) body(0, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) {
        const std::size_t b = w * chunk, e = std::min(n, b + chunk);
        if (b < e) pool.emplace_back([&body, b, e] {
            WorkerScope scope;
            body(b, e);
        });
    }
    WorkerScope scope;
    body(0, std::min(n, chunk));
}

}  // namespace wgfb
