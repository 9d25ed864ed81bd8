#include "maxlab/threads.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace maxlab {

namespace {
int g_cap = 0; // 0 = unresolved

int resolve_default() {
    if (const char* env = std::getenv("SCHRO_MAXLAB_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}
} // namespace

int thread_cap() {
    if (g_cap <= 0) g_cap = resolve_default();
    return g_cap;
}

void set_thread_cap(int n) { g_cap = n >= 1 ? n : 0; }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    int cap = thread_cap();
    if (cap <= 1 || n < 4) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(cap), n);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace maxlab
