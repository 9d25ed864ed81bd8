#pragma once
#include <cstddef>
#include <functional>

namespace maxlab {

// Global worker cap for parallel_for. Resolution order: explicit set_thread_cap,
// else the SCHRO_MAXLAB_THREADS environment variable, else hardware_concurrency.
int thread_cap();
void set_thread_cap(int n);

// Runs fn(i) for i in [0, n). Work is handed out through an atomic counter, so
// callers must only write to per-index slots; reductions belong to the caller.
// Falls back to a plain loop when the cap is 1 or n is tiny.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Compensated (Kahan) accumulator. Deterministic for a fixed summation order.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

} // namespace maxlab
