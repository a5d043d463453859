#include "workunit.hpp"

#include <algorithm>
#include <chrono>
#include <vector>

namespace fnlh {

namespace {

double run_kernel_once() {
    constexpr int n = 256;
    constexpr int sweeps = 60;
    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0), b(a);
    for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i) * n + i] = 1.0;

    const auto t0 = std::chrono::steady_clock::now();
    for (int s = 0; s < sweeps; ++s) {
        for (int i = 1; i + 1 < n; ++i)
            for (int j = 1; j + 1 < n; ++j) {
                const std::size_t k = static_cast<std::size_t>(i) * n + j;
                b[k] = 0.25 * (a[k - 1] + a[k + 1] + a[k - n] + a[k + n]);
            }
        std::swap(a, b);
    }
    const auto t1 = std::chrono::steady_clock::now();
    volatile double sink = a[static_cast<std::size_t>(n / 2) * n + n / 2];
    (void)sink;
    return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

double measure_normalization_kernel() {
    double best = run_kernel_once();
    for (int r = 0; r < 2; ++r) best = std::min(best, run_kernel_once());
    return best;
}

double normalization_kernel_seconds() {
    static const double t_ref = measure_normalization_kernel();
    return t_ref;
}

double work_units(int workers, double seconds, double t_ref) {
    return workers * seconds / t_ref;
}

}  // namespace fnlh
