// Timing comparison of the OpenMP kernels against the serial reference
// implementations on sizes well above the 46-station production scale.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "od/analytics.hpp"
#include "od/ipf.hpp"
#include "od/reference.hpp"
#include "od/rng.hpp"
#include "od/timetable.hpp"

using namespace od;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

void report(const char* kernel, double serial_ms, double parallel_ms, double max_diff) {
    std::printf("%-28s %10.1f ms %10.1f ms %7.2fx   max|diff| %.3g\n", kernel, serial_ms,
                parallel_ms, serial_ms / parallel_ms, max_diff);
}

void bench_ipf(int n) {
    Rng rng(7);
    Matrix seed(n, n);
    std::vector<int64_t> p(static_cast<size_t>(n));
    std::vector<int64_t> a(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) seed(i, j) = 0.1 + rng.uniform();
        p[size_t(i)] = 50 + rng.below(200);
        a[size_t(i)] = 50 + rng.below(200);
    }
    const ProbabilitySeed ps = normalize_seed(seed, p, a);

    double t0 = now_ms();
    const Matrix oracle = reference::ipf_fixed_point(ps.pi_star, ps.rho, ps.alpha, 1e-10, 1000);
    double t1 = now_ms();
    IpfOptions opts;
    opts.parallel = true;
    const IpfResult res = run_ipf(ps, opts);
    double t2 = now_ms();

    double diff = 0.0;
    for (size_t k = 0; k < oracle.size(); ++k)
        diff = std::max(diff, std::fabs(oracle.data()[k] - res.pi.data()[k]));
    char label[64];
    std::snprintf(label, sizeof label, "ipf %dx%d", n, n);
    report(label, t1 - t0, t2 - t1, diff);
}

void bench_transfers(int n) {
    Rng rng(11);
    DirectPathSet d(n);
    TravelTimeMatrix direct(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (rng.uniform() < 0.08) {
                d.insert(i, j);
                d.insert(j, i);
                const double minutes = 5.0 + 60.0 * rng.uniform();
                direct.minutes(i, j) = direct.minutes(j, i) = minutes;
                direct.defined.set(i, j, true);
                direct.defined.set(j, i, true);
            }
        }
    }

    double t0 = now_ms();
    TransferTable ref_table(n);
    TravelTimeMatrix ref_aug(n);
    reference::transfer_scan(direct, d, ref_table, ref_aug);
    double t1 = now_ms();
    TravelTimeMatrix aug = direct;
    const TransferTable table = compute_transfers(aug, d, true);
    double t2 = now_ms();

    double diff = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (ref_table.at(i, j) != table.at(i, j)) diff = 1e9;
            if (ref_aug.defined(i, j))
                diff = std::max(diff, std::fabs(ref_aug.minutes(i, j) - aug.minutes(i, j)));
        }
    char label[64];
    std::snprintf(label, sizeof label, "transfer scan n=%d", n);
    report(label, t1 - t0, t2 - t1, diff);
}

void bench_depth(int curves, int grid) {
    Rng rng(13);
    Matrix values(curves, grid);
    for (int i = 0; i < curves; ++i)
        for (int w = 0; w < grid; ++w) values(i, w) = std::sin(0.1 * w + 0.05 * i) + rng.uniform();

    double t0 = now_ms();
    const auto brute = reference::band_depths_bruteforce(values);
    double t1 = now_ms();
    const auto fast = band_depths(values, true);
    double t2 = now_ms();

    double diff = 0.0;
    for (int i = 0; i < curves; ++i) diff = std::max(diff, std::fabs(brute[size_t(i)] - fast[size_t(i)]));
    char label[64];
    std::snprintf(label, sizeof label, "band depth %dx%d", curves, grid);
    report(label, t1 - t0, t2 - t1, diff);
}

} // namespace

int main() {
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial ref", "openmp", "speedup");
    bench_ipf(512);
    bench_transfers(400);
    bench_depth(160, 120);
    return 0;
}
