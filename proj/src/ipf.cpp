#include "od/ipf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace od {

void zero_fill(Matrix& seed, const DirectPathSet& d, const Mask& mask) {
    const int n = seed.rows();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) {
                seed(i, j) = 0.0;
            } else if (seed(i, j) == 0.0 && (d.contains(i, j) || mask(i, j))) {
                seed(i, j) = 0.1;
            }
        }
    }
}

ProbabilitySeed normalize_seed(const Matrix& seed, const std::vector<int64_t>& p,
                               const std::vector<int64_t>& a) {
    const int n = seed.rows();
    ProbabilitySeed ps;
    ps.pi_star = seed;

    const double seed_total = seed.sum();
    int64_t p_total = 0, a_total = 0;
    for (int64_t v : p) p_total += v;
    for (int64_t v : a) a_total += v;
    if (seed_total <= 0.0)
        throw std::runtime_error("degenerate week: seed matrix sums to zero");
    if (p_total <= 0 || a_total <= 0)
        throw std::runtime_error("degenerate week: margin total is zero");

    for (size_t k = 0; k < ps.pi_star.size(); ++k) ps.pi_star.data()[k] /= seed_total;
    ps.rho.resize(static_cast<size_t>(n));
    ps.alpha.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        ps.rho[i] = static_cast<double>(p.at(i)) / static_cast<double>(p_total);
        ps.alpha[i] = static_cast<double>(a.at(i)) / static_cast<double>(a_total);
    }
    return ps;
}

namespace {

void check_support(const ProbabilitySeed& ps) {
    const int n = ps.pi_star.rows();
    for (int i = 0; i < n; ++i) {
        if (ps.rho[i] > 0.0 && ps.pi_star.row_sum(i) <= 0.0)
            throw std::runtime_error("structural infeasibility: station " + std::to_string(i) +
                                     " boards passengers but its seed row is all zero");
    }
    for (int j = 0; j < n; ++j) {
        if (ps.alpha[j] > 0.0 && ps.pi_star.col_sum(j) <= 0.0)
            throw std::runtime_error("structural infeasibility: station " + std::to_string(j) +
                                     " alights passengers but its seed column is all zero");
    }
}

// exceptions cannot leave an OpenMP region, so failures are flagged and
// thrown by the caller
void scale_rows(Matrix& pi, const std::vector<double>& rho, bool parallel) {
    const int n = pi.rows();
    int failed = -1;
#pragma omp parallel for schedule(static) if (parallel)
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += pi(i, j);
        if (rho[i] <= 0.0) {
            for (int j = 0; j < n; ++j) pi(i, j) = 0.0;
            continue;
        }
        if (s <= 0.0) {
            failed = i;
            continue;
        }
        const double f = rho[i] / s;
        for (int j = 0; j < n; ++j) pi(i, j) *= f;
    }
    if (failed >= 0)
        throw std::runtime_error("structural infeasibility: row " + std::to_string(failed) +
                                 " lost all mass during fitting");
}

void scale_cols(Matrix& pi, const std::vector<double>& alpha, bool parallel) {
    const int n = pi.rows();
    int failed = -1;
#pragma omp parallel for schedule(static) if (parallel)
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += pi(i, j);
        if (alpha[j] <= 0.0) {
            for (int i = 0; i < n; ++i) pi(i, j) = 0.0;
            continue;
        }
        if (s <= 0.0) {
            failed = j;
            continue;
        }
        const double f = alpha[j] / s;
        for (int i = 0; i < n; ++i) pi(i, j) *= f;
    }
    if (failed >= 0)
        throw std::runtime_error("structural infeasibility: column " + std::to_string(failed) +
                                 " lost all mass during fitting");
}

double max_abs_diff(const Matrix& a, const Matrix& b, bool parallel) {
    const auto sz = static_cast<long long>(a.size());
    double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m) if (parallel)
    for (long long k = 0; k < sz; ++k) {
        const double diff = std::fabs(a.data()[k] - b.data()[k]);
        if (diff > m) m = diff;
    }
    return m;
}

} // namespace

IpfResult run_ipf(const ProbabilitySeed& ps, const IpfOptions& opts) {
    check_support(ps);
    const int n = ps.pi_star.rows();

    IpfResult res;
    res.pi = ps.pi_star;
    Matrix prev = res.pi;

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        if (opts.row_first) {
            scale_rows(res.pi, ps.rho, opts.parallel);
            scale_cols(res.pi, ps.alpha, opts.parallel);
        } else {
            scale_cols(res.pi, ps.alpha, opts.parallel);
            scale_rows(res.pi, ps.rho, opts.parallel);
        }
        res.iterations = iter + 1;
        const double delta = max_abs_diff(res.pi, prev, opts.parallel);
        if (delta < opts.tol) {
            res.converged = true;
            break;
        }
        prev = res.pi;
    }

    // end on a row scaling: the final matrix then reproduces rho exactly,
    // which is the margin the trip totals are taken from
    if (opts.row_first) scale_rows(res.pi, ps.rho, opts.parallel);

    res.eps_row = 0.0;
    res.eps_col = 0.0;
    for (int i = 0; i < n; ++i)
        res.eps_row = std::max(res.eps_row, std::fabs(ps.rho[i] - res.pi.row_sum(i)));
    for (int j = 0; j < n; ++j)
        res.eps_col = std::max(res.eps_col, std::fabs(ps.alpha[j] - res.pi.col_sum(j)));
    return res;
}

WeeklyOD finalize_od(const IpfResult& res, int64_t total_boarded, int week) {
    if (!res.converged)
        throw std::runtime_error("refusing to finalize an unconverged fit for week " +
                                 std::to_string(week));
    const int n = res.pi.rows();
    WeeklyOD od;
    od.week = week;
    od.x = IntMatrix(n, n);
    const double scale = static_cast<double>(total_boarded);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            od.x(i, j) = std::llround(res.pi(i, j) * scale);
    return od;
}

} // namespace od
