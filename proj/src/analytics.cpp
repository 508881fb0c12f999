#include "od/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "od/bspline.hpp"

namespace od {

IndicatorSeries mse_series(const std::vector<WeeklyOD>& ods) {
    if (ods.size() < 2)
        throw std::invalid_argument("MSE series needs at least two weeks");
    const int n = ods.front().x.rows();
    IndicatorSeries out;
    out.label = "mse";
    for (size_t w = 1; w < ods.size(); ++w) {
        if (ods[w].x.rows() != n || ods[w].x.cols() != n)
            throw std::invalid_argument("weekly OD matrices differ in dimension");
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double diff = static_cast<double>(ods[w].x(i, j) - ods[w - 1].x(i, j));
                acc += diff * diff;
            }
        }
        out.values.push_back(acc / (static_cast<double>(n) * static_cast<double>(n)));
    }
    return out;
}

StrengthCurves strength_curves(const std::vector<WeeklyOD>& ods) {
    const int num_weeks = static_cast<int>(ods.size());
    const int n = ods.empty() ? 0 : ods.front().x.rows();
    StrengthCurves c;
    c.num_weeks = num_weeks;
    c.sigma = Matrix(n, num_weeks);
    c.sigma_norm = Matrix(n, num_weeks);
    c.zero_total.assign(static_cast<size_t>(n), 0);
    for (int w = 0; w < num_weeks; ++w) {
        for (int i = 0; i < n; ++i)
            c.sigma(i, w) = static_cast<double>(ods[size_t(w)].x.row_sum(i) +
                                                ods[size_t(w)].x.col_sum(i));
    }
    for (int i = 0; i < n; ++i) {
        double total = 0.0;
        for (int w = 0; w < num_weeks; ++w) total += c.sigma(i, w);
        if (total > 0.0) {
            for (int w = 0; w < num_weeks; ++w) c.sigma_norm(i, w) = c.sigma(i, w) / total;
        } else {
            c.zero_total[size_t(i)] = 1;
        }
    }
    return c;
}

IndicatorSeries mean_strength_series(const StrengthCurves& curves) {
    IndicatorSeries out;
    out.label = "mean_strength";
    const int n = curves.sigma.rows();
    for (int w = 0; w < curves.num_weeks; ++w) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += curves.sigma(i, w);
        out.values.push_back(n > 0 ? acc / static_cast<double>(n) : 0.0);
    }
    return out;
}

namespace {

// curves enter as columns of y (num_weeks x n_curves)
struct PenalizedSolve {
    Eigen::MatrixXd coef;
    Eigen::MatrixXd fitted;
    double mean_gcv; // +inf at the interpolation limit
};

PenalizedSolve penalized_solve(const Eigen::MatrixXd& y, int num_weeks, int k, double lambda) {
    std::vector<double> grid(static_cast<size_t>(num_weeks));
    for (int w = 0; w < num_weeks; ++w) grid[size_t(w)] = static_cast<double>(w);

    const BSplineBasis basis(0.0, static_cast<double>(num_weeks - 1), k);
    const Eigen::MatrixXd b = basis.design(grid);
    const Eigen::MatrixXd btb = b.transpose() * b;
    const Eigen::MatrixXd a = btb + lambda * basis.penalty();
    Eigen::LDLT<Eigen::MatrixXd> solver(a);
    if (solver.info() != Eigen::Success || !solver.isPositive())
        throw std::runtime_error("ill-conditioned penalized system at basis " +
                                 std::to_string(k));

    PenalizedSolve out;
    out.coef = solver.solve(b.transpose() * y);
    out.fitted = b * out.coef;

    const double edf = solver.solve(btb).trace();
    const double denom = static_cast<double>(num_weeks) - edf;
    if (denom <= 1e-8) {
        out.mean_gcv = std::numeric_limits<double>::infinity();
        return out;
    }
    double gcv_sum = 0.0;
    const auto n_curves = y.cols();
    for (Eigen::Index i = 0; i < n_curves; ++i) {
        const double sse = (y.col(i) - out.fitted.col(i)).squaredNorm();
        gcv_sum += static_cast<double>(num_weeks) * sse / (denom * denom);
    }
    out.mean_gcv = gcv_sum / std::max<double>(1.0, static_cast<double>(n_curves));
    return out;
}

Eigen::MatrixXd curves_as_columns(const StrengthCurves& curves) {
    Eigen::MatrixXd y(curves.num_weeks, curves.sigma_norm.rows());
    for (int i = 0; i < curves.sigma_norm.rows(); ++i)
        for (int w = 0; w < curves.num_weeks; ++w) y(w, i) = curves.sigma_norm(i, w);
    return y;
}

SmoothedCurves pack_fit(const PenalizedSolve& solve, int k, double lambda, int n_curves,
                        int num_weeks) {
    SmoothedCurves sm;
    sm.n_basis = k;
    sm.penalty = lambda;
    sm.mean_gcv = solve.mean_gcv;
    sm.coefficients = Matrix(n_curves, k);
    sm.fitted = Matrix(n_curves, num_weeks);
    for (int i = 0; i < n_curves; ++i) {
        for (int c = 0; c < k; ++c) sm.coefficients(i, c) = solve.coef(c, i);
        for (int w = 0; w < num_weeks; ++w) sm.fitted(i, w) = solve.fitted(w, i);
    }
    return sm;
}

void check_basis_size(int k, int num_weeks) {
    if (k < 4)
        throw std::invalid_argument("cubic basis candidate below 4");
    if (k > num_weeks)
        throw std::invalid_argument("basis candidate " + std::to_string(k) +
                                    " exceeds the number of weeks");
}

} // namespace

SmoothedCurves fit_penalized_basis(const StrengthCurves& curves, int n_basis, double penalty) {
    check_basis_size(n_basis, curves.num_weeks);
    const Eigen::MatrixXd y = curves_as_columns(curves);
    return pack_fit(penalized_solve(y, curves.num_weeks, n_basis, penalty), n_basis, penalty,
                    curves.sigma_norm.rows(), curves.num_weeks);
}

SmoothedCurves smooth_curves(const StrengthCurves& curves, const SmoothingGrids& grids) {
    const int num_weeks = curves.num_weeks;
    const int n_curves = curves.sigma_norm.rows();
    if (grids.basis_candidates.empty() || grids.penalties.empty())
        throw std::invalid_argument("empty smoothing grid");
    for (int k : grids.basis_candidates) check_basis_size(k, num_weeks);

    const Eigen::MatrixXd y = curves_as_columns(curves);
    SmoothedCurves best;
    best.mean_gcv = std::numeric_limits<double>::infinity();
    for (int k : grids.basis_candidates) {
        for (double lambda : grids.penalties) {
            const PenalizedSolve solve = penalized_solve(y, num_weeks, k, lambda);
            if (solve.mean_gcv < best.mean_gcv)
                best = pack_fit(solve, k, lambda, n_curves, num_weeks);
        }
    }
    if (!std::isfinite(best.mean_gcv))
        throw std::runtime_error("no smoothing candidate produced a finite GCV score");
    return best;
}

std::vector<double> band_depths(const Matrix& values, bool parallel) {
    const int n = values.rows();
    const int width = values.cols();
    if (n < 2 || width < 1)
        throw std::invalid_argument("band depth needs at least 2 curves and 1 grid point");

    // per grid point: a curve with a values strictly below and b strictly
    // above sits inside C(n-1,2) - C(a,2) - C(b,2) two-curve bands, plus the
    // n-1 bands it bounds itself
    auto choose2 = [](long long m) { return m * (m - 1) / 2; };
    const double pairs = static_cast<double>(choose2(n));

    Matrix contrib(width, n); // row per grid point, race-free in parallel
#pragma omp parallel for schedule(static) if (parallel)
    for (int w = 0; w < width; ++w) {
        std::vector<std::pair<double, int>> order(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) order[size_t(i)] = {values(i, w), i};
        std::sort(order.begin(), order.end());
        int pos = 0;
        while (pos < n) {
            int end = pos;
            while (end < n && order[size_t(end)].first == order[size_t(pos)].first) ++end;
            const long long below = pos;
            const long long above = n - end;
            const double inside =
                static_cast<double>(choose2(n - 1) - choose2(below) - choose2(above) + (n - 1));
            for (int r = pos; r < end; ++r) contrib(w, order[size_t(r)].second) = inside;
            pos = end;
        }
    }

    std::vector<double> depth(static_cast<size_t>(n), 0.0);
    for (int w = 0; w < width; ++w)
        for (int i = 0; i < n; ++i) depth[size_t(i)] += contrib(w, i);
    for (int i = 0; i < n; ++i) depth[size_t(i)] /= pairs * static_cast<double>(width);
    return depth;
}

OutlierReport functional_boxplot(const SmoothedCurves& sm, bool parallel) {
    const int n = sm.fitted.rows();
    const int width = sm.fitted.cols();
    if (n < 3)
        throw std::invalid_argument("functional boxplot needs at least 3 curves");

    OutlierReport rep;
    rep.depth = band_depths(sm.fitted, parallel);
    rep.flagged.assign(static_cast<size_t>(n), 0);

    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (rep.depth[size_t(a)] != rep.depth[size_t(b)])
            return rep.depth[size_t(a)] > rep.depth[size_t(b)];
        return a < b;
    });
    const int central = (n + 1) / 2; // deepest 50%

    rep.band_lo.assign(static_cast<size_t>(width), std::numeric_limits<double>::infinity());
    rep.band_hi.assign(static_cast<size_t>(width), -std::numeric_limits<double>::infinity());
    for (int r = 0; r < central; ++r) {
        const int curve = order[size_t(r)];
        for (int w = 0; w < width; ++w) {
            rep.band_lo[size_t(w)] = std::min(rep.band_lo[size_t(w)], sm.fitted(curve, w));
            rep.band_hi[size_t(w)] = std::max(rep.band_hi[size_t(w)], sm.fitted(curve, w));
        }
    }
    rep.fence_lo.resize(static_cast<size_t>(width));
    rep.fence_hi.resize(static_cast<size_t>(width));
    for (int w = 0; w < width; ++w) {
        const double range = rep.band_hi[size_t(w)] - rep.band_lo[size_t(w)];
        rep.fence_lo[size_t(w)] = rep.band_lo[size_t(w)] - 1.5 * range;
        rep.fence_hi[size_t(w)] = rep.band_hi[size_t(w)] + 1.5 * range;
    }
    for (int i = 0; i < n; ++i) {
        for (int w = 0; w < width; ++w) {
            if (sm.fitted(i, w) < rep.fence_lo[size_t(w)] ||
                sm.fitted(i, w) > rep.fence_hi[size_t(w)]) {
                rep.flagged[size_t(i)] = 1;
                break;
            }
        }
    }
    return rep;
}

} // namespace od
