#include "od/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace od::reference {

Matrix ipf_fixed_point(const Matrix& seed, const std::vector<double>& rho,
                       const std::vector<double>& alpha, double tol, int max_iter) {
    const int n = seed.rows();
    Matrix pi = seed;
    for (int iter = 0; iter < max_iter; ++iter) {
        Matrix prev = pi;
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += pi(i, j);
            const double f = (s > 0.0 && rho[size_t(i)] > 0.0) ? rho[size_t(i)] / s : 0.0;
            for (int j = 0; j < n; ++j) pi(i, j) *= f;
        }
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += pi(i, j);
            const double f = (s > 0.0 && alpha[size_t(j)] > 0.0) ? alpha[size_t(j)] / s : 0.0;
            for (int i = 0; i < n; ++i) pi(i, j) *= f;
        }
        double delta = 0.0;
        for (size_t k = 0; k < pi.size(); ++k)
            delta = std::max(delta, std::fabs(pi.data()[k] - prev.data()[k]));
        if (delta < tol) break;
    }
    return pi;
}

void transfer_scan(const TravelTimeMatrix& direct, const DirectPathSet& d, TransferTable& table,
                   TravelTimeMatrix& augmented) {
    const int n = direct.minutes.rows();
    table = TransferTable(n);
    augmented = direct;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j || d.contains(i, j)) continue;
            int best = -1;
            double best_time = 0.0;
            for (int k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                if (d.contains(i, k) && d.contains(k, j) && direct.defined(i, k) &&
                    direct.defined(k, j)) {
                    const double tt = direct.minutes(i, k) + direct.minutes(k, j);
                    if (best < 0 || tt < best_time) {
                        best = k;
                        best_time = tt;
                    }
                }
            }
            if (best >= 0) {
                table.set(i, j, best);
                augmented.minutes(i, j) = best_time;
                augmented.defined.set(i, j, true);
            }
        }
    }
}

std::vector<double> band_depths_bruteforce(const Matrix& values) {
    const int n = values.rows();
    const int width = values.cols();
    std::vector<double> depth(static_cast<size_t>(n), 0.0);
    long long pairs = static_cast<long long>(n) * (n - 1) / 2;
    for (int f = 0; f < n; ++f) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                for (int w = 0; w < width; ++w) {
                    const double lo = std::min(values(i, w), values(j, w));
                    const double hi = std::max(values(i, w), values(j, w));
                    if (values(f, w) >= lo && values(f, w) <= hi) acc += 1.0;
                }
            }
        }
        depth[size_t(f)] = acc / (static_cast<double>(pairs) * static_cast<double>(width));
    }
    return depth;
}

std::array<double, 4> ols_normal_equations(const std::vector<GravityObservation>& obs) {
    double xtx[4][4] = {};
    double xty[4] = {};
    for (const GravityObservation& o : obs) {
        const double row[4] = {1.0, o.log_p, o.log_a, o.log_t};
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) xtx[r][c] += row[r] * row[c];
            xty[r] += row[r] * o.log_flow;
        }
    }
    // Gaussian elimination with partial pivoting on the 4x4 system
    double a[4][5];
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) a[r][c] = xtx[r][c];
        a[r][4] = xty[r];
    }
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        if (std::fabs(a[pivot][col]) < 1e-12)
            throw std::runtime_error("normal equations are singular");
        for (int c = 0; c < 5; ++c) std::swap(a[col][c], a[pivot][c]);
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 5; ++c) a[r][c] -= f * a[col][c];
        }
    }
    return {a[0][4] / a[0][0], a[1][4] / a[1][1], a[2][4] / a[2][2], a[3][4] / a[3][3]};
}

std::vector<double> mse_bruteforce(const std::vector<WeeklyOD>& ods) {
    std::vector<double> out;
    for (size_t w = 1; w < ods.size(); ++w) {
        const int n = ods[w].x.rows();
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double diff = double(ods[w].x(i, j)) - double(ods[w - 1].x(i, j));
                acc += diff * diff;
            }
        out.push_back(acc / (double(n) * double(n)));
    }
    return out;
}

} // namespace od::reference
