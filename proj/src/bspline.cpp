#include "od/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace od {

BSplineBasis::BSplineBasis(double x0, double x1, int n_basis) : n_basis_(n_basis) {
    if (!(x1 > x0))
        throw std::invalid_argument("spline domain is empty");
    if (n_basis < 4)
        throw std::invalid_argument("cubic basis needs at least 4 functions");
    const int interior = n_basis - 4;
    knots_.assign(static_cast<size_t>(n_basis) + 4, x0);
    for (int j = 1; j <= interior; ++j)
        knots_[static_cast<size_t>(3 + j)] =
            x0 + (x1 - x0) * static_cast<double>(j) / static_cast<double>(interior + 1);
    for (int j = n_basis; j < n_basis + 4; ++j) knots_[static_cast<size_t>(j)] = x1;
}

int BSplineBasis::span_of(double x) const {
    // largest span index s in [3, n_basis-1] with knots[s] <= x
    int s = 3;
    while (s + 1 <= n_basis_ - 1 && x >= knots_[static_cast<size_t>(s + 1)]) ++s;
    return s;
}

void BSplineBasis::eval(double x, int deriv, int& first, double out[4]) const {
    const double x0 = knots_.front(), x1 = knots_.back();
    x = std::clamp(x, x0, x1);
    const int s = span_of(x);
    first = s - 3;

    const auto& t = knots_;
    auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };

    // de Boor triangle: values of degree-d basis functions N_{s-d..s, d}
    double n0[1] = {1.0};
    double n1[2], n2[3], n3[4];
    for (int d = 1; d <= 3; ++d) {
        double* prev = d == 1 ? n0 : (d == 2 ? n1 : n2);
        double* cur = d == 1 ? n1 : (d == 2 ? n2 : n3);
        for (int m = 0; m <= d; ++m) {
            const int i = s - d + m; // global index of N_{i,d}
            double v = 0.0;
            if (m > 0)
                v += ratio(x - t[size_t(i)], t[size_t(i + d)] - t[size_t(i)]) * prev[m - 1];
            if (m < d)
                v += ratio(t[size_t(i + d + 1)] - x, t[size_t(i + d + 1)] - t[size_t(i + 1)]) *
                     prev[m];
            cur[m] = v;
        }
    }

    if (deriv == 0) {
        for (int m = 0; m < 4; ++m) out[m] = n3[m];
        return;
    }

    // N'_{i,3} = 3 (N_{i,2}/(t_{i+3}-t_i) - N_{i+1,2}/(t_{i+4}-t_{i+1}))
    auto deg2 = [&](int i) -> double { // global-index lookup into n2
        const int m = i - (s - 2);
        return (m >= 0 && m <= 2) ? n2[m] : 0.0;
    };
    auto deg1 = [&](int i) -> double {
        const int m = i - (s - 1);
        return (m >= 0 && m <= 1) ? n1[m] : 0.0;
    };
    if (deriv == 1) {
        for (int m = 0; m < 4; ++m) {
            const int i = s - 3 + m;
            out[m] = 3.0 * (ratio(deg2(i), t[size_t(i + 3)] - t[size_t(i)]) -
                            ratio(deg2(i + 1), t[size_t(i + 4)] - t[size_t(i + 1)]));
        }
        return;
    }
    if (deriv != 2)
        throw std::invalid_argument("only derivatives 0..2 supported");
    auto d1deg2 = [&](int i) -> double { // derivative of degree-2 basis i
        return 2.0 * (ratio(deg1(i), t[size_t(i + 2)] - t[size_t(i)]) -
                      ratio(deg1(i + 1), t[size_t(i + 3)] - t[size_t(i + 1)]));
    };
    for (int m = 0; m < 4; ++m) {
        const int i = s - 3 + m;
        out[m] = 3.0 * (ratio(d1deg2(i), t[size_t(i + 3)] - t[size_t(i)]) -
                        ratio(d1deg2(i + 1), t[size_t(i + 4)] - t[size_t(i + 1)]));
    }
}

Eigen::MatrixXd BSplineBasis::design(const std::vector<double>& x) const {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(x.size()), n_basis_);
    double vals[4];
    int first;
    for (size_t r = 0; r < x.size(); ++r) {
        eval(x[r], 0, first, vals);
        for (int m = 0; m < 4; ++m) b(static_cast<Eigen::Index>(r), first + m) = vals[m];
    }
    return b;
}

Eigen::MatrixXd BSplineBasis::penalty() const {
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n_basis_, n_basis_);
    const double g = 1.0 / std::sqrt(3.0);
    double vals[4];
    int first;
    for (int s = 3; s <= n_basis_ - 1; ++s) {
        const double lo = knots_[size_t(s)], hi = knots_[size_t(s + 1)];
        if (!(hi > lo)) continue;
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (double gp : {-g, g}) {
            eval(mid + half * gp, 2, first, vals);
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c)
                    omega(first + r, first + c) += half * vals[r] * vals[c];
        }
    }
    return omega;
}

} // namespace od
