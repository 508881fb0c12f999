#include "od/gravity.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace od {

std::vector<GravityObservation> build_observations(const std::vector<WeeklySeedOD>& seeds,
                                                   const std::vector<MarginVectors>& margins,
                                                   const TravelTimeMatrix& t, const Mask& mask) {
    std::vector<GravityObservation> obs;
    for (const WeeklySeedOD& seed : seeds) {
        const MarginVectors& m = margins.at(static_cast<size_t>(seed.week));
        const int n = seed.x.rows();
        for (StationId i = 0; i < n; ++i) {
            if (m.p[i] <= 0) continue;
            for (StationId j = 0; j < n; ++j) {
                if (i == j || m.a[j] <= 0) continue;
                if (mask(i, j) || !t.has(i, j)) continue;
                const double flow = seed.x(i, j) > 0.0 ? seed.x(i, j) : 0.01;
                obs.push_back({std::log(flow), std::log(static_cast<double>(m.p[i])),
                               std::log(static_cast<double>(m.a[j])), std::log(t.minutes(i, j)),
                               seed.week, i, j});
            }
        }
    }
    return obs;
}

GravityFit fit_ols(const std::vector<GravityObservation>& obs) {
    const auto n = static_cast<Eigen::Index>(obs.size());
    if (n < 5)
        throw std::runtime_error("gravity fit needs at least 5 observations, got " +
                                 std::to_string(n));

    Eigen::MatrixXd design(n, 4);
    Eigen::VectorXd y(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const GravityObservation& o = obs[static_cast<size_t>(r)];
        design(r, 0) = 1.0;
        design(r, 1) = o.log_p;
        design(r, 2) = o.log_a;
        design(r, 3) = o.log_t;
        y(r) = o.log_flow;
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < 4) {
        static const char* names[4] = {"intercept", "log_p", "log_a", "log_t"};
        // pivots past the numerical rank point at the collinear columns
        const auto perm = qr.colsPermutation().indices();
        std::string collinear = names[perm(3)];
        throw std::runtime_error("singular gravity design: column " + collinear +
                                 " is collinear with the others");
    }
    Eigen::Vector4d coef = qr.solve(y);

    const Eigen::VectorXd residuals = y - design * coef;
    const double ssr = residuals.squaredNorm();
    const double mean_y = y.mean();
    const double sst = (y.array() - mean_y).matrix().squaredNorm();
    const double r2 = sst > 0.0 ? 1.0 - ssr / sst : (ssr <= 1e-24 ? 1.0 : 0.0);

    GravityFit fit;
    fit.log_k = coef(0);
    fit.alpha = coef(1);
    fit.beta = coef(2);
    fit.gamma = coef(3);
    fit.r_squared = r2;
    fit.n_obs = n;
    return fit;
}

double predict_cell(const GravityFit& fit, double p_i, double a_j, double t_ij) {
    if (!(p_i > 0.0) || !(a_j > 0.0) || !(t_ij > 0.0))
        throw std::domain_error("gravity prediction needs positive p, a and travel time");
    return std::exp(fit.log_k + fit.alpha * std::log(p_i) + fit.beta * std::log(a_j) +
                    fit.gamma * std::log(t_ij));
}

long long fill_masked_cells(std::vector<WeeklySeedOD>& seeds,
                            const std::vector<MarginVectors>& margins,
                            const TravelTimeMatrix& t, const Mask& mask, const GravityFit& fit) {
    long long filled = 0;
    for (WeeklySeedOD& seed : seeds) {
        const MarginVectors& m = margins.at(static_cast<size_t>(seed.week));
        const int n = seed.x.rows();
        for (StationId i = 0; i < n; ++i) {
            for (StationId j = 0; j < n; ++j) {
                if (i == j || !mask(i, j)) continue;
                // transfer separation may have parked mass here; the model
                // prediction replaces it outright
                if (m.p[i] > 0 && m.a[j] > 0 && t.has(i, j)) {
                    seed.x(i, j) = predict_cell(fit, static_cast<double>(m.p[i]),
                                                static_cast<double>(m.a[j]), t.minutes(i, j));
                    ++filled;
                } else {
                    seed.x(i, j) = 0.0;
                }
            }
        }
    }
    return filled;
}

} // namespace od
