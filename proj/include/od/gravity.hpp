#pragma once

#include <vector>

#include "od/counters.hpp"
#include "od/ticketing.hpp"
#include "od/timetable.hpp"

namespace od {

struct GravityObservation {
    double log_flow;
    double log_p;
    double log_a;
    double log_t;
    int week;
    StationId origin;
    StationId dest;
};

struct GravityFit {
    double log_k = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double r_squared = 0.0;
    int64_t n_obs = 0;
};

/// One observation per (week, i, j) outside the missing mask with travel
/// time defined and positive margins on both ends; zero flows enter as 0.01.
std::vector<GravityObservation> build_observations(const std::vector<WeeklySeedOD>& seeds,
                                                   const std::vector<MarginVectors>& margins,
                                                   const TravelTimeMatrix& t, const Mask& mask);

/// Least squares of log_flow on (1, log_p, log_a, log_t) via a rank-revealing
/// QR factorization. Throws on fewer than 5 observations or a rank-deficient
/// design, naming the collinear column.
GravityFit fit_ols(const std::vector<GravityObservation>& obs);

/// exp(log_k + alpha ln p + beta ln a + gamma ln t); inputs must be positive.
double predict_cell(const GravityFit& fit, double p_i, double a_j, double t_ij);

/// Overwrites every masked cell with the model prediction (zero where a
/// margin is zero or travel time is undefined). Returns cells filled with a
/// positive value.
long long fill_masked_cells(std::vector<WeeklySeedOD>& seeds,
                            const std::vector<MarginVectors>& margins,
                            const TravelTimeMatrix& t, const Mask& mask, const GravityFit& fit);

} // namespace od
