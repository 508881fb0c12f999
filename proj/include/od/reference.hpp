#pragma once

#include <array>
#include <vector>

#include "od/gravity.hpp"
#include "od/ipf.hpp"
#include "od/matrix.hpp"
#include "od/timetable.hpp"

// Plain serial implementations written independently of the main kernels.
// Tests check the two routes against each other and the benchmark compares
// their speed; nothing here is used by the pipeline.
namespace od::reference {

/// Textbook alternating-scaling loop on a probability seed. Runs until the
/// largest cellwise change between sweeps drops below tol.
Matrix ipf_fixed_point(const Matrix& seed, const std::vector<double>& rho,
                       const std::vector<double>& alpha, double tol, int max_iter);

/// Exhaustive per-pair transfer search over the direct travel-time matrix.
void transfer_scan(const TravelTimeMatrix& direct, const DirectPathSet& d, TransferTable& table,
                   TravelTimeMatrix& augmented);

/// Modified band depth by enumerating every curve pair at every grid point.
std::vector<double> band_depths_bruteforce(const Matrix& values);

/// Gravity coefficients (intercept, log_p, log_a, log_t) via the normal
/// equations and a hand-rolled pivoted 4x4 solve.
std::array<double, 4> ols_normal_equations(const std::vector<GravityObservation>& obs);

/// Direct double-loop MSE between consecutive weekly matrices.
std::vector<double> mse_bruteforce(const std::vector<WeeklyOD>& ods);

} // namespace od::reference
