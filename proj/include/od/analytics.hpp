#pragma once

#include <string>
#include <vector>

#include "od/ipf.hpp"
#include "od/matrix.hpp"

namespace od {

struct IndicatorSeries {
    std::vector<double> values;
    std::string label;
};

/// Station throughput per week: row sum plus column sum of the weekly OD
/// matrix, and the same normalized so each station's series sums to 1.
struct StrengthCurves {
    int num_weeks = 0;
    Matrix sigma;      // S x W
    Matrix sigma_norm; // S x W, all-zero rows flagged below
    std::vector<uint8_t> zero_total;
};

struct SmoothingGrids {
    std::vector<int> basis_candidates = {4, 5, 6, 8, 10, 12};
    std::vector<double> penalties = {0.0, 1e-6, 1e-4, 1e-2, 1e-1, 1.0, 10.0, 100.0};
};

struct SmoothedCurves {
    int n_basis = 0;
    double penalty = 0.0;
    double mean_gcv = 0.0;
    Matrix coefficients; // S x n_basis
    Matrix fitted;       // S x W
};

struct OutlierReport {
    std::vector<double> depth;
    std::vector<uint8_t> flagged;
    std::vector<double> band_lo, band_hi;   // central-region envelope per week
    std::vector<double> fence_lo, fence_hi; // 1.5-inflated fences per week
};

/// MSE between consecutive weeks: (1/S^2) sum of squared cell differences.
/// The series has num_weeks - 1 entries.
IndicatorSeries mse_series(const std::vector<WeeklyOD>& ods);

StrengthCurves strength_curves(const std::vector<WeeklyOD>& ods);

/// Mean strength across stations per week.
IndicatorSeries mean_strength_series(const StrengthCurves& curves);

/// Penalized cubic B-spline fit of every normalized strength curve on a
/// shared basis; (basis count, penalty) picked to minimize the mean
/// generalized cross-validation score over all curves.
SmoothedCurves smooth_curves(const StrengthCurves& curves, const SmoothingGrids& grids);

/// Same fit at a fixed basis size and penalty, no selection. mean_gcv is
/// infinite when the fit touches the interpolation limit.
SmoothedCurves fit_penalized_basis(const StrengthCurves& curves, int n_basis, double penalty);

/// Modified band depth (2-curve bands) of each row of `values` over the
/// column grid. Rank-based; brute-force pair enumeration lives in the
/// reference library.
std::vector<double> band_depths(const Matrix& values, bool parallel = false);

/// Functional boxplot on the smoothed curves: deepest half forms the central
/// band, fences inflate it by 1.5 of its range, anything escaping is flagged.
OutlierReport functional_boxplot(const SmoothedCurves& sm, bool parallel = false);

} // namespace od
