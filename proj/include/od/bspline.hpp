#pragma once

#include <vector>

#include <Eigen/Dense>

namespace od {

/// Cubic B-spline basis on [x0, x1] with clamped uniform knots.
class BSplineBasis {
public:
    /// n_basis >= 4; n_basis == 4 spans a single cubic polynomial piece.
    BSplineBasis(double x0, double x1, int n_basis);

    int n_basis() const { return n_basis_; }

    /// Values (deriv 0) or derivatives (1, 2) of the at-most-4 basis
    /// functions supported at x; `first` is the index of out[0].
    void eval(double x, int deriv, int& first, double out[4]) const;

    /// n x K design matrix of basis values at the given abscissae.
    Eigen::MatrixXd design(const std::vector<double>& x) const;

    /// K x K roughness penalty: integrals of products of second derivatives.
    /// Two-point Gauss per knot interval is exact for the piecewise-quadratic
    /// integrand.
    Eigen::MatrixXd penalty() const;

private:
    int span_of(double x) const;

    int n_basis_;
    std::vector<double> knots_; // n_basis + 4 entries
};

} // namespace od
