#pragma once

#include <cstdint>
#include <vector>

#include "od/matrix.hpp"
#include "od/network.hpp"

namespace od {

/// Seed and margins rescaled to probabilities so inconsistent totals
/// (sum p != sum a) cannot block the fit.
struct ProbabilitySeed {
    Matrix pi_star;
    std::vector<double> rho;   // boarded shares, sums to 1
    std::vector<double> alpha; // alighted shares, sums to 1
};

struct IpfOptions {
    double tol = 1e-10;
    int max_iter = 1000;
    bool row_first = true; // sweep order; the fixed point does not depend on it
    bool parallel = false;
};

struct IpfResult {
    Matrix pi;
    int iterations = 0;
    bool converged = false;
    double eps_row = 0.0; // max margin deviation on the probability scale
    double eps_col = 0.0;
};

/// Final integer trip matrix for one week.
struct WeeklyOD {
    int week = 0;
    IntMatrix x;
};

/// Replaces zeros on direct or masked cells with 0.1 so the fit can move
/// mass there; all other zeros stay and the diagonal is forced to zero.
void zero_fill(Matrix& seed, const DirectPathSet& d, const Mask& mask);

/// Divides seed and margins by their own totals. Throws on a zero total
/// (degenerate week).
ProbabilitySeed normalize_seed(const Matrix& seed, const std::vector<int64_t>& p,
                               const std::vector<int64_t>& a);

/// Alternating proportional fitting to the rho/alpha margins. Stops when the
/// largest cellwise change over a full sweep drops below tol (or at
/// max_iter), then ends on a row scaling so row sums match rho exactly.
/// Throws on structurally infeasible support (a positive margin whose row or
/// column of the seed is all zero).
IpfResult run_ipf(const ProbabilitySeed& ps, const IpfOptions& opts = {});

/// Scales the probability matrix by the total boarded count and rounds
/// half-away-from-zero. Exact zeros stay zero.
WeeklyOD finalize_od(const IpfResult& res, int64_t total_boarded, int week);

} // namespace od
