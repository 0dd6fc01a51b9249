#pragma once

#include <string>
#include <vector>

#include "infimod/fixed_point.hpp"
#include "infimod/grid_function.hpp"
#include "infimod/mortality.hpp"

namespace infimod {

/// lambda_0 = 1 - m(z0) (equal to 1 after internal normalization).
double lambda0(const MortalityModel& m);

/// gamma_0 = D3m(0) / (2 D2m(0)), the d = 1 formula.
double gamma0(const MortalityModel& m);

/// V0 = sum_k 2^k log(1 + m(2^-k z)), the explicit eps = 0 corrector.
/// Requires the compatibility margin 1 + inf m - m(z0) > 0 on the window;
/// a nonpositive log argument reports the offending point.
GridFunction v0_series(const MortalityModel& m, double half_width, int sample_count,
                       double tol);

/// U0 = gamma_0 * z + V0.
GridFunction u0(const MortalityModel& m, double half_width, int sample_count,
                double tol);

struct ConvergenceRow {
    double eps = 0.0;
    double err_U = 0.0, err_dU = 0.0, err_d2U = 0.0;
    double err_lambda = 0.0, err_gamma = 0.0;
    /// sup_{|z| <= eps R} |d3 V_eps - (4/3) d3 m|, the windowed
    /// third-derivative check.
    double third_window = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows; ///< decreasing eps
    // log-log slope fits (NaN when fewer than two rows)
    double slope_U = 0.0, slope_dU = 0.0, slope_d2U = 0.0;
    double slope_lambda = 0.0, slope_gamma = 0.0;
    bool monotone = false; ///< every error column nonincreasing as eps shrinks

    std::string to_csv() const;
};

/// Per-eps sup errors of (U_eps, dU_eps, d2U_eps) against (U0, dU0, d2U0)
/// over |z| <= region, plus |lambda_eps - lambda0| and |gamma_eps - gamma0|.
/// Rates are reported empirically, never asserted.
ConvergenceReport convergence_report(const std::vector<StationarySolution>& solutions,
                                     const MortalityModel& m, double region,
                                     double third_deriv_R = 1.0);

} // namespace infimod
