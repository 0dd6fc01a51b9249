#pragma once

#include <vector>

#include "infimod/fixed_point.hpp"
#include "infimod/infinitesimal.hpp"
#include "infimod/mortality.hpp"

namespace infimod {

/// Stability ceiling for the explicit Euler step: 0.2 / (1 + max m on grid).
double dt_max(const DensityState& f, const MortalityModel& m);

struct StepResult {
    DensityState f;        ///< renormalized to unit mass
    double lambda_hat = 0; ///< instantaneous growth rate before renormalization
};

/// One explicit Euler step of d_t f + m f = B_eps(f) on the renormalized
/// density: g = f + dt (B_eps(f) - m f), lambda_hat = (mass g - mass f)/(dt mass f).
StepResult step(const DensityState& f, const MortalityModel& m, double eps, double dt);

struct TraceRow {
    double t = 0.0;
    double lambda_hat = 0.0;
    double increment = 0.0; ///< ||f_{n+1} - f_n||_L1 / dt
};

struct MarchConfig {
    double dt = 0.0; ///< 0 picks 0.9 * dt_max
    double equil_tol = 1e-7;
    long max_steps = 500000;
    int trace_stride = 25; ///< record every k-th step
};

struct MarchResult {
    DensityState equilibrium;
    double lambda_hat = 0.0;
    std::vector<TraceRow> trace;
    bool converged = false;
    long steps = 0;
    double dt = 0.0;
};

/// Iterate `step` until the L1 increment rate drops below equil_tol. Reaching
/// max_steps is reported (converged = false), not fatal.
MarchResult run_to_equilibrium(const DensityState& init, const MortalityModel& m,
                               double eps, const MarchConfig& cfg);

/// Stationarity certificate of problem (PF): shared with the fixed point
/// module's residual (lambda in the untranslated frame).
double equilibrium_certificate(const DensityState& f, double lambda,
                               const MortalityModel& m, double eps);

} // namespace infimod
