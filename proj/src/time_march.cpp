#include "infimod/time_march.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "infimod/errors.hpp"

namespace infimod {

namespace {

std::vector<double> mortality_on_grid(const DensityState& f, const MortalityModel& m) {
    int n = f.size();
    std::vector<double> mg(n);
    for (int j = 0; j < n; ++j) mg[j] = m.raw(f.node(j));
    return mg;
}

StepResult step_cached(const DensityState& f, const std::vector<double>& mgrid,
                       double eps, double dt) {
    DensityState Bf = apply_B(f, eps);
    int n = f.size();
    std::vector<double> g(n);
    double mass_f = f.mass();
    for (int j = 0; j < n; ++j)
        g[j] = f.values()[j] + dt * (Bf.values()[j] - mgrid[j] * f.values()[j]);

    double worst = 0.0, peak = 0.0;
    for (int j = 0; j < n; ++j) {
        peak = std::max(peak, std::abs(g[j]));
        worst = std::min(worst, g[j]);
    }
    if (worst < -1e-8 * std::max(peak, 1.0)) {
        std::ostringstream os;
        os << "unstable step: density went negative (min = " << worst
           << "); reduce dt";
        throw NumericalError(os.str());
    }
    for (double& v : g) v = std::max(v, 0.0);

    DensityState out(f.half_width(), std::move(g), eps);
    double mass_g = out.mass();
    double lambda_hat = (mass_g - mass_f) / (dt * mass_f);
    out.renormalize();
    StepResult r;
    r.f = std::move(out);
    r.lambda_hat = lambda_hat;
    return r;
}

} // namespace

double dt_max(const DensityState& f, const MortalityModel& m) {
    double peak = 0.0;
    for (int j = 0; j < f.size(); ++j) peak = std::max(peak, m.raw(f.node(j)));
    return 0.2 / (1.0 + peak);
}

StepResult step(const DensityState& f, const MortalityModel& m, double eps, double dt) {
    double cap = dt_max(f, m);
    if (dt > cap) {
        std::ostringstream os;
        os << "dt = " << dt << " above the stability ceiling dt_max = " << cap;
        throw ConfigError(os.str());
    }
    return step_cached(f, mortality_on_grid(f, m), eps, dt);
}

MarchResult run_to_equilibrium(const DensityState& init, const MortalityModel& m,
                               double eps, const MarchConfig& cfg) {
    if (std::abs(init.mass() - 1.0) > 1e-8)
        throw InputError("run_to_equilibrium expects a unit-mass initial density");
    double cap = dt_max(init, m);
    double dt = cfg.dt;
    if (dt == 0.0) {
        dt = 0.9 * cap;
    } else if (dt > cap) {
        std::ostringstream os;
        os << "dt = " << dt << " above the stability ceiling dt_max = " << cap;
        throw ConfigError(os.str());
    }

    std::vector<double> mgrid = mortality_on_grid(init, m);
    MarchResult result;
    result.dt = dt;
    DensityState f = init;
    double t = 0.0;
    for (long n = 0; n < cfg.max_steps; ++n) {
        StepResult s = step_cached(f, mgrid, eps, dt);
        double inc = l1_distance(s.f, f) / dt;
        t += dt;
        result.lambda_hat = s.lambda_hat;
        result.steps = n + 1;
        if (n % cfg.trace_stride == 0)
            result.trace.push_back({t, s.lambda_hat, inc});
        f = std::move(s.f);
        if (inc <= cfg.equil_tol) {
            result.converged = true;
            result.trace.push_back({t, s.lambda_hat, inc});
            break;
        }
    }
    result.equilibrium = std::move(f);
    return result;
}

double equilibrium_certificate(const DensityState& f, double lambda,
                               const MortalityModel& m, double eps) {
    return stationarity_residual(f, lambda, m, eps);
}

} // namespace infimod
