#include "infimod/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "infimod/errors.hpp"
#include "infimod/gamma_solver.hpp"
#include "infimod/limit_objects.hpp"

namespace infimod {

double kappa(double alpha) {
    return std::pow(2.0, 1.0 + alpha) / (4.0 - std::pow(2.0, alpha));
}

GridFunction series_S(const GridFunction& Lambda, double tol) {
    int c = Lambda.center();
    double v0 = Lambda.values()[c];
    double s0 = Lambda.deriv1()[c];
    if (std::abs(v0) > 1e-10)
        throw InputError("series_S: nonzero value at origin (series diverges)");
    if (std::abs(s0) > 1e-8)
        throw InputError("series_S: nonzero slope at origin (series diverges)");
    (void)tol; // tail handled in closed form, below any tolerance

    double L = Lambda.half_width();
    int n = Lambda.size();
    double hg = Lambda.spacing();

    // Once 2^-k h enters the center cell, every remaining term evaluates the
    // same cubic segment, so the dyadic tail is a geometric sum in closed
    // form. This keeps the 2^k weights off the fp noise floor and makes
    // S(z) - 2 S(z/2) telescope exactly.
    double q0 = Lambda.deriv2()[c];
    double q1 = Lambda.deriv3()[c];
    struct Cell {
        double p2, p3;     // value cubic through (0,0) with zero slope
        double q2, q3;     // curvature cubic with q(0)=q0, q'(0)=q1
    };
    auto make_cell = [&](int sign) {
        Cell cc;
        if (sign > 0) {
            double f1 = Lambda.values()[c + 1] - v0 - s0 * hg;
            double g1 = Lambda.deriv1()[c + 1] - s0;
            cc.p2 = (3.0 * f1 - g1 * hg) / (hg * hg);
            cc.p3 = (g1 * hg - 2.0 * f1) / (hg * hg * hg);
            double A = Lambda.deriv2()[c + 1] - q0;
            double B = Lambda.deriv3()[c + 1];
            cc.q2 = (3.0 * A - hg * (B + 2.0 * q1)) / (hg * hg);
            cc.q3 = (hg * (B + q1) - 2.0 * A) / (hg * hg * hg);
        } else {
            double fm = Lambda.values()[c - 1] - v0 + s0 * hg;
            double gm = Lambda.deriv1()[c - 1] - s0;
            cc.p2 = (3.0 * fm + gm * hg) / (hg * hg);
            cc.p3 = (2.0 * fm + gm * hg) / (hg * hg * hg);
            double A = Lambda.deriv2()[c - 1] - q0 + q1 * hg;
            double B = Lambda.deriv3()[c - 1] - q1;
            cc.q2 = 3.0 * A / (hg * hg) + B / hg;
            cc.q3 = (2.0 * A + B * hg) / (hg * hg * hg);
        }
        return cc;
    };
    Cell right = make_cell(+1), left = make_cell(-1);

    std::vector<double> val(n), d1(n), d2(n), d3(n);
    for (int i = 0; i < n; ++i) {
        double h = Lambda.node(i);
        const Cell& cc = (h >= 0.0) ? right : left;

        int kstar = 0;
        while (std::abs(std::ldexp(h, -kstar)) > hg) ++kstar;

        CompensatedSum sv;
        double s1 = 0.0, s2 = 0.0, s3 = 0.0;
        double p2k = 1.0, p2mk = 1.0, p4mk = 1.0;
        for (int k = 0; k < kstar; ++k) {
            double x = std::ldexp(h, -k); // exact scaling
            sv.add(p2k * (eval(Lambda, x, 0) - v0 - s0 * x));
            s1 += eval(Lambda, x, 1) - s0;
            s2 += p2mk * eval(Lambda, x, 2);
            s3 += p4mk * eval(Lambda, x, 3);
            p2k *= 2.0;
            p2mk *= 0.5;
            p4mk *= 0.25;
        }
        double r2 = std::ldexp(1.0, -kstar);
        double r4 = r2 * r2, r8 = r4 * r2, r16 = r8 * r2;
        double h2 = h * h, h3 = h2 * h;
        sv.add(cc.p2 * h2 * 2.0 * r2 + cc.p3 * h3 * (4.0 / 3.0) * r4);
        val[i] = sv.value();
        d1[i] = s1 + 2.0 * cc.p2 * h * 2.0 * r2 + 3.0 * cc.p3 * h2 * (4.0 / 3.0) * r4;
        d2[i] = s2 + q0 * 2.0 * r2 + q1 * h * (4.0 / 3.0) * r4 +
                cc.q2 * h2 * (8.0 / 7.0) * r8 + cc.q3 * h3 * (16.0 / 15.0) * r16;
        d3[i] = s3 + q1 * (4.0 / 3.0) * r4 + 2.0 * cc.q2 * h * (8.0 / 7.0) * r8 +
                3.0 * cc.q3 * h2 * (16.0 / 15.0) * r16;
    }
    return GridFunction(L, std::move(val), std::move(d1), std::move(d2),
                        std::move(d3));
}

GammaPair eval_Gamma(const GridFunction& V, const MortalityModel& m, double gamma,
                     double eps, double z, const QuadratureRule& rule) {
    auto prof = eval_IW_profile(V, gamma, eps, {0.0, z}, rule, 1);
    double I0 = prof.I[0], Iz = prof.I[1];
    double mz = m.m(z);
    if (!(I0 + mz > 0.0)) {
        std::ostringstream os;
        os << "compatibility violated at z = " << z << ": I(0) + m(z) = " << I0 + mz;
        throw CompatibilityError(os.str());
    }
    if (!(Iz > 0.0)) {
        std::ostringstream os;
        os << "nonpositive I_eps at z = " << z;
        throw NumericalError(os.str());
    }
    return {std::log((I0 + mz) / I0), std::log(Iz / I0)};
}

GridFunction apply_H(const GridFunction& V, const MortalityModel& m, double eps,
                     const SolverConfig& cfg, const QuadratureRule& rule,
                     double* gamma_out, double* I0_out) {
    AlphaParameter alpha(cfg.alpha);
    auto e0 = check_E0_membership(V, m);
    if (!e0.ok) throw InputError("apply_H: " + e0.describe());

    GammaSolveOptions gopts;
    gopts.j_tol = cfg.gamma_tol;
    double gamma = solve_gamma(V, m, eps, alpha, rule, gopts);

    int n = V.size();
    std::vector<double> zs(n);
    for (int i = 0; i < n; ++i) zs[i] = V.node(i);
    IWProfile prof = eval_IW_profile(V, gamma, eps, zs, rule, cfg.threads);
    double I0 = prof.I[V.center()];

    // Gamma_eps = log((I0 + m)/I) on the grid; derivatives assembled from the
    // analytic m-side and the W brackets (never finite differences of I)
    std::vector<double> gv(n), g1(n), g2(n), g3(n);
    for (int i = 0; i < n; ++i) {
        double z = zs[i];
        double mz = m.m(z);
        double arg = I0 + mz;
        if (!(arg > 0.0)) {
            std::ostringstream os;
            os << "compatibility violated at z = " << z << ": I(0) + m(z) = " << arg;
            throw CompatibilityError(os.str());
        }
        if (!(prof.I[i] > 0.0)) {
            std::ostringstream os;
            os << "nonpositive I_eps at z = " << z;
            throw NumericalError(os.str());
        }
        gv[i] = std::log(arg / prof.I[i]);
        double a = 1.0 / arg;
        double m1 = m.Dm(z) * a;
        double m2 = m.D2m(z) * a - m1 * m1;
        double m3 = m.D3m(z) * a - 3.0 * m.D2m(z) * m.Dm(z) * a * a +
                    2.0 * m1 * m1 * m1;
        double w1 = prof.W1[i];
        double w2 = prof.W2[i] - w1 * w1;
        double w3 = prof.W3[i] - 3.0 * prof.W1[i] * prof.W2[i] + 2.0 * w1 * w1 * w1;
        g1[i] = m1 - w1;
        g2[i] = m2 - w2;
        g3[i] = m3 - w3;
    }
    GridFunction Gamma(V.half_width(), std::move(gv), std::move(g1), std::move(g2),
                       std::move(g3));
    if (gamma_out) *gamma_out = gamma;
    if (I0_out) *I0_out = I0;
    return series_S(Gamma, cfg.series_tol);
}

StationarySolution picard_solve(const MortalityModel& m, double eps,
                                const SolverConfig& cfg) {
    AlphaParameter alpha(cfg.alpha);
    if (!(eps > 0.0)) throw ConfigError("epsilon must be positive");
    if (eps > kEpsilonCap) {
        std::ostringstream os;
        os << "epsilon above contraction threshold: eps = " << eps << " exceeds cap "
           << kEpsilonCap;
        throw ConfigError(os.str());
    }
    auto mrep = validate_mortality(m, alpha, m.window());
    if (!mrep.accepted)
        throw InputError("mortality model rejected: " + mrep.reason + " at z = " +
                         std::to_string(mrep.first_offending_z));

    QuadratureRule rule(cfg.quad_order);
    StationarySolution sol;
    sol.eps = eps;
    sol.C_m = mrep.C_m;
    sol.R0 = 2.0 * mrep.C_m / (1.0 - kappa(cfg.alpha));
    sol.m_at_z0 = m.m_at_z0();

    // start from the proven eps -> 0 limit; 0 is not in E^alpha_0
    GridFunction V = v0_series(m, cfg.half_width, cfg.sample_count, cfg.series_tol);
    sol.max_norm = alpha_norm(V, alpha);

    double gamma = 0.0, I0 = 1.0;
    double w = cfg.relaxation;
    if (!(w > 0.0 && w <= 1.0)) throw ConfigError("relaxation must lie in (0, 1]");
    int rising = 0;
    bool converged = false;
    for (int it = 1; it <= cfg.max_iter; ++it) {
        GridFunction HV = apply_H(V, m, eps, cfg, rule, &gamma, &I0);
        GridFunction defect = subtract(HV, V);
        double res = alpha_norm(defect, alpha); // the fixed point defect of V
        sol.contraction_trace.push_back(res);
        sol.iterations = it;
        if (res <= cfg.picard_tol) {
            converged = true;
            sol.residual = res;
            break;
        }
        V = (w == 1.0) ? std::move(HV) : add(V, scale(defect, w));
        sol.max_norm = std::max(sol.max_norm, alpha_norm(V, alpha));
        if (sol.max_norm > sol.R0 + 1.0) {
            std::ostringstream os;
            os << "iterate left the invariant ball: |V|_alpha = " << sol.max_norm
               << " > R0 + 1 = " << sol.R0 + 1.0;
            throw ConvergenceError("invariant ball", os.str());
        }
        std::size_t k = sol.contraction_trace.size();
        if (k >= 2 && sol.contraction_trace[k - 1] > sol.contraction_trace[k - 2]) {
            if (++rising >= 3)
                throw ConvergenceError(
                    "picard contraction",
                    "epsilon above contraction threshold: residual grew for three "
                    "consecutive iterations");
        } else {
            rising = 0;
        }
    }
    if (!converged) {
        std::ostringstream os;
        os << "picard iteration did not converge in " << cfg.max_iter
           << " iterations; last residual = " << sol.contraction_trace.back();
        throw ConvergenceError("picard max-iter", os.str());
    }

    // gamma and lambda of the accepted corrector come from its own H
    // application, so lambda_eps = I_eps(V_eps)(0) holds by construction
    sol.gamma_eps = gamma;
    sol.lambda_eps = I0;
    sol.U = add_linear(V, sol.gamma_eps);
    sol.V = std::move(V);
    return sol;
}

DensityState reconstruct_F(const StationarySolution& sol, const MortalityModel& m,
                           double density_half_width, int density_count) {
    double eps = sol.eps;
    std::vector<double> v(density_count);
    double dz = 2.0 * density_half_width / (density_count - 1);
    double norm = 1.0 / (std::sqrt(2.0 * M_PI) * eps);
    for (int j = 0; j < density_count; ++j) {
        double zeta = -density_half_width + j * dz;
        double h = zeta - m.z0(); // density lives in original coordinates
        double expo = -h * h / (2.0 * eps * eps) - eval(sol.U, h, 0);
        v[j] = (expo < -745.0) ? 0.0 : norm * std::exp(expo);
    }
    DensityState F(density_half_width, std::move(v), eps);
    F.renormalize();
    return F;
}

double stationarity_residual(const DensityState& F, double lambda_raw,
                             const MortalityModel& m, double eps) {
    DensityState BF = apply_B(F, eps);
    double dz = F.spacing();
    int n = F.size();
    double num = 0.0, den = 0.0;
    for (int j = 0; j < n; ++j) {
        double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        double f = F.values()[j];
        num += w * std::abs(lambda_raw * f + m.raw(F.node(j)) * f - BF.values()[j]);
        den += w * f;
    }
    if (!(den > 0.0)) throw InputError("zero-mass density in stationarity residual");
    return num / den;
}

} // namespace infimod
