#pragma once

#include <vector>

#include "infimod/grid_function.hpp"
#include "infimod/infinitesimal.hpp"
#include "infimod/mortality.hpp"
#include "infimod/quadrature.hpp"

namespace infimod {

/// Contraction constant of the dyadic third-derivative part of H:
/// kappa(a) = 2^(1+a) / (4 - 2^a); < 1 iff a < 2 - log2(3) ~ 0.415.
double kappa(double alpha);

/// Dilation series S(Lambda)(h) = sum_k 2^k Lambda(2^-k h), truncated at K
/// with explicit Taylor tail corrections per derivative order. Requires
/// Lambda(0) = 0 (1e-10) and dLambda(0) = 0 (1e-8), else the series diverges.
/// K is chosen so the post-correction remainder estimate is <= tol.
GridFunction series_S(const GridFunction& Lambda, double tol);

/// The two logarithms making up one series term:
/// Gamma_m = log((I(0)+m(z))/I(0)),  Gamma_I = log(I(z)/I(0)).
struct GammaPair {
    double gamma_m = 0.0;
    double gamma_I = 0.0;
};
GammaPair eval_Gamma(const GridFunction& V, const MortalityModel& m, double gamma,
                     double eps, double z, const QuadratureRule& rule);

struct SolverConfig {
    double alpha = 0.4;
    double picard_tol = 1e-10;
    int max_iter = 200;
    double series_tol = 1e-12;
    double gamma_tol = 1e-13;
    int quad_order = 24;
    double half_width = 6.0; ///< corrector grid window
    int sample_count = 513;
    int threads = 0; ///< 0 = hardware concurrency
    /// Under-relaxation weight for V <- V + w (H(V) - V). The map has a
    /// near-neutral alternating mode for asymmetric m at moderate eps; the
    /// fixed point is unchanged and w = 0.7 maps that mode well inside the
    /// unit disk.
    double relaxation = 0.7;
};

/// One application of the fixed point mapping
/// H(V)(h) = sum_k 2^k log( (I_eps(V)(0) + m(2^-k h)) / I_eps(V)(2^-k h) ).
/// Output satisfies H(V)(0) = 0, dH(V)(0) = 0 (by the choice of gamma_eps)
/// and d2H(V)(0) >= d2m(0). `gamma_out`/`I0_out` receive the solved linear
/// part and I_eps(V)(0) when non-null.
GridFunction apply_H(const GridFunction& V, const MortalityModel& m, double eps,
                     const SolverConfig& cfg, const QuadratureRule& rule,
                     double* gamma_out = nullptr, double* I0_out = nullptr);

struct StationarySolution {
    double eps = 0.0;
    double lambda_eps = 0.0; ///< I_eps(V_eps)(0), translated frame
    double gamma_eps = 0.0;
    GridFunction V;          ///< corrector, fixed point of H
    GridFunction U;          ///< gamma_eps * z + V_eps
    int iterations = 0;
    double residual = 0.0;   ///< final alpha-norm increment
    std::vector<double> contraction_trace; ///< residual per iteration
    double R0 = 0.0;  ///< invariant-ball radius 2 C_m / (1 - kappa(alpha))
    double C_m = 0.0;
    double max_norm = 0.0;   ///< max alpha_norm(V_n) along the run
    double m_at_z0 = 0.0;    ///< raw m at the working minimum

    /// Growth-rate scalar in untranslated coordinates: lambda - m(z0).
    double lambda_raw() const { return lambda_eps - m_at_z0; }
};

/// Picard iteration V <- H(V) from the eps = 0 initialization V0 until the
/// alpha-norm increment drops below picard_tol. Throws ConvergenceError
/// ("picard contraction") after three consecutive residual increases.
StationarySolution picard_solve(const MortalityModel& m, double eps,
                                const SolverConfig& cfg);

/// F_eps(z) = exp(-(z-z0)^2/(2 eps^2) - U_eps(z-z0)) / (sqrt(2 pi) eps),
/// sampled on the density grid (original coordinates) and renormalized to
/// unit mass.
DensityState reconstruct_F(const StationarySolution& sol, const MortalityModel& m,
                           double density_half_width, int density_count);

/// || lambda F + m F - B_eps(F) ||_L1 / ||F||_L1 with m and lambda in the
/// untranslated frame.
double stationarity_residual(const DensityState& F, double lambda_raw,
                             const MortalityModel& m, double eps);

} // namespace infimod
