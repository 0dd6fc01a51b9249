#pragma once

#include "infimod/grid_function.hpp"
#include "infimod/mortality.hpp"
#include "infimod/quadrature.hpp"

namespace infimod {

/// Symmetric finite-difference functional
/// D_eps(V)(y1,y2,z) = V(z/2) - V(z/2 + eps y1)/2 - V(z/2 + eps y2)/2,
/// applied to the order-th derivative data of V.
double d_eps(const GridFunction& V, double y1, double y2, double z, double eps,
             int order);

/// Search interval for the implicit linear part: |gamma_eps(V)| < R_K with
/// R_K = max( (|K|_a * M + 8) / (2 D2m(0)), |K|_a ),
/// M = iint exp(-Q) (y1^2+y2^2), and |K|_a instantiated as the running
/// iterate norm max(alpha_norm(V), 1).
struct GammaBracket {
    double R_K = 0.0;
    double norm_proxy = 0.0;
    double second_moment = 0.0;
    double d2m0 = 0.0;

    static GammaBracket make(const GridFunction& V, const MortalityModel& m,
                             const AlphaParameter& alpha, const QuadratureRule& rule);
};

/// J_eps(g, V) = (1/(eps^2 sqrt(2) pi)) * iint
///   exp(-Q - eps g (y1+y2) + 2 D_eps(V)(y1,y2,0)) D_eps(dV)(y1,y2,0).
/// The 1/eps^2 prefactor keeps an O(1) limit; tolerances are on this scale.
double eval_J(double g, const GridFunction& V, double eps, const QuadratureRule& rule);

struct GammaSolveOptions {
    double j_tol = 1e-13;
    double bisect_width = 1e-6; ///< bisection handoff width before secant
    int max_iter = 200;
};

struct GammaSolveReport {
    double gamma = 0.0;
    double j_at_root = 0.0;
    int iterations = 0;
    GammaBracket bracket;
    bool monotone = true; ///< J sampled at 17 bracket points strictly increasing
};

/// Solve J_eps(gamma, V) = 0 on (-R_K, R_K) by bracketed bisection refined by
/// secant, exploiting strict monotonicity of g -> J_eps(g, V). Preconditions:
/// V in E^alpha_0, eps <= cap. Throws ConvergenceError("gamma bracket") when
/// the bracket shows no sign change (the eps_K threshold is exceeded).
double solve_gamma(const GridFunction& V, const MortalityModel& m, double eps,
                   const AlphaParameter& alpha, const QuadratureRule& rule,
                   const GammaSolveOptions& opts = {},
                   GammaSolveReport* report = nullptr);

} // namespace infimod
