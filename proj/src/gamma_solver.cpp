#include "infimod/gamma_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "infimod/errors.hpp"

namespace infimod {

double d_eps(const GridFunction& V, double y1, double y2, double z, double eps,
             int order) {
    double zb = 0.5 * z;
    return eval(V, zb, order) - 0.5 * eval(V, zb + eps * y1, order) -
           0.5 * eval(V, zb + eps * y2, order);
}

GammaBracket GammaBracket::make(const GridFunction& V, const MortalityModel& m,
                                const AlphaParameter& alpha,
                                const QuadratureRule& rule) {
    GammaBracket b;
    b.norm_proxy = std::max(alpha_norm(V, alpha), 1.0);
    // raw second moment iint exp(-Q) (y1^2 + y2^2) = sqrt(2) pi * 3/2
    b.second_moment = std::sqrt(2.0) * M_PI *
                      gauss_q2d([](double y1, double y2) { return y1 * y1 + y2 * y2; },
                                rule);
    b.d2m0 = m.D2m(0.0);
    if (!(b.d2m0 > 0.0)) throw InputError("D2m(0) must be positive for the bracket");
    b.R_K = std::max((b.norm_proxy * b.second_moment + 8.0) / (2.0 * b.d2m0),
                     b.norm_proxy);
    return b;
}

namespace {

void check_eps(double eps) {
    if (!(eps > 0.0))
        throw ConfigError("epsilon must be positive");
    if (eps > kEpsilonCap) {
        std::ostringstream os;
        os << "epsilon above contraction threshold: eps = " << eps << " exceeds cap "
           << kEpsilonCap;
        throw ConfigError(os.str());
    }
}

// Precomputed z = 0 tables: J(g) only re-weights them with exp(-eps g s).
struct JTables {
    std::vector<double> twoD0;  // 2 D_eps(V)(y1,y2,0)
    std::vector<double> D1;     // D_eps(dV)(y1,y2,0)
    std::vector<double> s;      // y1 + y2
    double eps;

    JTables(const GridFunction& V, double eps_, const QuadratureRule& rule)
        : eps(eps_) {
        const auto& y1 = rule.y1_nodes();
        int nk = static_cast<int>(y1.size());
        std::vector<double> e0(nk), e1(nk);
        for (int k = 0; k < nk; ++k) {
            e0[k] = eval(V, eps * y1[k], 0);
            e1[k] = eval(V, eps * y1[k], 1);
        }
        double v0 = eval(V, 0.0, 0), v1 = eval(V, 0.0, 1);
        twoD0.resize(nk);
        D1.resize(nk);
        s.resize(nk);
        const auto& y2 = rule.y2_nodes();
        for (int k = 0; k < nk; ++k) {
            int km = rule.mirror_index(k);
            twoD0[k] = 2.0 * (v0 - 0.5 * e0[k] - 0.5 * e0[km]);
            D1[k] = v1 - 0.5 * e1[k] - 0.5 * e1[km];
            s[k] = y1[k] + y2[k];
        }
    }

    double J(double g, const QuadratureRule& rule) const {
        CompensatedSum acc;
        const auto& w = rule.weights2d();
        for (std::size_t k = 0; k < w.size(); ++k) {
            double ex = -eps * g * s[k] + twoD0[k];
            if (ex > 700.0)
                throw NumericalError("exponent overflow in J (ill-scaled V)");
            acc.add(w[k] * std::exp(ex) * D1[k]);
        }
        return acc.value() / (eps * eps);
    }
};

} // namespace

double eval_J(double g, const GridFunction& V, double eps, const QuadratureRule& rule) {
    check_eps(eps);
    return JTables(V, eps, rule).J(g, rule);
}

double solve_gamma(const GridFunction& V, const MortalityModel& m, double eps,
                   const AlphaParameter& alpha, const QuadratureRule& rule,
                   const GammaSolveOptions& opts, GammaSolveReport* report) {
    check_eps(eps);
    auto e0 = check_E0_membership(V, m);
    if (!e0.ok) throw InputError("solve_gamma: " + e0.describe());

    GammaBracket bracket = GammaBracket::make(V, m, alpha, rule);
    JTables tab(V, eps, rule);
    auto J = [&](double g) { return tab.J(g, rule); };

    double lo = -bracket.R_K, hi = bracket.R_K;
    double jlo = J(lo), jhi = J(hi);
    int iters = 2;
    if (!(jlo < 0.0 && jhi > 0.0)) {
        std::ostringstream os;
        os << "epsilon too large for this V: no sign change of J on (-R_K, R_K), R_K = "
           << bracket.R_K;
        throw ConvergenceError("gamma bracket", os.str());
    }

    // bisection down to a narrow interval, then secant to the certificate
    while (hi - lo > opts.bisect_width && iters < opts.max_iter) {
        double mid = 0.5 * (lo + hi);
        double jm = J(mid);
        ++iters;
        if (jm == 0.0) { lo = hi = mid; break; }
        (jm < 0.0 ? lo : hi) = mid;
    }
    double a = lo, b = hi, ja = J(a), jb = J(b);
    double g = 0.5 * (a + b), jg = J(g);
    iters += 3;
    while (std::abs(jg) > opts.j_tol && iters < opts.max_iter) {
        double denom = jb - ja;
        double next = (denom != 0.0) ? b - jb * (b - a) / denom : 0.5 * (a + b);
        if (!std::isfinite(next)) next = 0.5 * (a + b);
        a = b; ja = jb;
        b = next; jb = J(next);
        g = next; jg = jb;
        ++iters;
    }
    if (std::abs(jg) > opts.j_tol) {
        std::ostringstream os;
        os << "gamma root refinement stalled: |J| = " << std::abs(jg);
        throw ConvergenceError("gamma refine", os.str());
    }

    if (report) {
        report->gamma = g;
        report->j_at_root = jg;
        report->iterations = iters;
        report->bracket = bracket;
        report->monotone = true;
        double prev = J(-bracket.R_K);
        for (int i = 1; i < 17; ++i) {
            double gi = -bracket.R_K + 2.0 * bracket.R_K * i / 16.0;
            double ji = J(gi);
            if (!(ji > prev)) report->monotone = false;
            prev = ji;
        }
    }
    return g;
}

} // namespace infimod
