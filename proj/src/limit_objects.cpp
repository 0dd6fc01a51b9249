#include "infimod/limit_objects.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "infimod/errors.hpp"

namespace infimod {

double lambda0(const MortalityModel& m) { return 1.0 - m.m_at_z0(); }

double gamma0(const MortalityModel& m) {
    double d2 = m.D2m(0.0);
    if (!(d2 > 1e-14))
        throw InputError("gamma0: degenerate second derivative at the critical point");
    return m.D3m(0.0) / (2.0 * d2);
}

GridFunction v0_series(const MortalityModel& m, double half_width, int sample_count,
                       double tol) {
    // dense scan first so the error names the worst point, not just a node
    int dense = 4 * sample_count;
    for (int i = 0; i < dense; ++i) {
        double z = -half_width + 2.0 * half_width * i / (dense - 1);
        if (!(1.0 + m.m(z) > 0.0)) {
            std::ostringstream os;
            os << "compatibility condition failed: 1 + m(z) <= 0 at z = " << z
               << " (need m(z0) < 1 + inf m)";
            throw CompatibilityError(os.str());
        }
    }

    int n = sample_count;
    double h = 2.0 * half_width / (n - 1);
    std::vector<double> lv(n), l1(n), l2(n), l3(n);
    for (int i = 0; i < n; ++i) {
        double z = -half_width + i * h;
        double mz = m.m(z);
        double a = 1.0 / (1.0 + mz);
        lv[i] = std::log1p(mz);
        double m1 = m.Dm(z) * a;
        l1[i] = m1;
        l2[i] = m.D2m(z) * a - m1 * m1;
        l3[i] = m.D3m(z) * a - 3.0 * m.D2m(z) * m.Dm(z) * a * a + 2.0 * m1 * m1 * m1;
    }
    GridFunction Lambda(half_width, std::move(lv), std::move(l1), std::move(l2),
                        std::move(l3));
    return series_S(Lambda, tol);
}

GridFunction u0(const MortalityModel& m, double half_width, int sample_count,
                double tol) {
    return add_linear(v0_series(m, half_width, sample_count, tol), gamma0(m));
}

namespace {

double fit_loglog_slope(const std::vector<double>& eps,
                        const std::vector<double>& err) {
    // least squares on log-log; degenerate inputs give NaN
    int n = 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(err[i] > 0.0)) continue;
        double x = std::log(eps[i]), y = std::log(err[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / denom;
}

} // namespace

ConvergenceReport convergence_report(const std::vector<StationarySolution>& solutions,
                                     const MortalityModel& m, double region,
                                     double third_deriv_R) {
    ConvergenceReport rep;
    if (solutions.empty()) return rep;

    const GridFunction& ref = solutions.front().U;
    GridFunction U0 = u0(m, ref.half_width(), ref.size(), 1e-12);
    double g0 = gamma0(m);

    for (const auto& sol : solutions) {
        if (sol.U.size() != U0.size() || sol.U.half_width() != U0.half_width())
            throw InputError("convergence_report: solutions on mismatched grids");
        ConvergenceRow row;
        row.eps = sol.eps;
        int n = U0.size();
        for (int i = 0; i < n; ++i) {
            double z = U0.node(i);
            if (std::abs(z) > region) continue;
            row.err_U = std::max(row.err_U,
                                 std::abs(sol.U.values()[i] - U0.values()[i]));
            row.err_dU = std::max(row.err_dU,
                                  std::abs(sol.U.deriv1()[i] - U0.deriv1()[i]));
            row.err_d2U = std::max(row.err_d2U,
                                   std::abs(sol.U.deriv2()[i] - U0.deriv2()[i]));
        }
        row.err_lambda = std::abs(sol.lambda_eps - 1.0);
        row.err_gamma = std::abs(sol.gamma_eps - g0);
        double zmax = sol.eps * third_deriv_R;
        for (int k = 0; k <= 100; ++k) {
            double z = -zmax + 2.0 * zmax * k / 100.0;
            row.third_window =
                std::max(row.third_window, std::abs(eval(sol.V, z, 3) -
                                                    (4.0 / 3.0) * m.D3m(z)));
        }
        rep.rows.push_back(row);
    }
    std::sort(rep.rows.begin(), rep.rows.end(),
              [](const ConvergenceRow& a, const ConvergenceRow& b) {
                  return a.eps > b.eps;
              });

    std::vector<double> e, c1, c2, c3, c4, c5;
    for (const auto& r : rep.rows) {
        e.push_back(r.eps);
        c1.push_back(r.err_U);
        c2.push_back(r.err_dU);
        c3.push_back(r.err_d2U);
        c4.push_back(r.err_lambda);
        c5.push_back(r.err_gamma);
    }
    rep.slope_U = fit_loglog_slope(e, c1);
    rep.slope_dU = fit_loglog_slope(e, c2);
    rep.slope_d2U = fit_loglog_slope(e, c3);
    rep.slope_lambda = fit_loglog_slope(e, c4);
    rep.slope_gamma = fit_loglog_slope(e, c5);

    rep.monotone = true;
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        const auto& a = rep.rows[i - 1];
        const auto& b = rep.rows[i];
        if (b.err_U > a.err_U || b.err_dU > a.err_dU || b.err_d2U > a.err_d2U ||
            b.err_lambda > a.err_lambda || b.err_gamma > a.err_gamma)
            rep.monotone = false;
    }
    return rep;
}

std::string ConvergenceReport::to_csv() const {
    std::ostringstream os;
    os.precision(12);
    os << "eps,err_U0,err_dU0,err_d2U0,err_lambda,err_gamma,third_window\n";
    for (const auto& r : rows)
        os << r.eps << ',' << r.err_U << ',' << r.err_dU << ',' << r.err_d2U << ','
           << r.err_lambda << ',' << r.err_gamma << ',' << r.third_window << '\n';
    os << "slope," << slope_U << ',' << slope_dU << ',' << slope_d2U << ','
       << slope_lambda << ',' << slope_gamma << ",\n";
    os << "monotone," << (monotone ? "pass" : "fail") << ",,,,,\n";
    return os.str();
}

} // namespace infimod
