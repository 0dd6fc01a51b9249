#include "infimod/quadrature.hpp"

#include <cmath>
#include <sstream>

#include "infimod/errors.hpp"

namespace infimod {

double q_form(double y1, double y2) {
    return 0.5 * y1 * y2 + 0.75 * (y1 * y1 + y2 * y2);
}

namespace {

const double kSqrtPi = std::sqrt(M_PI);
const double kSqrt2 = std::sqrt(2.0);

// Physicists' Gauss-Hermite nodes and weights (weight exp(-x^2)) by Newton
// iteration on the orthonormal recurrence, long double throughout. Nodes are
// mirrored exactly so downstream symmetry cancellations are bitwise.
void gauss_hermite(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const long double pim4 = 0.7511255444649424828587030047762276930510L; // pi^{-1/4}
    long double z = 0.0;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        if (i == 0)
            z = std::sqrt((long double)(2 * n + 1)) -
                1.85575L * std::pow((long double)(2 * n + 1), -0.16667L);
        else if (i == 1)
            z -= 1.14L * std::pow((long double)n, 0.426L) / z;
        else if (i == 2)
            z = 1.86L * z - 0.86L * x[0];
        else if (i == 3)
            z = 1.91L * z - 0.91L * x[1];
        else
            z = 2.0L * z - x[i - 2];
        // x[] holds the descending positive nodes so far; keep long double
        // copies implicitly through z updates above (double rounding of the
        // starting guess is harmless for Newton)
        long double pp = 0.0L;
        for (int it = 0; it < 64; ++it) {
            long double p1 = pim4, p2 = 0.0L;
            for (int j = 1; j <= n; ++j) {
                long double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0L / j) * p2 - std::sqrt((j - 1.0L) / j) * p3;
            }
            pp = std::sqrt(2.0L * n) * p2;
            long double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-19L * (1.0L + std::abs(z))) break;
        }
        x[i] = static_cast<double>(z);
        x[n - 1 - i] = -x[i];
        w[i] = static_cast<double>(2.0L / (pp * pp));
        w[n - 1 - i] = w[i];
    }
}

} // namespace

QuadratureRule::QuadratureRule(int order) : n_(order) {
    if (order < 2 || order > 128)
        throw ConfigError("quadrature order must lie in [2, 128]");
    gauss_hermite(n_, x_, w_);

    // tensor rule in the decoupled coordinates: Q(y1,y2) = u^2 + v^2/2 with
    // u = (y1+y2)/sqrt(2), v = (y1-y2)/sqrt(2); substituting v = sqrt(2) t
    // turns both axes into plain exp(-x^2) Gauss-Hermite
    y1_.resize(n_ * n_);
    y2_.resize(n_ * n_);
    w2_.resize(n_ * n_);
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            double u = x_[i];
            double v = kSqrt2 * x_[j];
            int k = i * n_ + j;
            y1_[k] = (u + v) / kSqrt2;
            y2_[k] = (u - v) / kSqrt2;
            w2_[k] = w_[i] * w_[j] / M_PI;
        }
    }

    t_.resize(n_);
    v_.resize(n_);
    for (int i = 0; i < n_; ++i) {
        t_[i] = kSqrt2 * x_[i];
        v_[i] = w_[i] / kSqrtPi;
    }
}

double gauss_q2d(const std::function<double(double, double)>& g,
                 const QuadratureRule& rule) {
    CompensatedSum acc;
    const auto& y1 = rule.y1_nodes();
    const auto& y2 = rule.y2_nodes();
    const auto& w = rule.weights2d();
    for (std::size_t k = 0; k < w.size(); ++k) {
        double s = g(y1[k], y2[k]);
        if (!std::isfinite(s)) {
            std::ostringstream os;
            os << "non-finite integrand sample at (y1, y2) = (" << y1[k] << ", "
               << y2[k] << ")";
            throw NumericalError(os.str());
        }
        acc.add(w[k] * s);
    }
    return acc.value();
}

double gauss_1d(const std::function<double(double)>& g, const QuadratureRule& rule) {
    CompensatedSum acc;
    const auto& t = rule.y_nodes1d();
    const auto& v = rule.gauss_weights1d();
    for (std::size_t i = 0; i < t.size(); ++i) {
        double s = g(t[i]);
        if (!std::isfinite(s)) {
            std::ostringstream os;
            os << "non-finite integrand sample at y = " << t[i];
            throw NumericalError(os.str());
        }
        acc.add(v[i] * s);
    }
    return acc.value();
}

} // namespace infimod
