#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace infimod {

/// Solvers refuse epsilon above this: the exponential tilt must stay
/// dominated by Q on the node range, and the model regime is epsilon -> 0.
inline constexpr double kEpsilonCap = 0.5;

/// Residual quadratic form after rescaling the reproduction integral:
/// Q(y1,y2) = y1 y2 / 2 + 3 (y1^2 + y2^2) / 4. Symmetric positive definite;
/// exp(-Q)/(sqrt(2) pi) is a bivariate normal density with covariance
/// [[3,-1],[-1,3]]/4.
double q_form(double y1, double y2);

/// Gauss-Hermite data realizing the exp(-Q) bivariate and exp(-y^2/2)
/// univariate Gaussian measures. The 2D rule is the tensor rule in the
/// decoupled coordinates u = (y1+y2)/sqrt(2), v = (y1-y2)/sqrt(2), in which
/// Q = u^2 + v^2/2, so a product rule applies without cross-weight error.
/// Immutable; integration calls are pure.
class QuadratureRule {
public:
    explicit QuadratureRule(int order = 24);

    int order() const { return n_; }

    /// Physicists' Gauss-Hermite nodes/weights (weight exp(-x^2)).
    const std::vector<double>& nodes1d() const { return x_; }
    const std::vector<double>& weights1d() const { return w_; }

    // Flattened 2D tables, index k = i*n + j. Weights are normalized so that
    // sum(weight2d) integrates exp(-Q)/(sqrt(2) pi) to 1.
    const std::vector<double>& y1_nodes() const { return y1_; }
    const std::vector<double>& y2_nodes() const { return y2_; }
    const std::vector<double>& weights2d() const { return w2_; }
    /// The multiset {y2(i,j)} equals {y1(i,j)} under j -> n-1-j; this index
    /// map lets callers share one evaluation table between y1 and y2.
    int mirror_index(int k) const { return (k / n_) * n_ + (n_ - 1 - k % n_); }

    // 1D tables for (1/sqrt(2 pi)) int exp(-y^2/2) g(y) dy: nodes sqrt(2)*x,
    // weights normalized to sum 1.
    const std::vector<double>& y_nodes1d() const { return t_; }
    const std::vector<double>& gauss_weights1d() const { return v_; }

private:
    int n_;
    std::vector<double> x_, w_;
    std::vector<double> y1_, y2_, w2_;
    std::vector<double> t_, v_;
};

/// (1/(sqrt(2) pi)) * iint exp(-Q(y1,y2)) g(y1,y2) dy1 dy2.
/// Throws NumericalError (with the node location) on a non-finite sample.
double gauss_q2d(const std::function<double(double, double)>& g,
                 const QuadratureRule& rule);

/// (1/sqrt(2 pi)) * int exp(-y^2/2) g(y) dy.
double gauss_1d(const std::function<double(double)>& g, const QuadratureRule& rule);

/// Neumaier-compensated accumulator; the 1/eps^2 prefactor of J would
/// otherwise eat the root certificate at small eps.
struct CompensatedSum {
    double sum = 0.0, comp = 0.0;
    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

} // namespace infimod
