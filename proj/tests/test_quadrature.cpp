#include <cmath>
#include <map>

#include "doctest.h"
#include "infimod/errors.hpp"
#include "infimod/quadrature.hpp"

using namespace infimod;

namespace {

// Closed-form Gaussian moments E[y1^a y2^b] for covariance [[3,-1],[-1,3]]/4
// through Stein's recursion; independent of the quadrature path.
double gauss_moment(int a, int b) {
    static std::map<std::pair<int, int>, double> memo;
    if (a < 0 || b < 0) return 0.0;
    if (a == 0 && b == 0) return 1.0;
    if ((a + b) % 2 == 1) return 0.0;
    auto key = std::make_pair(a, b);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    const double s11 = 0.75, s12 = -0.25;
    double r;
    if (a >= 1)
        r = (a - 1) * s11 * gauss_moment(a - 2, b) + b * s12 * gauss_moment(a - 1, b - 1);
    else
        r = (b - 1) * s11 * gauss_moment(a, b - 2);
    memo[key] = r;
    return r;
}

} // namespace

TEST_CASE("q_form values") {
    CHECK(q_form(0.0, 0.0) == 0.0);
    CHECK(q_form(1.0, 1.0) == doctest::Approx(2.0));
    CHECK(q_form(1.0, -1.0) == doctest::Approx(1.0));
    CHECK(q_form(0.3, -1.7) == doctest::Approx(q_form(-1.7, 0.3))); // symmetric
}

TEST_CASE("1d Gauss-Hermite data is symmetric and normalized") {
    QuadratureRule rule(24);
    const auto& x = rule.nodes1d();
    const auto& w = rule.weights1d();
    double sum = 0.0;
    for (int i = 0; i < 24; ++i) {
        CHECK(x[i] == -x[23 - i]);
        CHECK(w[i] > 0.0);
        sum += w[i];
    }
    CHECK(sum == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
}

TEST_CASE("bivariate identities at order 24") {
    QuadratureRule rule(24);
    CHECK(std::abs(gauss_q2d([](double, double) { return 1.0; }, rule) - 1.0) < 1e-12);
    CHECK(std::abs(gauss_q2d([](double y1, double y2) { return y1 + y2; }, rule)) <
          1e-12);
    CHECK(std::abs(gauss_q2d([](double y1, double y2) { return y1 * y1 + y2 * y2; },
                             rule) -
                   1.5) < 1e-10);
    CHECK(std::abs(gauss_q2d([](double y1, double y2) { return y1 * y2; }, rule) +
                   0.25) < 1e-10);
}

TEST_CASE("univariate identities") {
    QuadratureRule rule(24);
    CHECK(gauss_1d([](double) { return 1.0; }, rule) == doctest::Approx(1.0));
    CHECK(std::abs(gauss_1d([](double y) { return y; }, rule)) < 1e-14);
    CHECK(gauss_1d([](double y) { return y * y; }, rule) == doctest::Approx(1.0));
}

TEST_CASE("tensor rule is exact on polynomials of total degree <= 9 at n = 20") {
    QuadratureRule rule(20);
    for (int a = 0; a <= 9; ++a) {
        for (int b = 0; a + b <= 9; ++b) {
            double got = gauss_q2d(
                [a, b](double y1, double y2) {
                    return std::pow(y1, a) * std::pow(y2, b);
                },
                rule);
            CHECK(std::abs(got - gauss_moment(a, b)) < 1e-10);
        }
    }
}

TEST_CASE("order 20 vs order 40 agreement on smooth integrands") {
    QuadratureRule r20(20), r40(40);
    auto corpus = {
        std::function<double(double, double)>(
            [](double y1, double y2) { return std::exp(-0.1 * (y1 + y2)); }),
        std::function<double(double, double)>(
            [](double y1, double y2) { return std::exp(0.05 * y1 * y2 * 0.1) * y1 * y1; }),
        std::function<double(double, double)>(
            [](double y1, double y2) { return std::cos(0.3 * y1 - 0.2 * y2); }),
    };
    for (const auto& g : corpus)
        CHECK(std::abs(gauss_q2d(g, r20) - gauss_q2d(g, r40)) < 1e-10);

    auto g1 = [](double y) { return std::exp(-0.2 * y) + y * y; };
    CHECK(std::abs(gauss_1d(g1, r20) - gauss_1d(g1, r40)) < 1e-10);
}

TEST_CASE("mirror index pairs the y2 multiset onto the y1 table") {
    QuadratureRule rule(24);
    const auto& y1 = rule.y1_nodes();
    const auto& y2 = rule.y2_nodes();
    for (int k = 0; k < 24 * 24; ++k) CHECK(y2[k] == y1[rule.mirror_index(k)]);
}

TEST_CASE("error paths") {
    QuadratureRule rule(12);
    CHECK_THROWS_AS(gauss_q2d([](double y1, double) { return std::log(y1); }, rule),
                    NumericalError);
    CHECK_THROWS_AS(gauss_1d([](double y) { return 1.0 / (y - y); }, rule),
                    NumericalError);
    CHECK_THROWS_AS(QuadratureRule(1), ConfigError);
}
