#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "infimod/errors.hpp"
#include "infimod/limit_objects.hpp"

using namespace infimod;

TEST_CASE("lambda0") {
    CHECK(lambda0(make_preset_mortality("quadratic")) == doctest::Approx(1.0));

    // un-normalized double well with m(z0) = 0.2: (z^2-1)^2 + 0.2
    auto lifted = make_polynomial_mortality({1.2, 0.0, -2.0, 0.0, 1.0}, 1.0, 8.0);
    CHECK(lifted.m_at_z0() == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(lambda0(lifted) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("gamma0 formula and scaling invariance") {
    CHECK(gamma0(make_preset_mortality("quadratic")) == doctest::Approx(0.0));
    CHECK(gamma0(make_preset_mortality("cubic_perturbed")) ==
          doctest::Approx(0.5).epsilon(1e-12));

    // m = 2 z^2 + z^3: D3m(0) / (2 D2m(0)) = 6 / 8
    auto steep = make_polynomial_mortality({0.0, 0.0, 2.0, 1.0}, 0.0, 4.0);
    CHECK(gamma0(steep) == doctest::Approx(0.75).epsilon(1e-12));

    for (double c : {0.5, 2.0, 3.0}) {
        auto scaled = make_polynomial_mortality({0.0, 0.0, 0.5 * c, c / 6.0}, 0.0, 8.0);
        CHECK(gamma0(scaled) ==
              doctest::Approx(gamma0(make_preset_mortality("cubic_perturbed")))
                  .epsilon(1e-12));
    }
}

TEST_CASE("V0 series: curvature identity, frozen value, reflection") {
    for (const char* name : {"quadratic", "cubic_perturbed"}) {
        auto m = make_preset_mortality(name);
        auto V0 = v0_series(m, std::min(m.window(), 6.0), 513, 1e-12);
        CHECK(std::abs(V0.values()[V0.center()]) < 1e-14);
        CHECK(std::abs(V0.deriv1()[V0.center()]) < 1e-10);
        // d2 V0(0) = 2 d2 m(0)
        CHECK(V0.deriv2()[V0.center()] ==
              doctest::Approx(2.0 * m.D2m(0.0)).epsilon(1e-10));
    }

    auto mq = make_preset_mortality("quadratic");
    auto V0 = v0_series(mq, 6.0, 513, 1e-12);
    double oracle = 0.0; // brute-force partial sums to K = 40
    for (int k = 40; k >= 0; --k) {
        double x = std::ldexp(1.0, -k);
        oracle += std::ldexp(1.0, k) * std::log1p(0.5 * x * x);
    }
    CHECK(std::abs(eval(V0, 1.0, 0) - oracle) < 1e-6);
    CHECK(eval(V0, 1.0, 0) == doctest::Approx(0.8889).epsilon(1.5e-3));

    // V0 of m(-z) is the reflection of V0 of m
    auto mc = make_preset_mortality("cubic_perturbed");
    auto flipped = make_polynomial_mortality({0.0, 0.0, 0.5, -1.0 / 6.0}, 0.0, 3.0);
    auto a = v0_series(flipped, 3.0, 513, 1e-12);
    auto b = reflect(v0_series(mc, 3.0, 513, 1e-12));
    for (int i = 0; i < a.size(); ++i)
        CHECK(std::abs(a.values()[i] - b.values()[i]) < 1e-10);
}

TEST_CASE("compatibility violation is reported with a location") {
    // (z^2-1)^2 + z: the right basin sits above 1 + inf m
    CHECK_THROWS_AS(
        v0_series(make_polynomial_mortality({1.0, 1.0, -2.0, 0.0, 1.0}, 0.85, 8.0), 6.0,
                  513, 1e-12),
        CompatibilityError);
}

TEST_CASE("U0 solves the limit problem") {
    auto mc = make_preset_mortality("cubic_perturbed");
    auto U0 = u0(mc, 3.0, 513, 1e-12);
    CHECK(std::abs(U0.values()[U0.center()]) < 1e-14);
    CHECK(U0.deriv1()[U0.center()] == doctest::Approx(0.5).epsilon(1e-10));

    // even model: U0 = V0
    auto mq = make_preset_mortality("quadratic");
    auto Uq = u0(mq, 6.0, 513, 1e-12);
    auto Vq = v0_series(mq, 6.0, 513, 1e-12);
    for (int i = 0; i < Uq.size(); ++i)
        CHECK(Uq.values()[i] == doctest::Approx(Vq.values()[i]).epsilon(1e-14));

    // exp-residual of (PU0) at dyadic-exact nodes, every corpus model
    for (const char* name : {"quadratic", "cubic_perturbed", "double_well"}) {
        auto m = make_preset_mortality(name);
        auto U = u0(m, std::min(m.window(), 6.0), 513, 1e-12);
        int c = U.center();
        double worst = 0.0;
        for (int i = c % 2; i < U.size(); i += 2) {
            double z = U.node(i);
            if (std::abs(z) > 2.0) continue;
            int half = c + (i - c) / 2;
            double resid =
                std::exp(U.values()[i] - 2.0 * U.values()[half]) - (1.0 + m.m(z));
            worst = std::max(worst, std::abs(resid));
        }
        CHECK(worst <= 1e-11); // 10 x series tolerance
    }
}

TEST_CASE("degenerate sweep report") {
    std::vector<StationarySolution> one(1);
    one[0].eps = 0.1;
    one[0].U = build_grid_function([](double z) { return 0.5 * z * z; }, 6.0, 513);
    one[0].V = one[0].U;
    one[0].lambda_eps = 1.0;
    one[0].gamma_eps = 0.0;
    auto m = make_preset_mortality("quadratic");
    auto rep = convergence_report(one, m, 1.0);
    CHECK(rep.rows.size() == 1);
    CHECK(std::isnan(rep.slope_lambda)); // no fit from a single point
    CHECK(rep.to_csv().find("eps,") == 0);
}
