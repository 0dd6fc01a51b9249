#include <cmath>
#include <random>

#include "doctest.h"
#include "infimod/errors.hpp"
#include "infimod/grid_function.hpp"
#include "infimod/mortality.hpp"

using namespace infimod;

TEST_CASE("finite differences reproduce low-degree polynomials") {
    auto quad = build_grid_function([](double z) { return z * z; }, 2.0, 41);
    for (int i = 0; i < quad.size(); ++i)
        CHECK(std::abs(quad.deriv2()[i] - 2.0) < 1e-10);

    auto sine = build_grid_function([](double z) { return std::sin(z); }, 2.0, 321);
    CHECK(std::abs(sine.deriv1()[sine.center()] - 1.0) < 1e-8);

    auto quartic = build_grid_function([](double z) { return z * z * z * z; }, 1.0, 65);
    double exact = 24.0 * 0.5; // third derivative of z^4 evaluated at 0.5
    CHECK(std::abs(eval(quartic, 0.5, 3) - exact) < 1e-8);
}

TEST_CASE("evaluation: interpolation, node hits, Taylor continuation") {
    auto cubic = build_grid_function([](double z) { return z * z * z; }, 2.0, 65);
    CHECK(std::abs(eval(cubic, 0.5, 0) - 0.125) < 1e-10);

    auto centered = build_grid_function([](double z) { return z * z; }, 2.0, 41);
    CHECK(eval(centered, 0.0, 0) == 0.0); // node hit is exact

    auto quad = build_grid_function([](double z) { return z * z; }, 1.0, 41);
    CHECK(std::abs(eval(quad, 1.3, 0) - 1.69) < 1e-12); // quadratic continuation exact
    CHECK(quad.out_of_window_count() == 1);
    CHECK(std::abs(eval(quad, -1.5, 1) - (-3.0)) < 1e-10);
    CHECK(quad.out_of_window_count() == 2);
}

TEST_CASE("polynomial reproduction up to cubic at every order") {
    std::mt19937 rng(20240611);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        double a = coef(rng), b = coef(rng), c = coef(rng), d = coef(rng);
        auto p = [&](double z) { return a + b * z + c * z * z + d * z * z * z; };
        auto gf = build_grid_function(p, 3.0, 129);
        std::uniform_real_distribution<double> pts(-3.0, 3.0);
        for (int k = 0; k < 25; ++k) {
            double z = pts(rng);
            CHECK(std::abs(eval(gf, z, 0) - p(z)) < 1e-8);
            CHECK(std::abs(eval(gf, z, 1) - (b + 2 * c * z + 3 * d * z * z)) < 1e-8);
            CHECK(std::abs(eval(gf, z, 2) - (2 * c + 6 * d * z)) < 1e-8);
            CHECK(std::abs(eval(gf, z, 3) - 6 * d) < 1e-8);
        }
    }
}

TEST_CASE("alpha norm: examples and algebraic properties") {
    AlphaParameter alpha(0.4);

    auto linear = build_grid_function([](double z) { return z; }, 4.0, 65);
    CHECK(alpha_norm(linear, alpha) == doctest::Approx(1.0).epsilon(1e-12));

    auto zero = build_grid_function([](double) { return 0.0; }, 4.0, 65);
    CHECK(alpha_norm(zero, alpha) == 0.0);

    // sup |Du| = 4 beats (1+4)^0.4 * 1 ~ 1.9037
    auto halfsq = build_grid_function([](double z) { return 0.5 * z * z; }, 4.0, 65);
    CHECK(alpha_norm(halfsq, alpha) == doctest::Approx(4.0).epsilon(1e-10));

    std::mt19937 rng(777);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        double a2 = coef(rng), a3 = coef(rng), b2 = coef(rng), b3 = coef(rng);
        auto u = build_grid_function(
            [&](double z) { return a2 * z * z + a3 * z * z * z; }, 3.0, 65);
        auto v = build_grid_function(
            [&](double z) { return b2 * z * z + b3 * std::sin(z); }, 3.0, 65);
        double c = 2.0 * coef(rng);
        CHECK(alpha_norm(scale(u, c), alpha) ==
              doctest::Approx(std::abs(c) * alpha_norm(u, alpha)).epsilon(1e-12));
        CHECK(alpha_norm(add(u, v), alpha) <=
              alpha_norm(u, alpha) + alpha_norm(v, alpha) + 1e-12);
    }
}

TEST_CASE("E0 membership") {
    auto m = make_preset_mortality("quadratic");

    auto sq = build_grid_function([](double z) { return z * z; }, 4.0, 65);
    CHECK(check_E0_membership(sq, m).ok); // D2 = 2 >= 1

    auto lin = build_grid_function([](double z) { return z; }, 4.0, 65);
    auto bad = check_E0_membership(lin, m);
    CHECK_FALSE(bad.ok);
    CHECK_FALSE(bad.slope_ok);

    auto shallow = build_grid_function([](double z) { return 0.25 * z * z; }, 4.0, 65);
    CHECK_FALSE(check_E0_membership(shallow, m).ok); // 1/2 < 1
}

TEST_CASE("construction guards") {
    CHECK_THROWS_AS(build_grid_function([](double z) { return z; }, 2.0, 40),
                    ConfigError); // even
    CHECK_THROWS_AS(build_grid_function([](double z) { return z; }, 2.0, 31),
                    ConfigError); // too small
    CHECK_THROWS_AS(build_grid_function([](double z) { return 1.0 / z; }, 2.0, 41),
                    InputError); // inf at z = 0
    CHECK_THROWS_AS(AlphaParameter(0.0), ConfigError);
    CHECK_THROWS_AS(AlphaParameter(0.45), ConfigError);
    CHECK_NOTHROW(AlphaParameter(0.4));

    auto gf = build_grid_function([](double z) { return z; }, 2.0, 41);
    CHECK_THROWS_AS(eval(gf, 0.0, 4), InputError);
}

TEST_CASE("grid arithmetic helpers") {
    auto u = build_grid_function([](double z) { return z * z; }, 3.0, 65);
    auto w = reflect(u);
    for (int i = 0; i < u.size(); ++i)
        CHECK(w.values()[i] == doctest::Approx(u.values()[i]).epsilon(1e-14));
    CHECK(w.deriv1()[10] == doctest::Approx(-u.deriv1()[u.size() - 11]).epsilon(1e-14));

    auto lin = add_linear(u, 2.0);
    CHECK(eval(lin, 1.0, 0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(eval(lin, 1.0, 1) == doctest::Approx(4.0).epsilon(1e-10));

    auto diff = subtract(lin, u);
    CHECK(eval(diff, 1.5, 0) == doctest::Approx(3.0).epsilon(1e-12));
}
