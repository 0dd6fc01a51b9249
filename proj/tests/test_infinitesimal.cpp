#include <cmath>
#include <random>

#include "doctest.h"
#include "infimod/errors.hpp"
#include "infimod/gamma_solver.hpp"
#include "infimod/infinitesimal.hpp"
#include "infimod/limit_objects.hpp"

using namespace infimod;

TEST_CASE("I_eps tends to one and stays in the delta-band") {
    QuadratureRule rule(24);
    auto V = build_grid_function(
        [](double z) { return 0.5 * z * z + z * z * z / 6.0; }, 6.0, 257);

    CHECK(std::abs(eval_I(V, 0.0, 1e-3, 0.7, rule) - 1.0) < 1e-5);

    auto m = make_preset_mortality("cubic_perturbed");
    AlphaParameter alpha(0.4);
    auto V0 = v0_series(m, 3.0, 257, 1e-12);
    double eps = 0.05;
    double gamma = solve_gamma(V0, m, eps, alpha, rule);
    double worst = 0.0;
    for (double z = -2.0; z <= 2.0; z += 0.125)
        worst = std::max(worst, std::abs(eval_I(V0, gamma, eps, z, rule) - 1.0));
    CHECK(worst <= 0.1); // delta = 0.1 band at eps = 0.05

    // deviation scale at the origin: |I(0) - 1| <= eps * C * |V|_alpha with C
    // fitted on the coarsest eps
    double n0 = alpha_norm(V0, alpha);
    double dev1 = std::abs(eval_I(V0, solve_gamma(V0, m, 0.1, alpha, rule), 0.1, 0.0,
                                  rule) - 1.0);
    double C = dev1 / (0.1 * n0);
    for (double e : {0.05, 0.025}) {
        double dev = std::abs(eval_I(V0, solve_gamma(V0, m, e, alpha, rule), e, 0.0,
                                     rule) - 1.0);
        CHECK(dev <= 1.5 * C * e * n0);
    }

    // uniform deviation is nonincreasing as eps halves
    double sup_big = 0.0, sup_small = 0.0;
    double g1 = solve_gamma(V0, m, 0.1, alpha, rule);
    double g2 = solve_gamma(V0, m, 0.05, alpha, rule);
    for (double z = -2.0; z <= 2.0; z += 0.25) {
        sup_big = std::max(sup_big, std::abs(eval_I(V0, g1, 0.1, z, rule) - 1.0));
        sup_small = std::max(sup_small, std::abs(eval_I(V0, g2, 0.05, z, rule) - 1.0));
    }
    CHECK(sup_small <= sup_big);
}

TEST_CASE("W brackets: defining property of gamma and independent oracle") {
    QuadratureRule rule(24);
    auto m = make_preset_mortality("cubic_perturbed");
    AlphaParameter alpha(0.4);
    auto V0 = v0_series(m, 3.0, 257, 1e-12);
    double eps = 0.1;
    double gamma = solve_gamma(V0, m, eps, alpha, rule);

    CHECK(std::abs(eval_W(V0, gamma, eps, 0.0, 1, rule)) < 1e-10);

    // finite differences of log I as the oracle for the bracket formulas
    double z = 0.6, h = 1e-4;
    auto logI = [&](double zz) { return std::log(eval_I(V0, gamma, eps, zz, rule)); };
    double fd1 = (logI(z + h) - logI(z - h)) / (2 * h);
    CHECK(std::abs(eval_W(V0, gamma, eps, z, 1, rule) - fd1) < 1e-6);

    double fd2 = (logI(z + h) - 2 * logI(z) + logI(z - h)) / (h * h);
    double w1 = eval_W(V0, gamma, eps, z, 1, rule);
    double w2 = eval_W(V0, gamma, eps, z, 2, rule);
    CHECK(std::abs((w2 - w1 * w1) - fd2) < 1e-4);

    // weighted sup of W1, W2 shrinks by at least half when eps halves
    auto weighted_sup = [&](double e, int i) {
        double g = solve_gamma(V0, m, e, alpha, rule);
        double best = 0.0;
        for (double zz = -2.0; zz <= 2.0; zz += 0.2)
            best = std::max(best, std::pow(1.0 + std::abs(zz), 0.4) *
                                      std::abs(eval_W(V0, g, e, zz, i, rule)));
        return best;
    };
    CHECK(weighted_sup(0.1, 1) >= 1.6 * weighted_sup(0.05, 1));
    CHECK(weighted_sup(0.1, 2) >= 1.6 * weighted_sup(0.05, 2));
}

TEST_CASE("midpoint density of Gaussians") {
    int N = 1024;
    double L = 4.0;

    SUBCASE("halved variance, same center") {
        auto f = make_gaussian_density(0.0, 0.04, L, N, 0.1);
        auto p = midpoint_density(f);
        auto expected = make_gaussian_density(0.0, 0.02, L, N, 0.1);
        CHECK(l1_distance(p, expected) < 1e-8);
        CHECK(p.mass() == doctest::Approx(f.mass()).epsilon(1e-10));
    }

    SUBCASE("translation equivariance") {
        auto f = make_gaussian_density(0.5, 0.04, L, N, 0.1);
        auto p = midpoint_density(f);
        CHECK(p.mean() == doctest::Approx(0.5).epsilon(1e-9));
        auto expected = make_gaussian_density(0.5, 0.02, L, N, 0.1);
        CHECK(l1_distance(p, expected) < 1e-8);
    }

    SUBCASE("pair mixing: three modes with mass ratio 1:2:1") {
        int n = 512;
        std::vector<double> vals(n);
        double dz = 2.0 * L / (n - 1);
        double sigma2 = 0.02;
        for (int j = 0; j < n; ++j) {
            double z = -L + j * dz;
            vals[j] = std::exp(-(z - 1) * (z - 1) / (2 * sigma2)) /
                          std::sqrt(2 * M_PI * sigma2) +
                      std::exp(-(z + 1) * (z + 1) / (2 * sigma2)) /
                          std::sqrt(2 * M_PI * sigma2);
        }
        DensityState f(L, vals, 0.1);
        auto p = midpoint_density(f);

        // direct double-integral oracle on the same grid
        double M = f.mass();
        std::vector<double> oracle(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double w = 2.0 * p.node(i);
            double acc = 0.0;
            for (int k = 0; k < n; ++k) {
                double t = f.node(k);
                double other = w - t;
                if (other < -L || other > L) continue;
                double s = (w - t + L) / dz;
                int j0 = static_cast<int>(std::floor(s));
                if (j0 < 0 || j0 >= n - 1) continue;
                double frac = s - j0;
                double fv = (1 - frac) * f.values()[j0] + frac * f.values()[j0 + 1];
                acc += f.values()[k] * fv;
            }
            oracle[i] = 2.0 * acc * dz / M;
        }
        DensityState oracle_state(L, oracle, 0.1);
        CHECK(l1_distance(p, oracle_state) < 1e-3); // trapezoid-vs-exact gap

        // masses near -1, 0, +1 split 1 : 2 : 1
        auto band_mass = [&](double lo, double hi) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j)
                if (p.node(j) >= lo && p.node(j) < hi) acc += p.values()[j];
            return acc * dz;
        };
        CHECK(band_mass(-1.5, -0.5) == doctest::Approx(0.5).epsilon(1e-6));
        CHECK(band_mass(-0.5, 0.5) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(band_mass(0.5, 1.5) == doctest::Approx(0.5).epsilon(1e-6));
    }

    SUBCASE("zero mass rejected") {
        std::vector<double> zeros(64, 0.0);
        DensityState f(2.0, zeros, 0.05);
        CHECK_THROWS_AS(midpoint_density(f), InputError);
    }
}

TEST_CASE("apply_B: Gaussian family, homogeneity, positivity, equivariance") {
    SUBCASE("Gaussian with matching variance is invariant") {
        for (double eps : {0.05, 0.1, 0.2}) {
            auto g = make_gaussian_density(0.0, eps * eps, 8.0, 4096, eps);
            auto Bg = apply_B(g, eps);
            CHECK(l1_distance(Bg, g) <= 1e-6);
            CHECK(std::abs(Bg.mass() - g.mass()) <= 1e-10);
        }
    }

    SUBCASE("degree-one homogeneity is exact") {
        auto f = make_gaussian_density(0.3, 0.01, 4.0, 1024, 0.1);
        auto doubled = f;
        for (double& v : doubled.values()) v *= 2.0;
        auto a = apply_B(doubled, 0.1);
        auto b = apply_B(f, 0.1);
        for (int j = 0; j < a.size(); ++j)
            CHECK(a.values()[j] == doctest::Approx(2.0 * b.values()[j]).epsilon(1e-15));
    }

    SUBCASE("nonnegative in, nonnegative out") {
        std::mt19937 rng(4242);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        int n = 512;
        std::vector<double> vals(n, 0.0);
        for (int j = n / 4; j < 3 * n / 4; ++j) vals[j] = u(rng);
        DensityState f(4.0, vals, 0.05);
        auto Bf = apply_B(f, 0.05);
        for (double v : Bf.values()) CHECK(v >= 0.0);
    }

    SUBCASE("translation by one grid cell commutes") {
        int n = 1024;
        auto f = make_gaussian_density(0.0, 0.01, 4.0, n, 0.1);
        std::vector<double> shifted(n, 0.0);
        for (int j = 1; j < n; ++j) shifted[j] = f.values()[j - 1];
        DensityState fs(4.0, shifted, 0.1);
        auto a = apply_B(fs, 0.1);
        auto b = apply_B(f, 0.1);
        for (int j = 1; j < n; ++j)
            CHECK(a.values()[j] == doctest::Approx(b.values()[j - 1]).epsilon(1e-10));
    }

    SUBCASE("wraparound precondition enforced") {
        auto f = make_gaussian_density(0.0, 0.01, 2.0, 256, 0.1);
        CHECK_THROWS_AS(apply_B(f, 0.1), ConfigError); // 0.8 > 2/4
    }
}
