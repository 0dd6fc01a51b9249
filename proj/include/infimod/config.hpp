#pragma once

#include <string>
#include <vector>

#include "infimod/fixed_point.hpp"
#include "infimod/mortality.hpp"

namespace infimod {

/// Declarative run description, one INI-style file with sections
/// [model], [discretization], [solver], [march], [sweep].
struct Config {
    // [model]
    std::string preset;               ///< quadratic | cubic_perturbed | double_well
    std::vector<double> coeffs;       ///< alternative: polynomial c0 + c1 z + ...
    double z0_guess = 0.0;
    bool has_z0_guess = false;
    std::string minimum = "left";     ///< double-well basin selector
    double window = 8.0;

    // [discretization]
    double L = 6.0;
    int N = 513;
    int quad_order = 24;
    double density_L = 4.0;
    int density_N = 4096;

    // [solver]
    double eps = 0.1;
    double alpha = 0.4;
    double picard_tol = 1e-10;
    int max_iter = 200;
    double series_tol = 1e-12;
    double gamma_tol = 1e-13;

    // [march]
    double march_eps = 0.1;
    double dt = 0.0;                  ///< 0 = 0.9 * dt_max
    double equil_tol = 1e-7;
    long max_steps = 500000;
    std::vector<double> init_centers{0.0};

    // [sweep]
    std::vector<double> eps_list;
    double region = 1.0;

    static Config load(const std::string& path);

    MortalityModel make_model() const;
    SolverConfig solver_config(int threads) const;
};

} // namespace infimod
