#pragma once

#include <functional>
#include <string>
#include <vector>

#include "infimod/grid_function.hpp"

namespace infimod {

/// Dense polynomial c0 + c1 z + c2 z^2 + ... with exact derivative and
/// Taylor-shift operations. Good enough for every selection function in the
/// corpus; condition (1+|z|)^a D^k m / (1+m) in L^inf holds automatically.
struct Polynomial {
    std::vector<double> coeffs;

    double operator()(double z) const;
    Polynomial derivative() const;
    /// Coefficients of p(z0 + h) as a polynomial in h (synthetic division).
    Polynomial shifted(double z0) const;
    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

/// The selection function m with analytic derivatives, internally translated
/// to the working critical point z0 and normalized so that m(0) = 0 and
/// Dm(0) = 0 exactly. Immutable; evaluators are pure.
class MortalityModel {
public:
    /// Evaluators are already in translated coordinates h = z - z0.
    MortalityModel(std::function<double(double)> m, std::function<double(double)> Dm,
                   std::function<double(double)> D2m, std::function<double(double)> D3m,
                   double z0, double m_at_z0, double inf_m, double window);

    double m(double h) const { return m_(h); }
    double Dm(double h) const { return Dm_(h); }
    double D2m(double h) const { return D2m_(h); }
    double D3m(double h) const { return D3m_(h); }

    /// Untranslated mortality at the original coordinate.
    double raw(double z) const { return m_(z - z0_) + m_at_z0_; }

    double mu0() const { return mu0_; }
    double z0() const { return z0_; }
    double m_at_z0() const { return m_at_z0_; }
    /// Infimum of the raw m over the working window.
    double inf_m() const { return inf_m_; }
    double window() const { return window_; }
    /// Compatibility margin 1 + inf m - m(z0); the V0 series logs need it > 0.
    double compat_margin() const { return 1.0 + inf_m_ - m_at_z0_; }

private:
    std::function<double(double)> m_, Dm_, D2m_, D3m_;
    double mu0_, z0_, m_at_z0_, inf_m_, window_;
};

/// Build a model from polynomial coefficients. Locates the critical point by
/// Newton from z0_guess, re-expands the polynomial there (exact Taylor
/// shift), forces the constant and linear coefficients of the translated
/// polynomial to zero, and scans the window for inf m.
MortalityModel make_polynomial_mortality(const std::vector<double>& coeffs,
                                         double z0_guess, double window);

/// Named presets: "quadratic" z^2/2, "cubic_perturbed" z^2/2 + z^3/6,
/// "double_well" (z^2-1)^2 + 0.25 z. For the double well, `minimum` selects
/// the working basin ("left" or "right", default left).
MortalityModel make_preset_mortality(const std::string& name, double window = 8.0,
                                     const std::string& minimum = "left");

struct MortalityReport {
    bool accepted = false;
    double C_m = 0.0; ///< max_{k=1,2,3} sup (1+|z|)^a |D^k m| / (1+m)
    double first_offending_z = 0.0;
    std::string reason; ///< empty when accepted
};

/// Checks every MortalityModel invariant on a dense sample (4N points over
/// [-window, window]) and measures C_m.
MortalityReport validate_mortality(const MortalityModel& model,
                                   const AlphaParameter& alpha, double window);

} // namespace infimod
