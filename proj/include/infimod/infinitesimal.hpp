#pragma once

#include <vector>

#include "infimod/grid_function.hpp"
#include "infimod/quadrature.hpp"

namespace infimod {

/// Auxiliary functional I_eps(V)(z): ratio of the tilted exp(-Q) double
/// integral to the tilted Gaussian single integral. Strictly positive and
/// uniformly close to 1 for small eps.
double eval_I(const GridFunction& V, double gamma, double eps, double z,
              const QuadratureRule& rule);

/// i-th logarithmic derivative W^(i) = d^i_z I_eps / I_eps, i in {1,2,3},
/// computed from the bracket formulas against the normalized tilted measure
/// dG^V_eps — not by numerically differentiating I_eps.
double eval_W(const GridFunction& V, double gamma, double eps, double z, int i,
              const QuadratureRule& rule);

/// Batched evaluation of I and the three W brackets over many z (one tilted
/// weight table per z, four weighted sums). This is the hot path of the fixed
/// point mapping; rows are independent and parallelized over `threads`.
struct IWProfile {
    std::vector<double> I, W1, W2, W3;
};
IWProfile eval_IW_profile(const GridFunction& V, double gamma, double eps,
                          const std::vector<double>& zs, const QuadratureRule& rule,
                          int threads = 0);

/// A nonnegative trait-space density on the uniform grid
/// z_j = -L + j * dz, dz = 2L/(N-1), N a power of two.
class DensityState {
public:
    DensityState() = default;
    DensityState(double half_width, std::vector<double> values, double epsilon);

    double half_width() const { return half_width_; }
    int size() const { return static_cast<int>(values_.size()); }
    double spacing() const { return 2.0 * half_width_ / (size() - 1); }
    double node(int j) const { return -half_width_ + j * spacing(); }
    double epsilon() const { return epsilon_; }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double mass() const;  ///< trapezoid integral
    double mean() const;  ///< first moment / mass
    void renormalize();   ///< scale to unit mass

    /// Mass removed by clamping FFT ringing on the most recent operator
    /// application that produced this state.
    double clamped_mass() const { return clamped_mass_; }
    void set_clamped_mass(double m) { clamped_mass_ = m; }

private:
    double half_width_ = 0.0;
    std::vector<double> values_;
    double epsilon_ = 0.0;
    double clamped_mass_ = 0.0;
};

DensityState make_gaussian_density(double center, double variance, double half_width,
                                   int sample_count, double epsilon);

/// Law of the parental midpoint: p(w) = 2 (f * f)(2w) / mass(f), by
/// zero-padded FFT self-convolution and dilation. Preserves mass.
DensityState midpoint_density(const DensityState& f);

/// Infinitesimal operator B_eps(f) = G_eps conv midpoint_density(f), with
/// G_eps(x) = exp(-x^2/eps^2) / (eps sqrt(pi)) (variance eps^2/2).
/// Precondition: eps * reach <= L/4 (reach = 8), so the kernel never pushes
/// mass across the retained window.
DensityState apply_B(const DensityState& f, double eps);

/// L1 distance of two states on the same grid.
double l1_distance(const DensityState& a, const DensityState& b);

} // namespace infimod
