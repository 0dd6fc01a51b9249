#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace infimod {

/// Weight exponent of the E^alpha norm. Valid range is (0, 2/5], strictly
/// below the contraction threshold 2 - log2(3) ~ 0.415.
struct AlphaParameter {
    double alpha;
    explicit AlphaParameter(double a);
};

/// A smooth scalar function of the trait variable sampled on the uniform
/// symmetric grid z_i = -L + i*h, h = 2L/(N-1), together with derivative
/// samples up to order 3. N is odd so z = 0 is a grid node. Immutable after
/// construction; evaluation is pure and thread-safe.
class GridFunction {
public:
    GridFunction() = default;
    /// Takes ownership of the four sample arrays (all size N, N odd >= 33).
    GridFunction(double half_width, std::vector<double> values,
                 std::vector<double> deriv1, std::vector<double> deriv2,
                 std::vector<double> deriv3);

    GridFunction(const GridFunction& other);
    GridFunction(GridFunction&&) noexcept = default;
    GridFunction& operator=(const GridFunction& other);
    GridFunction& operator=(GridFunction&&) noexcept = default;

    double half_width() const { return half_width_; }
    int size() const { return static_cast<int>(values_.size()); }
    double spacing() const { return 2.0 * half_width_ / (size() - 1); }
    double node(int i) const { return -half_width_ + i * spacing(); }
    int center() const { return (size() - 1) / 2; }

    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& deriv1() const { return deriv1_; }
    const std::vector<double>& deriv2() const { return deriv2_; }
    const std::vector<double>& deriv3() const { return deriv3_; }
    const std::vector<double>& data(int order) const;

    /// Evaluations that fell outside [-L, L] and used the Taylor
    /// continuation, accumulated across calls on this instance.
    std::uint64_t out_of_window_count() const {
        return out_of_window_.load(std::memory_order_relaxed);
    }
    void bump_out_of_window() const {
        out_of_window_.fetch_add(1, std::memory_order_relaxed);
    }

private:
    double half_width_ = 0.0;
    std::vector<double> values_, deriv1_, deriv2_, deriv3_;
    mutable std::atomic<std::uint64_t> out_of_window_{0};
};

/// Sample an analytic evaluator on the grid and fill the derivative arrays by
/// finite differences: 5-point centered stencils for d1/d2, the 7-point
/// order-4 stencil for d3, one-sided order-4 stencils in the two boundary
/// cells on each side.
GridFunction build_grid_function(const std::function<double(double)>& f,
                                 double half_width, int sample_count);

/// Same stencils applied to an externally produced value array.
GridFunction build_grid_function(std::vector<double> values, double half_width);

/// Total evaluation. Inside the window, cubic Hermite interpolation built
/// from (values, deriv1) for orders 0-1 and from (deriv2, deriv3) for orders
/// 2-3. Outside, quadratic Taylor continuation from the nearest endpoint
/// (order 3 returns the frozen endpoint deriv3); such calls bump the
/// out-of-window counter.
double eval(const GridFunction& gf, double z, int order);

/// Discrete E^alpha norm: max over grid nodes of
/// { |d1|, (1+|z|)^alpha |d2|, (1+|z|)^alpha |d3| }.
double alpha_norm(const GridFunction& gf, const AlphaParameter& alpha);

struct E0Report {
    bool ok = false;
    bool value_ok = false;     // |v(0)| <= 1e-10
    bool slope_ok = false;     // |v'(0)| <= 1e-8
    bool convexity_ok = false; // v''(0) >= D2m(0) - 1e-8
    double value0 = 0.0, slope0 = 0.0, curvature0 = 0.0, required_curvature = 0.0;
    std::string describe() const;
};

// forward decl; full definition in mortality.hpp
class MortalityModel;

/// Membership test for E^alpha_0: v(0)=0, Dv(0)=0, D2v(0) >= D2m(0).
E0Report check_E0_membership(const GridFunction& gf, const MortalityModel& model);

// Pointwise grid arithmetic (grids must match exactly).
GridFunction subtract(const GridFunction& a, const GridFunction& b);
GridFunction add(const GridFunction& a, const GridFunction& b);
GridFunction scale(const GridFunction& a, double c);
/// gf(z) + slope * z
GridFunction add_linear(const GridFunction& a, double slope);
/// gf(-z)
GridFunction reflect(const GridFunction& a);

} // namespace infimod
