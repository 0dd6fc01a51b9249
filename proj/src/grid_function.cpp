#include "infimod/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "infimod/errors.hpp"
#include "infimod/mortality.hpp"

namespace infimod {

namespace {

constexpr double kThresholdAlpha = 0.5849625007211562; // 2 - log2(3)

void check_finite(const std::vector<double>& v, double L, const char* what) {
    int n = static_cast<int>(v.size());
    double h = 2.0 * L / (n - 1);
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(v[i])) {
            std::ostringstream os;
            os << "non-finite " << what << " sample at z = " << (-L + i * h);
            throw InputError(os.str());
        }
    }
}

// Fornberg finite-difference weights: derivative of order m at xbar from the
// nodes x[], returned for all orders 0..m. Nodes in grid-spacing units.
std::vector<std::vector<double>> fd_weights(double xbar, const std::vector<double>& x,
                                            int m) {
    int n = static_cast<int>(x.size());
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0, c4 = x[0] - xbar;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        int mn = std::min(i, m);
        double c2 = 1.0, c5 = c4;
        c4 = x[i] - xbar;
        for (int j = 0; j < i; ++j) {
            double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    return c;
}

// One-sided order-4 stencil: q = order + 4 leftmost (or rightmost) nodes,
// weights for the evaluation node i.
double one_sided(const std::vector<double>& f, int i, int n, int order, double h) {
    int q = order + 4;
    bool left = i < n / 2;
    std::vector<double> x(q);
    for (int k = 0; k < q; ++k) x[k] = left ? k : n - q + k;
    auto w = fd_weights(static_cast<double>(i), x, order);
    double acc = 0.0;
    for (int k = 0; k < q; ++k) acc += w[k][order] * f[left ? k : n - q + k];
    return acc / std::pow(h, order);
}

} // namespace

AlphaParameter::AlphaParameter(double a) : alpha(a) {
    if (!(a > 0.0 && a <= 0.4))
        throw ConfigError("alpha must lie in (0, 2/5]");
    if (a >= kThresholdAlpha)
        throw ConfigError("alpha must stay below the contraction threshold 2 - log2(3)");
}

GridFunction::GridFunction(double half_width, std::vector<double> values,
                           std::vector<double> deriv1, std::vector<double> deriv2,
                           std::vector<double> deriv3)
    : half_width_(half_width),
      values_(std::move(values)),
      deriv1_(std::move(deriv1)),
      deriv2_(std::move(deriv2)),
      deriv3_(std::move(deriv3)) {
    int n = static_cast<int>(values_.size());
    if (half_width_ <= 0.0) throw ConfigError("grid half-width must be positive");
    if (n < 33 || n % 2 == 0)
        throw ConfigError("sample count must be an odd integer >= 33");
    if (deriv1_.size() != values_.size() || deriv2_.size() != values_.size() ||
        deriv3_.size() != values_.size())
        throw ConfigError("derivative arrays must match the value array size");
    check_finite(values_, half_width_, "value");
    check_finite(deriv1_, half_width_, "deriv1");
    check_finite(deriv2_, half_width_, "deriv2");
    check_finite(deriv3_, half_width_, "deriv3");
}

GridFunction::GridFunction(const GridFunction& other)
    : half_width_(other.half_width_),
      values_(other.values_),
      deriv1_(other.deriv1_),
      deriv2_(other.deriv2_),
      deriv3_(other.deriv3_),
      out_of_window_(other.out_of_window_count()) {}

GridFunction& GridFunction::operator=(const GridFunction& other) {
    if (this != &other) {
        half_width_ = other.half_width_;
        values_ = other.values_;
        deriv1_ = other.deriv1_;
        deriv2_ = other.deriv2_;
        deriv3_ = other.deriv3_;
        out_of_window_.store(other.out_of_window_count(), std::memory_order_relaxed);
    }
    return *this;
}

const std::vector<double>& GridFunction::data(int order) const {
    switch (order) {
        case 0: return values_;
        case 1: return deriv1_;
        case 2: return deriv2_;
        case 3: return deriv3_;
        default: throw InputError("derivative order must be in 0..3");
    }
}

GridFunction build_grid_function(const std::function<double(double)>& f,
                                 double half_width, int sample_count) {
    if (half_width <= 0.0) throw ConfigError("grid half-width must be positive");
    if (sample_count < 33 || sample_count % 2 == 0)
        throw ConfigError("sample count must be an odd integer >= 33");
    std::vector<double> values(sample_count);
    double h = 2.0 * half_width / (sample_count - 1);
    for (int i = 0; i < sample_count; ++i) values[i] = f(-half_width + i * h);
    return build_grid_function(std::move(values), half_width);
}

GridFunction build_grid_function(std::vector<double> values, double half_width) {
    int n = static_cast<int>(values.size());
    if (n < 33 || n % 2 == 0)
        throw ConfigError("sample count must be an odd integer >= 33");
    check_finite(values, half_width, "value");
    double h = 2.0 * half_width / (n - 1);
    std::vector<double> d1(n), d2(n), d3(n);
    const auto& f = values;
    for (int i = 0; i < n; ++i) {
        if (i >= 2 && i <= n - 3) {
            d1[i] = (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]) / (12 * h);
            d2[i] = (-f[i - 2] + 16 * f[i - 1] - 30 * f[i] + 16 * f[i + 1] - f[i + 2]) /
                    (12 * h * h);
        } else {
            d1[i] = one_sided(f, i, n, 1, h);
            d2[i] = one_sided(f, i, n, 2, h);
        }
        if (i >= 3 && i <= n - 4) {
            d3[i] = (f[i - 3] / 8 - f[i - 2] + 13 * f[i - 1] / 8 - 13 * f[i + 1] / 8 +
                     f[i + 2] - f[i + 3] / 8) /
                    (h * h * h);
        } else {
            d3[i] = one_sided(f, i, n, 3, h);
        }
    }
    return GridFunction(half_width, std::move(values), std::move(d1), std::move(d2),
                        std::move(d3));
}

double eval(const GridFunction& gf, double z, int order) {
    if (order < 0 || order > 3) throw InputError("derivative order must be in 0..3");
    double L = gf.half_width();
    int n = gf.size();
    double h = gf.spacing();

    if (z < -L || z > L) {
        gf.bump_out_of_window();
        int e = z < -L ? 0 : n - 1;
        double dz = z - gf.node(e);
        switch (order) {
            case 0:
                return gf.values()[e] + gf.deriv1()[e] * dz +
                       0.5 * gf.deriv2()[e] * dz * dz;
            case 1: return gf.deriv1()[e] + gf.deriv2()[e] * dz;
            case 2: return gf.deriv2()[e];
            default: return gf.deriv3()[e]; // frozen
        }
    }

    double s = (z + L) / h;
    int near = static_cast<int>(std::lround(s));
    if (near >= 0 && near < n && std::abs(s - near) < 1e-9)
        return gf.data(order)[near];

    int j = std::min(n - 2, std::max(0, static_cast<int>(std::floor(s))));
    double t = s - j;
    const auto& val = (order <= 1) ? gf.values() : gf.deriv2();
    const auto& slo = (order <= 1) ? gf.deriv1() : gf.deriv3();
    double f0 = val[j], f1 = val[j + 1], g0 = slo[j], g1 = slo[j + 1];
    if (order == 0 || order == 2) {
        double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
        double h10 = t * (1 - t) * (1 - t);
        double h01 = t * t * (3 - 2 * t);
        double h11 = t * t * (t - 1);
        return h00 * f0 + h10 * h * g0 + h01 * f1 + h11 * h * g1;
    }
    // derivative of the same cubic
    double d00 = 6 * t * (t - 1);
    double d10 = 3 * t * t - 4 * t + 1;
    double d01 = -d00;
    double d11 = 3 * t * t - 2 * t;
    return d00 * f0 / h + d10 * g0 + d01 * f1 / h + d11 * g1;
}

double alpha_norm(const GridFunction& gf, const AlphaParameter& alpha) {
    double best = 0.0;
    int n = gf.size();
    for (int i = 0; i < n; ++i) {
        double w = std::pow(1.0 + std::abs(gf.node(i)), alpha.alpha);
        best = std::max(best, std::abs(gf.deriv1()[i]));
        best = std::max(best, w * std::abs(gf.deriv2()[i]));
        best = std::max(best, w * std::abs(gf.deriv3()[i]));
    }
    return best;
}

E0Report check_E0_membership(const GridFunction& gf, const MortalityModel& model) {
    E0Report r;
    int c = gf.center();
    r.value0 = gf.values()[c];
    r.slope0 = gf.deriv1()[c];
    r.curvature0 = gf.deriv2()[c];
    r.required_curvature = model.D2m(0.0);
    r.value_ok = std::abs(r.value0) <= 1e-10;
    r.slope_ok = std::abs(r.slope0) <= 1e-8;
    r.convexity_ok = r.curvature0 >= r.required_curvature - 1e-8;
    r.ok = r.value_ok && r.slope_ok && r.convexity_ok;
    return r;
}

std::string E0Report::describe() const {
    if (ok) return "member of E^alpha_0";
    std::ostringstream os;
    os << "not in E^alpha_0:";
    if (!value_ok) os << " v(0) = " << value0 << " != 0;";
    if (!slope_ok) os << " Dv(0) = " << slope0 << " != 0;";
    if (!convexity_ok)
        os << " D2v(0) = " << curvature0 << " < D2m(0) = " << required_curvature << ";";
    return os.str();
}

namespace {
void require_same_grid(const GridFunction& a, const GridFunction& b) {
    if (a.size() != b.size() || a.half_width() != b.half_width())
        throw InputError("grid mismatch in GridFunction arithmetic");
}
} // namespace

GridFunction subtract(const GridFunction& a, const GridFunction& b) {
    require_same_grid(a, b);
    int n = a.size();
    std::vector<double> v(n), d1(n), d2(n), d3(n);
    for (int i = 0; i < n; ++i) {
        v[i] = a.values()[i] - b.values()[i];
        d1[i] = a.deriv1()[i] - b.deriv1()[i];
        d2[i] = a.deriv2()[i] - b.deriv2()[i];
        d3[i] = a.deriv3()[i] - b.deriv3()[i];
    }
    return GridFunction(a.half_width(), std::move(v), std::move(d1), std::move(d2),
                        std::move(d3));
}

GridFunction add(const GridFunction& a, const GridFunction& b) {
    require_same_grid(a, b);
    int n = a.size();
    std::vector<double> v(n), d1(n), d2(n), d3(n);
    for (int i = 0; i < n; ++i) {
        v[i] = a.values()[i] + b.values()[i];
        d1[i] = a.deriv1()[i] + b.deriv1()[i];
        d2[i] = a.deriv2()[i] + b.deriv2()[i];
        d3[i] = a.deriv3()[i] + b.deriv3()[i];
    }
    return GridFunction(a.half_width(), std::move(v), std::move(d1), std::move(d2),
                        std::move(d3));
}

GridFunction scale(const GridFunction& a, double c) {
    int n = a.size();
    std::vector<double> v(n), d1(n), d2(n), d3(n);
    for (int i = 0; i < n; ++i) {
        v[i] = c * a.values()[i];
        d1[i] = c * a.deriv1()[i];
        d2[i] = c * a.deriv2()[i];
        d3[i] = c * a.deriv3()[i];
    }
    return GridFunction(a.half_width(), std::move(v), std::move(d1), std::move(d2),
                        std::move(d3));
}

GridFunction add_linear(const GridFunction& a, double slope) {
    int n = a.size();
    std::vector<double> v(n), d1(n);
    for (int i = 0; i < n; ++i) {
        v[i] = a.values()[i] + slope * a.node(i);
        d1[i] = a.deriv1()[i] + slope;
    }
    return GridFunction(a.half_width(), std::move(v), std::move(d1), a.deriv2(),
                        a.deriv3());
}

GridFunction reflect(const GridFunction& a) {
    int n = a.size();
    std::vector<double> v(n), d1(n), d2(n), d3(n);
    for (int i = 0; i < n; ++i) {
        int r = n - 1 - i;
        v[i] = a.values()[r];
        d1[i] = -a.deriv1()[r];
        d2[i] = a.deriv2()[r];
        d3[i] = -a.deriv3()[r];
    }
    return GridFunction(a.half_width(), std::move(v), std::move(d1), std::move(d2),
                        std::move(d3));
}

} // namespace infimod
