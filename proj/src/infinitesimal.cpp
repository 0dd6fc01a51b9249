#include "infimod/infinitesimal.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include <fftw3.h>

#include "infimod/errors.hpp"
#include "infimod/parallel.hpp"

namespace infimod {

namespace {

constexpr double kGaussianReach = 8.0; // exp(-64) kernel tail

void check_eps(double eps) {
    if (!(eps > 0.0)) throw ConfigError("epsilon must be positive");
    if (eps > kEpsilonCap) {
        std::ostringstream os;
        os << "epsilon above contraction threshold: eps = " << eps << " exceeds cap "
           << kEpsilonCap;
        throw ConfigError(os.str());
    }
}

// One row of the tilted-measure computation: I(z) numerator and the three
// W brackets against dG^V_eps(z), all from a single weight table.
struct BracketRow {
    double A;  // normalized numerator of I(z)
    double W1, W2, W3;
};

BracketRow bracket_row(const GridFunction& V, double gamma, double eps, double z,
                       const QuadratureRule& rule) {
    const auto& y1 = rule.y1_nodes();
    const auto& w = rule.weights2d();
    int nk = static_cast<int>(y1.size());
    double zb = 0.5 * z;

    // evaluation tables at zb + eps*y over the y1 node multiset; the y2
    // multiset is the same table through the mirror index
    std::vector<double> e0(nk), e1(nk), e2(nk), e3(nk);
    for (int k = 0; k < nk; ++k) {
        double p = zb + eps * y1[k];
        e0[k] = eval(V, p, 0);
        e1[k] = eval(V, p, 1);
        e2[k] = eval(V, p, 2);
        e3[k] = eval(V, p, 3);
    }
    double v0 = eval(V, zb, 0), v1 = eval(V, zb, 1), v2 = eval(V, zb, 2),
           v3 = eval(V, zb, 3);

    CompensatedSum A, S1, S2, S3;
    for (int k = 0; k < nk; ++k) {
        int km = rule.mirror_index(k);
        double s = y1[k] + rule.y2_nodes()[k];
        double D0 = v0 - 0.5 * e0[k] - 0.5 * e0[km];
        double D1 = v1 - 0.5 * e1[k] - 0.5 * e1[km];
        double D2 = v2 - 0.5 * e2[k] - 0.5 * e2[km];
        double D3 = v3 - 0.5 * e3[k] - 0.5 * e3[km];
        double ex = -eps * gamma * s + 2.0 * D0;
        if (ex > 700.0) {
            std::ostringstream os;
            os << "exponent overflow in I_eps at z = " << z;
            throw NumericalError(os.str());
        }
        double G = w[k] * std::exp(ex);
        A.add(G);
        S1.add(G * D1);
        S2.add(G * (0.5 * D2 + D1 * D1));
        S3.add(G * (0.25 * D3 + D1 * D1 * D1 + 1.5 * D1 * D2));
    }
    double a = A.value();
    if (!(a > 0.0)) throw NumericalError("degenerate tilted measure in I_eps");
    return {a, S1.value() / a, S2.value() / a, S3.value() / a};
}

// z-independent denominator (1/sqrt(2 pi)) int exp(-y^2/2 - eps gamma y
// + V(0) - V(eps y)) dy.
double denominator(const GridFunction& V, double gamma, double eps,
                   const QuadratureRule& rule) {
    double v0 = eval(V, 0.0, 0);
    const auto& t = rule.y_nodes1d();
    const auto& vw = rule.gauss_weights1d();
    CompensatedSum acc;
    for (std::size_t i = 0; i < t.size(); ++i) {
        double ex = -eps * gamma * t[i] + v0 - eval(V, eps * t[i], 0);
        if (ex > 700.0) throw NumericalError("exponent overflow in I_eps denominator");
        acc.add(vw[i] * std::exp(ex));
    }
    double d = acc.value();
    if (!(d > 0.0)) throw NumericalError("degenerate denominator in I_eps");
    return d;
}

} // namespace

IWProfile eval_IW_profile(const GridFunction& V, double gamma, double eps,
                          const std::vector<double>& zs, const QuadratureRule& rule,
                          int threads) {
    check_eps(eps);
    int nz = static_cast<int>(zs.size());
    IWProfile out;
    out.I.resize(nz);
    out.W1.resize(nz);
    out.W2.resize(nz);
    out.W3.resize(nz);
    double den = denominator(V, gamma, eps, rule);

    std::exception_ptr first_error;
    std::mutex err_mutex;
    parallel_for(nz, threads, [&](int i) {
        try {
            BracketRow row = bracket_row(V, gamma, eps, zs[i], rule);
            out.I[i] = row.A / den;
            out.W1[i] = row.W1;
            out.W2[i] = row.W2;
            out.W3[i] = row.W3;
        } catch (...) {
            std::lock_guard<std::mutex> lk(err_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    });
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

double eval_I(const GridFunction& V, double gamma, double eps, double z,
              const QuadratureRule& rule) {
    auto p = eval_IW_profile(V, gamma, eps, {z}, rule, 1);
    return p.I[0];
}

double eval_W(const GridFunction& V, double gamma, double eps, double z, int i,
              const QuadratureRule& rule) {
    if (i < 1 || i > 3) throw InputError("W index must be 1, 2 or 3");
    auto p = eval_IW_profile(V, gamma, eps, {z}, rule, 1);
    if (i == 1) return p.W1[0];
    if (i == 2) return p.W2[0];
    return p.W3[0];
}

// ---------------------------------------------------------------------------
// DensityState and the operator B_eps
// ---------------------------------------------------------------------------

DensityState::DensityState(double half_width, std::vector<double> values,
                           double epsilon)
    : half_width_(half_width), values_(std::move(values)), epsilon_(epsilon) {
    int n = static_cast<int>(values_.size());
    if (half_width_ <= 0.0) throw ConfigError("density half-width must be positive");
    if (n < 16 || (n & (n - 1)) != 0)
        throw ConfigError("density sample count must be a power of two >= 16");
    for (int j = 0; j < n; ++j) {
        if (!std::isfinite(values_[j])) throw InputError("non-finite density sample");
        if (values_[j] < -1e-12) throw InputError("negative density sample");
        if (values_[j] < 0.0) values_[j] = 0.0;
    }
}

double DensityState::mass() const {
    double dz = spacing();
    double acc = 0.0;
    for (double v : values_) acc += v;
    acc -= 0.5 * (values_.front() + values_.back());
    return acc * dz;
}

double DensityState::mean() const {
    double dz = spacing();
    double acc = 0.0;
    int n = size();
    for (int j = 0; j < n; ++j) {
        double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        acc += w * node(j) * values_[j];
    }
    double m = mass();
    if (!(m > 0.0)) throw InputError("zero-mass density");
    return acc * dz / m;
}

void DensityState::renormalize() {
    double m = mass();
    if (!(m > 0.0)) throw InputError("zero-mass density");
    for (double& v : values_) v /= m;
}

DensityState make_gaussian_density(double center, double variance, double half_width,
                                   int sample_count, double epsilon) {
    if (!(variance > 0.0)) throw ConfigError("gaussian variance must be positive");
    std::vector<double> v(sample_count);
    double norm = 1.0 / std::sqrt(2.0 * M_PI * variance);
    double dz = 2.0 * half_width / (sample_count - 1);
    for (int j = 0; j < sample_count; ++j) {
        double z = -half_width + j * dz;
        v[j] = norm * std::exp(-(z - center) * (z - center) / (2.0 * variance));
    }
    return DensityState(half_width, std::move(v), epsilon);
}

namespace {

std::mutex g_fftw_mutex; // FFTW plan creation is not thread-safe

// linear convolution of a and b via zero-padded r2c/c2r transforms
std::vector<double> fft_convolve(const std::vector<double>& a,
                                 const std::vector<double>& b) {
    std::size_t want = a.size() + b.size() - 1;
    std::size_t m = 1;
    while (m < want) m <<= 1;

    double* ra;
    double* rb;
    fftw_complex* ca;
    fftw_complex* cb;
    fftw_plan pa, pb, pinv;
    {
        std::lock_guard<std::mutex> lk(g_fftw_mutex);
        ra = fftw_alloc_real(m);
        rb = fftw_alloc_real(m);
        ca = fftw_alloc_complex(m / 2 + 1);
        cb = fftw_alloc_complex(m / 2 + 1);
        pa = fftw_plan_dft_r2c_1d(static_cast<int>(m), ra, ca, FFTW_ESTIMATE);
        pb = fftw_plan_dft_r2c_1d(static_cast<int>(m), rb, cb, FFTW_ESTIMATE);
        pinv = fftw_plan_dft_c2r_1d(static_cast<int>(m), ca, ra, FFTW_ESTIMATE);
    }
    std::fill(ra, ra + m, 0.0);
    std::fill(rb, rb + m, 0.0);
    std::copy(a.begin(), a.end(), ra);
    std::copy(b.begin(), b.end(), rb);
    fftw_execute(pa);
    fftw_execute(pb);
    for (std::size_t k = 0; k < m / 2 + 1; ++k) {
        double re = ca[k][0] * cb[k][0] - ca[k][1] * cb[k][1];
        double im = ca[k][0] * cb[k][1] + ca[k][1] * cb[k][0];
        ca[k][0] = re / m;
        ca[k][1] = im / m;
    }
    fftw_execute(pinv);
    std::vector<double> out(ra, ra + want);
    {
        std::lock_guard<std::mutex> lk(g_fftw_mutex);
        fftw_destroy_plan(pa);
        fftw_destroy_plan(pb);
        fftw_destroy_plan(pinv);
        fftw_free(ra);
        fftw_free(rb);
        fftw_free(ca);
        fftw_free(cb);
    }
    return out;
}

} // namespace

DensityState midpoint_density(const DensityState& f) {
    double M = f.mass();
    if (!(M > 0.0)) throw InputError("midpoint_density: zero mass");
    double dz = f.spacing();
    int n = f.size();

    // (f*f)(x) on the doubled support, then dilation w -> 2w lands exactly on
    // the even convolution indices
    std::vector<double> conv = fft_convolve(f.values(), f.values());
    std::vector<double> p(n);
    double clamped = 0.0;
    for (int i = 0; i < n; ++i) {
        double v = 2.0 * dz * conv[2 * i] / M;
        if (v < 0.0) {
            clamped += -v;
            v = 0.0;
        }
        p[i] = v;
    }
    DensityState out(f.half_width(), std::move(p), f.epsilon());
    out.set_clamped_mass(clamped * dz);
    return out;
}

DensityState apply_B(const DensityState& f, double eps) {
    check_eps(eps);
    if (eps * kGaussianReach > f.half_width() / 4.0) {
        std::ostringstream os;
        os << "apply_B wraparound risk: eps * reach = " << eps * kGaussianReach
           << " exceeds L/4 = " << f.half_width() / 4.0;
        throw ConfigError(os.str());
    }
    DensityState p = midpoint_density(f);
    double dz = f.spacing();
    int n = f.size();

    int taps = static_cast<int>(std::ceil(kGaussianReach * eps / dz));
    taps = std::min(taps, n - 1);
    std::vector<double> kernel(2 * taps + 1);
    double norm = dz / (eps * std::sqrt(M_PI));
    for (int t = -taps; t <= taps; ++t)
        kernel[t + taps] = norm * std::exp(-(t * dz) * (t * dz) / (eps * eps));

    std::vector<double> conv = fft_convolve(p.values(), kernel);
    std::vector<double> out(n);
    double clamped = 0.0;
    for (int j = 0; j < n; ++j) {
        double v = conv[j + taps];
        if (v < 0.0) {
            clamped += -v;
            v = 0.0;
        }
        out[j] = v;
    }
    DensityState result(f.half_width(), std::move(out), eps);
    result.set_clamped_mass(clamped * dz + p.clamped_mass());
    return result;
}

double l1_distance(const DensityState& a, const DensityState& b) {
    if (a.size() != b.size() || a.half_width() != b.half_width())
        throw InputError("density grid mismatch");
    double dz = a.spacing();
    double acc = 0.0;
    int n = a.size();
    for (int j = 0; j < n; ++j) {
        double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        acc += w * std::abs(a.values()[j] - b.values()[j]);
    }
    return acc * dz;
}

} // namespace infimod
