#include "infimod/mortality.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "infimod/errors.hpp"

namespace infimod {

double Polynomial::operator()(double z) const {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (coeffs.size() <= 1) return Polynomial{{0.0}};
    std::vector<double> d(coeffs.size() - 1);
    for (std::size_t k = 1; k < coeffs.size(); ++k) d[k - 1] = k * coeffs[k];
    return Polynomial{std::move(d)};
}

Polynomial Polynomial::shifted(double z0) const {
    // repeated synthetic division: after the j-th pass the running remainder
    // is the coefficient of h^j in p(z0 + h)
    std::vector<double> a = coeffs;
    std::vector<double> b(coeffs.size(), 0.0);
    int n = static_cast<int>(a.size());
    for (int j = 0; j < n; ++j) {
        for (int k = n - 2; k >= j; --k) a[k] += z0 * a[k + 1];
        b[j] = a[j];
    }
    return Polynomial{std::move(b)};
}

MortalityModel::MortalityModel(std::function<double(double)> m,
                               std::function<double(double)> Dm,
                               std::function<double(double)> D2m,
                               std::function<double(double)> D3m, double z0,
                               double m_at_z0, double inf_m, double window)
    : m_(std::move(m)),
      Dm_(std::move(Dm)),
      D2m_(std::move(D2m)),
      D3m_(std::move(D3m)),
      z0_(z0),
      m_at_z0_(m_at_z0),
      inf_m_(inf_m),
      window_(window) {
    mu0_ = D2m_(0.0);
}

namespace {

// Newton on Dm with bisection fallback; the critical point must carry
// positive curvature.
double find_critical_point(const Polynomial& dp, const Polynomial& d2p,
                           double guess, double window) {
    double z = guess;
    for (int it = 0; it < 100; ++it) {
        double g = dp(z), c = d2p(z);
        if (c == 0.0) break;
        double step = g / c;
        z -= step;
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
    }
    if (!(std::abs(dp(z)) <= 1e-9 && d2p(z) > 0.0 && std::abs(z) <= window)) {
        std::ostringstream os;
        os << "no non-degenerate local minimum near z = " << guess;
        throw InputError(os.str());
    }
    // polish once more to squeeze |Dm(z0)| to rounding level
    for (int it = 0; it < 4; ++it) z -= dp(z) / d2p(z);
    return z;
}

double scan_infimum(const std::function<double(double)>& f, double window, int samples) {
    double best = f(-window);
    for (int i = 1; i < samples; ++i) {
        double z = -window + 2.0 * window * i / (samples - 1);
        best = std::min(best, f(z));
    }
    return best;
}

} // namespace

MortalityModel make_polynomial_mortality(const std::vector<double>& coeffs,
                                         double z0_guess, double window) {
    if (coeffs.empty()) throw ConfigError("empty mortality coefficient list");
    Polynomial p{coeffs};
    Polynomial dp = p.derivative(), d2p = dp.derivative();
    double z0 = find_critical_point(dp, d2p, z0_guess, window);
    double m_at_z0 = p(z0);

    Polynomial t = p.shifted(z0);
    t.coeffs[0] = 0.0; // m(0) = 0 exactly
    if (t.coeffs.size() > 1) {
        if (std::abs(t.coeffs[1]) > 1e-10)
            throw InputError("critical point refinement left a nonzero slope");
        t.coeffs[1] = 0.0; // Dm(0) = 0 exactly
    }
    Polynomial t1 = t.derivative(), t2 = t1.derivative(), t3 = t2.derivative();

    double inf_raw = scan_infimum([&](double z) { return p(z); }, window, 8192);
    return MortalityModel([t](double h) { return t(h); },
                          [t1](double h) { return t1(h); },
                          [t2](double h) { return t2(h); },
                          [t3](double h) { return t3(h); }, z0, m_at_z0, inf_raw,
                          window);
}

MortalityModel make_preset_mortality(const std::string& name, double window,
                                     const std::string& minimum) {
    if (name == "quadratic")
        return make_polynomial_mortality({0.0, 0.0, 0.5}, 0.0, window);
    if (name == "cubic_perturbed") {
        // 1 + m crosses zero near z = -3.5, so the admissible working window
        // of this preset is capped there
        return make_polynomial_mortality({0.0, 0.0, 0.5, 1.0 / 6.0}, 0.0,
                                         std::min(window, 3.0));
    }
    if (name == "double_well") {
        // (z^2 - 1)^2 + 0.25 z = 1 + 0.25 z - 2 z^2 + z^4
        double guess = (minimum == "right") ? 1.0 : -1.0;
        return make_polynomial_mortality({1.0, 0.25, -2.0, 0.0, 1.0}, guess, window);
    }
    throw ConfigError("unknown mortality preset '" + name + "'");
}

MortalityReport validate_mortality(const MortalityModel& model,
                                   const AlphaParameter& alpha, double window) {
    MortalityReport rep;
    auto reject = [&rep](double z, const std::string& why) -> MortalityReport& {
        rep.accepted = false;
        rep.first_offending_z = z;
        rep.reason = why;
        return rep;
    };

    if (std::abs(model.m(0.0)) > 1e-12) {
        reject(0.0, "m(0) != 0 after normalization");
        return rep;
    }
    if (std::abs(model.Dm(0.0)) > 1e-8) {
        reject(0.0, "Dm(0) != 0: origin is not a critical point");
        return rep;
    }
    if (!(model.D2m(0.0) > 0.0)) {
        reject(0.0, "D2m(0) <= 0: critical point is degenerate");
        return rep;
    }

    int samples = 4 * 2049;
    double c_m = 0.0;
    for (int i = 0; i < samples; ++i) {
        double z = -window + 2.0 * window * i / (samples - 1);
        double one_plus = 1.0 + model.m(z);
        if (!(one_plus > 0.0)) {
            reject(z, "1 + m(z) <= 0");
            return rep;
        }
        double w = std::pow(1.0 + std::abs(z), alpha.alpha);
        double r1 = w * std::abs(model.Dm(z)) / one_plus;
        double r2 = w * std::abs(model.D2m(z)) / one_plus;
        double r3 = w * std::abs(model.D3m(z)) / one_plus;
        if (!std::isfinite(r1) || !std::isfinite(r2) || !std::isfinite(r3)) {
            reject(z, "weighted derivative ratio is not finite");
            return rep;
        }
        c_m = std::max({c_m, r1, r2, r3});
    }
    rep.accepted = true;
    rep.C_m = c_m;
    return rep;
}

} // namespace infimod
