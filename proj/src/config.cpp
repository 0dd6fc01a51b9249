#include "infimod/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "infimod/errors.hpp"

namespace infimod {

namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

using SectionMap = std::map<std::string, std::map<std::string, std::string>>;

SectionMap parse_ini(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    SectionMap sections;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("malformed section header at line " +
                                  std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(lineno));
        sections[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return sections;
}

} // namespace

Config Config::load(const std::string& path) {
    SectionMap ini = parse_ini(path);
    Config cfg;

    auto get = [&](const std::string& sec, const std::string& key,
                   std::string* out) -> bool {
        auto s = ini.find(sec);
        if (s == ini.end()) return false;
        auto k = s->second.find(key);
        if (k == s->second.end()) return false;
        *out = k->second;
        return true;
    };
    std::string v;

    if (get("model", "preset", &v)) cfg.preset = v;
    if (get("model", "coeffs", &v)) cfg.coeffs = parse_list(v);
    if (get("model", "z0", &v)) {
        cfg.z0_guess = std::stod(v);
        cfg.has_z0_guess = true;
    }
    if (get("model", "minimum", &v)) cfg.minimum = v;
    if (get("model", "window", &v)) cfg.window = std::stod(v);

    if (get("discretization", "L", &v)) cfg.L = std::stod(v);
    if (get("discretization", "N", &v)) cfg.N = std::stoi(v);
    if (get("discretization", "quad_order", &v)) cfg.quad_order = std::stoi(v);
    if (get("discretization", "density_L", &v)) cfg.density_L = std::stod(v);
    if (get("discretization", "density_N", &v)) cfg.density_N = std::stoi(v);

    if (get("solver", "eps", &v)) cfg.eps = std::stod(v);
    if (get("solver", "alpha", &v)) cfg.alpha = std::stod(v);
    if (get("solver", "picard_tol", &v)) cfg.picard_tol = std::stod(v);
    if (get("solver", "max_iter", &v)) cfg.max_iter = std::stoi(v);
    if (get("solver", "series_tol", &v)) cfg.series_tol = std::stod(v);
    if (get("solver", "gamma_tol", &v)) cfg.gamma_tol = std::stod(v);

    if (get("march", "eps", &v)) cfg.march_eps = std::stod(v);
    if (get("march", "dt", &v)) cfg.dt = std::stod(v);
    if (get("march", "equil_tol", &v)) cfg.equil_tol = std::stod(v);
    if (get("march", "max_steps", &v)) cfg.max_steps = std::stol(v);
    if (get("march", "init", &v)) cfg.init_centers = parse_list(v);

    if (get("sweep", "eps_list", &v)) cfg.eps_list = parse_list(v);
    if (get("sweep", "region", &v)) cfg.region = std::stod(v);

    return cfg;
}

MortalityModel Config::make_model() const {
    if (!preset.empty())
        return make_preset_mortality(preset, window, minimum);
    if (!coeffs.empty()) {
        double guess = has_z0_guess ? z0_guess : 0.0;
        return make_polynomial_mortality(coeffs, guess, window);
    }
    throw ConfigError("missing mortality spec: set [model] preset or [model] coeffs");
}

SolverConfig Config::solver_config(int threads) const {
    SolverConfig sc;
    sc.alpha = alpha;
    sc.picard_tol = picard_tol;
    sc.max_iter = max_iter;
    sc.series_tol = series_tol;
    sc.gamma_tol = gamma_tol;
    sc.quad_order = quad_order;
    sc.half_width = L;
    sc.sample_count = N;
    sc.threads = threads;
    return sc;
}

} // namespace infimod
