// Command line driver: stationary | march | converge | verify.
// Deterministic given the config file; exit code 0 iff every requested
// computation converged and its certificates passed.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "infimod/config.hpp"
#include "infimod/errors.hpp"
#include "infimod/fixed_point.hpp"
#include "infimod/gamma_solver.hpp"
#include "infimod/limit_objects.hpp"
#include "infimod/parallel.hpp"
#include "infimod/quadrature.hpp"
#include "infimod/time_march.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace infimod;

namespace {

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    if (!out) throw InputError("cannot write " + p.string());
    out << content;
}

std::string profile_csv(const GridFunction& gf) {
    std::ostringstream os;
    os.precision(15);
    os << "z,value,d1,d2\n";
    for (int i = 0; i < gf.size(); ++i)
        os << gf.node(i) << ',' << gf.values()[i] << ',' << gf.deriv1()[i] << ','
           << gf.deriv2()[i] << '\n';
    return os.str();
}

std::string density_csv(const DensityState& f) {
    std::ostringstream os;
    os.precision(15);
    os << "z,f\n";
    for (int j = 0; j < f.size(); ++j) os << f.node(j) << ',' << f.values()[j] << '\n';
    return os.str();
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
    std::ostringstream os;
    os.precision(12);
    os << "t,lambda_hat,increment\n";
    for (const auto& r : rows)
        os << r.t << ',' << r.lambda_hat << ',' << r.increment << '\n';
    return os.str();
}

json solution_json(const StationarySolution& sol) {
    json j;
    j["eps"] = sol.eps;
    j["lambda"] = sol.lambda_eps;
    j["gamma"] = sol.gamma_eps;
    j["iterations"] = sol.iterations;
    j["residual"] = sol.residual;
    j["lambda_raw"] = sol.lambda_raw();
    j["R0"] = sol.R0;
    j["C_m"] = sol.C_m;
    j["max_alpha_norm"] = sol.max_norm;
    j["contraction_trace"] = sol.contraction_trace;
    return j;
}

int cmd_stationary(const Config& cfg, const fs::path& out, int threads) {
    MortalityModel model = cfg.make_model();
    StationarySolution sol = picard_solve(model, cfg.eps, cfg.solver_config(threads));
    write_file(out / "solution.json", solution_json(sol).dump(2) + "\n");
    write_file(out / "U.csv", profile_csv(sol.U));
    DensityState F = reconstruct_F(sol, model, cfg.density_L, cfg.density_N);
    write_file(out / "F.csv", density_csv(F));
    double cert = stationarity_residual(F, sol.lambda_raw(), model, cfg.eps);
    std::cout << "stationary: eps = " << sol.eps << ", lambda = " << sol.lambda_eps
              << ", gamma = " << sol.gamma_eps << ", iterations = " << sol.iterations
              << ", residual = " << sol.residual << ", certificate = " << cert << "\n";
    return cert <= 1e-3 ? 0 : 1;
}

int cmd_march(const Config& cfg, const fs::path& out, int threads) {
    MortalityModel model = cfg.make_model();
    MarchConfig mc;
    mc.dt = cfg.dt;
    mc.equil_tol = cfg.equil_tol;
    mc.max_steps = cfg.max_steps;

    int nruns = static_cast<int>(cfg.init_centers.size());
    std::vector<MarchResult> results(nruns);
    std::vector<std::string> errors(nruns);
    parallel_for(nruns, std::min(threads == 0 ? nruns : threads, nruns), [&](int i) {
        try {
            DensityState init =
                make_gaussian_density(cfg.init_centers[i], cfg.march_eps * cfg.march_eps,
                                      cfg.density_L, cfg.density_N, cfg.march_eps);
            init.renormalize();
            results[i] = run_to_equilibrium(init, model, cfg.march_eps, mc);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    int rc = 0;
    json summary;
    summary["runs"] = json::array();
    for (int i = 0; i < nruns; ++i) {
        if (!errors[i].empty()) {
            std::cerr << "march run " << i << " failed: " << errors[i] << "\n";
            return 2;
        }
        const auto& r = results[i];
        double cert = equilibrium_certificate(r.equilibrium, r.lambda_hat, model,
                                              cfg.march_eps);
        std::string tag = "run" + std::to_string(i);
        write_file(out / (tag + "_trace.csv"), trace_csv(r.trace));
        write_file(out / (tag + "_profile.csv"), density_csv(r.equilibrium));
        json jr;
        jr["init_center"] = cfg.init_centers[i];
        jr["lambda_hat"] = r.lambda_hat;
        jr["steps"] = r.steps;
        jr["dt"] = r.dt;
        jr["converged"] = r.converged;
        jr["certificate"] = cert;
        jr["mean"] = r.equilibrium.mean();
        summary["runs"].push_back(jr);
        std::cout << tag << ": lambda_hat = " << r.lambda_hat << ", steps = " << r.steps
                  << ", certificate = " << cert << ", mean = " << r.equilibrium.mean()
                  << (r.converged ? "" : "  [NOT CONVERGED]") << "\n";
        if (!r.converged || cert > 1e-4) rc = 1;
    }
    if (nruns == 2) {
        double dist = l1_distance(results[0].equilibrium, results[1].equilibrium);
        summary["pairwise_l1_distance"] = dist;
        std::cout << "pairwise L1 distance = " << dist << "\n";
    }
    write_file(out / "march_summary.json", summary.dump(2) + "\n");
    return rc;
}

int cmd_converge(const Config& cfg, const fs::path& out, int threads) {
    if (cfg.eps_list.empty())
        throw ConfigError("converge needs [sweep] eps_list");
    MortalityModel model = cfg.make_model();
    int n = static_cast<int>(cfg.eps_list.size());
    std::vector<StationarySolution> sols(n);
    std::vector<std::string> errors(n);
    // sweep members in a work pool; each solve stays serial inside
    SolverConfig sc = cfg.solver_config(1);
    parallel_for(n, std::min(threads == 0 ? n : threads, n), [&](int i) {
        try {
            sols[i] = picard_solve(model, cfg.eps_list[i], sc);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (int i = 0; i < n; ++i)
        if (!errors[i].empty()) {
            std::cerr << "solve at eps = " << cfg.eps_list[i]
                      << " failed: " << errors[i] << "\n";
            return 2;
        }

    ConvergenceReport rep = convergence_report(sols, model, cfg.region);
    write_file(out / "converge.csv", rep.to_csv());
    std::cout << rep.to_csv();
    return rep.monotone ? 0 : 1;
}

struct VerifyItem {
    std::string name;
    bool pass;
    double value;
};

int cmd_verify(const Config& cfg, const fs::path& out, int threads) {
    std::vector<VerifyItem> items;
    auto check = [&items](const std::string& name, bool ok, double value) {
        items.push_back({name, ok, value});
    };

    QuadratureRule rule(cfg.quad_order);
    double m0 = gauss_q2d([](double, double) { return 1.0; }, rule);
    check("quadrature normalization", std::abs(m0 - 1.0) <= 1e-10, m0);
    double m1 = gauss_q2d([](double y1, double y2) { return y1 + y2; }, rule);
    check("quadrature E[y1+y2] = 0", std::abs(m1) <= 1e-10, m1);
    double m2 = gauss_q2d([](double y1, double y2) { return y1 * y2; }, rule);
    check("quadrature E[y1 y2] = -1/4", std::abs(m2 + 0.25) <= 1e-10, m2);
    double m3 = gauss_q2d([](double y1, double y2) { return y1 * y1 + y2 * y2; }, rule);
    check("quadrature E[y1^2+y2^2] = 3/2", std::abs(m3 - 1.5) <= 1e-10, m3);

    for (double e : {0.05, 0.1, 0.2}) {
        DensityState g = make_gaussian_density(0.0, e * e, 8.0, 4096, e);
        double d = l1_distance(apply_B(g, e), g);
        check("B-invariance of Gaussian, eps = " + std::to_string(e), d <= 1e-6, d);
    }

    MortalityModel model = cfg.make_model();
    GridFunction V0 = v0_series(model, cfg.L, cfg.N, cfg.series_tol);
    GridFunction U0 = u0(model, cfg.L, cfg.N, cfg.series_tol);
    double pu0 = 0.0;
    int c = U0.center();
    for (int i = c % 2; i < U0.size(); i += 2) {
        double z = U0.node(i);
        if (std::abs(z) > 2.0) continue;
        int half = c + (i - c) / 2;
        double resid = std::exp(U0.values()[i] - 2.0 * U0.values()[half]) -
                       (1.0 + model.m(z));
        pu0 = std::max(pu0, std::abs(resid));
    }
    check("(PU0) exp-residual on |z| <= 2", pu0 <= 1e-8, pu0);

    AlphaParameter alpha(cfg.alpha);
    GammaSolveReport grep;
    GammaSolveOptions gopts;
    gopts.j_tol = cfg.gamma_tol;
    double g = solve_gamma(V0, model, cfg.eps, alpha, rule, gopts, &grep);
    check("gamma root certificate |J| <= 1e-12", std::abs(grep.j_at_root) <= 1e-12,
          grep.j_at_root);
    check("J monotone on the bracket", grep.monotone, grep.bracket.R_K);
    double gr = solve_gamma(reflect(V0), model, cfg.eps, alpha, rule, gopts);
    check("gamma symmetry under reflection", std::abs(g + gr) <= 1e-9, g + gr);

    double w1 = eval_W(V0, g, cfg.eps, 0.0, 1, rule);
    check("W1(0) = 0 at the solved gamma", std::abs(w1) <= 1e-9, w1);

    bool all = true;
    std::ostringstream report;
    for (const auto& it : items) {
        report << (it.pass ? "PASS" : "FAIL") << "  " << it.name
               << "  (value = " << it.value << ")\n";
        all = all && it.pass;
    }
    std::cout << report.str();
    write_file(out / "verify.txt", report.str());
    std::cout << (all ? "verify: all checks passed\n" : "verify: FAILURES above\n");
    (void)threads;
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stationary profiles of the small-variance infinitesimal model"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    int threads = 0;
    app.add_option("--config", config_path, "config file path")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads (0 = hardware)");

    auto* s_stat = app.add_subcommand("stationary", "Picard fixed-point solve");
    auto* s_march = app.add_subcommand("march", "time-march to equilibrium");
    auto* s_conv = app.add_subcommand("converge", "eps sweep against the limit objects");
    auto* s_verify = app.add_subcommand("verify", "run the invariant suite");

    CLI11_PARSE(app, argc, argv);

    try {
        Config cfg = Config::load(config_path);
        fs::path out(out_dir);
        fs::create_directories(out);
        if (s_stat->parsed()) return cmd_stationary(cfg, out, threads);
        if (s_march->parsed()) return cmd_march(cfg, out, threads);
        if (s_conv->parsed()) return cmd_converge(cfg, out, threads);
        if (s_verify->parsed()) return cmd_verify(cfg, out, threads);
    } catch (const ConvergenceError& e) {
        std::cerr << "error (stage: " << e.stage << "): " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
