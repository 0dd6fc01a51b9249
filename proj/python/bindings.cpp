#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "infimod/config.hpp"
#include "infimod/errors.hpp"
#include "infimod/fixed_point.hpp"
#include "infimod/gamma_solver.hpp"
#include "infimod/infinitesimal.hpp"
#include "infimod/limit_objects.hpp"
#include "infimod/quadrature.hpp"
#include "infimod/time_march.hpp"

namespace py = pybind11;
using namespace infimod;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
    py::array_t<double> out(v.size());
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

std::vector<double> from_array(const py::array_t<double>& a) {
    auto buf = a.request();
    const double* p = static_cast<const double*>(buf.ptr);
    return std::vector<double>(p, p + buf.size);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "stationary profiles of the small-variance infinitesimal model";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<InputError>(m, "InputError");
    py::register_exception<NumericalError>(m, "NumericalError");
    py::register_exception<CompatibilityError>(m, "ConvergenceStageError");

    py::class_<GridFunction>(m, "GridFunction")
        .def_property_readonly("half_width", &GridFunction::half_width)
        .def_property_readonly("size", &GridFunction::size)
        .def_property_readonly("values",
                               [](const GridFunction& g) { return to_array(g.values()); })
        .def_property_readonly("deriv1",
                               [](const GridFunction& g) { return to_array(g.deriv1()); })
        .def_property_readonly("deriv2",
                               [](const GridFunction& g) { return to_array(g.deriv2()); })
        .def_property_readonly("deriv3",
                               [](const GridFunction& g) { return to_array(g.deriv3()); })
        .def_property_readonly("nodes",
                               [](const GridFunction& g) {
                                   std::vector<double> z(g.size());
                                   for (int i = 0; i < g.size(); ++i) z[i] = g.node(i);
                                   return to_array(z);
                               })
        .def("__call__",
             [](const GridFunction& g, double z, int order) { return eval(g, z, order); },
             py::arg("z"), py::arg("order") = 0)
        .def("alpha_norm", [](const GridFunction& g, double a) {
            return alpha_norm(g, AlphaParameter(a));
        });

    m.def("build_grid_function",
          [](const std::function<double(double)>& f, double L, int N) {
              return build_grid_function(f, L, N);
          },
          py::arg("f"), py::arg("half_width"), py::arg("sample_count"));
    m.def("grid_function_from_values",
          [](const py::array_t<double>& values, double L) {
              return build_grid_function(from_array(values), L);
          },
          py::arg("values"), py::arg("half_width"));

    py::class_<MortalityModel>(m, "MortalityModel")
        .def_property_readonly("z0", &MortalityModel::z0)
        .def_property_readonly("m_at_z0", &MortalityModel::m_at_z0)
        .def_property_readonly("mu0", &MortalityModel::mu0)
        .def_property_readonly("inf_m", &MortalityModel::inf_m)
        .def_property_readonly("compat_margin", &MortalityModel::compat_margin)
        .def("m", &MortalityModel::m)
        .def("Dm", &MortalityModel::Dm)
        .def("D2m", &MortalityModel::D2m)
        .def("D3m", &MortalityModel::D3m)
        .def("raw", &MortalityModel::raw);

    m.def("preset_mortality", &make_preset_mortality, py::arg("name"),
          py::arg("window") = 8.0, py::arg("minimum") = "left");
    m.def("polynomial_mortality", &make_polynomial_mortality, py::arg("coeffs"),
          py::arg("z0_guess") = 0.0, py::arg("window") = 8.0);
    m.def("validate_mortality",
          [](const MortalityModel& model, double alpha, double window) {
              auto r = validate_mortality(model, AlphaParameter(alpha), window);
              py::dict d;
              d["accepted"] = r.accepted;
              d["C_m"] = r.C_m;
              d["reason"] = r.reason;
              d["first_offending_z"] = r.first_offending_z;
              return d;
          },
          py::arg("model"), py::arg("alpha") = 0.4, py::arg("window") = 8.0);

    py::class_<QuadratureRule>(m, "QuadratureRule")
        .def(py::init<int>(), py::arg("order") = 24)
        .def_property_readonly("order", &QuadratureRule::order);
    m.def("q_form", &q_form);
    m.def("gauss_q2d", [](const std::function<double(double, double)>& g, int order) {
        return gauss_q2d(g, QuadratureRule(order));
    }, py::arg("g"), py::arg("order") = 24);
    m.def("gauss_1d", [](const std::function<double(double)>& g, int order) {
        return gauss_1d(g, QuadratureRule(order));
    }, py::arg("g"), py::arg("order") = 24);

    m.def("eval_J",
          [](double g, const GridFunction& V, double eps, int order) {
              return eval_J(g, V, eps, QuadratureRule(order));
          },
          py::arg("g"), py::arg("V"), py::arg("eps"), py::arg("quad_order") = 24);
    m.def("solve_gamma",
          [](const GridFunction& V, const MortalityModel& model, double eps,
             double alpha, int order) {
              return solve_gamma(V, model, eps, AlphaParameter(alpha),
                                 QuadratureRule(order));
          },
          py::arg("V"), py::arg("model"), py::arg("eps"), py::arg("alpha") = 0.4,
          py::arg("quad_order") = 24);
    m.def("eval_I",
          [](const GridFunction& V, double gamma, double eps, double z, int order) {
              return eval_I(V, gamma, eps, z, QuadratureRule(order));
          },
          py::arg("V"), py::arg("gamma"), py::arg("eps"), py::arg("z"),
          py::arg("quad_order") = 24);
    m.def("eval_W",
          [](const GridFunction& V, double gamma, double eps, double z, int i,
             int order) {
              return eval_W(V, gamma, eps, z, i, QuadratureRule(order));
          },
          py::arg("V"), py::arg("gamma"), py::arg("eps"), py::arg("z"), py::arg("i"),
          py::arg("quad_order") = 24);

    m.def("kappa", &kappa);
    m.def("lambda0", &lambda0);
    m.def("gamma0", &gamma0);
    m.def("v0_series",
          [](const MortalityModel& model, double L, int N, double tol) {
              return v0_series(model, L, N, tol);
          },
          py::arg("model"), py::arg("half_width") = 6.0, py::arg("sample_count") = 513,
          py::arg("tol") = 1e-12);
    m.def("u0",
          [](const MortalityModel& model, double L, int N, double tol) {
              return u0(model, L, N, tol);
          },
          py::arg("model"), py::arg("half_width") = 6.0, py::arg("sample_count") = 513,
          py::arg("tol") = 1e-12);

    py::class_<StationarySolution>(m, "StationarySolution")
        .def_readonly("eps", &StationarySolution::eps)
        .def_readonly("lambda_eps", &StationarySolution::lambda_eps)
        .def_readonly("gamma_eps", &StationarySolution::gamma_eps)
        .def_readonly("iterations", &StationarySolution::iterations)
        .def_readonly("residual", &StationarySolution::residual)
        .def_readonly("contraction_trace", &StationarySolution::contraction_trace)
        .def_readonly("V", &StationarySolution::V)
        .def_readonly("U", &StationarySolution::U)
        .def_readonly("R0", &StationarySolution::R0)
        .def("lambda_raw", &StationarySolution::lambda_raw);

    m.def("picard_solve",
          [](const MortalityModel& model, double eps, double alpha, double picard_tol,
             int max_iter, double L, int N, int quad_order, int threads) {
              SolverConfig cfg;
              cfg.alpha = alpha;
              cfg.picard_tol = picard_tol;
              cfg.max_iter = max_iter;
              cfg.half_width = L;
              cfg.sample_count = N;
              cfg.quad_order = quad_order;
              cfg.threads = threads;
              return picard_solve(model, eps, cfg);
          },
          py::arg("model"), py::arg("eps"), py::arg("alpha") = 0.4,
          py::arg("picard_tol") = 1e-10, py::arg("max_iter") = 200,
          py::arg("half_width") = 6.0, py::arg("sample_count") = 513,
          py::arg("quad_order") = 24, py::arg("threads") = 0);

    py::class_<DensityState>(m, "DensityState")
        .def(py::init([](double L, const py::array_t<double>& values, double eps) {
                 return DensityState(L, from_array(values), eps);
             }),
             py::arg("half_width"), py::arg("values"), py::arg("epsilon"))
        .def_property_readonly("half_width", &DensityState::half_width)
        .def_property_readonly("epsilon", &DensityState::epsilon)
        .def_property_readonly("values",
                               [](const DensityState& f) { return to_array(f.values()); })
        .def_property_readonly("nodes",
                               [](const DensityState& f) {
                                   std::vector<double> z(f.size());
                                   for (int j = 0; j < f.size(); ++j) z[j] = f.node(j);
                                   return to_array(z);
                               })
        .def("mass", &DensityState::mass)
        .def("mean", &DensityState::mean)
        .def("renormalize", &DensityState::renormalize);

    m.def("gaussian_density", &make_gaussian_density, py::arg("center"),
          py::arg("variance"), py::arg("half_width"), py::arg("sample_count"),
          py::arg("epsilon"));
    m.def("midpoint_density", &midpoint_density);
    m.def("apply_B", &apply_B, py::arg("f"), py::arg("eps"));
    m.def("l1_distance", &l1_distance);
    m.def("reconstruct_F", &reconstruct_F, py::arg("solution"), py::arg("model"),
          py::arg("half_width") = 4.0, py::arg("sample_count") = 4096);
    m.def("stationarity_residual", &stationarity_residual, py::arg("F"),
          py::arg("lambda_raw"), py::arg("model"), py::arg("eps"));

    m.def("run_to_equilibrium",
          [](const DensityState& init, const MortalityModel& model, double eps,
             double dt, double equil_tol, long max_steps) {
              MarchConfig mc;
              mc.dt = dt;
              mc.equil_tol = equil_tol;
              mc.max_steps = max_steps;
              MarchResult r = run_to_equilibrium(init, model, eps, mc);
              py::dict d;
              d["equilibrium"] = r.equilibrium;
              d["lambda_hat"] = r.lambda_hat;
              d["converged"] = r.converged;
              d["steps"] = r.steps;
              d["dt"] = r.dt;
              return d;
          },
          py::arg("init"), py::arg("model"), py::arg("eps"), py::arg("dt") = 0.0,
          py::arg("equil_tol") = 1e-7, py::arg("max_steps") = 500000);

#ifdef VERSION_INFO
#define STR_(x) #x
#define STR(x) STR_(x)
    m.attr("__version__") = STR(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
