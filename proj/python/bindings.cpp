#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mmlin/bounds.hpp"
#include "mmlin/error.hpp"
#include "mmlin/fit.hpp"
#include "mmlin/integrate.hpp"
#include "mmlin/linear.hpp"
#include "mmlin/model.hpp"
#include "mmlin/timescale.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

template <typename F>
py::array_t<double> component(const std::vector<mmlin::State>& states, F&& get) {
  py::array_t<double> out(static_cast<py::ssize_t>(states.size()));
  auto view = out.mutable_unchecked<1>();
  for (std::size_t i = 0; i < states.size(); ++i) view(static_cast<py::ssize_t>(i)) = get(states[i]);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "C++ core of the mmlin package";

  py::register_exception<mmlin::InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<mmlin::NumericalFailure>(m, "NumericalFailure", PyExc_RuntimeError);

  py::class_<mmlin::State>(m, "State")
      .def(py::init<double, double>(), "s"_a = 0.0, "c"_a = 0.0)
      .def_readwrite("s", &mmlin::State::s)
      .def_readwrite("c", &mmlin::State::c)
      .def("__iter__", [](const mmlin::State& x) {
        return py::iter(py::make_tuple(x.s, x.c));
      })
      .def("__repr__", [](const mmlin::State& x) {
        return "State(s=" + std::to_string(x.s) + ", c=" + std::to_string(x.c) + ")";
      });

  py::class_<mmlin::RateParams>(m, "RateParams")
      .def(py::init<double, double, double, double, double, double>(), "k1"_a, "k_minus1"_a,
           "k2"_a, "e0"_a, "s0"_a, "c0"_a = 0.0)
      .def_property_readonly("k1", &mmlin::RateParams::k1)
      .def_property_readonly("k_minus1", &mmlin::RateParams::k_minus1)
      .def_property_readonly("k2", &mmlin::RateParams::k2)
      .def_property_readonly("e0", &mmlin::RateParams::e0)
      .def_property_readonly("s0", &mmlin::RateParams::s0)
      .def_property_readonly("c0", &mmlin::RateParams::c0)
      .def("with_s0", &mmlin::RateParams::with_s0)
      .def("with_e0", &mmlin::RateParams::with_e0);

  py::class_<mmlin::DerivedConstants>(m, "DerivedConstants")
      .def_readonly("K_S", &mmlin::DerivedConstants::K_S)
      .def_readonly("K_M", &mmlin::DerivedConstants::K_M)
      .def_readonly("K", &mmlin::DerivedConstants::K);

  m.def("derive_constants", &mmlin::derive_constants, "p"_a);
  m.def("mm_rhs", &mmlin::mm_rhs, "x"_a, "p"_a);
  m.def("mm_jacobian", &mmlin::mm_jacobian, "x"_a, "p"_a);
  m.def("in_region_D", &mmlin::in_region_D, "x"_a, "p"_a,
        "slack"_a = mmlin::kDefaultRegionSlack);

  py::class_<mmlin::LinearTriple>(m, "LinearTriple")
      .def(py::init<double, double, double>(), "alpha"_a, "beta"_a, "gamma"_a)
      .def_property_readonly("alpha", &mmlin::LinearTriple::alpha)
      .def_property_readonly("beta", &mmlin::LinearTriple::beta)
      .def_property_readonly("gamma", &mmlin::LinearTriple::gamma)
      .def_property_readonly("usable", &mmlin::LinearTriple::usable)
      .def("matrix", &mmlin::LinearTriple::matrix);

  py::class_<mmlin::EigenPair>(m, "EigenPair")
      .def_readonly("lambda1", &mmlin::EigenPair::lambda1)
      .def_readonly("lambda2", &mmlin::EigenPair::lambda2)
      .def_readonly("v1", &mmlin::EigenPair::v1)
      .def_readonly("v2", &mmlin::EigenPair::v2)
      .def_readonly("delta", &mmlin::EigenPair::delta);

  py::class_<mmlin::BiexpSolution>(m, "BiexpSolution")
      .def_readonly("B1", &mmlin::BiexpSolution::B1)
      .def_readonly("B2", &mmlin::BiexpSolution::B2)
      .def_readonly("A1", &mmlin::BiexpSolution::A1)
      .def_readonly("A2", &mmlin::BiexpSolution::A2)
      .def("__call__", [](const mmlin::BiexpSolution& sol, double t) {
        return mmlin::evaluate(sol, t);
      });

  m.def("eigen", &mmlin::eigen, "tri"_a);
  m.def("biexp_solve", py::overload_cast<const mmlin::LinearTriple&, double>(&mmlin::biexp_solve),
        "tri"_a, "s0"_a);
  m.def("evaluate", &mmlin::evaluate, "sol"_a, "t"_a);
  m.def("mm_linear_triple", &mmlin::mm_linear_triple, "p"_a);
  m.def("lower_triple", &mmlin::lower_triple, "p"_a);
  m.def("upper_triple", &mmlin::upper_triple, "p"_a);
  m.def("mm_linear_solution", &mmlin::mm_linear_solution, "p"_a);

  py::class_<mmlin::IntegratorConfig>(m, "IntegratorConfig")
      .def(py::init([](double rel_tol, double abs_tol, std::size_t max_steps) {
             mmlin::IntegratorConfig cfg;
             cfg.rel_tol = rel_tol;
             cfg.abs_tol = abs_tol;
             cfg.max_steps = max_steps;
             return cfg;
           }),
           "rel_tol"_a = 1e-10, "abs_tol"_a = 1e-12, "max_steps"_a = 10'000'000)
      .def_readwrite("rel_tol", &mmlin::IntegratorConfig::rel_tol)
      .def_readwrite("abs_tol", &mmlin::IntegratorConfig::abs_tol)
      .def_readwrite("max_steps", &mmlin::IntegratorConfig::max_steps);

  py::class_<mmlin::Trajectory>(m, "Trajectory")
      .def_property_readonly("t", [](const mmlin::Trajectory& tr) { return to_array(tr.times); })
      .def_property_readonly("s", [](const mmlin::Trajectory& tr) {
        return component(tr.states, [](const mmlin::State& x) { return x.s; });
      })
      .def_property_readonly("c", [](const mmlin::Trajectory& tr) {
        return component(tr.states, [](const mmlin::State& x) { return x.c; });
      })
      .def_readonly("rejected_steps", &mmlin::Trajectory::rejected_steps)
      .def_readonly("region_violations", &mmlin::Trajectory::region_violations)
      .def("at", &mmlin::Trajectory::at, "t"_a)
      .def("__len__", &mmlin::Trajectory::size);

  m.def("integrate_mm",
        [](const mmlin::RateParams& p, double T, const mmlin::IntegratorConfig& cfg) {
          return mmlin::integrate_mm(p, T, cfg);
        },
        "p"_a, "T"_a, "cfg"_a = mmlin::IntegratorConfig{});
  m.def("integrate_linear",
        [](const mmlin::LinearTriple& tri, mmlin::State init, double T,
           const mmlin::IntegratorConfig& cfg) {
          return mmlin::integrate_linear(tri, init, T, cfg);
        },
        "tri"_a, "init"_a, "T"_a, "cfg"_a = mmlin::IntegratorConfig{});
  m.def("horizon", &mmlin::horizon, "p"_a, "eps"_a = mmlin::kDefaultHorizonEps);

  py::class_<mmlin::SandwichReport>(m, "SandwichReport")
      .def_readonly("T", &mmlin::SandwichReport::T)
      .def_property_readonly("grid", [](const mmlin::SandwichReport& r) { return to_array(r.grid); })
      .def_property_readonly("s_low", [](const mmlin::SandwichReport& r) { return to_array(r.s_low); })
      .def_property_readonly("s_star", [](const mmlin::SandwichReport& r) { return to_array(r.s_star); })
      .def_property_readonly("s_up", [](const mmlin::SandwichReport& r) { return to_array(r.s_up); })
      .def_property_readonly("s_num", [](const mmlin::SandwichReport& r) { return to_array(r.s_num); })
      .def_property_readonly("c_low", [](const mmlin::SandwichReport& r) { return to_array(r.c_low); })
      .def_property_readonly("c_star", [](const mmlin::SandwichReport& r) { return to_array(r.c_star); })
      .def_property_readonly("c_up", [](const mmlin::SandwichReport& r) { return to_array(r.c_up); })
      .def_property_readonly("c_num", [](const mmlin::SandwichReport& r) { return to_array(r.c_num); })
      .def_readonly("max_violation", &mmlin::SandwichReport::max_violation)
      .def_readonly("slack", &mmlin::SandwichReport::slack)
      .def_readonly("passed", &mmlin::SandwichReport::passed);

  py::class_<mmlin::SupError>(m, "SupError")
      .def_readonly("err_s", &mmlin::SupError::err_s)
      .def_readonly("err_c", &mmlin::SupError::err_c);

  py::class_<mmlin::OrderReport>(m, "OrderReport")
      .def_readonly("s0_values", &mmlin::OrderReport::s0_values)
      .def_readonly("sup_errors_s", &mmlin::OrderReport::sup_errors_s)
      .def_readonly("sup_errors_c", &mmlin::OrderReport::sup_errors_c)
      .def_readonly("slope_s", &mmlin::OrderReport::slope_s)
      .def_readonly("slope_c", &mmlin::OrderReport::slope_c)
      .def_readonly("constant_s", &mmlin::OrderReport::constant_s)
      .def_readonly("constant_c", &mmlin::OrderReport::constant_c);

  m.def("sandwich_check", &mmlin::sandwich_check, "p"_a, "n_grid"_a = 512,
        "cfg"_a = mmlin::IntegratorConfig{});
  m.def("sup_error", &mmlin::sup_error, "p"_a, "cfg"_a = mmlin::IntegratorConfig{},
        "n_uniform"_a = 512);
  m.def("convergence_order", &mmlin::convergence_order, "p"_a, "s0_max"_a, "n_points"_a,
        "cfg"_a = mmlin::IntegratorConfig{}, py::call_guard<py::gil_scoped_release>());

  py::class_<mmlin::SeparationThresholds>(m, "SeparationThresholds")
      .def(py::init([](double eta_sep, double eta_marginal) {
             return mmlin::SeparationThresholds{eta_sep, eta_marginal};
           }),
           "eta_sep"_a = 0.1, "eta_marginal"_a = 0.5)
      .def_readwrite("eta_sep", &mmlin::SeparationThresholds::eta_sep)
      .def_readwrite("eta_marginal", &mmlin::SeparationThresholds::eta_marginal);

  py::class_<mmlin::TimescaleReport>(m, "TimescaleReport")
      .def_readonly("lambda1", &mmlin::TimescaleReport::lambda1)
      .def_readonly("lambda2", &mmlin::TimescaleReport::lambda2)
      .def_readonly("eta", &mmlin::TimescaleReport::eta)
      .def_readonly("lambda1_approx", &mmlin::TimescaleReport::lambda1_approx)
      .def_readonly("v1_exact", &mmlin::TimescaleReport::v1_exact)
      .def_readonly("v1_approx", &mmlin::TimescaleReport::v1_approx)
      .def_readonly("v1_angle", &mmlin::TimescaleReport::v1_angle)
      .def_property_readonly("verdict", [](const mmlin::TimescaleReport& r) {
        return std::string(mmlin::to_string(r.verdict));
      });

  m.def("analyze", &mmlin::analyze, "p"_a, "thresholds"_a = mmlin::SeparationThresholds{});
  m.def("slow_eigenvalue_approx", &mmlin::slow_eigenvalue_approx, "p"_a);
  m.def("slow_eigenvector_approx", &mmlin::slow_eigenvector_approx, "p"_a);
  m.def("reduced_solution", &mmlin::reduced_solution, "p"_a, "init"_a, "t"_a);

  py::class_<mmlin::Observation>(m, "Observation")
      .def(py::init([](double t, double s, std::optional<double> c, double weight) {
             return mmlin::Observation{t, s, c, weight};
           }),
           "t"_a, "s"_a, "c"_a = py::none(), "weight"_a = 1.0)
      .def_readwrite("t", &mmlin::Observation::t)
      .def_readwrite("s", &mmlin::Observation::s_obs)
      .def_readwrite("c", &mmlin::Observation::c_obs)
      .def_readwrite("weight", &mmlin::Observation::weight);

  py::class_<mmlin::FitResult>(m, "FitResult")
      .def_readonly("k1", &mmlin::FitResult::k1)
      .def_readonly("k_minus1", &mmlin::FitResult::k_minus1)
      .def_readonly("k2", &mmlin::FitResult::k2)
      .def_readonly("residual_norm", &mmlin::FitResult::residual_norm)
      .def_readonly("iterations", &mmlin::FitResult::iterations)
      .def_readonly("converged", &mmlin::FitResult::converged)
      .def_readonly("covariance_proxy", &mmlin::FitResult::covariance_proxy)
      .def_readonly("rank_deficient", &mmlin::FitResult::rank_deficient)
      .def_readonly("identifiability_flag", &mmlin::FitResult::identifiability_flag)
      .def_readonly("warnings", &mmlin::FitResult::warnings);

  auto to_rates = [](const std::tuple<double, double, double>& g) {
    return mmlin::Rates{std::get<0>(g), std::get<1>(g), std::get<2>(g)};
  };
  m.def("fit_rates",
        [to_rates](const std::vector<mmlin::Observation>& data, double e0, double s0,
                   const std::tuple<double, double, double>& guess) {
          return mmlin::fit_rates(data, e0, s0, to_rates(guess));
        },
        "data"_a, "e0"_a, "s0"_a, "guess"_a);
  m.def("residuals",
        [to_rates](const std::vector<mmlin::Observation>& data, double e0, double s0,
                   const std::tuple<double, double, double>& rates) {
          return mmlin::residuals(data, e0, s0, to_rates(rates));
        },
        "data"_a, "e0"_a, "s0"_a, "rates"_a);
  m.def("synthesize", &mmlin::synthesize, "p"_a, "times"_a, "with_complex"_a = false);
}
