#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "eigsgd/config.hpp"
#include "eigsgd/experiment.hpp"
#include "eigsgd/phase.hpp"
#include "eigsgd/presets.hpp"
#include "eigsgd/problem.hpp"
#include "eigsgd/rate_bounds.hpp"
#include "eigsgd/schedule.hpp"
#include "eigsgd/solvers.hpp"
#include "eigsgd/theory.hpp"

namespace py = pybind11;
using namespace eigsgd;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Eigencomponent convergence of SGD, GD and randomized Kaczmarz on least squares";
  m.attr("__version__") = EIGSGD_VERSION;

  auto invariant = py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);
  py::register_exception<HypothesisError>(m, "HypothesisError", PyExc_ValueError);
  py::register_exception<UnsupportedRegime>(m, "UnsupportedRegime", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_IndexError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  (void)invariant;

  // problem
  py::enum_<Spacing>(m, "Spacing").value("linear", Spacing::linear).value("geometric", Spacing::geometric);

  py::class_<SpectrumSpec>(m, "SpectrumSpec")
      .def(py::init([](Index rows, Index cols, double sigma_min, double sigma_max, Spacing spacing,
                       std::uint64_t seed) {
             SpectrumSpec s{rows, cols, sigma_min, sigma_max, spacing, seed};
             s.validate();
             return s;
           }),
           py::arg("rows"), py::arg("cols"), py::arg("sigma_min"), py::arg("sigma_max"),
           py::arg("spacing") = Spacing::linear, py::arg("seed") = 0)
      .def_readwrite("rows", &SpectrumSpec::rows)
      .def_readwrite("cols", &SpectrumSpec::cols)
      .def_readwrite("sigma_min", &SpectrumSpec::sigma_min)
      .def_readwrite("sigma_max", &SpectrumSpec::sigma_max)
      .def_readwrite("spacing", &SpectrumSpec::spacing)
      .def_readwrite("seed", &SpectrumSpec::seed)
      .def("singular_values", &SpectrumSpec::singular_values);

  py::class_<Consistency>(m, "Consistency")
      .def_static("exact", &Consistency::exact)
      .def_static("noisy", &Consistency::noisy, py::arg("noise_level"))
      .def_readonly("consistent", &Consistency::consistent)
      .def_readonly("noise_level", &Consistency::noise_level);

  py::class_<SyntheticProblem>(m, "SyntheticProblem")
      .def_readonly("A", &SyntheticProblem::A)
      .def_readonly("b", &SyntheticProblem::b)
      .def_readonly("U", &SyntheticProblem::U)
      .def_readonly("sigma", &SyntheticProblem::sigma)
      .def_readonly("V", &SyntheticProblem::V)
      .def_readonly("x_star", &SyntheticProblem::x_star)
      .def_readonly("F_star", &SyntheticProblem::F_star)
      .def_readonly("consistent", &SyntheticProblem::consistent)
      .def_property_readonly("rows", &SyntheticProblem::rows)
      .def_property_readonly("cols", &SyntheticProblem::cols);

  py::class_<ProblemConstants>(m, "ProblemConstants")
      .def_readonly("rows", &ProblemConstants::rows)
      .def_readonly("L_tilde", &ProblemConstants::L_tilde)
      .def_readonly("cA", &ProblemConstants::cA)
      .def_readonly("frob_sq", &ProblemConstants::frob_sq)
      .def_readonly("sigma_noise_sq", &ProblemConstants::sigma_noise_sq)
      .def_readonly("sigma_min_sq", &ProblemConstants::sigma_min_sq)
      .def_readonly("sigma_max_sq", &ProblemConstants::sigma_max_sq)
      .def_readonly("F_star", &ProblemConstants::F_star)
      .def_readonly("consistent", &ProblemConstants::consistent);

  m.def("random_orthonormal", &random_orthonormal, py::arg("dim"), py::arg("cols"), py::arg("seed"));
  m.def("build_problem", &build_problem, py::arg("spec"), py::arg("consistency") = Consistency::exact(),
        py::arg("data_seed") = 0);
  m.def("compute_constants", &compute_constants, py::arg("problem"));
  m.def("component", &component, py::arg("problem"), py::arg("x"), py::arg("ell"));
  m.def("components", &components, py::arg("problem"), py::arg("x"));
  m.def("initial_point", &initial_point, py::arg("problem"), py::arg("radius") = 1.0, py::arg("seed") = 0);
  m.def("digest", &digest, py::arg("problem"));

  // schedules
  py::enum_<ScheduleKind>(m, "ScheduleKind")
      .value("fixed", ScheduleKind::fixed)
      .value("harmonic", ScheduleKind::harmonic)
      .value("polynomial", ScheduleKind::polynomial);

  py::class_<StepSchedule>(m, "StepSchedule")
      .def_static("fixed", &StepSchedule::fixed, py::arg("alpha"))
      .def_static("harmonic", &StepSchedule::harmonic, py::arg("a"), py::arg("b"))
      .def_static("polynomial", &StepSchedule::polynomial, py::arg("a"), py::arg("b"), py::arg("gamma"))
      .def("step_at", &StepSchedule::step_at, py::arg("k"))
      .def("__call__", &StepSchedule::step_at, py::arg("k"))
      .def_property_readonly("kind", &StepSchedule::kind)
      .def("describe", &StepSchedule::describe)
      .def("__repr__", &StepSchedule::describe)
      .def(py::self == py::self);

  py::class_<Diagnostic> diag(m, "Diagnostic");
  py::enum_<Diagnostic::Code>(diag, "Code")
      .value("step_exceeds_moment_cap", Diagnostic::Code::step_exceeds_moment_cap)
      .value("fixed_outside_window", Diagnostic::Code::fixed_outside_window)
      .value("mean_noncontractive", Diagnostic::Code::mean_noncontractive);
  diag.def_readonly("code", &Diagnostic::code)
      .def_readonly("message", &Diagnostic::message)
      .def_readonly("first_k", &Diagnostic::first_k)
      .def_readonly("last_k", &Diagnostic::last_k);
  m.def("validate", &validate, py::arg("schedule"), py::arg("constants"), py::arg("horizon"));

  // solvers
  py::enum_<Method>(m, "Method").value("gd", Method::gd).value("sgd", Method::sgd).value("kaczmarz", Method::kaczmarz);

  py::class_<Recording>(m, "Recording")
      .def_static("every", &Recording::every)
      .def_static("geometric", &Recording::geometric, py::arg("points_per_decade") = 64)
      .def("iterations", &Recording::iterations, py::arg("iters"));

  py::class_<RepetitionPlan>(m, "RepetitionPlan")
      .def(py::init([](std::int64_t reps, std::uint64_t seed) { return RepetitionPlan{reps, seed}; }),
           py::arg("repetitions"), py::arg("base_seed") = 0)
      .def_readwrite("repetitions", &RepetitionPlan::repetitions)
      .def_readwrite("base_seed", &RepetitionPlan::base_seed)
      .def("seed_for", &RepetitionPlan::seed_for);

  py::class_<Trace>(m, "Trace")
      .def_readonly("iters", &Trace::iters)
      .def_readonly("probes", &Trace::probes)
      .def_readonly("components", &Trace::components)
      .def_readonly("norm_sq", &Trace::norm_sq);

  py::class_<EnsembleSummary>(m, "EnsembleSummary")
      .def_readonly("iters", &EnsembleSummary::iters)
      .def_readonly("probes", &EnsembleSummary::probes)
      .def_readonly("mean_comp", &EnsembleSummary::mean_comp)
      .def_readonly("se_comp", &EnsembleSummary::se_comp)
      .def_readonly("mean_comp_sq", &EnsembleSummary::mean_comp_sq)
      .def_readonly("se_comp_sq", &EnsembleSummary::se_comp_sq)
      .def_readonly("mean_norm_sq", &EnsembleSummary::mean_norm_sq)
      .def_readonly("se_norm_sq", &EnsembleSummary::se_norm_sq)
      .def_readonly("repetitions", &EnsembleSummary::repetitions);

  m.def("gd_step", &gd_step, py::arg("problem"), py::arg("x"), py::arg("alpha"));
  m.def("sgd_step", &sgd_step, py::arg("problem"), py::arg("x"), py::arg("alpha"), py::arg("row"));
  m.def("kaczmarz_step", &kaczmarz_step, py::arg("problem"), py::arg("x"), py::arg("row"));
  m.def("run_trajectory", &run_trajectory, py::arg("problem"), py::arg("method"), py::arg("schedule"), py::arg("x0"),
        py::arg("iters"), py::arg("seed"), py::arg("probes"), py::arg("recording") = Recording::geometric(),
        py::call_guard<py::gil_scoped_release>());
  m.def("run_ensemble", &run_ensemble, py::arg("problem"), py::arg("method"), py::arg("schedule"), py::arg("x0"),
        py::arg("iters"), py::arg("plan"), py::arg("probes"), py::arg("recording") = Recording::geometric(),
        py::arg("threads") = 0u, py::call_guard<py::gil_scoped_release>());

  // theory
  m.def("mean_factor", &mean_factor, py::arg("schedule"), py::arg("sigma_sq"), py::arg("steps"));
  m.def("expected_component", &expected_component, py::arg("problem"), py::arg("schedule"), py::arg("ell"),
        py::arg("x0"), py::arg("n"));
  m.def("mean_bound_harmonic", &mean_bound_harmonic, py::arg("a"), py::arg("b"), py::arg("sigma_sq"), py::arg("c0"),
        py::arg("n"));
  m.def("mean_bound_polynomial", &mean_bound_polynomial, py::arg("a"), py::arg("b"), py::arg("gamma"),
        py::arg("sigma_sq"), py::arg("c0"), py::arg("n"));

  py::class_<FixedSecondMomentBound>(m, "FixedSecondMomentBound")
      .def_readonly("value", &FixedSecondMomentBound::value)
      .def_readonly("base", &FixedSecondMomentBound::base)
      .def_readonly("contractive", &FixedSecondMomentBound::contractive);
  m.def("second_moment_bound_fixed", &second_moment_bound_fixed, py::arg("problem"), py::arg("constants"),
        py::arg("alpha"), py::arg("x0"), py::arg("n"));

  py::class_<MomentCoefficients>(m, "MomentCoefficients")
      .def_readonly("A0", &MomentCoefficients::A0)
      .def_readonly("B0", &MomentCoefficients::B0)
      .def_readonly("C0", &MomentCoefficients::C0)
      .def_readonly("negative_A", &MomentCoefficients::negative_A)
      .def("evaluate", &MomentCoefficients::evaluate, py::arg("c0_sq"), py::arg("err0_sq"));
  m.def("second_moment_recursion",
        py::overload_cast<const SyntheticProblem&, const ProblemConstants&, const StepSchedule&, Index,
                          std::int64_t>(&second_moment_recursion),
        py::arg("problem"), py::arg("constants"), py::arg("schedule"), py::arg("ell"), py::arg("n"));
  m.def("second_moment_bound", &second_moment_bound, py::arg("problem"), py::arg("constants"), py::arg("schedule"),
        py::arg("ell"), py::arg("x0"), py::arg("n"));
  m.def("kaczmarz_expected_component", &kaczmarz_expected_component, py::arg("problem"), py::arg("ell"),
        py::arg("x0"), py::arg("k"));

  py::class_<HarmonicRateBounds>(m, "HarmonicRateBounds")
      .def_readonly("A0", &HarmonicRateBounds::A0)
      .def_readonly("B0", &HarmonicRateBounds::B0)
      .def_readonly("qB_sum", &HarmonicRateBounds::qB_sum)
      .def_readonly("AC_sum", &HarmonicRateBounds::AC_sum)
      .def_readonly("C_last", &HarmonicRateBounds::C_last)
      .def_readonly("A0_exponent", &HarmonicRateBounds::A0_exponent)
      .def_readonly("B0_exponent", &HarmonicRateBounds::B0_exponent)
      .def_readonly("qB_exponent", &HarmonicRateBounds::qB_exponent)
      .def_readonly("AC_exponent", &HarmonicRateBounds::AC_exponent)
      .def("second_moment", &HarmonicRateBounds::second_moment, py::arg("c0_sq"), py::arg("err0_sq"));
  m.def("rate_bounds_harmonic", &rate_bounds_harmonic, py::arg("constants"), py::arg("a"), py::arg("b"),
        py::arg("sigma_sq"), py::arg("n"));

  py::class_<PolynomialRateBounds>(m, "PolynomialRateBounds")
      .def_readonly("A0", &PolynomialRateBounds::A0)
      .def_readonly("B0", &PolynomialRateBounds::B0)
      .def_readonly("qB_sum", &PolynomialRateBounds::qB_sum)
      .def_readonly("AC_sum", &PolynomialRateBounds::AC_sum)
      .def_readonly("C_last", &PolynomialRateBounds::C_last)
      .def_readonly("A0_rate", &PolynomialRateBounds::A0_rate)
      .def_readonly("B0_rate", &PolynomialRateBounds::B0_rate)
      .def("second_moment", &PolynomialRateBounds::second_moment, py::arg("c0_sq"), py::arg("err0_sq"));
  m.def("rate_bounds_polynomial", &rate_bounds_polynomial, py::arg("constants"), py::arg("a"), py::arg("b"),
        py::arg("gamma"), py::arg("sigma_sq"), py::arg("n"));

  // phase detection
  py::class_<Window>(m, "Window")
      .def(py::init([](double lo, double hi) { return Window{lo, hi}; }), py::arg("lo"), py::arg("hi"))
      .def_readonly("lo", &Window::lo)
      .def_readonly("hi", &Window::hi);
  py::class_<PhaseReport>(m, "PhaseReport")
      .def_readonly("slope_early", &PhaseReport::slope_early)
      .def_readonly("slope_late", &PhaseReport::slope_late)
      .def_readonly("early_points", &PhaseReport::early_points)
      .def_readonly("late_points", &PhaseReport::late_points)
      .def_readonly("margin", &PhaseReport::margin)
      .def_readonly("transition_detected", &PhaseReport::transition_detected);
  m.def(
      "detect_phase_transition",
      [](const std::vector<double>& iters, const std::vector<double>& values, Window early, Window late,
         double margin) { return detect_phase_transition(iters, values, early, late, margin); },
      py::arg("iters"), py::arg("values"), py::arg("early"), py::arg("late"), py::arg("margin") = 0.1);

  // harness
  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_readwrite("name", &ExperimentConfig::name)
      .def_readwrite("problem", &ExperimentConfig::problem)
      .def_readwrite("iters", &ExperimentConfig::iters)
      .def_readwrite("probes", &ExperimentConfig::probes)
      .def_readwrite("plan", &ExperimentConfig::plan)
      .def_readwrite("output_dir", &ExperimentConfig::output_dir)
      .def_readwrite("emit_theory", &ExperimentConfig::emit_theory)
      .def_readwrite("emit_plot_script", &ExperimentConfig::emit_plot_script)
      .def_readonly("method", &ExperimentConfig::method)
      .def_readonly("schedule", &ExperimentConfig::schedule)
      .def_readonly("consistency", &ExperimentConfig::consistency)
      .def(py::self == py::self);
  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("serialize_config", &serialize_config, py::arg("config"));
  m.def("preset_names", &preset_names);
  m.def(
      "preset",
      [](const std::string& name, const std::string& scale) { return preset(name, parse_scale(scale)); },
      py::arg("name"), py::arg("scale") = "desk");

  py::class_<ArtifactBundle>(m, "ArtifactBundle")
      .def_readonly("directory", &ArtifactBundle::directory)
      .def_readonly("ensemble_csv", &ArtifactBundle::ensemble_csv)
      .def_readonly("theory_csv", &ArtifactBundle::theory_csv)
      .def_readonly("plot_script", &ArtifactBundle::plot_script)
      .def_readonly("manifest", &ArtifactBundle::manifest)
      .def_readonly("warnings", &ArtifactBundle::warnings)
      .def_readonly("summary", &ArtifactBundle::summary)
      .def_readonly("divergence", &ArtifactBundle::divergence);
  m.def(
      "run_experiment",
      [](const ExperimentConfig& cfg, std::optional<std::filesystem::path> out, unsigned threads) {
        RunOptions o;
        o.output_dir = std::move(out);
        o.threads = threads;
        return run_experiment(cfg, o);
      },
      py::arg("config"), py::arg("output_dir") = py::none(), py::arg("threads") = 0u,
      py::call_guard<py::gil_scoped_release>());
}
