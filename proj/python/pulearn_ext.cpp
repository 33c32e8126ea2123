#include <optional>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pulearn/errors.hpp"
#include "pulearn/experiments.hpp"
#include "pulearn/io.hpp"
#include "pulearn/solver.hpp"
#include "pulearn/tensor.hpp"

namespace py = pybind11;
using namespace pulearn;

namespace {

ObservationSample make_sample(const Matrix& x, const Matrix& f,
                              std::optional<Vector> weights) {
  ObservationSample s;
  s.x = x;
  s.f = f;
  s.weights = weights ? *weights : Vector::Ones(x.rows());
  s.validate();
  return s;
}

void bind_types(py::module_& m) {
  py::enum_<Channel>(m, "Channel")
      .value("gram", Channel::gram)
      .value("unit", Channel::unit);

  py::enum_<StopReason>(m, "StopReason")
      .value("converged", StopReason::converged)
      .value("max_iterations", StopReason::max_iterations)
      .value("cycling", StopReason::cycling)
      .value("failed", StopReason::failed);

  py::class_<ObservationSample>(m, "Sample")
      .def(py::init(&make_sample), py::arg("x"), py::arg("f"),
           py::arg("weights") = py::none())
      .def_readwrite("x", &ObservationSample::x)
      .def_readwrite("f", &ObservationSample::f)
      .def_readwrite("weights", &ObservationSample::weights)
      .def_property_readonly("n", &ObservationSample::n)
      .def_property_readonly("d", &ObservationSample::d)
      .def("__len__", &ObservationSample::size)
      .def("truncated", &ObservationSample::truncated, py::arg("n"), py::arg("d"));

  py::class_<FidelityTensor>(m, "FidelityTensor")
      .def_readonly("d", &FidelityTensor::d)
      .def_readonly("n", &FidelityTensor::n)
      .def_property_readonly("s", [](const FidelityTensor& t) { return t.s.matrix(); });

  py::class_<GramPair>(m, "GramPair")
      .def_property_readonly("gx", [](const GramPair& g) { return g.gx.matrix(); })
      .def_property_readonly("gf", [](const GramPair& g) { return g.gf.matrix(); })
      .def_readonly("rx", &GramPair::rx)
      .def_readonly("rf", &GramPair::rf);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("max_iterations", &SolverConfig::max_iterations)
      .def_readwrite("mu_tolerance", &SolverConfig::mu_tolerance)
      .def_readwrite("unitarity_tolerance", &SolverConfig::unitarity_tolerance)
      .def_readwrite("lambda_tolerance", &SolverConfig::lambda_tolerance)
      .def_readwrite("num_runs", &SolverConfig::num_runs)
      .def_readwrite("channel", &SolverConfig::channel)
      .def_readwrite("scan_candidates", &SolverConfig::scan_candidates);

  py::class_<IterationRecord>(m, "IterationRecord")
      .def_readonly("iteration", &IterationRecord::iteration)
      .def_readonly("mu", &IterationRecord::mu)
      .def_readonly("fidelity", &IterationRecord::fidelity)
      .def_readonly("penalty", &IterationRecord::penalty)
      .def_readonly("eigenproblem_dim", &IterationRecord::eigenproblem_dim)
      .def("__repr__", [](const IterationRecord& r) {
        return "<iter " + std::to_string(r.iteration) + " mu=" + format_double(r.mu) +
               " F=" + format_double(r.fidelity) +
               " penalty=" + format_double(r.penalty) + ">";
      });

  py::class_<RunReport>(m, "RunReport")
      .def_readonly("rank", &RunReport::rank)
      .def_readonly("stop", &RunReport::stop)
      .def_readonly("message", &RunReport::message)
      .def_readonly("fidelity", &RunReport::fidelity)
      .def_readonly("history", &RunReport::history)
      .def_property_readonly("u", [](const RunReport& r) { return r.solution.u; })
      .def_property_readonly("converged", &RunReport::converged);

  py::class_<SolverReport>(m, "SolverReport")
      .def_readonly("converged", &SolverReport::converged)
      .def_readonly("fidelity", &SolverReport::fidelity)
      .def_readonly("iterations", &SolverReport::iterations)
      .def_readonly("selected_run", &SolverReport::selected_run)
      .def_readonly("runs", &SolverReport::runs)
      .def_readonly("warnings", &SolverReport::warnings)
      .def_property_readonly("u", [](const SolverReport& r) { return r.solution.u; })
      .def_property_readonly("lambda_", [](const SolverReport& r) {
        return r.lambda_final.matrix();
      });

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("d", &SweepRow::d)
      .def_readonly("f_orig", &SweepRow::f_orig)
      .def_readonly("f_max", &SweepRow::f_max)
      .def_readonly("ratio", &SweepRow::ratio)
      .def_readonly("gain", &SweepRow::gain)
      .def_readonly("converged", &SweepRow::converged)
      .def_readonly("note", &SweepRow::note);

  py::class_<InterpolationPoint>(m, "InterpolationPoint")
      .def_readonly("f_rn", &InterpolationPoint::f_rn)
      .def_readonly("f_ls", &InterpolationPoint::f_ls)
      .def_readonly("f_max_p", &InterpolationPoint::f_max_p)
      .def_readonly("p_at_f", &InterpolationPoint::p_at_f)
      .def_readonly("p_max", &InterpolationPoint::p_max);

  py::class_<InterpolationModel>(m, "InterpolationModel")
      .def(py::init<const Vector&, const Vector&, const Vector&, Index, Index,
                    const SolverConfig&, std::uint64_t, int>(),
           py::arg("xs"), py::arg("fs"), py::arg("weights"), py::arg("n"),
           py::arg("d"), py::arg("config") = SolverConfig{}, py::arg("seed") = 1,
           py::arg("outcome_grid") = 2001)
      .def("evaluate", &InterpolationModel::evaluate, py::arg("y"))
      .def("radon_nikodym", &InterpolationModel::radon_nikodym, py::arg("y"))
      .def("least_squares", &InterpolationModel::least_squares, py::arg("y"))
      .def("max_probability", &InterpolationModel::max_probability, py::arg("y"))
      .def_property_readonly("report", &InterpolationModel::report)
      .def_property_readonly("u", &InterpolationModel::channel);
}

void bind_functions(py::module_& m) {
  m.def("euler_rotation", &euler_rotation, py::arg("phi"), py::arg("theta"),
        py::arg("psi"));
  m.def("random_orthogonal", &random_orthogonal, py::arg("dim"), py::arg("seed"));
  m.def("generate_trajectory", &generate_trajectory, py::arg("u0"), py::arg("x0"),
        py::arg("steps"), py::arg("seed"), py::arg("phase_flips") = true);
  m.def("generate_poly_sample", &generate_poly_sample, py::arg("n"), py::arg("d"),
        py::arg("points"), py::arg("seed"));
  m.def("generate_scalar_sample", &generate_scalar_sample, py::arg("points"),
        py::arg("seed"));
  m.def("generate_noisy_curve_sample", &generate_noisy_curve_sample, py::arg("n"),
        py::arg("d"), py::arg("points"), py::arg("seed"));

  m.def("regularize", [](const ObservationSample& s) { return regularize(s); },
        py::arg("sample"));
  m.def("build_tensor_pairs", &build_tensor_pairs, py::arg("sample"));
  m.def("build_tensor_localized", &build_tensor_localized, py::arg("sample"));
  m.def("localized_tensor", &localized_tensor, py::arg("sample"));
  m.def("build_tensor_vqa",
        [](const Matrix& o, const Matrix& rho) {
          return build_tensor_vqa(SymMatrix(o), SymMatrix(rho));
        },
        py::arg("o"), py::arg("rho0"));
  m.def("fidelity", &fidelity, py::arg("u"), py::arg("tensor"));
  m.def("unitarity_penalty", &unitarity_penalty, py::arg("u"));
  m.def("adjust_to_isometry",
        [](const Matrix& u) { return adjust_to_isometry(u).u; }, py::arg("u"));

  m.def("solve", &solve, py::arg("tensor"), py::arg("config") = SolverConfig{},
        py::call_guard<py::gil_scoped_release>());
  m.def("solve_vanilla", &solve_vanilla, py::arg("tensor"),
        py::arg("config") = SolverConfig{},
        py::call_guard<py::gil_scoped_release>());
  m.def("recover_dynamics",
        [](const ObservationSample& s, Channel ch, const SolverConfig& cfg) {
          Recovery r;
          {
            py::gil_scoped_release release;
            r = recover_dynamics(s, ch, cfg);
          }
          return py::make_tuple(r.u, r.report);
        },
        py::arg("sample"), py::arg("channel") = Channel::gram,
        py::arg("config") = SolverConfig{});
  m.def("recover_poly_mapping",
        [](const ObservationSample& s, Index d, Index n, const SolverConfig& cfg) {
          Recovery r = recover_poly_mapping(s, d, n, cfg);
          return py::make_tuple(r.u, r.report);
        },
        py::arg("sample"), py::arg("d"), py::arg("n"),
        py::arg("config") = SolverConfig{});
  m.def("channel_fidelity", &channel_fidelity, py::arg("sample"),
        py::arg("channel"), py::arg("u"));
  m.def("max_diff_up_to_sign", &max_diff_up_to_sign, py::arg("a"), py::arg("b"));
  m.def("fidelity_sweep", &fidelity_sweep, py::arg("n"), py::arg("m"),
        py::arg("seed"), py::arg("config") = SolverConfig{},
        py::call_guard<py::gil_scoped_release>());

  m.def("read_sample", &read_sample_file, py::arg("path"));
  m.def("write_sample", &write_sample_file, py::arg("path"), py::arg("sample"));
}

}  // namespace

PYBIND11_MODULE(_pulearn, m) {
  m.doc() = "Partially unitary mappings learned by constrained eigenproblem iteration";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", error);
  py::register_exception<DegenerateError>(m, "DegenerateError", error);

  bind_types(m);
  bind_functions(m);
}
