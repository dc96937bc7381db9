#include "mmdflow/diagnostics.hpp"
#include "mmdflow/errors.hpp"
#include "mmdflow/flow.hpp"
#include "mmdflow/functional.hpp"
#include "mmdflow/measure_parser.hpp"
#include "mmdflow/output.hpp"
#include "mmdflow/presets.hpp"
#include "mmdflow/run_spec.hpp"
#include "mmdflow/solvers.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>

namespace py = pybind11;
using namespace mmdflow;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

QuantileGrid to_grid(const Array& a) {
    if (a.ndim() != 1) throw DimensionMismatch("expected a one-dimensional array");
    return QuantileGrid(std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const QuantileGrid& g) {
    Array out(static_cast<py::ssize_t>(g.size()));
    std::copy(g.values().begin(), g.values().end(), out.mutable_data());
    return out;
}

template <class F>
Array apply(const Array& in, F f) {
    Array out(in.request().shape);
    const double* src = in.data();
    double* dst = out.mutable_data();
    for (py::ssize_t i = 0; i < in.size(); ++i) dst[i] = f(src[i]);
    return out;
}

Target as_target(const py::object& nu) {
    if (py::isinstance<Target>(nu)) return nu.cast<Target>();
    if (py::isinstance<py::str>(nu)) return Target(parse_measure(nu.cast<std::string>()));
    return Target(nu.cast<Measure>());
}

Measure as_measure(const py::object& m) {
    if (py::isinstance<py::str>(m)) return parse_measure(m.cast<std::string>());
    return m.cast<Measure>();
}

py::dict check_dict(const BoundCheck& c) {
    py::dict d;
    d["check"] = c.check;
    d["time"] = c.time;
    d["observed"] = c.observed;
    d["bound"] = c.bound;
    d["slack"] = c.slack;
    d["status"] = std::string(to_string(c.status));
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Wasserstein gradient flows of the energy distance on the line";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<DomainError>(m, "DomainError", base);
    py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base);
    py::register_exception<NumericalError>(m, "NumericalError", base);
    py::register_exception<AtomicTargetError>(m, "AtomicTargetError", base);
    py::register_exception<MonotonicityError>(m, "MonotonicityError", base);
    py::register_exception<NotDiscreteTarget>(m, "NotDiscreteTarget", base);
    py::register_exception<DiscontinuityPoint>(m, "DiscontinuityPoint", base);
    py::register_exception<ConfigError>(m, "ConfigError", base);

    py::class_<Measure>(m, "Measure")
        .def_static("parse", &parse_measure, py::arg("text"))
        .def_static("dirac", &Measure::dirac, py::arg("x"))
        .def_static("discrete", &Measure::discrete, py::arg("x"), py::arg("w"))
        .def_static("uniform", &Measure::uniform, py::arg("a"), py::arg("b"))
        .def_static("gaussian", &Measure::gaussian, py::arg("mean"), py::arg("std"))
        .def_static("laplace", &Measure::laplace, py::arg("loc"), py::arg("scale"))
        .def_static("folded_normal", &Measure::folded_normal, py::arg("mu"), py::arg("sigma") = 1.0)
        .def_static("exponential", &Measure::exponential, py::arg("rate"))
        .def_static("mixture", &Measure::mixture, py::arg("weights"), py::arg("components"))
        .def_static("empirical", &Measure::empirical, py::arg("samples"))
        .def("quantile", &Measure::quantile, py::arg("s"))
        .def("quantile", [](const Measure& self, const Array& s) { return apply(s, [&](double v) { return self.quantile(v); }); })
        .def("cdf", &Measure::cdf_right, py::arg("x"))
        .def("cdf", [](const Measure& self, const Array& x) { return apply(x, [&](double v) { return self.cdf_right(v); }); })
        .def("cdf_left", &Measure::cdf_left, py::arg("x"))
        .def("cdf_left", [](const Measure& self, const Array& x) { return apply(x, [&](double v) { return self.cdf_left(v); }); })
        .def("support_hull", [](const Measure& self) { return py::make_tuple(self.support_hull().lo, self.support_hull().hi); })
        .def("half_mean_distance", [](const Measure& self) { return half_mean_distance(self); })
        .def("grid", [](const Measure& self, std::size_t n) { return to_array(sample_quantile_grid(self, n)); }, py::arg("n"))
        .def("__str__", &Measure::to_string)
        .def("__repr__", [](const Measure& self) { return "Measure(\"" + self.to_string() + "\")"; });

    py::class_<Target>(m, "Target")
        .def(py::init([](const py::object& nu) { return Target(as_measure(nu)); }), py::arg("nu"))
        .def_property_readonly("measure", &Target::measure)
        .def_property_readonly("l_low_q", &Target::l_low_q)
        .def_property_readonly("lip_q", &Target::lip_q)
        .def_property_readonly("is_continuous", &Target::is_continuous);

    m.def("functional_F", [](const Array& g, const py::object& nu) { return functional_F(to_grid(g), as_target(nu)); },
          py::arg("g"), py::arg("nu"));
    m.def("kernel_self_term", [](const py::object& nu) { return kernel_self_term(as_target(nu)); }, py::arg("nu"));
    m.def("mmd_squared", [](const py::object& mu, const py::object& nu) { return mmd_squared(as_measure(mu), as_measure(nu)); },
          py::arg("mu"), py::arg("nu"));
    m.def("w2_distance", [](const Array& a, const Array& b) { return w2_distance(to_grid(a), to_grid(b)); });

    m.def("implicit_euler_step",
          [](const Array& g, const py::object& nu, double tau) { return to_array(implicit_euler_step(to_grid(g), as_target(nu), tau)); },
          py::arg("g"), py::arg("nu"), py::arg("tau"));
    m.def("explicit_euler_step",
          [](const Array& g, const py::object& nu, double tau, const std::string& policy) {
              const auto r = explicit_euler_step(to_grid(g), as_target(nu), tau, parse_policy(policy));
              return py::make_tuple(to_array(r.state), r.violations);
          },
          py::arg("g"), py::arg("nu"), py::arg("tau"), py::arg("policy") = "warn");
    m.def("closed_form_discrete",
          [](const Array& g0, const py::object& nu, double time) { return to_array(closed_form_discrete(to_grid(g0), as_target(nu), time)); },
          py::arg("g0"), py::arg("nu"), py::arg("time"));
    m.def("pointwise_ode_solve",
          [](double q0, const py::object& nu, double s, double time) { return pointwise_ode_solve(q0, as_target(nu), s, time); },
          py::arg("q0"), py::arg("nu"), py::arg("s"), py::arg("time"));

    py::class_<FlowTrajectory>(m, "Trajectory")
        .def_property_readonly("scheme", [](const FlowTrajectory& t) { return std::string(to_string(t.scheme)); })
        .def_readonly("tau", &FlowTrajectory::tau)
        .def_readonly("steps", &FlowTrajectory::steps)
        .def_readonly("times", &FlowTrajectory::times)
        .def_property_readonly("states",
                               [](const FlowTrajectory& t) {
                                   const std::size_t rows = t.states.size(), cols = rows ? t.states[0].size() : 0;
                                   py::array_t<double> out({rows, cols});
                                   auto v = out.mutable_unchecked<2>();
                                   for (std::size_t i = 0; i < rows; ++i)
                                       for (std::size_t j = 0; j < cols; ++j) v(i, j) = t.states[i][j];
                                   return out;
                               })
        .def_property_readonly("energy",
                               [](const FlowTrajectory& t) {
                                   std::vector<double> f;
                                   for (const auto& d : t.diagnostics) f.push_back(d.F);
                                   return f;
                               })
        .def_property_readonly("violations", &FlowTrajectory::total_violations);

    m.def("run_flow",
          [](const py::object& mu0, const py::object& nu, const std::string& scheme, double tau, std::size_t n,
             double t_end, std::vector<std::size_t> snapshot_steps, std::size_t snapshot_stride) {
              SolverConfig cfg;
              cfg.scheme = parse_scheme(scheme);
              cfg.tau = tau;
              cfg.n = n;
              cfg.t_end = t_end;
              cfg.snapshot_steps = std::move(snapshot_steps);
              cfg.snapshot_stride = snapshot_stride;
              const Measure m0 = as_measure(mu0);
              const Target t = as_target(nu);
              py::gil_scoped_release release;
              return run_flow(m0, t, cfg);
          },
          py::arg("mu0"), py::arg("nu"), py::arg("scheme") = "implicit", py::arg("tau") = 0.01, py::arg("n") = 1000,
          py::arg("t_end") = 1.0, py::arg("snapshot_steps") = std::vector<std::size_t>{}, py::arg("snapshot_stride") = 1);

    m.def("check_trajectory",
          [](const FlowTrajectory& traj, const py::object& nu) {
              py::list out;
              for (const auto& c : check_trajectory(traj, as_target(nu))) out.append(check_dict(c));
              return out;
          },
          py::arg("trajectory"), py::arg("nu"));

    m.def("presets", [] {
        py::list out;
        for (const auto& p : presets()) out.append(py::make_tuple(p.name, p.mu0, p.nu));
        return out;
    });

    m.def("run_spec",
          [](const std::string& text, const std::filesystem::path& outdir) {
              const RunSpec spec = parse_run_spec(text);
              py::list out;
              for (const auto& c : execute_run(spec, outdir)) out.append(check_dict(c));
              return out;
          },
          py::arg("text"), py::arg("outdir"),
          "Runs a spec document and writes its artifacts into outdir; returns the checks.");
}
