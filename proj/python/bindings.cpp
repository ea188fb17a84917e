#include "dirac/config.hpp"
#include "dirac/harness.hpp"

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cmath>
#include <limits>

namespace py = pybind11;
using namespace dirac;

namespace {

using CArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

CArray to_array(const SpinorField& f) {
    CArray out({static_cast<py::ssize_t>(f.size()), py::ssize_t{2}});
    auto r = out.mutable_unchecked<2>();
    for (int j = 0; j < f.size(); ++j) {
        r(j, 0) = f[j].up;
        r(j, 1) = f[j].down;
    }
    return out;
}

SpinorField from_array(const CArray& a, const TorusGrid& g) {
    if (a.ndim() != 2 || a.shape(1) != 2) throw ConfigError("wave function must have shape (N, 2)");
    if (a.shape(0) != g.size()) throw ConfigError("wave function length does not match the grid");
    auto r = a.unchecked<2>();
    SpinorField f(g);
    for (int j = 0; j < g.size(); ++j) f[j] = Spinor{r(j, 0), r(j, 1)};
    return f;
}

TorusGrid grid_of(const CArray& a, double lo, double hi) {
    if (a.ndim() != 2 || a.shape(1) != 2) throw ConfigError("wave function must have shape (N, 2)");
    return make_grid(lo, hi, static_cast<int>(a.shape(0)));
}

py::dict series_dict(const std::vector<SeriesPoint>& s) {
    std::vector<double> t, m, e;
    for (const auto& p : s) {
        t.push_back(p.t);
        m.push_back(p.mass);
        e.push_back(p.energy);
    }
    py::dict d;
    d["t"] = py::array(py::cast(t));
    d["mass"] = py::array(py::cast(m));
    d["energy"] = py::array(py::cast(e));
    return d;
}

py::dict table_dict(const ConvergenceTable& t) {
    const std::size_t rows = t.cells.size(), cols = t.levels.size();
    py::array_t<double> e_phi({rows, cols}), e_rho({rows, cols}), e_J({rows, cols}), order({rows, cols});
    auto a = e_phi.mutable_unchecked<2>(), b = e_rho.mutable_unchecked<2>(), c = e_J.mutable_unchecked<2>(),
         o = order.mutable_unchecked<2>();
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t k = 0; k < cols; ++k) {
            a(i, k) = t.error(i, k, ConvergenceTable::Metric::phi);
            b(i, k) = t.error(i, k, ConvergenceTable::Metric::rho);
            c(i, k) = t.error(i, k, ConvergenceTable::Metric::J);
            o(i, k) = t.order(i, k);
        }
    std::vector<double> hs, taus;
    for (const auto& l : t.levels) {
        hs.push_back(l.h);
        taus.push_back(l.tau);
    }
    py::dict d;
    d["epsilons"] = t.epsilons;
    d["h"] = hs;
    d["tau"] = taus;
    d["e_phi"] = e_phi;
    d["e_rho"] = e_rho;
    d["e_J"] = e_J;
    d["order_phi"] = order;
    d["diagonal"] = t.diagonal;
    d["failures"] = t.failures;
    d["csv"] = emit_csv(t);
    d["text"] = render_text(t);
    return d;
}

std::optional<ReferenceSpec> reference_arg(const py::object& ref) {
    if (ref.is_none()) return std::nullopt;
    if (py::isinstance<py::str>(ref)) {
        if (ref.cast<std::string>() != "exact") throw ConfigError("reference must be \"exact\" or (h_e, tau_e)");
        return ReferenceSpec{true, 0.0, 0.0};
    }
    const auto pair = ref.cast<std::pair<double, double>>();
    return ReferenceSpec{false, pair.first, pair.second};
}

}  // namespace

PYBIND11_MODULE(_pydirac, m) {
    m.doc() = "Finite difference and pseudospectral solvers for the 1D Dirac equation";

    static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
    static py::exception<StabilityViolation> stability_error(m, "StabilityViolation", PyExc_RuntimeError);
    static py::exception<StepFailure> solver_error(m, "SolverError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            py::set_error(config_error, e.what());
        } catch (const EvaluationError& e) {
            py::set_error(config_error, e.what());
        } catch (const StabilityViolation& e) {
            py::set_error(stability_error, e.what());
        } catch (const StepFailure& e) {
            py::set_error(solver_error, e.what());
        } catch (const ContractError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    py::class_<DiracProblem>(m, "Problem")
        .def_static(
            "preset", [](const std::string& name, double epsilon, std::optional<double> T0) {
                return presets::by_name(name, epsilon, T0);
            },
            py::arg("name"), py::arg("epsilon") = 1.0, py::arg("T0") = py::none())
        .def_readonly("name", &DiracProblem::name)
        .def_readonly("a", &DiracProblem::a)
        .def_readonly("b", &DiracProblem::b)
        .def_readonly("epsilon", &DiracProblem::epsilon)
        .def_readonly("T0", &DiracProblem::T0)
        .def_property_readonly("final_time", &DiracProblem::final_time)
        .def_property_readonly("V_max", [](const DiracProblem& p) { return p.potentials.V_max; })
        .def_property_readonly("A_max", [](const DiracProblem& p) { return p.potentials.A_max; })
        .def("nodes", [](const DiracProblem& p, double h) { return p.grid_for_h(h).nodes(); }, py::arg("h"))
        .def("initial_field", [](const DiracProblem& p, double h) { return to_array(p.initial_field(p.grid_for_h(h))); },
             py::arg("h"), "Phi0 at the nodes of the grid with spacing h.")
        .def("__repr__", [](const DiracProblem& p) {
            return "<Problem " + p.name + " eps=" + std::to_string(p.epsilon) + ">";
        });

    py::class_<RunConfig>(m, "Config")
        .def_readonly("problem_label", &RunConfig::problem_label)
        .def_readonly("epsilons", &RunConfig::epsilons)
        .def_property_readonly("scheme", [](const RunConfig& c) { return std::string(to_string(c.scheme)); })
        .def_readonly("h", &RunConfig::h)
        .def_readonly("tau", &RunConfig::tau)
        .def_readonly("h0", &RunConfig::h0)
        .def_readonly("tau0", &RunConfig::tau0)
        .def_readonly("levels", &RunConfig::levels)
        .def("problem", [](const RunConfig& c, std::optional<double> eps) {
            return c.family(eps.value_or(c.epsilons.front()));
        }, py::arg("epsilon") = py::none());

    m.def("parse_config", &parse_config, py::arg("json_text"));
    m.def("load_config", &load_config, py::arg("path"));

    m.def("presets", &presets::names);
    m.def("schemes", [] {
        std::vector<std::string> out;
        for (Scheme s : kAllSchemes) out.emplace_back(to_string(s));
        return out;
    });

    m.def(
        "tau_max",
        [](const std::string& scheme, double h, double V_max, double A_max) {
            const auto b = dirac::tau_max(parse_scheme(scheme), h, V_max, A_max);
            return b.is_unbounded() ? std::numeric_limits<double>::infinity() : b.value();
        },
        py::arg("scheme"), py::arg("h"), py::arg("V_max") = 0.0, py::arg("A_max") = 0.0,
        "Largest admissible step; inf for unconditionally stable schemes.");

    m.def(
        "stability",
        [](const DiracProblem& p, const std::string& scheme, double h, double tau) {
            const auto v = validate(make_config(p, parse_scheme(scheme), p.grid_for_h(h).h(), tau), p.potentials);
            py::dict d;
            d["ok"] = v.ok;
            d["tau_max"] = v.tau_max.is_unbounded() ? std::numeric_limits<double>::infinity() : v.tau_max.value();
            d["margin"] = v.margin;
            return d;
        },
        py::arg("problem"), py::arg("scheme"), py::arg("h"), py::arg("tau"));

    m.def(
        "run",
        [](const DiracProblem& p, const std::string& scheme, double h, double tau, bool override_stability,
           long record_every, std::optional<double> t_final) {
            RunOptions opt;
            opt.override_stability = override_stability;
            opt.record_every = record_every;
            SimulationResult r;
            {
                py::gil_scoped_release release;
                r = run_simulation(p, make_config(p, parse_scheme(scheme), h, tau), opt, t_final);
            }
            py::dict d;
            d["phi"] = to_array(r.final);
            d["x"] = r.final.grid.nodes();
            d["t"] = r.t_final;
            d["steps"] = r.steps;
            d["series"] = series_dict(r.series);
            d["wall_seconds"] = r.wall_seconds;
            return d;
        },
        py::arg("problem"), py::arg("scheme"), py::arg("h"), py::arg("tau"), py::arg("override_stability") = false,
        py::arg("record_every") = 0, py::arg("t_final") = py::none(),
        "Runs a scheme to the problem horizon (or t_final) and returns the final wave function.");

    m.def(
        "measure_errors",
        [](const CArray& sol, const CArray& ref, double a, double b) {
            const auto g = grid_of(sol, a, b);
            const auto e = dirac::measure_errors(from_array(sol, g), from_array(ref, grid_of(ref, a, b)));
            py::dict d;
            d["e_phi"] = e.e_phi;
            d["e_rho"] = e.e_rho;
            d["e_J"] = e.e_J;
            return d;
        },
        py::arg("sol"), py::arg("ref"), py::arg("a"), py::arg("b"));

    m.def(
        "free_dirac_exact",
        [](const CArray& phi0, double a, double b, double t) {
            return to_array(dirac::free_dirac_exact(from_array(phi0, grid_of(phi0, a, b)), t));
        },
        py::arg("phi0"), py::arg("a"), py::arg("b"), py::arg("t"),
        "Exact eps = 0 evolution of the trigonometric interpolant of phi0.");

    m.def(
        "reference",
        [](const DiracProblem& p, double h_e, double tau_e, double t, std::optional<double> h) {
            const ReferenceSpec spec{false, h_e, tau_e};
            const auto ref = reference_solution(p, spec, {t});
            return to_array(h ? ref.on_grid(t, p.grid_for_h(*h)) : ref.at(t));
        },
        py::arg("problem"), py::arg("h_e"), py::arg("tau_e"), py::arg("t"), py::arg("h") = py::none(),
        "Time-splitting spectral reference at time t, optionally restricted to spacing h.");

    m.def(
        "convergence_table",
        [](const std::string& preset, const std::string& scheme, std::vector<double> epsilons, double h0, double tau0,
           int levels, const py::object& ref, std::optional<double> T0, std::string mode,
           std::optional<double> anchor) {
            TableRequest req;
            req.title = preset;
            req.family = [preset, T0](double eps) { return presets::by_name(preset, eps, T0); };
            req.scheme = parse_scheme(scheme);
            req.epsilons = std::move(epsilons);
            req.reference = reference_arg(ref);
            req.diagonal_anchor = anchor;
            ConvergenceTable t;
            {
                py::gil_scoped_release release;
                if (mode == "joint") {
                    if (req.reference && req.reference->exact) req.reference->h_e = h0 / std::ldexp(1.0, levels - 1);
                    t = dirac::convergence_table(req, h0, tau0, levels);
                } else if (mode == "temporal") {
                    if (req.reference && req.reference->exact) req.reference->h_e = h0;
                    t = epsilon_sweep_temporal(req, h0, tau0, levels);
                } else if (mode == "spatial") {
                    if (req.reference && req.reference->exact) req.reference->h_e = h0 / std::ldexp(1.0, levels - 1);
                    t = epsilon_sweep_spatial(req, h0, tau0, levels);
                } else {
                    throw ConfigError("mode must be joint, temporal or spatial");
                }
            }
            return table_dict(t);
        },
        py::arg("preset"), py::arg("scheme"), py::arg("epsilons"), py::arg("h0"), py::arg("tau0"),
        py::arg("levels") = 4, py::arg("reference") = py::none(), py::arg("T0") = py::none(),
        py::arg("mode") = "joint", py::arg("diagonal_anchor") = py::none(),
        "Error table over epsilons and a refinement ladder. mode: joint (h and tau halve together), "
        "temporal (fixed h = h0, tau halves) or spatial (fixed tau = tau0, h halves).");
}
