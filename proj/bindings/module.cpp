#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "coolseq/config.hpp"
#include "coolseq/measurement.hpp"
#include "coolseq/physics.hpp"
#include "coolseq/ppo.hpp"
#include "coolseq/search.hpp"
#include "coolseq/sequence.hpp"

namespace py = pybind11;
using namespace coolseq;

namespace {

MeasurementSequence as_sequence(const std::string& s) {
    return MeasurementSequence::from_string(s);
}

py::dict trace_to_dict(const CoolingTrace& trace) {
    py::list steps;
    for (const auto& s : trace.steps) {
        py::dict d;
        d["step"] = s.index;
        d["strategy"] = static_cast<int>(s.strategy);
        d["tau"] = s.tau;
        d["t"] = s.t;
        d["nbar"] = s.nbar;
        d["F"] = s.fidelity;
        d["Pg"] = s.survival;
        d["C"] = s.performance;
        steps.append(d);
    }
    py::dict out;
    out["nbar_th"] = trace.nbar_initial;
    out["steps"] = steps;
    out["total_C"] = trace.total_performance();
    out["nbar_clamped"] = trace.nbar_clamped;
    return out;
}

py::dict report_to_dict(const SearchReport& report) {
    py::list top;
    for (const auto& r : report.top) {
        py::dict d;
        d["sequence"] = r.sequence.to_string();
        d["C"] = r.score;
        d["total_C"] = r.total_c;
        d["final_C"] = r.final_c;
        d["final_nbar"] = r.final_nbar;
        d["final_F"] = r.final_fidelity;
        d["final_Pg"] = r.final_survival;
        top.append(d);
    }
    py::dict out;
    out["metric"] = report.metric == Metric::cumulative ? "cumulative" : "final_step";
    out["evaluations"] = report.evaluations;
    out["annihilated"] = report.annihilated;
    out["best_sequence"] = report.best().sequence.to_string();
    out["best_C"] = report.best().score;
    out["top"] = top;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Measurement-based cooling maps, sequence engine and optimizers";
    m.attr("__version__") = kVersion;

    py::register_exception<InvalidParameterError>(m, "InvalidParameterError",
                                                  PyExc_ValueError);
    py::register_exception<DegenerateStateError>(m, "DegenerateStateError", PyExc_ValueError);
    py::register_exception<MeasurementAnnihilationError>(m, "MeasurementAnnihilationError",
                                                         PyExc_RuntimeError);
    py::register_exception<CutoffCapError>(m, "CutoffCapError", PyExc_RuntimeError);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init([](double g, double delta, double omega_a) {
                 ModelParams p{g, delta, omega_a};
                 p.validate();
                 return p;
             }),
             py::arg("g") = 0.04, py::arg("delta") = 0.01, py::arg("omega_a") = 1.4e9)
        .def_readonly("g", &ModelParams::g)
        .def_readonly("delta", &ModelParams::delta)
        .def_readonly("omega_a", &ModelParams::omega_a);

    py::class_<ThermalSpec>(m, "ThermalSpec")
        .def_static("from_x", &ThermalSpec::from_x, py::arg("x"))
        .def_static("from_temperature", &ThermalSpec::from_temperature, py::arg("kelvin"),
                    py::arg("omega_a"))
        .def_readonly("x", &ThermalSpec::x);

    py::class_<PopulationState>(m, "PopulationState")
        .def(py::init<std::vector<double>, double>(), py::arg("populations"),
             py::arg("survival") = 1.0)
        .def_property_readonly("populations",
                               [](const PopulationState& s) {
                                   return std::vector<double>(s.populations().begin(),
                                                              s.populations().end());
                               })
        .def_property_readonly("survival", &PopulationState::survival)
        .def_property_readonly("n_cutoff", &PopulationState::n_cutoff);

    m.def("thermal_populations", &thermal_populations, py::arg("spec"),
          py::arg("tail_tol") = 1e-12, py::arg("cutoff_cap") = 32768,
          "Truncated geometric populations with survival 1");
    m.def("rabi_frequency", &rabi_frequency, py::arg("n"), py::arg("params"));
    m.def("avg_population", &avg_population);
    m.def("ground_fidelity", &ground_fidelity);
    m.def("dominant_index", &dominant_index);

    m.def("alpha_sq", &alpha_sq, py::arg("n"), py::arg("tau"), py::arg("params"));
    m.def("beta_sq", &beta_sq, py::arg("n"), py::arg("tau"), py::arg("params"));
    m.def("apply_cm", &apply_cm, py::arg("state"), py::arg("tau"), py::arg("params"));
    m.def("apply_um", &apply_um, py::arg("state"), py::arg("tau"), py::arg("params"));
    m.def("tau_opt_cm",
          [](const PopulationState& s, const ModelParams& p) { return tau_opt_cm(s, p).tau; });
    m.def("tau_opt_um",
          [](const PopulationState& s, const ModelParams& p) { return tau_opt_um(s, p).tau; });
    m.def(
        "numeric_tau_opt_um",
        [](const PopulationState& s, const ModelParams& p, double tau_max, std::size_t points) {
            return numeric_tau_opt_um(s, p, {tau_max, points}).tau;
        },
        py::arg("state"), py::arg("params"), py::arg("tau_max") = 40.0,
        py::arg("points") = 2000);
    m.def("approx_nbar_um", &approx_nbar_um, py::arg("thermal_state"), py::arg("tau"),
          py::arg("params"));

    m.def("cooperative_performance",
          [](double nbar_th, double nbar, double fidelity, double survival) {
              return cooperative_performance(nbar_th, nbar, fidelity, survival);
          });
    m.def(
        "make_pattern",
        [](const std::string& kind, std::size_t n, std::size_t k) {
            if (kind == "S_u") return make_pattern(PatternKind::s_u, n).to_string();
            if (kind == "S_c") return make_pattern(PatternKind::s_c, n).to_string();
            return make_pattern(PatternKind::s_k, n, k).to_string();
        },
        py::arg("kind"), py::arg("n"), py::arg("k") = 1);
    m.def(
        "run_sequence",
        [](const PopulationState& initial, const std::string& seq, const ModelParams& params) {
            return trace_to_dict(run_sequence(initial, as_sequence(seq), params));
        },
        py::arg("initial"), py::arg("sequence"), py::arg("params"));
    m.def(
        "plan_intervals",
        [](const PopulationState& initial, const std::string& seq, const ModelParams& params) {
            return plan_intervals(initial, as_sequence(seq), params);
        },
        py::arg("initial"), py::arg("sequence"), py::arg("params"));

    m.def(
        "exhaustive_best",
        [](const PopulationState& initial, std::size_t n, const ModelParams& params,
           const std::string& metric, std::size_t top_k, unsigned threads, bool override_guard) {
            const Metric mt = metric == "final_step" ? Metric::final_step : Metric::cumulative;
            return report_to_dict(
                exhaustive_best(initial, n, params, mt, top_k, threads, override_guard));
        },
        py::arg("initial"), py::arg("n"), py::arg("params"), py::arg("metric") = "cumulative",
        py::arg("top_k") = 10, py::arg("threads") = 1, py::arg("override_guard") = false);
    m.def(
        "greedy_baseline",
        [](const PopulationState& initial, std::size_t n, const ModelParams& params,
           const std::string& metric) {
            const Metric mt = metric == "final_step" ? Metric::final_step : Metric::cumulative;
            return report_to_dict(greedy_baseline(initial, n, params, mt));
        },
        py::arg("initial"), py::arg("n"), py::arg("params"), py::arg("metric") = "cumulative");

    py::class_<PpoHyper>(m, "PpoHyper")
        .def(py::init<>())
        .def_readwrite("obs_dim", &PpoHyper::obs_dim)
        .def_readwrite("hidden", &PpoHyper::hidden)
        .def_readwrite("clip_ratio", &PpoHyper::clip_ratio)
        .def_readwrite("discount", &PpoHyper::discount)
        .def_readwrite("gae_lambda", &PpoHyper::gae_lambda)
        .def_readwrite("epochs", &PpoHyper::epochs)
        .def_readwrite("episodes_per_batch", &PpoHyper::episodes_per_batch)
        .def_readwrite("learning_rate", &PpoHyper::learning_rate)
        .def_readwrite("entropy_coef", &PpoHyper::entropy_coef)
        .def_readwrite("value_coef", &PpoHyper::value_coef)
        .def_readwrite("max_iterations", &PpoHyper::max_iterations)
        .def_readwrite("patience", &PpoHyper::patience)
        .def_readwrite("plateau_tol", &PpoHyper::plateau_tol);

    m.def(
        "train",
        [](double temperature_kelvin, const ModelParams& params, std::size_t n_rounds,
           const PpoHyper& hyper, std::uint64_t seed, const std::string& policy_path) {
            EnvConfig env;
            env.thermal = ThermalSpec::from_temperature(temperature_kelvin, params.omega_a);
            env.params = params;
            env.n_rounds = n_rounds;
            env.obs_dim = hyper.obs_dim;
            const TrainResult result = train(env, hyper, seed);
            if (!policy_path.empty()) {
                std::ofstream os(policy_path);
                save_policy(os, result.policy);
            }
            py::dict out;
            out["best_sequence"] = result.best_sequence.to_string();
            out["best_total_C"] = result.best_total_c;
            out["converged"] = result.converged;
            out["iterations"] = result.curve.size();
            return out;
        },
        py::arg("temperature_kelvin"), py::arg("params"), py::arg("n_rounds"), py::arg("hyper"),
        py::arg("seed") = 1, py::arg("policy_path") = "");
    m.def(
        "generate_sequence",
        [](const std::string& policy_path, const PopulationState& initial,
           const ModelParams& params, std::size_t n_rounds) {
            std::ifstream is(policy_path);
            if (!is) throw InvalidParameterError("cannot open policy " + policy_path);
            const PolicyParams policy = load_policy(is);
            const GeneratedSequence g = generate_sequence(policy, initial, params, n_rounds);
            return py::make_tuple(g.sequence.to_string(), g.intervals);
        },
        py::arg("policy_path"), py::arg("initial"), py::arg("params"), py::arg("n_rounds"));
}
