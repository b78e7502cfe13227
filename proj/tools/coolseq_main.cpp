// coolseq command-line front end: tau scans, sequence simulation, exhaustive
// and greedy search, PPO training, sequence generation, and the bundled
// reproduction runs. All numeric outputs are CSV/JSON files that embed the
// resolved configuration, so any emitted file can be regenerated exactly.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include "coolseq/detail/json.hpp"

#include "coolseq/config.hpp"
#include "coolseq/measurement.hpp"
#include "coolseq/physics.hpp"
#include "coolseq/ppo.hpp"
#include "coolseq/search.hpp"
#include "coolseq/sequence.hpp"

namespace fs = std::filesystem;
using namespace coolseq;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::string out_dir = ".";
    unsigned threads = 1;
    std::optional<std::uint64_t> seed;
};

RunConfig resolve_config(const GlobalOpts& opts) {
    RunConfig config = opts.config_path.empty() ? RunConfig{} : RunConfig::from_file(opts.config_path);
    if (opts.seed) config.seed = *opts.seed;
    // drop a re-runnable copy of the resolved settings next to the outputs
    fs::create_directories(opts.out_dir);
    std::ofstream cfg(fs::path(opts.out_dir) / "resolved_config.cfg");
    for (const auto& line : config.describe()) cfg << line << "\n";
    return config;
}

std::vector<std::string> preamble(const RunConfig& config) {
    std::vector<std::string> lines;
    lines.push_back(std::string("coolseq ") + kVersion);
    for (const auto& l : config.describe()) lines.push_back(l);
    return lines;
}

std::ofstream open_out(const GlobalOpts& opts, const std::string& name) {
    fs::create_directories(opts.out_dir);
    const fs::path path = fs::path(opts.out_dir) / name;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file " + path.string());
    std::cout << "writing " << path.string() << "\n";
    return os;
}

void write_json(const GlobalOpts& opts, const RunConfig& config, const std::string& name,
                const std::string& body) {
    auto os = open_out(opts, name);
    // wrap: {"config": {...}, "data": body}
    nlohmann::ordered_json j;
    j["library"] = std::string("coolseq ") + kVersion;
    nlohmann::ordered_json cfg;
    for (const auto& line : config.describe()) {
        const auto eq = line.find(" = ");
        cfg[line.substr(0, eq)] = line.substr(eq + 3);
    }
    j["config"] = cfg;
    j["data"] = nlohmann::ordered_json::parse(body);
    os << j.dump(2) << "\n";
}

// ---------------------------------------------------------------- scan-tau
int cmd_scan_tau(const GlobalOpts& opts) {
    const RunConfig config = resolve_config(opts);
    if (config.scan_temperatures.empty())
        throw InvalidParameterError("scan-tau: temperature list is empty");
    const ModelParams params = config.model_params();
    nlohmann::ordered_json markers = nlohmann::ordered_json::array();
    for (double temperature : config.scan_temperatures) {
        const ThermalSpec spec = ThermalSpec::from_temperature(temperature, config.omega_a);
        const PopulationState state =
            thermal_populations(spec, config.tail_tol, config.cutoff_cap);
        char name[64];
        std::snprintf(name, sizeof(name), "scan_tau_T%g.csv", temperature);
        auto os = open_out(opts, name);
        for (const auto& line : preamble(config)) os << "# " << line << "\n";
        os << "# T = " << temperature << " K, n_cutoff = " << state.n_cutoff() << "\n";
        os << "tau,nbar\n";
        char buf[80];
        for (std::size_t i = 1; i <= config.tau_points; ++i) {
            const double tau =
                config.tau_max * static_cast<double>(i) / static_cast<double>(config.tau_points);
            const double nbar = avg_population(apply_um(state, tau, params));
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", tau, nbar);
            os << buf;
        }
        const IntervalResult analytic = tau_opt_um(state, params);
        const IntervalResult numeric =
            numeric_tau_opt_um(state, params, {config.tau_max, config.tau_points});
        markers.push_back({{"temperature", temperature},
                           {"n_cutoff", state.n_cutoff()},
                           {"nbar_th", avg_population(state)},
                           {"tau_opt_analytic", analytic.tau},
                           {"tau_opt_grid", numeric.tau}});
    }
    write_json(opts, config, "scan_tau_markers.json", markers.dump());
    return 0;
}

// ---------------------------------------------------------------- simulate
int cmd_simulate(const GlobalOpts& opts, const std::string& pattern,
                 const std::string& sequence_str, const std::string& policy_path,
                 std::size_t k_override) {
    const RunConfig config = resolve_config(opts);
    const ModelParams params = config.model_params();
    const PopulationState initial =
        thermal_populations(config.thermal_spec(), config.tail_tol, config.cutoff_cap);

    MeasurementSequence seq;
    if (!sequence_str.empty()) {
        seq = MeasurementSequence::from_string(sequence_str);
    } else if (!policy_path.empty()) {
        std::ifstream in(policy_path);
        if (!in) throw InvalidParameterError("simulate: cannot open policy " + policy_path);
        const PolicyParams policy = load_policy(in);
        seq = generate_sequence(policy, initial, params, config.n_rounds).sequence;
    } else if (pattern == "S_u") {
        seq = make_pattern(PatternKind::s_u, config.n_rounds);
    } else if (pattern == "S_c") {
        seq = make_pattern(PatternKind::s_c, config.n_rounds);
    } else if (!pattern.empty() && pattern.rfind("S_", 0) == 0) {
        std::size_t k = k_override;
        if (k == 0) {
            try {
                std::size_t consumed = 0;
                k = std::stoul(pattern.substr(2), &consumed);
                if (consumed != pattern.size() - 2) throw std::invalid_argument(pattern);
            } catch (const std::exception&) {
                throw InvalidParameterError("simulate: bad pattern '" + pattern +
                                            "' (expected S_u, S_c or S_<k>)");
            }
        }
        seq = make_pattern(PatternKind::s_k, config.n_rounds, k);
    } else {
        throw InvalidParameterError("simulate: give --pattern, --sequence or --policy");
    }

    const CoolingTrace trace = run_sequence(initial, seq, params);
    auto os = open_out(opts, "trace.csv");
    write_trace_csv(os, trace, preamble(config));
    write_json(opts, config, "summary.json", trace_summary_json(seq, trace));
    std::cout << "final: nbar = " << trace.last().nbar << ", F = " << trace.last().fidelity
              << ", Pg = " << trace.last().survival << ", C = " << trace.last().performance
              << ", total C = " << trace.total_performance() << "\n";
    return 0;
}

// ------------------------------------------------------- exhaustive / greedy
int cmd_search(const GlobalOpts& opts, bool exhaustive, bool override_guard) {
    const RunConfig config = resolve_config(opts);
    const ModelParams params = config.model_params();
    const PopulationState initial =
        thermal_populations(config.thermal_spec(), config.tail_tol, config.cutoff_cap);
    const auto t0 = std::chrono::steady_clock::now();
    const SearchReport report =
        exhaustive ? exhaustive_best(initial, config.n_rounds, params, config.search_metric(),
                                     config.top_k, opts.threads, override_guard)
                   : greedy_baseline(initial, config.n_rounds, params, config.search_metric());
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const char* base = exhaustive ? "exhaustive" : "greedy";
    write_json(opts, config, std::string(base) + "_report.json", search_report_json(report));
    auto os = open_out(opts, std::string(base) + "_topk.csv");
    write_ranking_csv(os, report, preamble(config));
    std::cout << base << ": best " << report.best().sequence.to_string() << " C = "
              << report.best().score << " (" << report.evaluations << " evaluations, "
              << seconds << " s)\n";
    return 0;
}

// -------------------------------------------------------------------- train
int cmd_train(const GlobalOpts& opts) {
    const RunConfig config = resolve_config(opts);
    PpoHyper hyper = config.ppo;
    EnvConfig env;
    env.thermal = config.thermal_spec();
    env.params = config.model_params();
    env.n_rounds = config.n_rounds;
    env.obs_dim = hyper.obs_dim;
    env.tail_tol = config.tail_tol;
    env.cutoff_cap = config.cutoff_cap;

    const TrainResult result = train(env, hyper, config.seed);
    if (!result.converged)
        std::cout << "warning: reward did not plateau within the iteration budget; "
                     "keeping the best checkpoint\n";
    auto policy_os = open_out(opts, "policy.txt");
    save_policy(policy_os, result.policy);
    auto curve_os = open_out(opts, "learning_curve.csv");
    write_learning_curve_csv(curve_os, result.curve, preamble(config));
    std::cout << "best sequence " << result.best_sequence.to_string() << " with total C = "
              << result.best_total_c << "\n";
    return 0;
}

// ----------------------------------------------------------------- generate
int cmd_generate(const GlobalOpts& opts, const std::string& policy_path) {
    const RunConfig config = resolve_config(opts);
    std::ifstream in(policy_path);
    if (!in) throw InvalidParameterError("generate: cannot open policy " + policy_path);
    const PolicyParams policy = load_policy(in);
    const ModelParams params = config.model_params();
    const PopulationState initial =
        thermal_populations(config.thermal_spec(), config.tail_tol, config.cutoff_cap);
    const GeneratedSequence generated =
        generate_sequence(policy, initial, params, config.n_rounds);
    const CoolingTrace trace =
        run_with_intervals(initial, generated.sequence, generated.intervals, params);
    auto os = open_out(opts, "generated_trace.csv");
    write_trace_csv(os, trace, preamble(config));
    write_json(opts, config, "generated_summary.json",
               trace_summary_json(generated.sequence, trace));
    std::cout << "sequence " << generated.sequence.to_string() << "\n";
    return 0;
}

// ---------------------------------------------------------------- reproduce
int cmd_reproduce(const GlobalOpts& opts, const std::string& figure) {
    RunConfig config = resolve_config(opts);
    if (figure == "fig1") return cmd_scan_tau(opts);

    if (figure == "fig3") {
        const ModelParams params = config.model_params();
        const PopulationState initial =
            thermal_populations(config.thermal_spec(), config.tail_tol, config.cutoff_cap);
        const std::vector<std::pair<std::string, MeasurementSequence>> named = {
            {"S_u", make_pattern(PatternKind::s_u, config.n_rounds)},
            {"S_c", make_pattern(PatternKind::s_c, config.n_rounds)},
            {"S_1", make_pattern(PatternKind::s_k, config.n_rounds, 1)},
            {"S_2", make_pattern(PatternKind::s_k, config.n_rounds, 2)},
            {"S_4", make_pattern(PatternKind::s_k, config.n_rounds, 4)},
        };
        for (const auto& [name, seq] : named) {
            auto os = open_out(opts, "fig3_" + name + ".csv");
            write_trace_csv(os, run_sequence(initial, seq, params), preamble(config));
        }
        // S_opt: train a policy and emit its generated sequence
        EnvConfig env;
        env.thermal = config.thermal_spec();
        env.params = params;
        env.n_rounds = config.n_rounds;
        env.obs_dim = config.ppo.obs_dim;
        env.tail_tol = config.tail_tol;
        env.cutoff_cap = config.cutoff_cap;
        const TrainResult result = train(env, config.ppo, config.seed);
        const CoolingTrace trace = run_sequence(initial, result.best_sequence, params);
        auto os = open_out(opts, "fig3_S_opt.csv");
        write_trace_csv(os, trace, preamble(config));
        write_json(opts, config, "fig3_S_opt_summary.json",
                   trace_summary_json(result.best_sequence, trace));
        return 0;
    }

    if (figure == "fig4") {
        const std::vector<double> temperatures = {0.05, 0.1, 0.2, 0.3};
        nlohmann::ordered_json summary = nlohmann::ordered_json::array();
        double previous_c = 0.0;
        bool monotone = true;
        for (std::size_t i = 0; i < temperatures.size(); ++i) {
            RunConfig tcfg = config;
            tcfg.temperature_kelvin = temperatures[i];
            tcfg.x.reset();
            EnvConfig env;
            env.thermal = tcfg.thermal_spec();
            env.params = tcfg.model_params();
            env.n_rounds = tcfg.n_rounds;
            env.obs_dim = tcfg.ppo.obs_dim;
            env.tail_tol = tcfg.tail_tol;
            env.cutoff_cap = tcfg.cutoff_cap;
            const TrainResult result = train(env, tcfg.ppo, tcfg.seed + i);
            const PopulationState initial =
                thermal_populations(env.thermal, env.tail_tol, env.cutoff_cap);
            const CoolingTrace trace =
                run_sequence(initial, result.best_sequence, env.params);
            char name[64];
            std::snprintf(name, sizeof(name), "fig4_T%g.csv", temperatures[i]);
            auto os = open_out(opts, name);
            write_trace_csv(os, trace, preamble(tcfg));
            const double total_c = trace.total_performance();
            std::size_t um_count = 0;
            for (Strategy m : result.best_sequence.steps)
                if (m == Strategy::um) ++um_count;
            if (i > 0 && total_c >= previous_c) monotone = false;
            previous_c = total_c;
            summary.push_back({{"temperature", temperatures[i]},
                               {"sequence", result.best_sequence.to_string()},
                               {"total_C", total_c},
                               {"final_C", trace.last().performance},
                               {"um_fraction", static_cast<double>(um_count) /
                                                   static_cast<double>(tcfg.n_rounds)}});
        }
        nlohmann::ordered_json wrap;
        wrap["runs"] = summary;
        wrap["total_C_monotone_decreasing"] = monotone;
        write_json(opts, config, "fig4_summary.json", wrap.dump());
        return 0;
    }
    throw InvalidParameterError("reproduce: figure must be fig1, fig3 or fig4");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Measurement-based cooling simulator and sequence optimizer"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts opts;
    app.add_option("--config", opts.config_path, "key = value configuration file");
    app.add_option("--out-dir", opts.out_dir, "output directory");
    app.add_option("--threads", opts.threads, "worker threads for parallel workloads");
    std::uint64_t seed_flag = 0;
    auto* seed_opt = app.add_option("--seed", seed_flag, "RNG seed override");

    auto* scan = app.add_subcommand("scan-tau", "post-UM nbar as a function of the interval");

    auto* simulate = app.add_subcommand("simulate", "run one measurement sequence");
    std::string pattern, sequence_str, policy_path;
    std::size_t k_override = 0;
    simulate->add_option("--pattern", pattern, "S_u, S_c or S_k (e.g. S_2)");
    simulate->add_option("--sequence", sequence_str, "explicit 0/1 string");
    simulate->add_option("--policy", policy_path, "policy checkpoint to roll out");
    simulate->add_option("--k", k_override, "override k for S_k patterns");

    auto* exhaustive = app.add_subcommand("exhaustive", "enumerate all 2^N sequences");
    bool override_guard = false;
    exhaustive->add_flag("--override-guard", override_guard, "allow N beyond the cost guard");
    auto* greedy = app.add_subcommand("greedy", "per-step greedy baseline");
    auto* train_cmd = app.add_subcommand("train", "PPO training run");
    auto* generate = app.add_subcommand("generate", "roll out a trained policy");
    std::string gen_policy;
    generate->add_option("--policy", gen_policy, "policy checkpoint")->required();
    auto* reproduce = app.add_subcommand("reproduce", "emit data for fig1, fig3 or fig4");
    std::string figure;
    reproduce->add_option("figure", figure, "fig1 | fig3 | fig4")->required();

    CLI11_PARSE(app, argc, argv);
    if (*seed_opt) opts.seed = seed_flag;

    try {
        if (scan->parsed()) return cmd_scan_tau(opts);
        if (simulate->parsed())
            return cmd_simulate(opts, pattern, sequence_str, policy_path, k_override);
        if (exhaustive->parsed()) return cmd_search(opts, true, override_guard);
        if (greedy->parsed()) return cmd_search(opts, false, false);
        if (train_cmd->parsed()) return cmd_train(opts);
        if (generate->parsed()) return cmd_generate(opts, gen_policy);
        if (reproduce->parsed()) return cmd_reproduce(opts, figure);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
