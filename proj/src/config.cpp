#include "coolseq/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace coolseq {

ThermalSpec RunConfig::thermal_spec() const {
    if (x && temperature_kelvin)
        throw InvalidParameterError("config: give either temperature or x, not both");
    if (x) return ThermalSpec::from_x(*x);
    if (temperature_kelvin) return ThermalSpec::from_temperature(*temperature_kelvin, omega_a);
    throw InvalidParameterError("config: one of temperature or x is required");
}

ModelParams RunConfig::model_params() const {
    ModelParams p{g, delta, omega_a};
    p.validate();
    return p;
}

Metric RunConfig::search_metric() const {
    if (metric == "cumulative") return Metric::cumulative;
    if (metric == "final_step") return Metric::final_step;
    throw InvalidParameterError("config: metric must be cumulative or final_step");
}

namespace {

double parse_double(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw InvalidParameterError("config: bad numeric value for " + key + ": '" + value + "'");
    }
    if (pos != value.size())
        throw InvalidParameterError("config: trailing junk in value for " + key);
    return v;
}

std::size_t parse_size(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v)))
        throw InvalidParameterError("config: " + key + " must be a nonnegative integer");
    return static_cast<std::size_t>(v);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void RunConfig::apply_line(const std::string& key, const std::string& value) {
    if (key == "omega_a") omega_a = parse_double(key, value);
    else if (key == "temperature") { temperature_kelvin = parse_double(key, value); x.reset(); }
    else if (key == "x") { x = parse_double(key, value); temperature_kelvin.reset(); }
    else if (key == "g") g = parse_double(key, value);
    else if (key == "delta") delta = parse_double(key, value);
    else if (key == "N") n_rounds = parse_size(key, value);
    else if (key == "tail_tol") tail_tol = parse_double(key, value);
    else if (key == "cutoff_cap") cutoff_cap = parse_size(key, value);
    else if (key == "seed") seed = static_cast<std::uint64_t>(parse_size(key, value));
    else if (key == "scan_temperatures") {
        scan_temperatures.clear();
        std::istringstream in(value);
        std::string item;
        while (std::getline(in, item, ',')) scan_temperatures.push_back(parse_double(key, trim(item)));
        if (scan_temperatures.empty())
            throw InvalidParameterError("config: scan_temperatures is empty");
    }
    else if (key == "tau_max") tau_max = parse_double(key, value);
    else if (key == "tau_points") tau_points = parse_size(key, value);
    else if (key == "pattern") pattern = value;
    else if (key == "sequence") sequence = value;
    else if (key == "metric") metric = value;
    else if (key == "top_k") top_k = parse_size(key, value);
    else if (key == "ppo.obs_dim") ppo.obs_dim = parse_size(key, value);
    else if (key == "ppo.hidden") ppo.hidden = parse_size(key, value);
    else if (key == "ppo.clip_ratio") ppo.clip_ratio = parse_double(key, value);
    else if (key == "ppo.discount") ppo.discount = parse_double(key, value);
    else if (key == "ppo.gae_lambda") ppo.gae_lambda = parse_double(key, value);
    else if (key == "ppo.epochs") ppo.epochs = parse_size(key, value);
    else if (key == "ppo.episodes_per_batch") ppo.episodes_per_batch = parse_size(key, value);
    else if (key == "ppo.learning_rate") ppo.learning_rate = parse_double(key, value);
    else if (key == "ppo.entropy_coef") ppo.entropy_coef = parse_double(key, value);
    else if (key == "ppo.value_coef") ppo.value_coef = parse_double(key, value);
    else if (key == "ppo.max_iterations") ppo.max_iterations = parse_size(key, value);
    else if (key == "ppo.patience") ppo.patience = parse_size(key, value);
    else if (key == "ppo.plateau_tol") ppo.plateau_tol = parse_double(key, value);
    else throw InvalidParameterError("config: unknown key '" + key + "'");
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameterError("config: cannot open " + path);
    RunConfig config;
    std::string line;
    std::size_t lineno = 0;
    bool saw_temperature = false, saw_x = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line.substr(0, line.find('#')));
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw InvalidParameterError("config: line " + std::to_string(lineno) +
                                        " is not 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key == "temperature") saw_temperature = true;
        if (key == "x") saw_x = true;
        if (saw_temperature && saw_x)
            throw InvalidParameterError(path + ":" + std::to_string(lineno) +
                                        ": give either temperature or x, not both");
        try {
            config.apply_line(key, value);
        } catch (const InvalidParameterError& e) {
            throw InvalidParameterError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return config;
}

std::vector<std::string> RunConfig::describe() const {
    std::vector<std::string> lines;
    lines.push_back("omega_a = " + format_double(omega_a));
    if (temperature_kelvin) lines.push_back("temperature = " + format_double(*temperature_kelvin));
    if (x) lines.push_back("x = " + format_double(*x));
    lines.push_back("g = " + format_double(g));
    lines.push_back("delta = " + format_double(delta));
    lines.push_back("N = " + std::to_string(n_rounds));
    lines.push_back("tail_tol = " + format_double(tail_tol));
    lines.push_back("cutoff_cap = " + std::to_string(cutoff_cap));
    lines.push_back("seed = " + std::to_string(seed));
    std::string temps;
    for (std::size_t i = 0; i < scan_temperatures.size(); ++i)
        temps += (i ? "," : "") + format_double(scan_temperatures[i]);
    lines.push_back("scan_temperatures = " + temps);
    lines.push_back("tau_max = " + format_double(tau_max));
    lines.push_back("tau_points = " + std::to_string(tau_points));
    lines.push_back("metric = " + metric);
    lines.push_back("top_k = " + std::to_string(top_k));
    lines.push_back("ppo.obs_dim = " + std::to_string(ppo.obs_dim));
    lines.push_back("ppo.hidden = " + std::to_string(ppo.hidden));
    lines.push_back("ppo.clip_ratio = " + format_double(ppo.clip_ratio));
    lines.push_back("ppo.discount = " + format_double(ppo.discount));
    lines.push_back("ppo.gae_lambda = " + format_double(ppo.gae_lambda));
    lines.push_back("ppo.epochs = " + std::to_string(ppo.epochs));
    lines.push_back("ppo.episodes_per_batch = " + std::to_string(ppo.episodes_per_batch));
    lines.push_back("ppo.learning_rate = " + format_double(ppo.learning_rate));
    lines.push_back("ppo.entropy_coef = " + format_double(ppo.entropy_coef));
    lines.push_back("ppo.value_coef = " + format_double(ppo.value_coef));
    lines.push_back("ppo.max_iterations = " + std::to_string(ppo.max_iterations));
    lines.push_back("ppo.patience = " + std::to_string(ppo.patience));
    lines.push_back("ppo.plateau_tol = " + format_double(ppo.plateau_tol));
    return lines;
}

}  // namespace coolseq
