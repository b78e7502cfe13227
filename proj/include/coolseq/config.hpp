#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coolseq/physics.hpp"
#include "coolseq/ppo.hpp"
#include "coolseq/search.hpp"

namespace coolseq {

/// Resolved run configuration. Physical inputs arrive in SI (omega_a in
/// rad/s, temperature in kelvin) or directly as the dimensionless x; the
/// conversion happens here and nowhere else.
struct RunConfig {
    double omega_a = 1.4e9;  ///< rad/s
    std::optional<double> temperature_kelvin = 0.1;
    std::optional<double> x;  ///< mutually exclusive with temperature_kelvin
    double g = 0.04;          ///< units of omega_a
    double delta = 0.01;      ///< units of omega_a
    std::size_t n_rounds = 16;
    double tail_tol = 1e-12;
    std::size_t cutoff_cap = 32768;
    std::uint64_t seed = 1;
    // tau-scan settings
    std::vector<double> scan_temperatures = {0.01, 0.1, 1.0, 10.0};
    double tau_max = 40.0;
    std::size_t tau_points = 2000;
    // sequence selection for simulate runs (CLI flags take precedence)
    std::string pattern;   ///< "", "S_u", "S_c" or "S_<k>"
    std::string sequence;  ///< "", or an explicit 0/1 string
    // search settings
    std::string metric = "cumulative";  ///< or "final_step"
    std::size_t top_k = 10;
    // RL hyperparameters
    PpoHyper ppo;

    ThermalSpec thermal_spec() const;
    ModelParams model_params() const;
    Metric search_metric() const;

    /// key = value lines; '#' comments; unknown keys are rejected.
    static RunConfig from_file(const std::string& path);
    void apply_line(const std::string& key, const std::string& value);

    /// All settings, one "key = value" per line, suitable for embedding in
    /// output files; parsing it back reproduces this config exactly.
    std::vector<std::string> describe() const;
};

}  // namespace coolseq
