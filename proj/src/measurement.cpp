#include "coolseq/measurement.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace coolseq {

double alpha_sq(std::size_t n, double tau, const ModelParams& params) {
    if (n == 0) return 1.0;
    if (tau < 0.0) throw InvalidParameterError("alpha_sq: tau must be >= 0");
    const double nn = static_cast<double>(n);
    const double w2 = params.g * params.g * nn + params.delta * params.delta / 4.0;
    const double s = std::sin(std::sqrt(w2) * tau);
    return 1.0 - params.g * params.g * nn * s * s / w2;
}

double beta_sq(std::size_t n, double tau, const ModelParams& params) {
    if (n == 0) return 0.0;
    if (tau < 0.0) throw InvalidParameterError("beta_sq: tau must be >= 0");
    const double nn = static_cast<double>(n);
    const double w2 = params.g * params.g * nn + params.delta * params.delta / 4.0;
    const double s = std::sin(std::sqrt(w2) * tau);
    return params.g * params.g * nn * s * s / w2;
}

PopulationState apply_cm(const PopulationState& state, double tau, const ModelParams& params) {
    if (!(tau > 0.0)) throw InvalidParameterError("apply_cm: tau must be > 0");
    const auto p = state.populations();
    std::vector<double> out(p.size());
    double s = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) {
        out[n] = alpha_sq(n, tau, params) * p[n];
        s += out[n];
    }
    if (s <= kAnnihilationEps)
        throw MeasurementAnnihilationError("apply_cm: round survival " + std::to_string(s) +
                                           " is numerically zero");
    for (double& v : out) v /= s;
    return PopulationState(std::move(out), state.survival() * s);
}

PopulationState apply_um(const PopulationState& state, double tau, const ModelParams& params) {
    if (!(tau > 0.0)) throw InvalidParameterError("apply_um: tau must be > 0");
    const auto p = state.populations();
    std::vector<double> out(p.size());
    for (std::size_t n = 0; n < p.size(); ++n) {
        out[n] = alpha_sq(n, tau, params) * p[n];
        if (n + 1 < p.size()) out[n] += beta_sq(n + 1, tau, params) * p[n + 1];
    }
    // The map conserves probability exactly except for the inbound transfer
    // from level n_c + 1, which the tail tolerance keeps below 1e-12.
    return PopulationState(std::move(out), state.survival());
}

IntervalResult tau_opt_cm(const PopulationState& state, const ModelParams& params) {
    const double nbar = avg_population(state);
    if (nbar <= 0.0) throw DegenerateStateError("tau_opt_cm: state has zero mean occupation");
    return {1.0 / (params.g * std::sqrt(nbar)), IntervalResult::Method::analytic};
}

IntervalResult tau_opt_um(const PopulationState& state, const ModelParams& params) {
    const double nd = dominant_index(state);
    const double wd = rabi_frequency(nd, params);
    const double wd1 = rabi_frequency(nd + 1.0, params);
    return {std::numbers::pi / (wd + wd1), IntervalResult::Method::analytic};
}

IntervalResult numeric_tau_opt_um(const PopulationState& state, const ModelParams& params,
                                  const TauGrid& grid) {
    if (grid.points == 0) throw InvalidParameterError("numeric_tau_opt_um: empty grid");
    if (!(grid.tau_max > 0.0)) throw InvalidParameterError("numeric_tau_opt_um: tau_max must be > 0");
    double best_tau = 0.0;
    double best_nbar = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i <= grid.points; ++i) {
        const double tau = grid.tau_max * static_cast<double>(i) / static_cast<double>(grid.points);
        const double nbar = avg_population(apply_um(state, tau, params));
        if (nbar < best_nbar) {  // strict: ties keep the smaller tau
            best_nbar = nbar;
            best_tau = tau;
        }
    }
    return {best_tau, IntervalResult::Method::numeric_grid};
}

double approx_nbar_um(const PopulationState& thermal_state, double tau, const ModelParams& params) {
    if (params.delta != 0.0)
        throw InvalidParameterError("approx_nbar_um: resonant formula, requires delta = 0");
    const auto p = thermal_state.populations();
    // The derivation assumes geometric populations; verify p_{n+1}/p_n is constant.
    if (p.size() >= 2) {
        if (!(p[0] > 0.0)) throw InvalidParameterError("approx_nbar_um: state is not thermal");
        const double q = p[1] / p[0];
        for (std::size_t n = 1; n + 1 < p.size(); ++n) {
            if (p[n] < 1e-250) {
                // underflowed tail: everything beyond must stay (near) zero
                if (p[n + 1] > 1e-250)
                    throw InvalidParameterError("approx_nbar_um: state is not thermal");
                continue;
            }
            if (std::abs(p[n + 1] / p[n] - q) > 1e-8 * q)
                throw InvalidParameterError("approx_nbar_um: state is not thermal");
        }
    }
    const double nbar_th = avg_population(thermal_state);
    if (nbar_th <= 0.0) throw DegenerateStateError("approx_nbar_um: zero mean occupation");
    const double nd = dominant_index(thermal_state);
    const double wd = params.g * std::sqrt(nd);
    const double wd1 = params.g * std::sqrt(nd + 1.0);
    const double wplus = wd1 + wd;
    const double wminus = wd1 - wd;
    const double eta = (nbar_th + 2.0 * nbar_th * nbar_th) / (2.0 + 2.0 * nbar_th);
    const double eta_prime = nbar_th * (1.0 + 2.0 * nbar_th - nd) / nd;
    return eta + std::sin(wminus * tau) *
                     (nbar_th * std::sin(wplus * tau) + eta_prime * wd * tau * std::cos(wplus * tau));
}

}  // namespace coolseq
