#include "coolseq/physics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace coolseq {

PopulationState::PopulationState(std::vector<double> populations, double survival)
    : populations_(std::move(populations)), survival_(survival) {
    if (populations_.empty())
        throw InvalidParameterError("PopulationState: empty population vector");
    for (double p : populations_)
        if (!(p >= 0.0)) throw InvalidParameterError("PopulationState: negative population");
    const double total = std::accumulate(populations_.begin(), populations_.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12)
        throw InvalidParameterError("PopulationState: populations sum to " + std::to_string(total));
    if (!(survival_ > 0.0 && survival_ <= 1.0))
        throw InvalidParameterError("PopulationState: survival must be in (0, 1]");
}

PopulationState thermal_populations(const ThermalSpec& spec, double tail_tol,
                                    std::size_t cutoff_cap) {
    if (!(spec.x > 0.0)) throw InvalidParameterError("thermal_populations: x must be > 0");
    if (!(tail_tol > 0.0 && tail_tol < 1.0))
        throw InvalidParameterError("thermal_populations: tail_tol must be in (0, 1)");

    // Tail mass of the normalized geometric distribution beyond n_c is
    // q^{n_c + 1} with q = exp(-x); pick the smallest cutoff below tail_tol.
    const std::size_t n_cutoff =
        static_cast<std::size_t>(std::max(0.0, std::ceil(-std::log(tail_tol) / spec.x - 1.0)));
    if (n_cutoff > cutoff_cap)
        throw CutoffCapError("thermal_populations: required cutoff " + std::to_string(n_cutoff) +
                             " exceeds cap " + std::to_string(cutoff_cap) +
                             "; raise the cap or loosen tail_tol");

    std::vector<double> p(n_cutoff + 1);
    for (std::size_t n = 0; n <= n_cutoff; ++n) p[n] = std::exp(-static_cast<double>(n) * spec.x);
    const double z = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& v : p) v /= z;
    return PopulationState(std::move(p), 1.0);
}

double rabi_frequency(double n, const ModelParams& params) {
    if (n < 0.0) throw InvalidParameterError("rabi_frequency: n must be >= 0");
    return std::sqrt(params.g * params.g * n + params.delta * params.delta / 4.0);
}

double avg_population(const PopulationState& state) {
    double nbar = 0.0;
    const auto p = state.populations();
    for (std::size_t n = 1; n < p.size(); ++n) nbar += static_cast<double>(n) * p[n];
    return nbar;
}

double ground_fidelity(const PopulationState& state) { return state.p(0); }

double dominant_index(const PopulationState& state) {
    const double nbar = avg_population(state);
    if (nbar <= 0.0)
        throw DegenerateStateError("dominant_index: state has zero mean occupation");
    return 1.0 / std::log1p(1.0 / nbar);
}

}  // namespace coolseq
