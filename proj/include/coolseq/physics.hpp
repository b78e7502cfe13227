#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "coolseq/errors.hpp"

namespace coolseq {

inline constexpr char kVersion[] = "0.1.0";

// CODATA constants, 12 significant digits. Only used to convert an absolute
// temperature into the dimensionless ratio x; the rest of the library is
// unit-free (frequencies in units of omega_a, times in units of 1/omega_a).
inline constexpr double kHbar = 1.05457181765e-34;       // J s
inline constexpr double kBoltzmann = 1.38064900000e-23;  // J / K

/// Jaynes-Cummings parameters in units of the resonator frequency.
struct ModelParams {
    double g = 0.04;        ///< qubit-resonator coupling, units of omega_a
    double delta = 0.01;    ///< detuning omega_e - omega_a, units of omega_a
    double omega_a = 1.4e9; ///< absolute resonator frequency, rad/s

    void validate() const {
        if (!(g > 0.0)) throw InvalidParameterError("ModelParams: g must be > 0");
        if (delta < 0.0) throw InvalidParameterError("ModelParams: delta must be >= 0");
        if (!(omega_a > 0.0)) throw InvalidParameterError("ModelParams: omega_a must be > 0");
    }
};

/// Dimensionless inverse temperature x = hbar*omega_a / (k_B * T).
struct ThermalSpec {
    double x = 0.0;

    static ThermalSpec from_x(double x) {
        if (!(x > 0.0)) throw InvalidParameterError("ThermalSpec: x must be > 0");
        return ThermalSpec{x};
    }

    static ThermalSpec from_temperature(double kelvin, double omega_a) {
        if (!(kelvin > 0.0)) throw InvalidParameterError("ThermalSpec: temperature must be > 0");
        if (!(omega_a > 0.0)) throw InvalidParameterError("ThermalSpec: omega_a must be > 0");
        return from_x(kHbar * omega_a / (kBoltzmann * kelvin));
    }
};

/// Diagonal Fock-basis population distribution p_0..p_{n_c} together with the
/// cumulative success probability P_g of all conditional measurements so far.
///
/// Both measurement maps consume and produce plain population arrays; the
/// state stays diagonal for the whole protocol.
class PopulationState {
  public:
    PopulationState(std::vector<double> populations, double survival);

    std::span<const double> populations() const { return populations_; }
    double p(std::size_t n) const { return n < populations_.size() ? populations_[n] : 0.0; }
    std::size_t n_cutoff() const { return populations_.size() - 1; }
    std::size_t size() const { return populations_.size(); }
    double survival() const { return survival_; }

    /// Same populations with the cumulative survival replaced.
    PopulationState with_survival(double survival) const { return {populations_, survival}; }

  private:
    std::vector<double> populations_;
    double survival_;
};

/// Builds the truncated thermal state p_n ∝ exp(-n*x). The cutoff is the
/// smallest n_c whose truncated tail mass is below tail_tol; the retained
/// populations are then renormalized and the survival starts at 1.
PopulationState thermal_populations(const ThermalSpec& spec, double tail_tol = 1e-12,
                                    std::size_t cutoff_cap = 32768);

/// Rabi frequency sqrt(g^2 n + delta^2/4) in units of omega_a. Accepts a
/// real-valued n so it can also evaluate the dominant index.
double rabi_frequency(double n, const ModelParams& params);

/// Mean excitation number of the distribution.
double avg_population(const PopulationState& state);

/// Ground-state fidelity, i.e. p_0.
double ground_fidelity(const PopulationState& state);

/// Dominant Fock index n_d = 1/ln(1 + 1/nbar), the continuous maximum of the
/// weight function n*exp(-n*x) for the thermal state matching the current
/// mean occupation (the effective temperature of the state).
double dominant_index(const PopulationState& state);

}  // namespace coolseq
