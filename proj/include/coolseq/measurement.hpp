#pragma once

#include <cstddef>

#include "coolseq/physics.hpp"

namespace coolseq {

/// The two measurement strategies. Serialized as 0 (UM) and 1 (CM).
enum class Strategy : int { um = 0, cm = 1 };

inline char strategy_char(Strategy s) { return s == Strategy::cm ? '1' : '0'; }

/// A CM round whose survival falls at or below this threshold postselects on
/// a numerically impossible outcome and raises MeasurementAnnihilationError.
inline constexpr double kAnnihilationEps = 1e-15;

struct IntervalResult {
    enum class Method { analytic, numeric_grid };
    double tau = 0.0;  ///< units of 1/omega_a
    Method method = Method::analytic;
};

/// Survival coefficient |alpha_n(tau)|^2 = 1 - g^2 n sin^2(Omega_n tau) / Omega_n^2.
/// Identically 1 at n = 0: the ground state is protected for every interval.
double alpha_sq(std::size_t n, double tau, const ModelParams& params);

/// Downward-transfer coefficient |beta_n(tau)|^2 = g^2 n sin^2(Omega_n tau) / Omega_n^2,
/// the exact complement of alpha_sq.
double beta_sq(std::size_t n, double tau, const ModelParams& params);

/// Conditional measurement after a free evolution of length tau:
/// p_n <- |alpha_n|^2 p_n / s with round survival s = sum_n |alpha_n|^2 p_n.
/// The cumulative survival becomes P_g * s.
PopulationState apply_cm(const PopulationState& state, double tau, const ModelParams& params);

/// Nonselective measurement: p_n <- |alpha_n|^2 p_n + |beta_{n+1}|^2 p_{n+1}.
/// Transfer into the truncated level from above the cutoff is dropped.
/// Succeeds with unit probability; the cumulative survival is untouched.
PopulationState apply_um(const PopulationState& state, double tau, const ModelParams& params);

/// Optimal CM interval 1/(g sqrt(nbar)) evaluated on the current state.
IntervalResult tau_opt_cm(const PopulationState& state, const ModelParams& params);

/// Optimal UM interval pi / (Omega_d + Omega_{d+1}) with the dominant Rabi
/// frequencies evaluated at the state's dominant index (off-resonant form).
IntervalResult tau_opt_um(const PopulationState& state, const ModelParams& params);

struct TauGrid {
    double tau_max = 40.0;
    std::size_t points = 2000;  ///< uniform over (0, tau_max]
};

/// Brute-force reference for tau_opt_um: argmin over the grid of the exact
/// post-UM mean occupation. Ties break toward the smallest tau.
IntervalResult numeric_tau_opt_um(const PopulationState& state, const ModelParams& params,
                                  const TauGrid& grid = {});

/// Closed-form resonant approximation of the post-UM mean occupation for a
/// thermal input state. Validation only: it carries a constant offset at
/// tau = 0 (it returns eta rather than nbar_th) and is never consulted by the
/// optimizers, which use the exact map.
double approx_nbar_um(const PopulationState& thermal_state, double tau, const ModelParams& params);

}  // namespace coolseq
