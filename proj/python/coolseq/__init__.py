"""Measurement-based cooling simulator and sequence optimizer."""

from coolseq._core import (  # noqa: F401
    CutoffCapError,
    DegenerateStateError,
    InvalidParameterError,
    MeasurementAnnihilationError,
    ModelParams,
    PopulationState,
    PpoHyper,
    ThermalSpec,
    __version__,
    alpha_sq,
    apply_cm,
    apply_um,
    approx_nbar_um,
    avg_population,
    beta_sq,
    cooperative_performance,
    dominant_index,
    exhaustive_best,
    generate_sequence,
    greedy_baseline,
    ground_fidelity,
    make_pattern,
    numeric_tau_opt_um,
    plan_intervals,
    rabi_frequency,
    run_sequence,
    tau_opt_cm,
    tau_opt_um,
    thermal_populations,
    train,
)
