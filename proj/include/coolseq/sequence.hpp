#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "coolseq/measurement.hpp"
#include "coolseq/physics.hpp"

namespace coolseq {

/// Ordered list of measurement strategies, one per round.
struct MeasurementSequence {
    std::vector<Strategy> steps;

    std::size_t size() const { return steps.size(); }

    std::string to_string() const;
    /// Parses a 0/1 string; reports the offending position on failure.
    static MeasurementSequence from_string(const std::string& s);
};

enum class PatternKind { s_u, s_c, s_k };

/// The named sequence families: S_u (all UM), S_c (all CM), and S_k
/// (a block of k CM rounds followed by one UM round, repeated and truncated).
MeasurementSequence make_pattern(PatternKind kind, std::size_t n_rounds, std::size_t k = 1);

/// Cooperative cooling performance C = F * P_g * log10(nbar_th / nbar).
/// A nonpositive nbar is clamped to 1e-300; *clamped is set when provided.
double cooperative_performance(double nbar_th, double nbar, double fidelity, double survival,
                               bool* clamped = nullptr);

struct TraceStep {
    std::size_t index = 0;  ///< 1-based round number
    Strategy strategy = Strategy::um;
    double tau = 0.0;          ///< this round's interval, units of 1/omega_a
    double t = 0.0;            ///< cumulative time when the round begins (t_1 = 0)
    double nbar = 0.0;         ///< mean occupation after the round
    double fidelity = 0.0;     ///< ground-state population after the round
    double survival = 1.0;     ///< cumulative P_g after the round
    double performance = 0.0;  ///< C after the round
};

struct CoolingTrace {
    double nbar_initial = 0.0;
    std::vector<TraceStep> steps;
    bool nbar_clamped = false;  ///< some step hit the 1e-300 floor inside the log

    const TraceStep& last() const { return steps.back(); }
    double total_performance() const;  ///< sum of per-step C
};

/// Runs the hybrid sequence from the given initial state. Each round picks
/// its interval from the current state (tau_opt_um or tau_opt_cm), applies
/// the map, and records the observables. Map errors carry the round number.
CoolingTrace run_sequence(const PopulationState& initial, const MeasurementSequence& seq,
                          const ModelParams& params);

/// First pass of the interval-precomputation split: evolves the populations
/// only and returns every round's interval. Feeding them back through
/// run_with_intervals reproduces run_sequence bit for bit.
std::vector<double> plan_intervals(const PopulationState& initial, const MeasurementSequence& seq,
                                   const ModelParams& params);

CoolingTrace run_with_intervals(const PopulationState& initial, const MeasurementSequence& seq,
                                const std::vector<double>& intervals, const ModelParams& params);

/// Trace CSV with the fixed header step,strategy,tau,t,nbar,F,Pg,C.
/// Any preamble lines are written first as '#' comments.
void write_trace_csv(std::ostream& os, const CoolingTrace& trace,
                     const std::vector<std::string>& preamble = {});

/// Summary JSON text: {sequence, final_nbar, final_F, final_Pg, final_C, nbar_th}
/// plus the total (summed) C and the clamp flag.
std::string trace_summary_json(const MeasurementSequence& seq, const CoolingTrace& trace);

}  // namespace coolseq
