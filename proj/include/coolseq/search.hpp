#pragma once

#include <cstdint>
#include <vector>

#include "coolseq/sequence.hpp"

namespace coolseq {

/// Objective used to rank sequences. The cumulative metric is the sum of the
/// per-round C values, i.e. the quantity the RL agent's total reward is
/// proportional to; final_step ranks by the last round's C alone.
enum class Metric { cumulative, final_step };

struct RankedSequence {
    MeasurementSequence sequence;
    double score = 0.0;  ///< value of the active metric
    double total_c = 0.0;
    double final_c = 0.0;
    double final_nbar = 0.0;
    double final_fidelity = 0.0;
    double final_survival = 0.0;
};

struct SearchReport {
    Metric metric = Metric::cumulative;
    std::vector<RankedSequence> top;  ///< descending score; ties lexicographic
    std::uint64_t evaluations = 0;
    std::uint64_t annihilated = 0;  ///< sequences excluded for zero survival

    const RankedSequence& best() const { return top.front(); }
};

inline constexpr std::size_t kExhaustiveGuard = 24;

/// Evaluates every sequence in {UM, CM}^N and ranks them. Sequences whose CM
/// rounds annihilate the state are excluded. Deterministic for any thread
/// count: equal scores are resolved toward the lexicographically smallest
/// 0/1 string. N beyond the guard requires override_guard.
SearchReport exhaustive_best(const PopulationState& initial, std::size_t n_rounds,
                             const ModelParams& params, Metric metric = Metric::cumulative,
                             std::size_t top_k = 10, unsigned threads = 1,
                             bool override_guard = false);

/// Picks, at each round, the strategy with the larger immediate post-round C.
/// Exact ties prefer UM, which preserves the survival probability.
SearchReport greedy_baseline(const PopulationState& initial, std::size_t n_rounds,
                             const ModelParams& params, Metric metric = Metric::cumulative);

/// Report JSON (includes the top-k table); top-k CSV rows.
std::string search_report_json(const SearchReport& report);
void write_ranking_csv(std::ostream& os, const SearchReport& report,
                       const std::vector<std::string>& preamble = {});

}  // namespace coolseq
