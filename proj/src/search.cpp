#include "coolseq/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <thread>

#include "coolseq/detail/json.hpp"

namespace coolseq {

namespace {

// Step-order lexicographic comparison of two sequence indices (bit i of the
// index is round i+1). Used to break score ties deterministically.
bool lex_less(std::uint64_t a, std::uint64_t b, std::size_t n_rounds) {
    for (std::size_t i = 0; i < n_rounds; ++i) {
        const unsigned ba = (a >> i) & 1u;
        const unsigned bb = (b >> i) & 1u;
        if (ba != bb) return ba < bb;
    }
    return false;
}

MeasurementSequence sequence_from_index(std::uint64_t index, std::size_t n_rounds) {
    MeasurementSequence seq;
    seq.steps.reserve(n_rounds);
    for (std::size_t i = 0; i < n_rounds; ++i)
        seq.steps.push_back(((index >> i) & 1u) ? Strategy::cm : Strategy::um);
    return seq;
}

struct Candidate {
    double score = -std::numeric_limits<double>::infinity();
    std::uint64_t index = 0;
};

struct CandidateLess {
    std::size_t n_rounds;
    // "better" ordering: higher score first, lex-smaller string on ties
    bool operator()(const Candidate& a, const Candidate& b) const {
        if (a.score != b.score) return a.score > b.score;
        return lex_less(a.index, b.index, n_rounds);
    }
};

RankedSequence rank_entry(const MeasurementSequence& seq, const CoolingTrace& trace,
                          Metric metric) {
    RankedSequence r;
    r.sequence = seq;
    r.total_c = trace.total_performance();
    r.final_c = trace.last().performance;
    r.score = metric == Metric::cumulative ? r.total_c : r.final_c;
    r.final_nbar = trace.last().nbar;
    r.final_fidelity = trace.last().fidelity;
    r.final_survival = trace.last().survival;
    return r;
}

}  // namespace

SearchReport exhaustive_best(const PopulationState& initial, std::size_t n_rounds,
                             const ModelParams& params, Metric metric, std::size_t top_k,
                             unsigned threads, bool override_guard) {
    if (n_rounds < 1) throw InvalidParameterError("exhaustive_best: N must be >= 1");
    if (n_rounds > kExhaustiveGuard && !override_guard)
        throw InvalidParameterError("exhaustive_best: N = " + std::to_string(n_rounds) +
                                    " exceeds the cost guard (" +
                                    std::to_string(kExhaustiveGuard) +
                                    "); pass override_guard to proceed");
    const std::uint64_t total = std::uint64_t{1} << n_rounds;
    if (threads == 0) threads = 1;
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, total));

    std::vector<std::vector<Candidate>> per_thread(threads);
    std::atomic<std::uint64_t> annihilated{0};

    auto worker = [&](unsigned tid) {
        const std::uint64_t begin = total * tid / threads;
        const std::uint64_t end = total * (tid + 1) / threads;
        auto& local = per_thread[tid];
        for (std::uint64_t k = begin; k < end; ++k) {
            const MeasurementSequence seq = sequence_from_index(k, n_rounds);
            double score;
            try {
                const CoolingTrace trace = run_sequence(initial, seq, params);
                score = metric == Metric::cumulative ? trace.total_performance()
                                                     : trace.last().performance;
            } catch (const MeasurementAnnihilationError&) {
                annihilated.fetch_add(1, std::memory_order_relaxed);
                continue;
            }
            local.push_back({score, k});
        }
        // keep only the thread-local top candidates
        const std::size_t keep = std::min(local.size(), top_k);
        std::partial_sort(local.begin(), local.begin() + keep, local.end(),
                          CandidateLess{n_rounds});
        local.resize(keep);
    };

    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }

    std::vector<Candidate> merged;
    for (auto& local : per_thread) merged.insert(merged.end(), local.begin(), local.end());
    std::sort(merged.begin(), merged.end(), CandidateLess{n_rounds});
    if (merged.empty())
        throw MeasurementAnnihilationError("exhaustive_best: every sequence annihilated");
    merged.resize(std::min(merged.size(), top_k));

    SearchReport report;
    report.metric = metric;
    report.evaluations = total;
    report.annihilated = annihilated.load();
    for (const auto& c : merged) {
        const MeasurementSequence seq = sequence_from_index(c.index, n_rounds);
        report.top.push_back(rank_entry(seq, run_sequence(initial, seq, params), metric));
    }
    return report;
}

SearchReport greedy_baseline(const PopulationState& initial, std::size_t n_rounds,
                             const ModelParams& params, Metric metric) {
    if (n_rounds < 1) throw InvalidParameterError("greedy_baseline: N must be >= 1");
    const double nbar_th = avg_population(initial);

    MeasurementSequence chosen;
    PopulationState state = initial;
    for (std::size_t i = 0; i < n_rounds; ++i) {
        double best_c = -std::numeric_limits<double>::infinity();
        Strategy best_m = Strategy::um;
        PopulationState best_state = state;
        // UM evaluated first so an exact tie keeps it (preserves P_g)
        for (Strategy m : {Strategy::um, Strategy::cm}) {
            try {
                const double tau = m == Strategy::cm ? tau_opt_cm(state, params).tau
                                                     : tau_opt_um(state, params).tau;
                PopulationState next = m == Strategy::cm ? apply_cm(state, tau, params)
                                                         : apply_um(state, tau, params);
                const double c = cooperative_performance(nbar_th, avg_population(next),
                                                         ground_fidelity(next), next.survival());
                if (c > best_c) {
                    best_c = c;
                    best_m = m;
                    best_state = std::move(next);
                }
            } catch (const MeasurementAnnihilationError&) {
                // this action is unavailable; the other one decides
            }
        }
        if (!std::isfinite(best_c))
            throw MeasurementAnnihilationError("greedy_baseline: both actions annihilate at step " +
                                               std::to_string(i + 1));
        chosen.steps.push_back(best_m);
        state = std::move(best_state);
    }

    SearchReport report;
    report.metric = metric;
    report.evaluations = 2 * n_rounds;
    report.top.push_back(rank_entry(chosen, run_sequence(initial, chosen, params), metric));
    return report;
}

std::string search_report_json(const SearchReport& report) {
    nlohmann::ordered_json j;
    j["metric"] = report.metric == Metric::cumulative ? "cumulative" : "final_step";
    j["evaluations"] = report.evaluations;
    j["annihilated"] = report.annihilated;
    j["best_sequence"] = report.best().sequence.to_string();
    j["best_C"] = report.best().score;
    nlohmann::ordered_json top = nlohmann::ordered_json::array();
    for (const auto& r : report.top) {
        top.push_back({{"sequence", r.sequence.to_string()},
                       {"C", r.score},
                       {"total_C", r.total_c},
                       {"final_C", r.final_c},
                       {"final_nbar", r.final_nbar},
                       {"final_F", r.final_fidelity},
                       {"final_Pg", r.final_survival}});
    }
    j["top"] = top;
    return j.dump(2);
}

void write_ranking_csv(std::ostream& os, const SearchReport& report,
                       const std::vector<std::string>& preamble) {
    for (const auto& line : preamble) os << "# " << line << "\n";
    os << "rank,sequence,C,total_C,final_C,final_nbar,final_F,final_Pg\n";
    char buf[64];
    for (std::size_t i = 0; i < report.top.size(); ++i) {
        const auto& r = report.top[i];
        os << i + 1 << ',' << r.sequence.to_string();
        for (double v : {r.score, r.total_c, r.final_c, r.final_nbar, r.final_fidelity,
                         r.final_survival}) {
            std::snprintf(buf, sizeof(buf), ",%.17g", v);
            os << buf;
        }
        os << "\n";
    }
}

}  // namespace coolseq
