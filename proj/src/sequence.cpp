#include "coolseq/sequence.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "coolseq/detail/json.hpp"

namespace coolseq {

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string MeasurementSequence::to_string() const {
    std::string s;
    s.reserve(steps.size());
    for (Strategy m : steps) s.push_back(strategy_char(m));
    return s;
}

MeasurementSequence MeasurementSequence::from_string(const std::string& s) {
    if (s.empty()) throw InvalidParameterError("sequence string is empty");
    MeasurementSequence seq;
    seq.steps.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '0')
            seq.steps.push_back(Strategy::um);
        else if (s[i] == '1')
            seq.steps.push_back(Strategy::cm);
        else
            throw InvalidParameterError("sequence string: invalid character '" +
                                        std::string(1, s[i]) + "' at position " +
                                        std::to_string(i));
    }
    return seq;
}

MeasurementSequence make_pattern(PatternKind kind, std::size_t n_rounds, std::size_t k) {
    if (n_rounds < 1) throw InvalidParameterError("make_pattern: N must be >= 1");
    MeasurementSequence seq;
    seq.steps.reserve(n_rounds);
    switch (kind) {
        case PatternKind::s_u:
            seq.steps.assign(n_rounds, Strategy::um);
            break;
        case PatternKind::s_c:
            seq.steps.assign(n_rounds, Strategy::cm);
            break;
        case PatternKind::s_k: {
            if (k < 1) throw InvalidParameterError("make_pattern: k must be >= 1");
            while (seq.steps.size() < n_rounds) {
                for (std::size_t j = 0; j < k && seq.steps.size() < n_rounds; ++j)
                    seq.steps.push_back(Strategy::cm);
                if (seq.steps.size() < n_rounds) seq.steps.push_back(Strategy::um);
            }
            break;
        }
    }
    return seq;
}

double cooperative_performance(double nbar_th, double nbar, double fidelity, double survival,
                               bool* clamped) {
    if (!(nbar_th > 0.0))
        throw InvalidParameterError("cooperative_performance: nbar_th must be > 0");
    if (nbar <= 0.0) {
        nbar = 1e-300;
        if (clamped) *clamped = true;
    }
    return fidelity * survival * std::log10(nbar_th / nbar);
}

double CoolingTrace::total_performance() const {
    double total = 0.0;
    for (const auto& s : steps) total += s.performance;
    return total;
}

namespace {

// Shared driver: one pass over the sequence. With a precomputed interval
// list it replays those taus; otherwise each round derives its own.
CoolingTrace drive(const PopulationState& initial, const MeasurementSequence& seq,
                   const std::vector<double>* intervals, const ModelParams& params) {
    if (seq.steps.empty()) throw InvalidParameterError("run_sequence: empty sequence");
    CoolingTrace trace;
    trace.nbar_initial = avg_population(initial);
    trace.steps.reserve(seq.size());

    PopulationState state = initial;
    double t = 0.0;
    for (std::size_t i = 0; i < seq.steps.size(); ++i) {
        const Strategy m = seq.steps[i];
        try {
            const double tau = intervals ? (*intervals)[i]
                                         : (m == Strategy::cm ? tau_opt_cm(state, params).tau
                                                              : tau_opt_um(state, params).tau);
            state = m == Strategy::cm ? apply_cm(state, tau, params)
                                      : apply_um(state, tau, params);
            TraceStep step;
            step.index = i + 1;
            step.strategy = m;
            step.tau = tau;
            step.t = t;  // time at which this round's evolution began
            t += tau;
            step.nbar = avg_population(state);
            step.fidelity = ground_fidelity(state);
            step.survival = state.survival();
            bool clamped = false;
            step.performance = cooperative_performance(trace.nbar_initial, step.nbar,
                                                       step.fidelity, step.survival, &clamped);
            trace.nbar_clamped = trace.nbar_clamped || clamped;
            trace.steps.push_back(step);
        } catch (const MeasurementAnnihilationError& e) {
            throw MeasurementAnnihilationError("step " + std::to_string(i + 1) + ": " + e.what());
        } catch (const DegenerateStateError& e) {
            throw DegenerateStateError("step " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return trace;
}

}  // namespace

CoolingTrace run_sequence(const PopulationState& initial, const MeasurementSequence& seq,
                          const ModelParams& params) {
    return drive(initial, seq, nullptr, params);
}

std::vector<double> plan_intervals(const PopulationState& initial, const MeasurementSequence& seq,
                                   const ModelParams& params) {
    const CoolingTrace trace = drive(initial, seq, nullptr, params);
    std::vector<double> taus;
    taus.reserve(trace.steps.size());
    for (const auto& s : trace.steps) taus.push_back(s.tau);
    return taus;
}

CoolingTrace run_with_intervals(const PopulationState& initial, const MeasurementSequence& seq,
                                const std::vector<double>& intervals, const ModelParams& params) {
    if (intervals.size() != seq.size())
        throw InvalidParameterError("run_with_intervals: interval count does not match sequence");
    return drive(initial, seq, &intervals, params);
}

void write_trace_csv(std::ostream& os, const CoolingTrace& trace,
                     const std::vector<std::string>& preamble) {
    for (const auto& line : preamble) os << "# " << line << "\n";
    os << "step,strategy,tau,t,nbar,F,Pg,C\n";
    for (const auto& s : trace.steps) {
        os << s.index << ',' << static_cast<int>(s.strategy) << ',' << format_double(s.tau) << ','
           << format_double(s.t) << ',' << format_double(s.nbar) << ',' << format_double(s.fidelity)
           << ',' << format_double(s.survival) << ',' << format_double(s.performance) << "\n";
    }
}

std::string trace_summary_json(const MeasurementSequence& seq, const CoolingTrace& trace) {
    nlohmann::ordered_json j;
    j["sequence"] = seq.to_string();
    j["final_nbar"] = trace.last().nbar;
    j["final_F"] = trace.last().fidelity;
    j["final_Pg"] = trace.last().survival;
    j["final_C"] = trace.last().performance;
    j["total_C"] = trace.total_performance();
    j["nbar_th"] = trace.nbar_initial;
    j["nbar_clamped"] = trace.nbar_clamped;
    return j.dump(2);
}

}  // namespace coolseq
