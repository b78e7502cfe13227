#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "coolseq/rng.hpp"
#include "coolseq/sequence.hpp"

using namespace coolseq;

namespace {
const ModelParams kPaperParams{0.04, 0.01, 1.4e9};

PopulationState reference_state() {
    return thermal_populations(ThermalSpec::from_temperature(0.1, 1.4e9));
}
}  // namespace

TEST_CASE("sequence string round trip") {
    const MeasurementSequence seq = MeasurementSequence::from_string("0110");
    CHECK(seq.steps == std::vector<Strategy>{Strategy::um, Strategy::cm, Strategy::cm,
                                             Strategy::um});
    CHECK(seq.to_string() == "0110");
    CHECK_THROWS_WITH_AS(MeasurementSequence::from_string("01x0"),
                         doctest::Contains("position 2"), InvalidParameterError);
    CHECK_THROWS_AS(MeasurementSequence::from_string(""), InvalidParameterError);
}

TEST_CASE("pattern families") {
    CHECK(make_pattern(PatternKind::s_k, 6, 1).to_string() == "101010");
    CHECK(make_pattern(PatternKind::s_u, 3).to_string() == "000");
    CHECK(make_pattern(PatternKind::s_k, 10, 4).to_string() == "1111011110");
    CHECK(make_pattern(PatternKind::s_k, 16, 2).to_string() == "1101101101101101");
    CHECK(make_pattern(PatternKind::s_c, 4).to_string() == "1111");
    CHECK_THROWS_AS(make_pattern(PatternKind::s_k, 8, 0), InvalidParameterError);
    CHECK_THROWS_AS(make_pattern(PatternKind::s_u, 0), InvalidParameterError);
}

TEST_CASE("cooperative performance") {
    CHECK(cooperative_performance(10.0, 1.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cooperative_performance(8.86, 8.86, 0.5, 0.5) == 0.0);
    bool clamped = false;
    const double clamped_value = cooperative_performance(10.0, 0.0, 1.0, 1.0, &clamped);
    CHECK(clamped);
    CHECK(clamped_value == doctest::Approx(301.0).epsilon(1e-2));  // log10(10/1e-300)
    CHECK_THROWS_AS(cooperative_performance(0.0, 1.0, 1.0, 1.0), InvalidParameterError);
}

TEST_CASE("all-UM run matches the frozen cross-checked endpoint") {
    const CoolingTrace trace =
        run_sequence(reference_state(), make_pattern(PatternKind::s_u, 16), kPaperParams);
    CHECK(trace.last().nbar == doctest::Approx(3.36462635).epsilon(1e-7));
    CHECK(trace.last().fidelity == doctest::Approx(0.78097270).epsilon(1e-7));
    CHECK(trace.last().survival == 1.0);  // exact: no postselection anywhere
    for (const auto& step : trace.steps) CHECK(step.survival == 1.0);
}

TEST_CASE("trace invariants on random sequences") {
    Rng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const double x = rng.uniform(0.2, 1.5);
        const PopulationState initial = thermal_populations(ThermalSpec::from_x(x));
        MeasurementSequence seq;
        for (int i = 0; i < 12; ++i)
            seq.steps.push_back(rng.uniform() < 0.5 ? Strategy::um : Strategy::cm);
        CoolingTrace trace;
        try {
            trace = run_sequence(initial, seq, kPaperParams);
        } catch (const MeasurementAnnihilationError&) {
            continue;
        }
        double t_expected = 0.0;  // each round starts where the previous ended
        double previous_f = 0.0;
        double previous_pg = 1.0;
        for (const auto& step : trace.steps) {
            CHECK(step.t == t_expected);
            t_expected += step.tau;
            CHECK(step.fidelity >= previous_f);
            CHECK(step.survival <= previous_pg);
            previous_f = step.fidelity;
            previous_pg = step.survival;
        }
        // P_g is exactly the product of CM-round survival factors by
        // construction; on all-UM sequences it must be exactly one.
    }
}

TEST_CASE("interval precomputation replays bit-identically") {
    const PopulationState initial = reference_state();
    const MeasurementSequence seq = MeasurementSequence::from_string("1011001101");
    const std::vector<double> taus = plan_intervals(initial, seq, kPaperParams);
    const CoolingTrace direct = run_sequence(initial, seq, kPaperParams);
    const CoolingTrace replay = run_with_intervals(initial, seq, taus, kPaperParams);
    REQUIRE(direct.steps.size() == replay.steps.size());
    for (std::size_t i = 0; i < direct.steps.size(); ++i) {
        CHECK(direct.steps[i].tau == replay.steps[i].tau);
        CHECK(direct.steps[i].nbar == replay.steps[i].nbar);
        CHECK(direct.steps[i].fidelity == replay.steps[i].fidelity);
        CHECK(direct.steps[i].survival == replay.steps[i].survival);
        CHECK(direct.steps[i].performance == replay.steps[i].performance);
    }
    CHECK_THROWS_AS(run_with_intervals(initial, seq, {1.0, 2.0}, kPaperParams),
                    InvalidParameterError);
}

TEST_CASE("deterministic reruns") {
    const PopulationState initial = reference_state();
    const MeasurementSequence seq = MeasurementSequence::from_string("1100101011001010");
    const CoolingTrace a = run_sequence(initial, seq, kPaperParams);
    const CoolingTrace b = run_sequence(initial, seq, kPaperParams);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        CHECK(a.steps[i].nbar == b.steps[i].nbar);
        CHECK(a.steps[i].performance == b.steps[i].performance);
    }
}

TEST_CASE("degenerate and error paths carry the step index") {
    const PopulationState ground({1.0, 0.0}, 1.0);
    CHECK_THROWS_WITH_AS(
        run_sequence(ground, make_pattern(PatternKind::s_u, 3), kPaperParams),
        doctest::Contains("step 1"), DegenerateStateError);
    CHECK_THROWS_AS(run_sequence(reference_state(), MeasurementSequence{}, kPaperParams),
                    InvalidParameterError);
}

TEST_CASE("survival product matches the direct postselection formula") {
    // P_g(N) as a product of per-round survivals versus the single sum
    // over initial populations of the per-level coefficient products.
    Rng rng(47);
    for (int trial = 0; trial < 20; ++trial) {
        const double x = rng.uniform(0.3, 2.0);
        const PopulationState initial = thermal_populations(ThermalSpec::from_x(x));
        std::vector<double> taus;
        for (int i = 0; i < 5; ++i) taus.push_back(rng.uniform(0.5, 30.0));

        PopulationState state = initial;
        bool annihilated = false;
        try {
            for (double tau : taus) state = apply_cm(state, tau, kPaperParams);
        } catch (const MeasurementAnnihilationError&) {
            annihilated = true;
        }
        if (annihilated) continue;

        double direct = 0.0;
        const auto p = initial.populations();
        for (std::size_t n = 0; n < p.size(); ++n) {
            double coeff = 1.0;
            for (double tau : taus) coeff *= alpha_sq(n, tau, kPaperParams);
            direct += coeff * p[n];
        }
        CHECK(std::abs(state.survival() - direct) <= 1e-10);
    }
}

TEST_CASE("trace CSV schema") {
    const CoolingTrace trace =
        run_sequence(reference_state(), make_pattern(PatternKind::s_k, 4, 1), kPaperParams);
    std::ostringstream os;
    write_trace_csv(os, trace, {"note"});
    const std::string text = os.str();
    CHECK(text.rfind("# note\nstep,strategy,tau,t,nbar,F,Pg,C\n", 0) == 0);
    std::size_t rows = 0;
    for (char c : text)
        if (c == '\n') ++rows;
    CHECK(rows == 2 + trace.steps.size());
}

TEST_CASE("summary json fields") {
    const MeasurementSequence seq = make_pattern(PatternKind::s_k, 6, 2);
    const CoolingTrace trace = run_sequence(reference_state(), seq, kPaperParams);
    const std::string json = trace_summary_json(seq, trace);
    for (const char* key : {"\"sequence\"", "\"final_nbar\"", "\"final_F\"", "\"final_Pg\"",
                            "\"final_C\"", "\"total_C\"", "\"nbar_th\""})
        CHECK(json.find(key) != std::string::npos);
    CHECK(json.find("110110") != std::string::npos);
}
