#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "coolseq/physics.hpp"
#include "coolseq/rng.hpp"

using namespace coolseq;

namespace {
const ModelParams kPaperParams{0.04, 0.01, 1.4e9};
}

TEST_CASE("thermal spec conversion from SI inputs") {
    const ThermalSpec spec = ThermalSpec::from_temperature(0.1, 1.4e9);
    // x = hbar * omega_a / (k_B T), frozen from 12-digit CODATA constants
    CHECK(spec.x == doctest::Approx(0.10693525616).epsilon(1e-10));
    CHECK_THROWS_AS(ThermalSpec::from_temperature(-1.0, 1.4e9), InvalidParameterError);
    CHECK_THROWS_AS(ThermalSpec::from_x(0.0), InvalidParameterError);
}

TEST_CASE("thermal populations at the reference temperature") {
    const PopulationState state = thermal_populations(ThermalSpec::from_temperature(0.1, 1.4e9));
    // geometric sum oracle: nbar = 1/(e^x - 1) = 8.86036237 at this x
    CHECK(avg_population(state) == doctest::Approx(8.86036237).epsilon(1e-8));
    CHECK(state.n_cutoff() == 258);
    CHECK(state.survival() == 1.0);
    const auto p = state.populations();
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    CHECK(std::abs(total - 1.0) <= 1e-12);
    // ground fidelity equals 1 - e^{-x} up to truncation
    CHECK(ground_fidelity(state) ==
          doctest::Approx(1.0 - std::exp(-0.10693525616)).epsilon(1e-9));
}

TEST_CASE("thermal populations limits") {
    SUBCASE("zero-temperature limit") {
        const PopulationState state = thermal_populations(ThermalSpec::from_x(50.0));
        CHECK(ground_fidelity(state) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(avg_population(state) <= 1e-9);
    }
    SUBCASE("x = ln 2 gives p_n = 2^-(n+1)") {
        const PopulationState state = thermal_populations(ThermalSpec::from_x(std::log(2.0)));
        CHECK(state.n_cutoff() == 39);  // 2^-40 < 1e-12 <= 2^-39
        CHECK(avg_population(state) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(state.p(0) == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(state.p(3) == doctest::Approx(1.0 / 16.0).epsilon(1e-9));
    }
    SUBCASE("tail rule picks the smallest admissible cutoff") {
        const double x = 0.25;
        const PopulationState state = thermal_populations(ThermalSpec::from_x(x), 1e-6);
        const double tail_kept = std::exp(-static_cast<double>(state.n_cutoff() + 1) * x);
        const double tail_smaller = std::exp(-static_cast<double>(state.n_cutoff()) * x);
        CHECK(tail_kept < 1e-6);
        CHECK(tail_smaller >= 1e-6);
    }
}

TEST_CASE("thermal populations error paths") {
    CHECK_THROWS_AS(thermal_populations(ThermalSpec{-1.0}), InvalidParameterError);
    CHECK_THROWS_AS(thermal_populations(ThermalSpec{0.1}, 0.0), InvalidParameterError);
    CHECK_THROWS_AS(thermal_populations(ThermalSpec{0.1}, 2.0), InvalidParameterError);
    // x = 1e-3 needs ~27600 levels at tail_tol 1e-12
    CHECK_THROWS_AS(thermal_populations(ThermalSpec{1e-3}, 1e-12, 4096), CutoffCapError);
}

TEST_CASE("rabi frequency") {
    CHECK(rabi_frequency(0.0, kPaperParams) == doctest::Approx(0.005).epsilon(1e-14));
    const ModelParams resonant{0.04, 0.0, 1.4e9};
    CHECK(rabi_frequency(4.0, resonant) == doctest::Approx(0.08).epsilon(1e-14));
    // sqrt(0.0016 + 0.000025), direct arithmetic
    CHECK(rabi_frequency(1.0, kPaperParams) ==
          doctest::Approx(0.040311288741492746).epsilon(1e-12));
    CHECK_THROWS_AS(rabi_frequency(-1.0, kPaperParams), InvalidParameterError);

    SUBCASE("monotone in n") {
        Rng rng(7);
        for (int trial = 0; trial < 50; ++trial) {
            const ModelParams params{rng.uniform(0.01, 0.1), rng.uniform(0.0, 0.05), 1.0};
            double previous = rabi_frequency(0.0, params);
            for (double n = 1.0; n < 40.0; n += 1.0) {
                const double current = rabi_frequency(n, params);
                CHECK(current > previous);
                previous = current;
            }
        }
    }
}

TEST_CASE("scalar observables") {
    const PopulationState half({0.5, 0.0, 0.5}, 1.0);
    CHECK(avg_population(half) == 1.0);
    const PopulationState ground({1.0}, 1.0);
    CHECK(avg_population(ground) == 0.0);
    CHECK(ground_fidelity(ground) == 1.0);
    const PopulationState quarter({0.25, 0.75}, 1.0);
    CHECK(ground_fidelity(quarter) == 0.25);
}

TEST_CASE("dominant index") {
    // nbar = 1/(e-1) makes ln(1 + 1/nbar) = 1 exactly
    const PopulationState unit_x = thermal_populations(ThermalSpec::from_x(1.0));
    CHECK(dominant_index(unit_x) == doctest::Approx(1.0).epsilon(1e-9));

    const PopulationState reference =
        thermal_populations(ThermalSpec::from_temperature(0.1, 1.4e9));
    const double nbar = avg_population(reference);
    CHECK(dominant_index(reference) == doctest::Approx(1.0 / std::log1p(1.0 / nbar)));
    // for a thermal state n_d matches 1/x up to truncation
    CHECK(dominant_index(reference) == doctest::Approx(1.0 / 0.10693525616).epsilon(1e-8));

    CHECK_THROWS_AS(dominant_index(PopulationState({1.0}, 1.0)), DegenerateStateError);
}

TEST_CASE("observables invariant under appending empty levels") {
    const PopulationState base = thermal_populations(ThermalSpec::from_x(0.8));
    std::vector<double> padded(base.populations().begin(), base.populations().end());
    padded.resize(padded.size() + 32, 0.0);
    const PopulationState extended(padded, 1.0);
    CHECK(avg_population(extended) == avg_population(base));
    CHECK(ground_fidelity(extended) == ground_fidelity(base));
}

TEST_CASE("population state validation") {
    CHECK_THROWS_AS(PopulationState({}, 1.0), InvalidParameterError);
    CHECK_THROWS_AS(PopulationState({0.5, -0.1, 0.6}, 1.0), InvalidParameterError);
    CHECK_THROWS_AS(PopulationState({0.5, 0.4}, 1.0), InvalidParameterError);
    CHECK_THROWS_AS(PopulationState({1.0}, 0.0), InvalidParameterError);
    CHECK_THROWS_AS(PopulationState({1.0}, 1.5), InvalidParameterError);
}

TEST_CASE("model params validation") {
    const ModelParams zero_g{0.0, 0.01, 1.4e9};
    const ModelParams negative_delta{0.04, -0.01, 1.4e9};
    const ModelParams zero_omega{0.04, 0.01, 0.0};
    CHECK_THROWS_AS(zero_g.validate(), InvalidParameterError);
    CHECK_THROWS_AS(negative_delta.validate(), InvalidParameterError);
    CHECK_THROWS_AS(zero_omega.validate(), InvalidParameterError);
    CHECK_NOTHROW(kPaperParams.validate());
}
