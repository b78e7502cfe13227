"""Smoke tests for the python bindings."""

import math

import pytest

import coolseq as cs


@pytest.fixture(scope="module")
def params():
    return cs.ModelParams(g=0.04, delta=0.01, omega_a=1.4e9)


@pytest.fixture(scope="module")
def thermal(params):
    return cs.thermal_populations(cs.ThermalSpec.from_temperature(0.1, params.omega_a))


def test_thermal_state(thermal):
    assert thermal.n_cutoff == 258
    assert thermal.survival == 1.0
    assert math.isclose(cs.avg_population(thermal), 8.86036237, rel_tol=1e-8)
    assert math.isclose(sum(thermal.populations), 1.0, abs_tol=1e-12)


def test_coefficient_identity(params):
    for n, tau in [(0, 3.0), (1, 12.5), (7, 0.31), (120, 88.0)]:
        a = cs.alpha_sq(n, tau, params)
        b = cs.beta_sq(n, tau, params)
        assert abs(a + b - 1.0) <= 1e-14
        assert 0.0 <= a <= 1.0


def test_intervals(thermal, params):
    nbar = cs.avg_population(thermal)
    assert math.isclose(cs.tau_opt_cm(thermal, params), 1.0 / (0.04 * math.sqrt(nbar)))
    tau_u = cs.tau_opt_um(thermal, params)
    assert math.isclose(tau_u, 12.50561753, rel_tol=1e-8)
    grid = cs.numeric_tau_opt_um(thermal, params, tau_max=40.0, points=500)
    assert abs(grid - tau_u) / tau_u < 0.1


def test_patterns():
    assert cs.make_pattern("S_u", 3) == "000"
    assert cs.make_pattern("S_k", 10, 4) == "1111011110"
    assert cs.make_pattern("S_k", 6, 1) == "101010"


def test_run_sequence_all_um(thermal, params):
    trace = cs.run_sequence(thermal, cs.make_pattern("S_u", 16), params)
    last = trace["steps"][-1]
    assert last["Pg"] == 1.0
    assert math.isclose(last["nbar"], 3.36462635, rel_tol=1e-6)
    assert math.isclose(last["F"], 0.78097270, rel_tol=1e-6)
    # fidelity is non-decreasing along the trace
    fids = [s["F"] for s in trace["steps"]]
    assert all(b >= a for a, b in zip(fids, fids[1:]))


def test_plan_and_replay(thermal, params):
    taus = cs.plan_intervals(thermal, "10110011", params)
    assert len(taus) == 8
    trace = cs.run_sequence(thermal, "10110011", params)
    assert [s["tau"] for s in trace["steps"]] == taus


def test_exhaustive_small(thermal, params):
    report = cs.exhaustive_best(thermal, 6, params, top_k=3)
    assert report["evaluations"] == 64
    greedy = cs.greedy_baseline(thermal, 6, params)
    assert greedy["best_C"] <= report["best_C"]


def test_cooperative_performance():
    assert math.isclose(cs.cooperative_performance(10.0, 1.0, 1.0, 1.0), 1.0)


def test_errors(params):
    with pytest.raises(ValueError):
        cs.ThermalSpec.from_x(-1.0)
    with pytest.raises(ValueError):
        cs.run_sequence(cs.PopulationState([1.0], 1.0), "00", params)
    with pytest.raises(RuntimeError):
        # resonant pure |1> annihilates under a quarter-revival CM
        resonant = cs.ModelParams(g=0.04, delta=0.0, omega_a=1.4e9)
        cs.apply_cm(cs.PopulationState([0.0, 1.0], 1.0), math.pi / 0.08, resonant)


def test_training_round_trip(tmp_path, params):
    hyper = cs.PpoHyper()
    hyper.obs_dim = 16
    hyper.hidden = 8
    hyper.episodes_per_batch = 6
    hyper.max_iterations = 4
    hyper.patience = 100
    policy_path = str(tmp_path / "policy.txt")
    result = cs.train(0.1, params, 8, hyper, seed=7, policy_path=policy_path)
    assert len(result["best_sequence"]) == 8
    thermal = cs.thermal_populations(cs.ThermalSpec.from_temperature(0.1, params.omega_a))
    seq, taus = cs.generate_sequence(policy_path, thermal, params, 8)
    assert len(seq) == 8 and len(taus) == 8
    replay = cs.run_sequence(thermal, seq, params)
    assert [s["tau"] for s in replay["steps"]] == taus
