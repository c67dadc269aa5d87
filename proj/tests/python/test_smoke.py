import json

import pytest

import fireline


@pytest.fixture(scope="module")
def tiny():
    return fireline.generate_instance(seed=1, crews=2, fires=1, horizon=5)


def test_generate_is_deterministic(tiny):
    assert tiny == fireline.generate_instance(seed=1, crews=2, fires=1, horizon=5)
    doc = json.loads(tiny)
    assert len(doc["crews"]) == 2
    assert len(doc["fires"]) == 1
    assert fireline.validate_instance(tiny) == []


def test_solve_matches_oracle(tiny):
    sol = fireline.solve(tiny, time_limit=30)
    assert sol["status"] == "optimal"
    assert sol["gap"] == 0.0
    assert sol["objective"] == pytest.approx(fireline.brute_force_optimum(tiny), abs=1e-6)
    assert sum(f["cost"] for f in sol["fires"]) == pytest.approx(sol["objective"], abs=1e-6)


def test_solve_accepts_dict(tiny):
    a = fireline.solve(json.loads(tiny), cut_mode="none", branch_rule="mf")
    b = fireline.solve(tiny)
    assert a["objective"] == pytest.approx(b["objective"], abs=1e-6)


def test_simulate_and_summary(tiny):
    none = fireline.simulate(tiny, "none")
    assert none["log"] == []
    impact = fireline.simulate(tiny, "impact")
    assert impact["total_burned"] <= none["total_burned"] + 1e-9
    opt = fireline.solve(tiny)["objective"]
    csv = fireline.evaluate_all(tiny, optimized_burned=opt, seeds=[1, 2])
    lines = csv.strip().splitlines()
    assert lines[0] == "method,acres_saved,pct_saved,multiplier"
    assert lines[1].startswith("optimization,")
    assert len(lines) == 6


def test_grid():
    assert fireline.area_grid_size() == 51031
    assert fireline.snap_to_grid(0.0) == 0.0


def test_errors(tiny):
    with pytest.raises(fireline.InputError):
        fireline.generate_instance(seed=1, crews=0, fires=1, horizon=5)
    with pytest.raises(fireline.InputError):
        fireline.solve(tiny, branch_rule="best")
    with pytest.raises(fireline.InputError):
        fireline.simulate(tiny, "teleport")
    big = fireline.generate_instance(seed=3, crews=10, fires=5, horizon=10)
    with pytest.raises(fireline.GuardError):
        fireline.brute_force_optimum(big)
    assert issubclass(fireline.GuardError, fireline.FirelineError)
