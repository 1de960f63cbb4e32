import json
import math
import os
import subprocess

import pytest

import speedscale

ONE_JOB = {"alpha": 2, "processors": 1, "jobs": [{"id": 1, "release": 0, "deadline": 2, "work": 4}]}


def test_version():
    assert speedscale.__version__.count(".") == 2


def test_preemptive_optimum():
    assert speedscale.yds(ONE_JOB)["energy"] == pytest.approx(8.0)
    two = {"alpha": 2, "jobs": [{"id": 1, "release": 0, "deadline": 1, "work": 2}, {"id": 2, "release": 0, "deadline": 2, "work": 1}]}
    r = speedscale.yds(two)
    assert r["energy"] == pytest.approx(5.0)
    assert r["level_speeds"] == [2, 1]


def test_single_job_rounding_factor():
    r = speedscale.solve(ONE_JOB)
    assert r["energy"] / r["lp_value"] == pytest.approx(6.0)
    assert speedscale.validate(ONE_JOB, r["schedule"]) == []


def test_random_instances_round_within_bound():
    for seed in range(1, 6):
        inst = speedscale.generate_random(4, seed=seed)
        r = speedscale.solve(inst)
        assert speedscale.validate(inst, r["schedule"]) == []
        assert r["energy"] <= 12 ** (inst["alpha"] - 1) * r["lp_value"] * (1 + 1e-9)
        assert r["energy"] >= speedscale.yds(inst)["energy"] * (1 - 1e-9)


def test_several_processors():
    inst = speedscale.generate_random(6, m=2, seed=4)
    for strategy in ("lp", "greedy"):
        r = speedscale.solve(inst, strategy=strategy)
        assert speedscale.validate(inst, r["schedule"]) == []
        assert len(r["schedule"]["assignments"]) == 6


@pytest.mark.parametrize("seed", [1, 2, 3])
@pytest.mark.parametrize("non_preemption", [False, True])
def test_relaxation_matches_scipy(seed, non_preemption):
    scipy_optimize = pytest.importorskip("scipy.optimize")
    inst = speedscale.generate_random(3, seed=seed)
    cells = 2
    model = speedscale.export_lp1(inst, cells, non_preemption)
    n = len(model["objective"])
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for row in model["rows"]:
        dense = [0.0] * n
        for var, coeff in row["terms"]:
            dense[var] += coeff
        if row["relation"] == "<=":
            a_ub.append(dense)
            b_ub.append(row["rhs"])
        elif row["relation"] == ">=":
            a_ub.append([-c for c in dense])
            b_ub.append(-row["rhs"])
        else:
            a_eq.append(dense)
            b_eq.append(row["rhs"])
    ref = scipy_optimize.linprog(
        model["objective"],
        A_ub=a_ub or None,
        b_ub=b_ub or None,
        A_eq=a_eq or None,
        b_eq=b_eq or None,
        bounds=[(lo, None) for lo in model["lower"]],
        method="highs",
    )
    if ref.status == 2:
        with pytest.raises(speedscale.InfeasibleError):
            speedscale.solve_lp1(inst, non_preemption=non_preemption, cells=cells)
        return
    assert ref.status == 0
    ours = speedscale.solve_lp1(inst, non_preemption=non_preemption, cells=cells)
    assert ours["value"] == pytest.approx(ref.fun * model["cost_scale"], rel=1e-6)


def test_gap_family_with_non_preemption_rows():
    gap = speedscale.generate_gap_family(2)
    assert len(gap["jobs"]) == 3
    assert speedscale.solve_lp1(gap, cells=2)["value"] == pytest.approx(8.0, rel=1e-7)
    assert speedscale.solve_lp1(gap, non_preemption=False, cells=2)["value"] < 8.0 - 1e-3
    assert speedscale.brute_force(gap, cells=2)["energy"] == pytest.approx(8.0)


def test_constants():
    assert speedscale.generalized_bell(3.0) == pytest.approx(2.0, abs=1e-9)
    assert speedscale.generalized_bell(4.0) == pytest.approx(5.0, abs=1e-9)
    assert speedscale.gap_beta(2.0) == pytest.approx(2.0)
    assert speedscale.gap_beta(3.0) == pytest.approx(2.0 / 3.0)


def test_reduction():
    reduced = speedscale.reduce_three_dm({"q": 1, "triples": [["a", "b", "c"]]})
    assert len(reduced["processors"]) == 3
    assert len(reduced["jobs"]) == 5
    assert speedscale.brute_force(reduced, cells=3)["energy"] == pytest.approx(9.0)


def test_errors():
    with pytest.raises(speedscale.ParseError):
        speedscale.yds({"alpha": 2, "jobs": [{"id": 1, "release": 3, "deadline": 1, "work": 1}]})
    with pytest.raises(ValueError):
        speedscale.yds("not json")
    crowded = {"alpha": 2, "jobs": [{"id": k, "release": 0, "deadline": 1, "work": 1} for k in (1, 2)]}
    with pytest.raises(speedscale.InfeasibleError):
        speedscale.brute_force(crowded, cells=1)
    with pytest.raises(speedscale.SizeLimitError):
        speedscale.brute_force(speedscale.generate_gap_family(8), cells=2, cap=100)


def test_agrees_with_command_line(tmp_path):
    cli = os.environ.get("SPEEDSCALE_CLI")
    if not cli:
        pytest.skip("SPEEDSCALE_CLI is not set")
    inst = speedscale.generate_random(5, seed=8)
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(inst))
    out = subprocess.run([cli, "oracle", "yds", "-i", str(path)], check=True, capture_output=True, text=True).stdout
    energy = json.loads(out)["report"]["stages"]["yds_energy"]
    assert math.isclose(energy, speedscale.yds(inst)["energy"], rel_tol=1e-12)
