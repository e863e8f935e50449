import random

import pytest

from helpers import random_operator, random_vector
from pshift.core import PseudoShift, SparseVector, apply_power, p_norm, weighted_shift
from pshift.gallery import rolewicz_operator
from pshift.orbitlab import blowup_collapse_assemble, density_report, orbit
from pshift.shiftmaps import affine
from pshift.weights import constant


def test_orbit_matches_apply_power():
    rng = random.Random(51)
    for _ in range(30):
        T = random_operator(rng)
        x = random_vector(rng)
        n_max, d = rng.randint(0, 8), rng.randint(1, 6)
        rows = orbit(T, x, n_max, d)
        assert len(rows) == n_max + 1
        for n, row in enumerate(rows):
            y = apply_power(T, n, x)
            assert row == [y[m] for m in range(1, d + 1)]


def test_orbit_kernel_projection():
    T = rolewicz_operator(2.0)
    rows = orbit(T, SparseVector.basis(3), 5, 4)
    assert rows[0] == [0.0, 0.0, 1.0, 0.0]
    assert rows[2] == [4.0, 0.0, 0.0, 0.0]
    assert rows[3] == [0.0] * 4  # e_3 dies after three backward steps
    with pytest.raises(ValueError):
        orbit(T, SparseVector.basis(1), -1, 2)


def test_assembly_single_stage_exact():
    T = rolewicz_operator(2.0)
    target = SparseVector({1: 1.0, 2: -0.5})
    x, log = blowup_collapse_assemble([T], [target], [0.1])
    assert log.ok and log.finite_demo
    step = log.steps[0]
    assert step.distances[0] <= 1e-12  # single operator pulls back exactly
    out = apply_power(T, step.n, x)
    assert out[1] == pytest.approx(1.0, rel=1e-12)
    assert out[2] == pytest.approx(-0.5, rel=1e-12)


def test_assembly_multi_stage_invariants():
    T = rolewicz_operator(2.0)
    targets = [SparseVector.basis(1), SparseVector({1: 1.0, 2: 1.0}), SparseVector({1: 2.0})]
    eps = [0.1, 0.05, 0.01]
    x, log = blowup_collapse_assemble([T], targets, eps)
    assert log.ok and len(log.steps) == 3
    ns = [s.n for s in log.steps]
    assert ns == sorted(ns) and len(set(ns)) == 3
    for step, e, target in zip(log.steps, eps, targets):
        assert all(dist <= e for dist in step.distances)
        # each stage power exceeds the degree of earlier stage targets
        assert step.n > target.degree


def test_assembly_two_operators():
    # distinct offsets keep the pulled-back blocks disjoint, and the faster
    # weight growth of the second operator damps the cross interference
    Ts = [weighted_shift(constant(2.0)), PseudoShift(affine(2), constant(4.0))]
    targets = [SparseVector.basis(1), SparseVector({1: 1.0, 2: 1.0})]
    eps = [0.2, 0.1]
    x, log = blowup_collapse_assemble(Ts, targets, eps)
    assert log.ok
    for step, e, target in zip(log.steps, eps, targets):
        assert len(step.distances) == 2
        for T, dist in zip(Ts, step.distances):
            assert dist <= e
            direct = p_norm(
                apply_power(T, step.n, x).truncate(log.d).sub(target.truncate(log.d)),
                2.0,
            )
            assert direct == pytest.approx(dist, abs=1e-12)


def test_assembly_failure_reported():
    # unit weights cannot shrink the stage-2 corrector below the budget
    T = weighted_shift(constant(1.0))
    targets = [SparseVector.basis(1), SparseVector.basis(1)]
    x, log = blowup_collapse_assemble([T], targets, [0.1, 0.05], n_search_bound=32)
    assert not log.ok
    assert log.failure["stage"] == 2
    assert log.failure["n_search_bound"] == 32
    assert len(log.steps) == 1  # the completed first stage is still logged


def test_assembly_validation():
    T = rolewicz_operator(2.0)
    with pytest.raises(ValueError):
        blowup_collapse_assemble([T], [SparseVector.basis(1)], [0.1, 0.2])
    with pytest.raises(ValueError):
        blowup_collapse_assemble([T], [SparseVector.basis(1)], [0.0])
    with pytest.raises(ValueError):
        blowup_collapse_assemble([], [SparseVector.basis(1)], [0.1])


def test_visit_log_serialization():
    T = rolewicz_operator(2.0)
    _, log = blowup_collapse_assemble([T], [SparseVector.basis(1)], [0.1])
    doc = log.as_dict()
    assert doc["ok"] and doc["finite_demo"]
    assert doc["targets"] == [{1: 1.0}]
    assert doc["steps"][0]["stage"] == 1


def test_density_report():
    points = [[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]]
    targets = [SparseVector({1: 1.0}), SparseVector({2: 5.0})]
    rep = density_report(points, targets, 0.5, 2)
    assert rep["coverage"] == 0.5
    assert rep["per_target"][0] == {"best_distance": 0.0, "best_n": 1}
    assert rep["per_target"][1]["best_distance"] == pytest.approx(3.0)
    with pytest.raises(ValueError):
        density_report(points, targets, 0.5, 3)
    with pytest.raises(ValueError):
        density_report(points, targets, 0.0, 2)
    assert density_report(points, [], 0.5, 2)["coverage"] == 0.0
