import random

import pytest

from helpers import random_full_target, random_map, random_operator
from pshift.core import PseudoShift, SparseVector, apply_power, p_norm, weighted_shift
from pshift.corrector import (
    build_corrector,
    disjoint_blocks,
    perturb_nonzero,
    verify_bounds,
)
from pshift.gallery import example_maps, example_weights
from pshift.shiftmaps import affine
from pshift.weights import constant


def test_disjoint_blocks_identical_maps():
    d = disjoint_blocks([affine(1), affine(1)], 3, 2)
    assert d.blocks == ((4, 5), ())


def test_disjoint_blocks_doubling_maps():
    f1, f2 = example_maps()
    d = disjoint_blocks([f1, f2], 2, 2)
    # f_1^2([2]) = {8, 10}; f_2^2([2]) = {4, 8}, so 8 belongs to the first block
    assert d.blocks[0] == (8, 10)
    assert d.blocks[1] == (4,)


def test_disjoint_blocks_reconstruction():
    rng = random.Random(3)
    for _ in range(50):
        fs = [random_map(rng) for _ in range(rng.choice([2, 3]))]
        n, M = rng.randint(1, 6), rng.randint(1, 5)
        d = disjoint_blocks(fs, n, M)
        seen = set()
        for f, block in zip(fs, d.blocks):
            img = set(f.image_prefix(n, M))
            assert set(block) == img - seen
            assert not (set(block) & seen)
            seen |= img
        assert d.union == seen


def _random_instance(rng):
    N = rng.choice([2, 3])
    M = rng.randint(1, 5)
    n = rng.randint(1, 8)
    Ts = [random_operator(rng) for _ in range(N)]
    targets = [random_full_target(rng, M) for _ in range(N)]
    return Ts, n, M, targets


def test_bounds_hold_on_random_instances():
    rng = random.Random(101)
    for _ in range(80):
        Ts, n, M, targets = _random_instance(rng)
        z, cert = build_corrector(Ts, n, M, targets)
        assert verify_bounds(Ts, n, z, targets, cert).passed


def test_exactness_on_own_block():
    rng = random.Random(103)
    for _ in range(40):
        Ts, n, M, targets = _random_instance(rng)
        z, _ = build_corrector(Ts, n, M, targets)
        blocks = disjoint_blocks([T.f for T in Ts], n, M)
        for T, block, target in zip(Ts, blocks.blocks, targets):
            pulled = apply_power(T, n, z)
            for j in block:
                m = T.f.inverse_iterate(n, j)
                assert pulled[m] == pytest.approx(target[m], rel=1e-12)


def test_identical_operator_degeneration():
    T = weighted_shift(constant(2.0))
    target = SparseVector({1: 1.0, 2: -0.5})
    z, cert = build_corrector([T, T], 4, 2, [target, target])
    # second block is empty, so T^n z hits the target exactly
    for Ti in (T, T):
        out = apply_power(Ti, 4, z)
        assert out.support == target.support
        for m in target.support:
            assert out[m] == pytest.approx(target[m], rel=1e-12)
    assert cert.error_bounds[1] == pytest.approx(0.0, abs=1e-12)


def test_certificate_witnesses_serialize():
    rng = random.Random(107)
    Ts, n, M, targets = _random_instance(rng)
    z, cert = build_corrector(Ts, n, M, targets)
    doc = cert.as_dict()
    assert doc["M"] == M and doc["n"] == n and doc["N"] == len(Ts)
    assert doc["z_witness"] is not None
    assert len(doc["error_bounds"]) == len(Ts)


def test_target_validation():
    T = weighted_shift(constant(2.0))
    with pytest.raises(ValueError):
        build_corrector([T, T], 3, 2, [SparseVector({1: 1.0}), SparseVector({1: 1.0, 2: 1.0})])
    with pytest.raises(ValueError):
        build_corrector([T, T], 3, 2, [SparseVector({3: 1.0})] * 2)
    with pytest.raises(ValueError):
        build_corrector([T], 3, 1, [SparseVector({1: 1.0})])


def test_forced_violations_reported_not_raised():
    T1 = weighted_shift(constant(2.0))
    T2 = PseudoShift(affine(2), constant(2.0))
    targets = [SparseVector({1: 1.0, 2: 1.0})] * 2
    z, cert = build_corrector([T1, T2], 4, 2, targets)
    bad_z = z.add(SparseVector({50: 1.0}))
    report = verify_bounds([T1, T2], 4, bad_z, targets, cert)
    assert not report.passed
    assert not report.checks[0].passed  # the z-norm check
    scaled = [t.scale(10.0) for t in targets]
    stale = verify_bounds([T1, T2], 4, z, scaled, cert)
    assert not stale.passed


def test_perturb_nonzero():
    x = SparseVector.basis(2)
    out = perturb_nonzero(x, 3, 0.3)
    assert all(out[m] != 0 for m in range(1, 4))
    assert out[2] == 1.0
    assert p_norm(out.sub(x), 2.0) < 0.3

    full = SparseVector({1: 1.0, 2: 2.0})
    assert perturb_nonzero(full, 2, 0.1).entries == full.entries

    tiny = perturb_nonzero(SparseVector(), 1, 0.1)
    assert tiny.support == [1] and abs(tiny[1]) < 0.1

    with pytest.raises(ValueError):
        perturb_nonzero(x, 3, 0.0)
    with pytest.raises(ValueError):
        perturb_nonzero(SparseVector.basis(9), 3, 0.1)
