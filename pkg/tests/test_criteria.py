import math
import random

import pytest

from helpers import random_shift_tuple
from pshift.core import (
    PseudoShift,
    power_as_pseudoshift,
    weight_product,
    weighted_shift,
)
from pshift.criteria import (
    EXHAUSTED,
    REFUTED,
    VERIFIED,
    check_dcriterion_condition,
    check_dhc_condition_b,
    check_divergence,
    check_hereditary_powers,
    check_scriterion_condition,
    check_shc_condition_b,
    check_weighted_s_ratio,
    replay_certificate,
    salas_direct_sum,
    structural_dcriterion_blocker,
    weighted_shift_alpha,
)
from pshift.gallery import counterexample_operators, example_maps
from pshift.shiftmaps import affine
from pshift.weights import constant, table


def test_divergence_constant_weights():
    nks = list(range(1, 21))
    assert check_divergence(weighted_shift(constant(2.0)), 1, nks, 1e3).verdict == VERIFIED
    assert check_divergence(weighted_shift(constant(1.0)), 1, nks, 1e3).verdict == REFUTED
    assert check_divergence(weighted_shift(constant(0.5)), 1, nks, 1e3).verdict == REFUTED


def test_divergence_needs_final_running_max():
    # large early, collapsing later: the final value is not the running max
    w = table({m: 0.25 for m in range(30, 40)}, 4.0)
    cert = check_divergence(weighted_shift(w), 1, list(range(1, 40)), 1.5)
    assert cert.verdict == REFUTED


def test_dcrit_refutes_shared_affine_maps():
    Ts = [weighted_shift(constant(2.0)), weighted_shift(constant(3.0))]
    for M in range(1, 5):
        cert = check_dcriterion_condition(Ts, 0.5, 1, M, nks=None, k_bound=6)
        assert cert.verdict == REFUTED
        for b in cert.blockers:
            assert b.kind == "overlap-nonempty"
            assert b.extra["overlap"] == list(range(b.n + 1, b.n + M + 1))
    assert structural_dcriterion_blocker(Ts) is not None


def test_dcrit_verifies_distinct_offsets():
    # affine(1) vs affine(2): image-image overlap {1+2n} n {1+n} is empty for
    # n >= 1, and the faster weight growth of the second operator drives the
    # remaining tail cross ratio (1/2)^n under epsilon
    Ts = [weighted_shift(constant(2.0)), PseudoShift(affine(2), constant(4.0))]
    cert = check_dcriterion_condition(Ts, 0.5, 1, 1, nks=None, k_bound=8)
    assert cert.verdict == VERIFIED
    assert structural_dcriterion_blocker(Ts) is None


def test_dcrit_refutes_doubling_pair_overlap():
    f1, f2 = example_maps()
    Ts = [PseudoShift(f1, constant(2.0)), PseudoShift(f2, constant(2.0))]
    for n in range(2, 6):
        cert = check_dcriterion_condition(Ts, 0.5, 1, 2, nks=[n], k_bound=1)
        assert cert.verdict == REFUTED
        assert 2 ** (n + 1) in cert.blockers[0].extra["overlap"]


def test_scrit_identical_weights_verify():
    T = weighted_shift(constant(2.0))
    cert = check_scriterion_condition([T, T], 1e-6, 1, 4, nks=None, k_bound=3)
    assert cert.verdict == VERIFIED and cert.witness_k == 1


def test_counterexample_gap():
    Ts = counterexample_operators(2.0, 3.0)
    refuted = check_weighted_s_ratio(Ts, 0.3, 1, 1, nks=None, k_bound=6)
    assert refuted.verdict == REFUTED
    assert all(abs(b.value - 1.0 / 3.0) < 1e-12 for b in refuted.blockers)
    verified = check_weighted_s_ratio(Ts, 0.4, 1, 1, nks=None, k_bound=6)
    assert verified.verdict == VERIFIED


def test_s_ratio_rejects_non_shift_maps():
    Ts = [weighted_shift(constant(2.0)), PseudoShift(affine(2), constant(2.0))]
    with pytest.raises(ValueError):
        check_weighted_s_ratio(Ts, 0.5, 1, 1)
    with pytest.raises(ValueError):
        salas_direct_sum(Ts, 10)
    with pytest.raises(ValueError):
        weighted_shift_alpha(Ts, 2, 1, 3)


def test_s_ratio_prefix_difference_telescopes():
    # weights differ only below index 3: the ratio freezes once n >= 2
    T1 = weighted_shift(table({2: 1.8}, 2.0))
    T2 = weighted_shift(constant(2.0))
    cert = check_weighted_s_ratio([T1, T2], 0.15, 3, 1, nks=None, k_bound=8)
    assert cert.verdict == VERIFIED  # frozen ratio 0.9, gap 0.1 < 0.15
    cert2 = check_weighted_s_ratio([T1, T2], 0.05, 3, 1, nks=None, k_bound=8)
    assert cert2.verdict == REFUTED


def test_exhausted_verdict():
    Ts = counterexample_operators(2.0, 3.0)
    cert = check_weighted_s_ratio(Ts, 0.3, 1, 1, nks=[2, 5], k_bound=6)
    assert cert.verdict == EXHAUSTED
    assert cert.details["exhausted_at_k"] == 3


def test_family_validation():
    Ts = [weighted_shift(constant(2.0))] * 2
    with pytest.raises(ValueError):
        check_dhc_condition_b(Ts, 0.5, 1, 2, [[1.0, 2.0]])  # one row missing
    with pytest.raises(ValueError):
        check_dhc_condition_b(Ts, 0.5, 1, 2, [[1.0, 0.0], [1.0, 1.0]])
    with pytest.raises(ValueError):
        check_shc_condition_b(Ts, 0.0, 1, 1, [1.0])
    with pytest.raises(ValueError):
        check_scriterion_condition(Ts, 0.5, 3, 1, k_bound=2)


def test_dhc_vacuous_threshold():
    Ts = [weighted_shift(constant(2.0)), weighted_shift(constant(3.0))]
    family = [[1.0, 1.0], [1.0, 1.0]]
    cert = check_dhc_condition_b(Ts, 1e9, 1, 2, family, nks=None, k_bound=4)
    assert cert.verdict == VERIFIED and cert.witness_k == 1


def test_dhc_counterexample_family_ratio_one():
    Ts = counterexample_operators(2.0, 3.0)
    family = [[1.0], [1.0]]
    cert = check_dhc_condition_b(Ts, 0.3, 1, 1, family, nks=None, k_bound=6)
    assert cert.verdict == REFUTED
    assert any(abs(b.value - 1.0 / 3.0) < 1e-12 for b in cert.blockers)


def test_salas_statistics():
    Ts = counterexample_operators(2.0, 3.0)
    rep = salas_direct_sum(Ts, 40)
    assert rep["diverging"]
    assert rep["statistic_log"] == pytest.approx(40 * math.log(2.0), rel=1e-12)

    flat = salas_direct_sum([weighted_shift(constant(1.0))] * 2, 40)
    assert not flat["diverging"] and flat["statistic_log"] == 0.0

    # alternating 2, 1/2 keeps the minimum bounded against a constant-2 shift
    alt = weighted_shift(table({m: (2.0 if m % 2 == 0 else 0.5) for m in range(2, 60)}, 1.0))
    rep2 = salas_direct_sum([alt, weighted_shift(constant(2.0))], 40)
    assert not rep2["diverging"]


def test_weighted_shift_alpha_identity():
    Ts = counterexample_operators(2.0, 3.0)
    for n in range(1, 8):
        a = weighted_shift_alpha(Ts, 2, 1, n)
        lhs = weight_product(Ts[1], 1, n)
        rhs = a * weight_product(Ts[0], 1, n)
        assert lhs.logabs == pytest.approx(rhs.logabs, abs=1e-9)
        # the ratio telescopes to the initial disagreement
        assert a.real_value() == pytest.approx(3.0 / 2.0, rel=1e-12)


def test_hereditary_validation_and_anchor():
    with pytest.raises(ValueError):
        check_hereditary_powers([constant(2.0)] * 2, [2, 2], None, 0.5, 1)
    cert = check_hereditary_powers([constant(2.0)] * 2, [1, 2], None, 0.5, 1, k_bound=16)
    assert cert.verdict == VERIFIED
    assert min(cert.details["min_log_divergence_products"].values()) > math.log(1 / 0.5)


def test_specialization_agreement_random():
    rng = random.Random(42)
    for _ in range(40):
        Ts = random_shift_tuple(rng, rng.choice([2, 3]))
        eps = rng.uniform(0.05, 1.0)
        K, M = rng.randint(1, 3), rng.randint(1, 4)
        kb = rng.randint(K, 8)
        a = check_weighted_s_ratio(Ts, eps, K, M, None, kb)
        b = check_scriterion_condition(Ts, eps, K, M, None, kb)
        assert (a.verdict, a.witness_k) == (b.verdict, b.witness_k)


def test_hereditary_agreement_random():
    rng = random.Random(43)
    for _ in range(25):
        r1 = rng.randint(1, 2)
        r2 = rng.randint(r1 + 1, 3)
        Bs = [T.w for T in random_shift_tuple(rng, 2)]
        eps = rng.uniform(0.05, 1.0)
        M, kb = rng.randint(1, 4), rng.randint(1, 8)
        h = check_hereditary_powers(Bs, [r1, r2], None, eps, M, kb)
        d = check_dcriterion_condition(
            [power_as_pseudoshift(Bs[0], r1), power_as_pseudoshift(Bs[1], r2)],
            eps, 1, M, None, kb,
        )
        assert (h.verdict, h.witness_k) == (d.verdict, d.witness_k)


def test_monotone_in_eps():
    rng = random.Random(44)
    for _ in range(30):
        Ts = random_shift_tuple(rng, 2)
        eps = rng.uniform(0.05, 0.8)
        cert = check_scriterion_condition(Ts, eps, 1, 3, None, 8)
        if cert.verdict == VERIFIED:
            wider = check_scriterion_condition(Ts, eps * 2, 1, 3, None, 8)
            assert wider.verdict == VERIFIED
            assert wider.witness_k <= cert.witness_k


def test_certificate_replay():
    Ts = counterexample_operators(2.0, 3.0)
    certs = [
        check_weighted_s_ratio(Ts, 0.4, 1, 1, None, 6),
        check_scriterion_condition(Ts, 0.3, 1, 2, None, 6),
        check_dcriterion_condition(Ts, 0.5, 1, 2, None, 6),
        check_shc_condition_b(Ts, 0.4, 1, 1, [1.0], None, 6),
        check_divergence(Ts[0], 1, list(range(1, 21)), 1e3),
    ]
    for cert in certs:
        assert replay_certificate(cert, Ts if cert.condition_id != "dhc-a" else Ts[0]).as_dict() == cert.as_dict()
    h = check_hereditary_powers([T.w for T in Ts], [1, 2], None, 0.5, 2, 8)
    assert replay_certificate(h, [T.w for T in Ts]).as_dict() == h.as_dict()


def test_log_ratio_matches_direct_scalars():
    rng = random.Random(45)
    for _ in range(40):
        Ts = random_shift_tuple(rng, 2)
        n = rng.randint(1, 20)
        m = rng.randint(1, 5)
        ratio = weight_product(Ts[0], m, n) / weight_product(Ts[1], m, n)
        direct = 1.0
        for v in range(1, n + 1):
            direct *= Ts[0].w(m + v) / Ts[1].w(m + v)
        assert ratio.real_value() == pytest.approx(direct, rel=1e-9)
