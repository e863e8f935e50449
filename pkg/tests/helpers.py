"""Shared random-instance generators for the test suite.

All generators take an explicit random.Random so every test controls its
own seed; weight magnitudes stay in [1/4, 4] and never hit zero.
"""

from __future__ import annotations

import random

from pshift.core import PseudoShift, SparseVector
from pshift.shiftmaps import ShiftMap, affine, example_a, example_b, table_plus_rule
from pshift.weights import WeightRule, constant, pow2_override, table


def random_map(rng: random.Random) -> ShiftMap:
    pick = rng.randrange(4)
    if pick == 0:
        return affine(rng.randint(1, 3))
    if pick == 1:
        return example_a()
    if pick == 2:
        return example_b()
    entries, cur = [], 1
    for _ in range(rng.randint(1, 6)):
        cur += rng.randint(1, 3)
        entries.append(cur)
    tail = rng.randint(1, 3)
    # the first off-table value len+1+tail must stay above the table end
    while len(entries) + 1 + tail <= entries[-1]:
        tail += 1
    return table_plus_rule(tuple(entries), tail)


def random_weight_value(rng: random.Random) -> float:
    return rng.choice([-1.0, 1.0]) * rng.uniform(0.25, 4.0)


def random_weight_rule(rng: random.Random) -> WeightRule:
    pick = rng.randrange(3)
    if pick == 0:
        return constant(random_weight_value(rng))
    if pick == 1:
        overrides = {r: random_weight_value(rng) for r in range(rng.randint(1, 4))}
        return pow2_override(overrides, random_weight_value(rng))
    entries = {rng.randint(1, 12): random_weight_value(rng) for _ in range(3)}
    return table(entries, random_weight_value(rng))


def random_operator(rng: random.Random) -> PseudoShift:
    return PseudoShift(random_map(rng), random_weight_rule(rng))


def random_rational(rng: random.Random) -> float:
    return rng.choice([-1.0, 1.0]) * rng.randint(1, 8) / rng.randint(1, 8)


def random_full_target(rng: random.Random, M: int) -> SparseVector:
    return SparseVector({m: random_rational(rng) for m in range(1, M + 1)})


def random_vector(rng: random.Random, max_index: int = 12) -> SparseVector:
    support = rng.sample(range(1, max_index + 1), rng.randint(1, 4))
    return SparseVector({m: random_rational(rng) for m in support})


def random_shift_tuple(rng: random.Random, N: int) -> list[PseudoShift]:
    """N weighted shifts (affine(1)) with positive weights near 2."""
    out = []
    for _ in range(N):
        entries = {rng.randint(1, 6): rng.uniform(0.5, 2.0) for _ in range(rng.randint(0, 3))}
        out.append(PseudoShift(affine(1), table(entries, rng.uniform(1.1, 2.5))))
    return out
