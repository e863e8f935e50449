"""Bounded nonzero weight sequences, rule-based with overrides."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Mapping, Optional

CONSTANT = "constant"
POW2_OVERRIDE = "pow2-override"
TABLE = "table"
SHIFT_POWER = "shift-power"

Scalar = complex  # floats coerce implicitly


def _check_nonzero(v: Scalar, where: str) -> None:
    if v == 0:
        raise ValueError(f"zero weight in {where}")


@dataclass(frozen=True)
class WeightRule:
    """A rule m -> w_m with every w_m nonzero and sup|w_m| finite.

    kind:
      * ``constant``: w_m = value.
      * ``pow2-override``: w_m = overrides.get(r, tail) when m = 2**r,
        w_m = base otherwise (the worked-example weight layout).
      * ``table``: explicit finite overrides with a default.
      * ``shift-power``: window products w_{m-power+1} * ... * w_m of a base
        rule; this is the weight sequence of the power of a weighted
        backward shift written as a pseudo-shift.
    """

    kind: str
    value: Scalar = 1.0
    overrides: Mapping[int, Scalar] = field(default_factory=dict)
    tail: Scalar = 1.0
    base: Scalar = 1.0
    power: int = 1
    base_rule: Optional["WeightRule"] = None

    def __post_init__(self):
        if self.kind == CONSTANT:
            _check_nonzero(self.value, "constant rule")
        elif self.kind == POW2_OVERRIDE:
            for r, v in self.overrides.items():
                if r < 0:
                    raise ValueError("pow2 override exponents start at 0")
                _check_nonzero(v, f"pow2 override r={r}")
            _check_nonzero(self.tail, "pow2 tail")
            _check_nonzero(self.base, "pow2 base")
        elif self.kind == TABLE:
            for m, v in self.overrides.items():
                if m < 1:
                    raise ValueError("table indices start at 1")
                _check_nonzero(v, f"table entry m={m}")
            _check_nonzero(self.value, "table default")
        elif self.kind == SHIFT_POWER:
            if self.base_rule is None or self.power < 1:
                raise ValueError("shift-power needs a base rule and power >= 1")
        else:
            raise ValueError(f"unknown weight rule kind {self.kind!r}")

    def __call__(self, m: int) -> Scalar:
        if m < 1:
            raise ValueError("indices start at 1")
        if self.kind == CONSTANT:
            return self.value
        if self.kind == POW2_OVERRIDE:
            if m & (m - 1) == 0:
                r = m.bit_length() - 1
                return self.overrides.get(r, self.tail)
            return self.base
        if self.kind == TABLE:
            return self.overrides.get(m, self.value)
        # window product w_{m-power+1..m} of the base rule
        lo = m - self.power + 1
        if lo < 1:
            raise ValueError(f"shift-power weight undefined below index {self.power}")
        return reduce(lambda a, i: a * self.base_rule(i), range(lo, m + 1), 1.0)

    @property
    def bound(self) -> float:
        """sup_m |w_m| (an attained sup except for shift-power, where it is
        the upper bound base_bound**power)."""
        if self.kind == CONSTANT:
            return abs(self.value)
        if self.kind == POW2_OVERRIDE:
            vals = [abs(self.base), abs(self.tail)]
            vals += [abs(v) for v in self.overrides.values()]
            return max(vals)
        if self.kind == TABLE:
            return max([abs(self.value)] + [abs(v) for v in self.overrides.values()])
        return self.base_rule.bound**self.power

    def is_real(self) -> bool:
        def real(v: Scalar) -> bool:
            return not isinstance(v, complex) or v.imag == 0.0

        if self.kind == SHIFT_POWER:
            return self.base_rule.is_real()
        return (
            real(self.value)
            and real(self.tail)
            and real(self.base)
            and all(real(v) for v in self.overrides.values())
        )


def constant(value: Scalar) -> WeightRule:
    return WeightRule(CONSTANT, value=value)


def pow2_override(overrides: Mapping[int, Scalar], base: Scalar, tail: Scalar | None = None) -> WeightRule:
    if tail is None:
        tail = base
    return WeightRule(POW2_OVERRIDE, overrides=dict(overrides), base=base, tail=tail)


def table(entries: Mapping[int, Scalar], default: Scalar) -> WeightRule:
    return WeightRule(TABLE, overrides=dict(entries), value=default)


def shift_power(base_rule: WeightRule, power: int) -> WeightRule:
    return WeightRule(SHIFT_POWER, base_rule=base_rule, power=power)


def log_weight(rule: WeightRule, m: int) -> float:
    return math.log(abs(rule(m)))
