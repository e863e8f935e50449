"""Pseudo-shift operators acting on finitely supported vectors.

The operator pulls coordinate f(m) down to coordinate m with multiplier
w_{f(m)}; its n-th power sends e_j to W_{m,n} e_m where m is the n-fold
preimage of j and W_{m,n} is the product of the weights met along the
pull-back path.  Powers are applied directly through the preimage and
the log-domain weight product, never by composing n dense steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .logscalar import LogScalar
from .shiftmaps import AFFINE, ShiftMap, affine
from .weights import Scalar, WeightRule, shift_power

DEFAULT_TOL = 1e-12

REAL = "real"
COMPLEX = "complex"


@dataclass(frozen=True)
class SparseVector:
    """Finitely supported coordinate map index -> scalar (zeros dropped)."""

    entries: Mapping[int, Scalar] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {}
        for m, v in self.entries.items():
            if m < 1:
                raise ValueError("indices start at 1")
            if v != 0:
                cleaned[int(m)] = v
        object.__setattr__(self, "entries", cleaned)

    @classmethod
    def basis(cls, m: int, coeff: Scalar = 1.0) -> "SparseVector":
        return cls({m: coeff})

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[Scalar]) -> "SparseVector":
        return cls({m: a for m, a in enumerate(coeffs, start=1)})

    def __getitem__(self, m: int) -> Scalar:
        return self.entries.get(m, 0.0)

    @property
    def support(self) -> list[int]:
        return sorted(self.entries)

    @property
    def degree(self) -> int:
        return max(self.entries, default=0)

    def is_zero(self) -> bool:
        return not self.entries

    def add(self, other: "SparseVector") -> "SparseVector":
        out = dict(self.entries)
        for m, v in other.entries.items():
            out[m] = out.get(m, 0.0) + v
        return SparseVector(out)

    def sub(self, other: "SparseVector") -> "SparseVector":
        return self.add(other.scale(-1.0))

    def scale(self, c: Scalar) -> "SparseVector":
        return SparseVector({m: c * v for m, v in self.entries.items()})

    def truncate(self, d: int) -> "SparseVector":
        return SparseVector({m: v for m, v in self.entries.items() if m <= d})


def p_norm(x: SparseVector, p: float) -> float:
    """(sum |a_m|^p)^(1/p) over the support."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if x.is_zero():
        return 0.0
    if p == math.inf:
        return max(abs(v) for v in x.entries.values())
    return sum(abs(v) ** p for v in x.entries.values()) ** (1.0 / p)


@dataclass(frozen=True)
class PseudoShift:
    """Pairing of a shift map and a weight rule on l^p, over R or C."""

    f: ShiftMap
    w: WeightRule
    scalar_field: str = REAL
    p: float = 2.0

    def __post_init__(self):
        if self.scalar_field not in (REAL, COMPLEX):
            raise ValueError(f"unknown scalar field {self.scalar_field!r}")
        if self.scalar_field == REAL and not self.w.is_real():
            raise ValueError("complex weights under a real scalar field")
        if self.p < 1:
            raise ValueError("p must be >= 1")

    @property
    def operator_norm_bound(self) -> float:
        return self.w.bound

    def is_weighted_shift(self) -> bool:
        return self.f.kind == AFFINE and self.f.offset == 1


def weight_product(T: PseudoShift, m: int, n: int) -> LogScalar:
    """W_{m,n} = product over v=1..n of w_{f^v(m)}, in log form."""
    if n < 0:
        raise ValueError("n must be >= 0")
    ws = []
    j = m
    for _ in range(n):
        j = T.f.step(j)
        ws.append(T.w(j))
    return LogScalar.product_of(ws)


def apply(T: PseudoShift, x: SparseVector) -> SparseVector:
    """One application: coordinate m of the result is w_{f(m)} x_{f(m)}."""
    out: dict[int, Scalar] = {}
    for j, v in x.entries.items():
        m = T.f.step_inverse(j)
        if m is not None:
            out[m] = out.get(m, 0.0) + T.w(j) * v
    return SparseVector(out)


def apply_power(T: PseudoShift, n: int, x: SparseVector) -> SparseVector:
    """T^n x computed via n-fold preimages and log-domain weight products."""
    if n < 0:
        raise ValueError("n must be >= 0")
    out: dict[int, Scalar] = {}
    for j, v in x.entries.items():
        m = T.f.inverse_iterate(n, j)
        if m is None:
            continue
        W = weight_product(T, m, n)
        out[m] = out.get(m, 0.0) + _as_field(W.value * v, T.scalar_field)
    return SparseVector(out)


def _as_field(v: complex, field_name: str) -> Scalar:
    if field_name == REAL:
        return v.real if isinstance(v, complex) else v
    return v


def power_as_pseudoshift(weights: WeightRule, r: int, scalar_field: str = REAL, p: float = 2.0) -> PseudoShift:
    """Write the r-th power of the weighted backward shift with the given
    weights as a pseudo-shift: f(m) = m + r with window-product weights."""
    if r < 1:
        raise ValueError("power must be >= 1")
    rule = weights if r == 1 else shift_power(weights, r)
    return PseudoShift(affine(r), rule, scalar_field=scalar_field, p=p)


def weighted_shift(weights: WeightRule, scalar_field: str = REAL, p: float = 2.0) -> PseudoShift:
    """The unilateral weighted backward shift as a pseudo-shift."""
    return PseudoShift(affine(1), weights, scalar_field=scalar_field, p=p)
