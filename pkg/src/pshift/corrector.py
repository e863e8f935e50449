"""The corrector vector z and its certified bounds.

Given operators T_1..T_N, a power n, a degree M and target vectors
x_i = sum_{m<=M} a_m^(i) e_m with every a_m^(i) nonzero, the corrector
places a_m^(l) / W_{m,n}^(l) on block A_l of the n-step image indices so
that T_l^n pulls each block back onto its own target.  The certificate
carries the three right-hand sides that bound ||z|| and ||T_i^n z - x_i||,
together with the argmax witnesses that realized each bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .core import DEFAULT_TOL, PseudoShift, SparseVector, apply_power, p_norm, weight_product
from .logscalar import LogScalar
from .shiftmaps import ShiftMap


@dataclass(frozen=True)
class BlockDecomposition:
    """Disjoint blocks A_1 = f_1^n([M]), A_l = f_l^n([M]) minus earlier images."""

    blocks: tuple[tuple[int, ...], ...]
    n: int
    M: int

    @property
    def union(self) -> set[int]:
        out: set[int] = set()
        for b in self.blocks:
            out.update(b)
        return out


@dataclass(frozen=True)
class BoundWitness:
    """The (j, i, l) term that realized a certified max."""

    j: int
    i: int
    l: int
    value: float


@dataclass(frozen=True)
class BoundCertificate:
    z_norm_bound: float
    error_bounds: tuple[float, ...]
    gamma: float
    M: int
    n: int
    N: int
    z_witness: Optional[BoundWitness] = None
    error_witnesses: tuple[tuple[Optional[BoundWitness], ...], ...] = ()

    def as_dict(self) -> dict:
        def w(bw):
            return None if bw is None else {"j": bw.j, "i": bw.i, "l": bw.l, "value": bw.value}

        return {
            "M": self.M,
            "N": self.N,
            "error_bounds": list(self.error_bounds),
            "error_witnesses": [[w(x) for x in pair] for pair in self.error_witnesses],
            "gamma": self.gamma,
            "n": self.n,
            "z_norm_bound": self.z_norm_bound,
            "z_witness": w(self.z_witness),
        }


def disjoint_blocks(fs: Sequence[ShiftMap], n: int, M: int) -> BlockDecomposition:
    if len(fs) < 2:
        raise ValueError("need at least two maps")
    if n < 1 or M < 1:
        raise ValueError("n and M must be >= 1")
    seen: set[int] = set()
    blocks = []
    for f in fs:
        img = set(f.image_prefix(n, M))
        blocks.append(tuple(sorted(img - seen)))
        seen |= img
    return BlockDecomposition(tuple(blocks), n, M)


def _validate_targets(targets: Sequence[SparseVector], M: int) -> list[list[complex]]:
    coeffs = []
    for i, x in enumerate(targets, start=1):
        if x.degree > M:
            raise ValueError(f"target {i} has support beyond degree {M}")
        row = [x[m] for m in range(1, M + 1)]
        if any(a == 0 for a in row):
            raise ValueError(f"target {i} has a zero coefficient below degree {M}")
        coeffs.append(row)
    return coeffs


def build_corrector(
    Ts: Sequence[PseudoShift], n: int, M: int, targets: Sequence[SparseVector]
) -> tuple[SparseVector, BoundCertificate]:
    """Construct z and the certificate for ||z|| and ||T_i^n z - x_i||."""
    N = len(Ts)
    if N < 2:
        raise ValueError("need at least two operators")
    if len(targets) != N:
        raise ValueError("one target per operator")
    a = _validate_targets(targets, M)
    p = Ts[0].p
    gamma = max(p_norm(x, p) for x in targets)
    scale = M * N * gamma

    decomp = disjoint_blocks([T.f for T in Ts], n, M)

    # W^{(l)}_{m,n} for 1 <= l <= N, 1 <= m <= M, in log form
    W = [[weight_product(T, m, n) for m in range(1, M + 1)] for T in Ts]
    images = [T.f.image_prefix(n, M) for T in Ts]

    entries: dict[int, complex] = {}
    for l, block in enumerate(decomp.blocks):
        for j in block:
            m = Ts[l].f.inverse_iterate(n, j)
            entries[j] = (LogScalar.from_value(a[l][m - 1]) / W[l][m - 1]).value
    z = SparseVector(entries)

    # ||z|| bound: scale * max |W|^{-1}
    z_wit = None
    best = -math.inf
    for l in range(N):
        for m in range(M):
            v = -W[l][m].logabs
            if v > best:
                best = v
                z_wit = BoundWitness(j=m + 1, i=0, l=l + 1, value=math.exp(min(v, 700.0)))
    z_bound = scale * (math.exp(best) if best < 700.0 else math.inf)

    def cross_ratio(i: int, l: int, j: int) -> LogScalar:
        mi = Ts[i].f.inverse_iterate(n, j)
        ml = Ts[l].f.inverse_iterate(n, j)
        return weight_product(Ts[i], mi, n) / weight_product(Ts[l], ml, n)

    err_bounds: list[float] = []
    err_wits: list[tuple[Optional[BoundWitness], Optional[BoundWitness]]] = []
    for i in range(N):
        # overlap-with-tail term: j in f_l^n([M]) with an out-of-range preimage under f_i
        tail_max, tail_wit = 0.0, None
        for l in range(N):
            if l == i:
                continue
            for j in images[l]:
                if Ts[i].f.tail_membership(n, M, j):
                    v = cross_ratio(i, l, j).magnitude
                    if v > tail_max:
                        tail_max, tail_wit = v, BoundWitness(j, i + 1, l + 1, v)
        if i == 0:
            err_bounds.append(scale * tail_max)
            err_wits.append((None, tail_wit))
            continue
        # image-image term against earlier operators
        pair_max, pair_wit = 0.0, None
        for l in range(i):
            overlap = set(images[l]) & set(images[i])
            for j in sorted(overlap):
                mi = Ts[i].f.inverse_iterate(n, j)
                ml = Ts[l].f.inverse_iterate(n, j)
                target_ratio = a[i][mi - 1] / a[l][ml - 1]
                v = abs(cross_ratio(i, l, j).value - target_ratio)
                if v > pair_max:
                    pair_max, pair_wit = v, BoundWitness(j, i + 1, l + 1, v)
        err_bounds.append(scale * pair_max + scale * tail_max)
        err_wits.append((pair_wit, tail_wit))

    cert = BoundCertificate(
        z_norm_bound=z_bound,
        error_bounds=tuple(err_bounds),
        gamma=gamma,
        M=M,
        n=n,
        N=N,
        z_witness=z_wit,
        error_witnesses=tuple(err_wits),
    )
    return z, cert


@dataclass(frozen=True)
class BoundCheck:
    name: str
    actual: float
    bound: float
    passed: bool


@dataclass(frozen=True)
class BoundReport:
    checks: tuple[BoundCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "checks": [
                {"actual": c.actual, "bound": c.bound, "name": c.name, "passed": c.passed}
                for c in self.checks
            ],
            "passed": self.passed,
        }


def verify_bounds(
    Ts: Sequence[PseudoShift],
    n: int,
    z: SparseVector,
    targets: Sequence[SparseVector],
    cert: BoundCertificate,
    tol: float = DEFAULT_TOL,
) -> BoundReport:
    """Recompute ||z|| and ||T_i^n z - x_i|| directly and compare against
    the certified bounds.  Failures are report entries, not exceptions."""
    p = Ts[0].p
    checks = [
        BoundCheck(
            "z-norm",
            p_norm(z, p),
            cert.z_norm_bound,
            p_norm(z, p) <= cert.z_norm_bound + tol,
        )
    ]
    for i, (T, x) in enumerate(zip(Ts, targets), start=1):
        actual = p_norm(apply_power(T, n, z).sub(x), p)
        bound = cert.error_bounds[i - 1]
        checks.append(BoundCheck(f"error-{i}", actual, bound, actual <= bound + tol))
    return BoundReport(tuple(checks))


def perturb_nonzero(x: SparseVector, M: int, delta: float, p: float = 2.0) -> SparseVector:
    """Fill zero coefficients among the first M with delta/(2 M^(1/p)) so
    that the result has full nonzero support below M and ||x~ - x|| < delta."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    if x.degree > M:
        raise ValueError(f"support beyond degree {M}")
    fill = delta / (2.0 * M ** (1.0 / p))
    out = dict(x.entries)
    for m in range(1, M + 1):
        if out.get(m, 0.0) == 0:
            out[m] = fill
    return SparseVector(out)
