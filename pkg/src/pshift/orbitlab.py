"""Finite orbit diagnostics and staged blow-up/collapse assembly.

The assembled vector is a finite sum of corrector outputs, one per
target: stage t picks a power n_t past the support of everything placed
so far (so the new operators' powers annihilate the earlier mass), and
the stage corrector must certify both the target error and a norm budget
that protects every earlier stage from forward interference.  The result
demonstrates the visiting mechanism at desk scale; it is not an actual
hypercyclic vector, and reports say so via the ``finite_demo`` flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .core import PseudoShift, SparseVector, apply_power, p_norm
from .corrector import build_corrector, perturb_nonzero
from .logscalar import LogScalar
from .weights import Scalar


def orbit(T: PseudoShift, x: SparseVector, n_max: int, d: int) -> list[list[Scalar]]:
    """First-d-coordinate projections of T^n x for 0 <= n <= n_max."""
    if n_max < 0 or d < 1:
        raise ValueError("need n_max >= 0 and d >= 1")
    out = []
    for n in range(n_max + 1):
        y = apply_power(T, n, x)
        out.append([y[m] for m in range(1, d + 1)])
    return out


def _projected_distance(x: SparseVector, y: SparseVector, d: int, p: float) -> float:
    return p_norm(x.truncate(d).sub(y.truncate(d)), p)


@dataclass(frozen=True)
class VisitStep:
    stage: int
    n: int
    eps: float
    z_norm: float
    distances: tuple[float, ...]  # per operator, measured on the assembled x

    def as_dict(self) -> dict:
        return {
            "distances": list(self.distances),
            "eps": self.eps,
            "n": self.n,
            "stage": self.stage,
            "z_norm": self.z_norm,
        }


@dataclass(frozen=True)
class VisitLog:
    steps: tuple[VisitStep, ...]
    targets: tuple[SparseVector, ...]
    d: int
    failure: Optional[dict] = None
    finite_demo: bool = True

    @property
    def ok(self) -> bool:
        return self.failure is None

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "failure": self.failure,
            "finite_demo": self.finite_demo,
            "ok": self.ok,
            "steps": [s.as_dict() for s in self.steps],
            "targets": [dict(sorted(t.entries.items())) for t in self.targets],
        }


def _single_operator_corrector(
    T: PseudoShift, n: int, M: int, target: SparseVector
) -> tuple[SparseVector, float, list[float]]:
    # exact pull-back: T^n z = target on the nose, so the error bound is 0
    entries: dict[int, Scalar] = {}
    for m, a in target.entries.items():
        W = LogScalar.one()
        j = m
        for _ in range(n):
            j = T.f.step(j)
            W = W * LogScalar.from_value(T.w(j))
        entries[T.f.iterate(n, m)] = (LogScalar.from_value(a) / W).value
    z = SparseVector(entries)
    return z, p_norm(z, T.p), [0.0]


def _stage_corrector(
    Ts: Sequence[PseudoShift], n: int, M: int, target: SparseVector, eps: float
) -> tuple[SparseVector, float, list[float]]:
    """(z, certified z-norm bound, certified per-operator error bounds)."""
    if len(Ts) == 1:
        return _single_operator_corrector(Ts[0], n, M, target)
    filled = perturb_nonzero(target, M, eps / 4.0, p=Ts[0].p)
    z, cert = build_corrector(Ts, n, M, [filled] * len(Ts))
    # the fill itself displaces the target by at most eps/4
    return z, cert.z_norm_bound, [b + eps / 4.0 for b in cert.error_bounds]


def blowup_collapse_assemble(
    Ts: Sequence[PseudoShift],
    targets: Sequence[SparseVector],
    eps_schedule: Sequence[float],
    n_search_bound: int = 256,
    d: Optional[int] = None,
) -> tuple[SparseVector, VisitLog]:
    """Accumulate x = sum of stage correctors so that T_i^{n_t} x lands
    within eps_t of target_t for every operator and stage.

    Stage t must certify error bounds at most eps_t / 2 and a z-norm at
    most min over earlier stages u of eps_u / (2^{t-u+1} ||T||^{n_u}), so
    the forward interference sum at stage u stays below eps_u / 2.  The
    search over n stops at n_search_bound; exhaustion is reported in the
    log, not raised.
    """
    if len(targets) != len(eps_schedule):
        raise ValueError("one epsilon per target")
    if any(e <= 0 for e in eps_schedule):
        raise ValueError("epsilons must be positive")
    if any(b < a for a, b in zip(eps_schedule, eps_schedule[1:])):
        pass  # non-increasing is conventional but not required
    if not Ts:
        raise ValueError("need at least one operator")
    proj = d if d is not None else max([t.degree for t in targets] + [1])
    op_norm = max(T.operator_norm_bound for T in Ts)
    p = Ts[0].p

    placed: list[tuple[int, SparseVector]] = []  # (n_t, z_t)
    x = SparseVector()
    failure = None
    for t, (target, eps) in enumerate(zip(targets, eps_schedule), start=1):
        M = max(target.degree, 1)
        budget = math.inf
        for u, (n_u, _) in enumerate(placed, start=1):
            share = eps_schedule[u - 1] / (2.0 ** (t - u + 1) * op_norm**n_u)
            budget = min(budget, share)
        found = False
        n = max(x.degree, M) + 1
        while n <= n_search_bound:
            z, z_bound, err_bounds = _stage_corrector(Ts, n, M, target, eps)
            if z_bound <= budget and all(b <= eps / 2.0 for b in err_bounds):
                placed.append((n, z))
                x = x.add(z)
                found = True
                break
            n += 1
        if not found:
            failure = {
                "budget": budget,
                "eps": eps,
                "n_search_bound": n_search_bound,
                "reason": "no power within the search bound certifies the stage bounds",
                "stage": t,
            }
            break

    steps = []
    for t, (n_t, z_t) in enumerate(placed, start=1):
        dists = tuple(
            _projected_distance(apply_power(T, n_t, x), targets[t - 1], proj, p)
            for T in Ts
        )
        steps.append(
            VisitStep(
                stage=t, n=n_t, eps=eps_schedule[t - 1],
                z_norm=p_norm(z_t, p), distances=dists,
            )
        )
    log = VisitLog(
        steps=tuple(steps), targets=tuple(targets), d=proj, failure=failure
    )
    return x, log


def density_report(
    points: Sequence[Sequence[Scalar]],
    targets: Sequence[SparseVector],
    eps: float,
    d: int,
    p: float = 2.0,
) -> dict:
    """Fraction of targets with some orbit point within eps in projected
    p-norm, plus the best distance and best step index per target."""
    if eps <= 0 or d < 1:
        raise ValueError("need eps > 0 and d >= 1")
    for pt in points:
        if len(pt) != d:
            raise ValueError("projection dimension mismatch")
    per_target = []
    hits = 0
    for target in targets:
        best, best_n = math.inf, None
        tvec = [target[m] for m in range(1, d + 1)]
        for n, pt in enumerate(points):
            diff = SparseVector(
                {m + 1: pt[m] - tvec[m] for m in range(d) if pt[m] != tvec[m]}
            )
            dist = p_norm(diff, p)
            if dist < best:
                best, best_n = dist, n
        if best <= eps:
            hits += 1
        per_target.append({"best_distance": best, "best_n": best_n})
    coverage = hits / len(targets) if targets else 0.0
    return {"coverage": coverage, "eps": eps, "per_target": per_target}
