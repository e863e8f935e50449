"""Named example instances: the doubling-map pseudo-shift pair, the
constant/ratio-gap counterexample pair, scalar multiples of the backward
shift, and a block construction of the underlying weight pair the
doubling example needs.

Every instance here is re-runnable through the generic checkers; the
closed-form weight products are kept alongside so tests can cross-check
them against the generic pull-back products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .core import COMPLEX, REAL, PseudoShift, weighted_shift
from .criteria import VERIFIED, check_divergence, salas_direct_sum
from .logscalar import LogScalar
from .shiftmaps import ShiftMap, example_a, example_b
from .weights import CONSTANT, TABLE, Scalar, WeightRule, constant, pow2_override, table


def example_maps() -> tuple[ShiftMap, ShiftMap]:
    """The doubling-map pair: f_1 sends 1 to 4, 2 to 5, m to 2m otherwise;
    f_2 doubles powers of two and sends every other m to 2m + 1."""
    return example_a(), example_b()


def _underlying_entries(rule: WeightRule) -> dict[int, Scalar]:
    if rule.kind == CONSTANT:
        return {}
    if rule.kind == TABLE:
        return dict(rule.overrides)
    raise ValueError("underlying weights must be constant or table rules")


def _underlying_default(rule: WeightRule) -> Scalar:
    return rule.value


def example_weights(
    underlying: Sequence[WeightRule], beta: float
) -> tuple[WeightRule, WeightRule]:
    """Lay a pair of underlying weight sequences onto the powers of two:
    w_m = w~_r when m = 2**r, w_m = beta otherwise.  The resulting rule
    bound is exactly beta, so the operator norms equal beta."""
    if beta <= 1:
        raise ValueError("beta must exceed 1")
    if len(underlying) != 2:
        raise ValueError("need exactly two underlying weight rules")
    out = []
    for i, u in enumerate(underlying, start=1):
        entries = _underlying_entries(u)
        tail = _underlying_default(u)
        for r, v in entries.items():
            if abs(v) > beta:
                raise ValueError(f"underlying weight {i} exceeds beta at r={r}")
        if abs(tail) > beta:
            raise ValueError(f"underlying weight {i} default exceeds beta")
        out.append(pow2_override(entries, base=beta, tail=tail))
    return out[0], out[1]


def example_operators(
    underlying: Sequence[WeightRule], beta: float, p: float = 2.0
) -> tuple[PseudoShift, PseudoShift]:
    w1, w2 = example_weights(underlying, beta)
    f1, f2 = example_maps()
    fld = REAL if (w1.is_real() and w2.is_real()) else COMPLEX
    return (
        PseudoShift(f1, w1, scalar_field=fld, p=p),
        PseudoShift(f2, w2, scalar_field=fld, p=p),
    )


def closed_form_W(
    which: int, m: int, n: int, underlying: Sequence[WeightRule], beta: float
) -> LogScalar:
    """Closed-form n-step weight product of the doubling pair.

    Operator 1: prod w~_{v+1} for m = 1; prod w~_{v+r} for m = 2**r with
    r >= 2; beta**n otherwise (the orbit of any other m, including m = 2,
    avoids the powers of two).  Operator 2: prod w~_{v+r} for m = 2**r
    with r >= 0; beta**n otherwise.
    """
    if which not in (1, 2):
        raise ValueError("operator selector must be 1 or 2")
    if m < 1 or n < 1:
        raise ValueError("need m >= 1 and n >= 1")
    u = underlying[which - 1]
    is_pow2 = m & (m - 1) == 0
    r = m.bit_length() - 1
    if which == 1:
        if m == 1:
            return LogScalar.product_of([u(v + 1) for v in range(1, n + 1)])
        if is_pow2 and r >= 2:
            return LogScalar.product_of([u(v + r) for v in range(1, n + 1)])
        return LogScalar.product_of([beta] * n)
    if is_pow2:
        return LogScalar.product_of([u(v + r) for v in range(1, n + 1)])
    return LogScalar.product_of([beta] * n)


@dataclass(frozen=True)
class ShcFailureWitness:
    """The overlap index whose preimages under the two maps disagree."""

    j: int
    preimages: tuple[int, int]
    overlap: tuple[int, ...]

    def as_dict(self) -> dict:
        return {
            "j": self.j,
            "overlap": list(self.overlap),
            "preimages": list(self.preimages),
        }


def shc_failure_witness(n: int, M: int) -> ShcFailureWitness:
    """j = 2**(n+1) lies in both n-step image prefixes but pulls back to 1
    under f_1 and to 2 under f_2, so no shared preimage row can exist."""
    if n < 2 or M < 2:
        raise ValueError("need n >= 2 and M >= 2")
    f1, f2 = example_maps()
    j = 2 ** (n + 1)
    assert f1.iterate(n, 1) == j and f2.iterate(n, 2) == j
    assert j in f1.image_prefix(n, M) and j in f2.image_prefix(n, M)
    r_M = M.bit_length() - 1  # 2**r_M <= M < 2**(r_M + 1)
    overlap = tuple(2 ** (n + s) for s in range(1, r_M + 1))
    return ShcFailureWitness(j=j, preimages=(1, 2), overlap=overlap)


# ---------------------------------------------------------------------------
# block construction of the underlying weight pair


def _default_targets(k_max: int) -> list[Scalar]:
    # small rationals walking both sides of 1
    pool = [2.0, 0.5, 3.0, 1.0 / 3.0, 1.5, 2.0 / 3.0]
    return [pool[(k - 1) % len(pool)] for k in range(1, k_max + 1)]


@dataclass(frozen=True)
class DhcPairConstruction:
    rule1: WeightRule
    rule2: WeightRule
    nks: tuple[int, ...]
    targets: tuple[Scalar, ...]
    beta: float
    report: dict = field(default_factory=dict)


def verify_dhc_weighted_pair(
    rule1: WeightRule,
    rule2: WeightRule,
    targets: Sequence[Scalar],
    nks: Sequence[int],
) -> dict:
    """Direct product evaluation of the three requirement families:
    at each k (with n = n_k and gamma = targets[k-1]):
      growth:  |prod_{v<=n} w~^(i)_{v+r}| > k for both i and all r <= k;
      steer:   the r = 1 ratio product is within 1/k of gamma, and its
               reciprocal within 1/k of 1/gamma;
      pin:     the r in [2, k] ratio products are within 1/k of 1.
    """
    failures: list[dict] = []
    for k, n in enumerate(nks, start=1):
        gamma = targets[k - 1]
        for r in range(1, k + 1):
            for i, rule in enumerate((rule1, rule2), start=1):
                g = sum(math.log(abs(rule(v + r))) for v in range(1, n + 1))
                if not g > math.log(k):
                    failures.append(
                        {"bound": float(k), "k": k, "r": r,
                         "requirement": f"growth-{i}", "value": math.exp(g)}
                    )
            ratio = LogScalar.one()
            for v in range(1, n + 1):
                ratio = ratio * LogScalar.from_value(rule1(v + r))
                ratio = ratio / LogScalar.from_value(rule2(v + r))
            if r == 1:
                gap = abs(ratio.value - gamma)
                rgap = abs(ratio.inverse().value - 1.0 / gamma)
                if not gap < 1.0 / k:
                    failures.append(
                        {"bound": 1.0 / k, "k": k, "r": 1,
                         "requirement": "steer", "value": gap}
                    )
                if not rgap < 1.0 / k:
                    failures.append(
                        {"bound": 1.0 / k, "k": k, "r": 1,
                         "requirement": "steer-reciprocal", "value": rgap}
                    )
            else:
                gap = abs(ratio.value - 1.0)
                if not gap < 1.0 / k:
                    failures.append(
                        {"bound": 1.0 / k, "k": k, "r": r,
                         "requirement": "pin", "value": gap}
                    )
    return {"failures": failures, "k_max": len(nks), "ok": not failures}


def construct_dhc_weighted_pair(
    beta: float,
    targets: Optional[Sequence[Scalar]] = None,
    k_max: int = 3,
) -> DhcPairConstruction:
    """Build two weight sequences, equal to beta except on short deviation
    blocks, whose r = 1 ratio window products hit each target gamma_k
    exactly at n = n_k while every r >= 2 window stays pinned at 1.

    Each block places the ratio deviation gamma_k at index n_k + 1 and its
    reciprocal at n_k + 2; a window [r+1, n_k+r] then contains either both
    deviations of an earlier block (canceling) or, for r = 1, exactly the
    k-th deviation.  Deviations are realized on whichever sequence keeps
    the modulus at most beta.  The returned construction is certified by
    verify_dhc_weighted_pair; a violated inequality raises.
    """
    if beta <= 1:
        raise ValueError("beta must exceed 1")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    gammas = list(targets) if targets is not None else _default_targets(k_max)
    if not gammas:
        raise ValueError("need at least one target")
    if any(g == 0 for g in gammas):
        raise ValueError("targets must be nonzero")
    gammas = [gammas[(k - 1) % len(gammas)] for k in range(1, k_max + 1)]

    # growth floor: beta**n_k times at most 2*k_max off-beta factors
    c0 = min(min(abs(g), 1.0 / abs(g), 1.0) for g in gammas)
    floor = (math.log(k_max) - 2 * k_max * math.log(c0)) / math.log(beta)
    n1 = max(k_max + 2, math.ceil(floor) + 1)
    nks = [n1 + (k - 1) * (k_max + 2) for k in range(1, k_max + 1)]

    w1: dict[int, Scalar] = {}
    w2: dict[int, Scalar] = {}
    for k, n in enumerate(nks, start=1):
        for pos, e in ((n + 1, gammas[k - 1]), (n + 2, 1.0 / gammas[k - 1])):
            if abs(e) <= 1.0:
                w1[pos] = beta * e
            else:
                w2[pos] = beta / e
    rule1 = table(w1, default=beta)
    rule2 = table(w2, default=beta)

    report = verify_dhc_weighted_pair(rule1, rule2, gammas, nks)
    if not report["ok"]:
        first = report["failures"][0]
        raise ValueError(
            f"construction failed requirement {first['requirement']} at "
            f"k={first['k']}, r={first['r']}: {first['value']} vs {first['bound']}"
        )
    return DhcPairConstruction(
        rule1=rule1, rule2=rule2, nks=tuple(nks), targets=tuple(gammas),
        beta=beta, report=report,
    )


# ---------------------------------------------------------------------------
# the constant / ratio-gap counterexample pair


def counterexample_operators(alpha: float, beta: float) -> tuple[PseudoShift, PseudoShift]:
    """Two weighted shifts whose direct sum is hypercyclic while every
    ratio window at m = 1 keeps the constant gap |alpha/beta - 1|."""
    if alpha <= 1 or beta <= 1:
        raise ValueError("alpha and beta must exceed 1")
    if alpha == beta:
        raise ValueError("alpha and beta must differ")
    T1 = weighted_shift(constant(alpha))
    T2 = weighted_shift(table({2: beta}, alpha))
    return T1, T2


def counterexample_direct_sum(alpha: float, beta: float, n_max: int = 100) -> dict:
    T1, T2 = counterexample_operators(alpha, beta)
    gap = abs(alpha / beta - 1.0)
    gaps = []
    for n in range(1, n_max + 1):
        ratio = LogScalar.one()
        for v in range(1, n + 1):
            ratio = ratio * LogScalar.from_value(T1.w(1 + v))
            ratio = ratio / LogScalar.from_value(T2.w(1 + v))
        gaps.append(abs(ratio.real_value() - 1.0))
    salas = salas_direct_sum([T1, T2], n_max)
    return {
        "alpha": alpha,
        "beta": beta,
        "gap": gap,
        "gap_constant": all(abs(g - gap) <= 1e-12 for g in gaps),
        "gaps": gaps,
        "n_max": n_max,
        "salas": salas,
    }


# ---------------------------------------------------------------------------
# scalar multiples of the backward shift


def rolewicz_operator(lam: Scalar) -> PseudoShift:
    if lam == 0:
        raise ValueError("the multiple must be nonzero")
    fld = REAL if (not isinstance(lam, complex) or lam.imag == 0.0) else COMPLEX
    return weighted_shift(constant(lam), scalar_field=fld)


def rolewicz(lam: Scalar, n_max: int = 64, threshold: float = 1e3) -> dict:
    """Divergence verdict for the scalar multiple lam of the backward
    shift: log|W_{1,n}| = n log|lam|, so the finite-surrogate verdict is
    "diverging" exactly when |lam| > 1 (for n_max past the threshold)."""
    T = rolewicz_operator(lam)
    cert = check_divergence(T, 1, list(range(1, n_max + 1)), threshold)
    return {
        "certificate": cert.as_dict(),
        "diverging": cert.verdict == VERIFIED,
        "lambda": [lam.real, lam.imag] if isinstance(lam, complex) else lam,
        "log_slope": math.log(abs(lam)),
        "n_max": n_max,
    }


@dataclass(frozen=True)
class ExampleInstance:
    """A packaged operator tuple with the verdicts it is expected to yield."""

    name: str
    operators: tuple[PseudoShift, ...]
    expected_verdicts: dict
    nks: Optional[tuple[int, ...]] = None
