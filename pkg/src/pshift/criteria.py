"""Finite-witness checkers for the hypercyclicity criterion conditions.

The full conditions quantify over all epsilon, K, M and all scalar families;
a checker verifies one user-supplied finite instance over a bounded
search of the index k and returns a certificate stating exactly what was
checked: the parameters, a witness k on success, or the blocking term
for every failed k.  The sequence (n_k) is an input (pass None to scan
n_k = k).  Strict inequalities are evaluated as "< epsilon - tol" so a
verdict does not flap on the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .core import DEFAULT_TOL, PseudoShift, weight_product
from .logscalar import LogScalar
from .shiftmaps import maps_agree
from .weights import WeightRule

DHC_A = "dhc-a"
DHC_B = "dhc-b"
DCRIT_B = "dcrit-b"
SHC_B = "shc-b"
SCRIT_B = "scrit-b"
HEREDITARY = "hereditary"
SALAS = "salas"
S_RATIO = "s-ratio"

VERIFIED = "verified"
REFUTED = "refuted"
EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class Blocker:
    """The first term that broke a condition at index k."""

    k: int
    n: int
    kind: str  # cross-ratio | ratio-target | overlap-nonempty | preimage-mismatch
    j: int
    i: int
    l: int
    value: float
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "extra": dict(self.extra),
            "i": self.i,
            "j": self.j,
            "k": self.k,
            "kind": self.kind,
            "l": self.l,
            "n": self.n,
            "value": self.value,
        }


@dataclass(frozen=True)
class CriterionCertificate:
    condition_id: str
    params: dict
    verdict: str
    witness_k: Optional[int] = None
    witness_n: Optional[int] = None
    blockers: tuple[Blocker, ...] = ()
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "blockers": [b.as_dict() for b in self.blockers],
            "condition_id": self.condition_id,
            "details": dict(self.details),
            "params": dict(self.params),
            "verdict": self.verdict,
            "witness_k": self.witness_k,
            "witness_n": self.witness_n,
        }


def _nk(nks: Optional[Sequence[int]], k: int) -> Optional[int]:
    if nks is None:
        return k
    if k <= len(nks):
        return nks[k - 1]
    return None


def _validate_nks(nks: Optional[Sequence[int]]) -> None:
    if nks is not None and any(b <= a for a, b in zip(nks, nks[1:])):
        raise ValueError("(n_k) must be strictly increasing")


def _ratio(Ts: Sequence[PseudoShift], n: int, i: int, l: int, pre_i: int, pre_l: int) -> LogScalar:
    return weight_product(Ts[i], pre_i, n) / weight_product(Ts[l], pre_l, n)


def _safe_value(r: LogScalar) -> complex:
    if r.logabs > 700.0:
        return complex(math.inf, 0.0)
    return r.value


def _scan_pairs(
    Ts: Sequence[PseudoShift],
    n: int,
    M: int,
    eps: float,
    tol: float,
    mode: str,
    family: Optional[Sequence[Sequence[complex]]],
    k: int,
) -> Optional[Blocker]:
    """One n: check every ordered pair (i, l).  Returns the first blocker.

    mode selects the image-image overlap condition:
      dhc-b / shc-b: |W-ratio - a-ratio| < eps   (matrix / shared-row family)
      dcrit-b:       the overlap must be empty
      scrit-b:       preimages agree and |W-ratio - 1| < eps
    All modes require the cross ratio < eps on overlap-with-tail sets.

    The scrit-b ratio gap is evaluated once per unordered pair (i < l):
    the reversed gap |1/r - 1| differs from |r - 1|, and the condition is
    taken in the orientation of lower against higher operator index.
    """
    N = len(Ts)
    images = [T.f.image_prefix(n, M) for T in Ts]
    for i in range(N):
        for l in range(N):
            if i == l:
                continue
            for j in images[l]:
                pre_i = Ts[i].f.inverse_iterate(n, j)
                if pre_i is None:
                    continue
                pre_l = Ts[l].f.inverse_iterate(n, j)
                if pre_i > M:
                    mag = _ratio(Ts, n, i, l, pre_i, pre_l).magnitude
                    if not mag < eps - tol:
                        return Blocker(k, n, "cross-ratio", j, i + 1, l + 1, mag)
                    continue
                # j lies in both image prefixes
                if mode == DCRIT_B:
                    overlap = sorted(set(images[i]) & set(images[l]))
                    return Blocker(
                        k, n, "overlap-nonempty", j, i + 1, l + 1, float(len(overlap)),
                        extra={"overlap": overlap},
                    )
                if mode == SCRIT_B:
                    if pre_i != pre_l:
                        return Blocker(
                            k, n, "preimage-mismatch", j, i + 1, l + 1, 0.0,
                            extra={"preimage_i": pre_i, "preimage_l": pre_l},
                        )
                    if i > l:
                        continue  # gap checked once, in the (l, i) orientation
                    target = 1.0
                else:  # dhc-b / shc-b
                    target = family[i][pre_i - 1] / family[l][pre_l - 1]
                gap = abs(_safe_value(_ratio(Ts, n, i, l, pre_i, pre_l)) - target)
                if not gap < eps - tol:
                    return Blocker(
                        k, n, "ratio-target", j, i + 1, l + 1, gap,
                        extra={"preimage_i": pre_i, "preimage_l": pre_l},
                    )
    return None


def _k_search(
    Ts: Sequence[PseudoShift],
    condition_id: str,
    mode: str,
    eps: float,
    K: int,
    M: int,
    family: Optional[Sequence[Sequence[complex]]],
    nks: Optional[Sequence[int]],
    k_bound: int,
    tol: float,
    params: dict,
) -> CriterionCertificate:
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    if K < 1 or k_bound < K:
        raise ValueError("need 1 <= K <= k_bound")
    if M < 1:
        raise ValueError("M must be >= 1")
    _validate_nks(nks)
    blockers: list[Blocker] = []
    for k in range(K, k_bound + 1):
        n = _nk(nks, k)
        if n is None:
            return CriterionCertificate(
                condition_id, params, EXHAUSTED, blockers=tuple(blockers),
                details={"exhausted_at_k": k, "nks_length": len(nks)},
            )
        blocker = _scan_pairs(Ts, n, M, eps, tol, mode, family, k)
        if blocker is None:
            return CriterionCertificate(
                condition_id, params, VERIFIED, witness_k=k, witness_n=n,
                blockers=tuple(blockers),
            )
        blockers.append(blocker)
    return CriterionCertificate(condition_id, params, REFUTED, blockers=tuple(blockers))


def _validate_family(family: Sequence[Sequence[complex]], N: int, M: int) -> None:
    if len(family) != N:
        raise ValueError(f"scalar family needs {N} rows")
    for row in family:
        if len(row) != M:
            raise ValueError(f"scalar family rows need {M} entries")
        if any(a == 0 for a in row):
            raise ValueError("scalar family entries must be nonzero")


# ---------------------------------------------------------------------------
# condition (a): divergence of |W_{m,n_k}|


def check_divergence(
    T: PseudoShift,
    m: int,
    nks: Sequence[int],
    threshold: float,
    tol: float = DEFAULT_TOL,
) -> CriterionCertificate:
    """Finite surrogate for |W_{m,n_k}| -> infinity: the log-magnitudes must
    exceed ln(threshold) on the final quartile of the supplied prefix and
    the final value must be the running max."""
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    if not nks:
        raise ValueError("need a nonempty (n_k) prefix")
    _validate_nks(nks)
    logs = [weight_product(T, m, n).logabs for n in nks]
    tail_start = min(len(logs) - 1, (3 * len(logs)) // 4)
    tail = logs[tail_start:]
    log_thr = math.log(threshold)
    above = all(v > log_thr for v in tail)
    final_is_max = logs[-1] >= max(logs) - tol
    verdict = VERIFIED if (above and final_is_max) else REFUTED
    params = {"m": m, "nks": list(nks), "threshold": threshold}
    return CriterionCertificate(
        DHC_A, params, verdict,
        witness_k=len(nks) if verdict == VERIFIED else None,
        witness_n=nks[-1] if verdict == VERIFIED else None,
        details={
            "final_log": logs[-1],
            "max_log": max(logs),
            "prefix_length": len(nks),
            "tail_min_log": min(tail),
            "tail_start_index": tail_start + 1,
        },
    )


# ---------------------------------------------------------------------------
# condition (b) checkers


def check_dhc_condition_b(
    Ts: Sequence[PseudoShift],
    eps: float,
    K: int,
    M: int,
    family: Sequence[Sequence[complex]],
    nks: Optional[Sequence[int]] = None,
    k_bound: int = 64,
    tol: float = DEFAULT_TOL,
) -> CriterionCertificate:
    """Disjoint-hypercyclicity condition (b): one scalar row per operator."""
    _validate_family(family, len(Ts), M)
    params = {
        "M": M, "K": K, "eps": eps, "family": [list(r) for r in family],
        "k_bound": k_bound, "nks": None if nks is None else list(nks),
    }
    return _k_search(Ts, DHC_B, DHC_B, eps, K, M, family, nks, k_bound, tol, params)


def check_dcriterion_condition(
    Ts: Sequence[PseudoShift],
    eps: float,
    K: int,
    M: int,
    nks: Optional[Sequence[int]] = None,
    k_bound: int = 64,
    tol: float = DEFAULT_TOL,
) -> CriterionCertificate:
    """d-weakly-mixing condition (b): pairwise empty image-image overlaps
    plus small cross ratios on the overlap-with-tail sets."""
    params = {
        "M": M, "K": K, "eps": eps, "k_bound": k_bound,
        "nks": None if nks is None else list(nks),
    }
    return _k_search(Ts, DCRIT_B, DCRIT_B, eps, K, M, None, nks, k_bound, tol, params)


def check_shc_condition_b(
    Ts: Sequence[PseudoShift],
    eps: float,
    K: int,
    M: int,
    family: Sequence[complex],
    nks: Optional[Sequence[int]] = None,
    k_bound: int = 64,
    tol: float = DEFAULT_TOL,
) -> CriterionCertificate:
    """Simultaneous-hypercyclicity condition (b): one shared scalar row."""
    shared = [list(family)] * len(Ts)
    _validate_family(shared, len(Ts), M)
    params = {
        "M": M, "K": K, "eps": eps, "family": list(family),
        "k_bound": k_bound, "nks": None if nks is None else list(nks),
    }
    return _k_search(Ts, SHC_B, SHC_B, eps, K, M, shared, nks, k_bound, tol, params)


def check_scriterion_condition(
    Ts: Sequence[PseudoShift],
    eps: float,
    K: int,
    M: int,
    nks: Optional[Sequence[int]] = None,
    k_bound: int = 64,
    tol: float = DEFAULT_TOL,
) -> CriterionCertificate:
    """s-weakly-mixing condition (b): on image-image overlaps the preimages
    must agree and the ratio must sit within eps of 1."""
    params = {
        "M": M, "K": K, "eps": eps, "k_bound": k_bound,
        "nks": None if nks is None else list(nks),
    }
    return _k_search(Ts, SCRIT_B, SCRIT_B, eps, K, M, None, nks, k_bound, tol, params)


# ---------------------------------------------------------------------------
# weighted-shift specializations


def _require_plain_shifts(Ts: Sequence[PseudoShift]) -> None:
    for T in Ts:
        if not T.is_weighted_shift():
            raise ValueError("this checker requires unilateral weighted shifts (f(m) = m+1)")


def check_weighted_s_ratio(
    Ts: Sequence[PseudoShift],
    eps: float,
    K: int,
    M: int,
    nks: Optional[Sequence[int]] = None,
    k_bound: int = 64,
    tol: float = DEFAULT_TOL,
) -> CriterionCertificate:
    """s-criterion condition specialized to weighted shifts via the product
    form prod w^(i)_{m+v} / w^(l)_{m+v}; agrees with the general checker."""
    _require_plain_shifts(Ts)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    if M < 1 or K < 1 or k_bound < K:
        raise ValueError("bad search range")
    _validate_nks(nks)
    N = len(Ts)
    params = {
        "M": M, "K": K, "eps": eps, "k_bound": k_bound,
        "nks": None if nks is None else list(nks),
    }
    blockers: list[Blocker] = []
    for k in range(K, k_bound + 1):
        n = _nk(nks, k)
        if n is None:
            return CriterionCertificate(
                S_RATIO, params, EXHAUSTED, blockers=tuple(blockers),
                details={"exhausted_at_k": k, "nks_length": len(nks)},
            )
        blocker = None
        for i in range(N):
            for l in range(i + 1, N):
                for m in range(1, M + 1):
                    acc = LogScalar.one()
                    for v in range(1, n + 1):
                        acc = acc * LogScalar.from_value(Ts[i].w(m + v))
                        acc = acc / LogScalar.from_value(Ts[l].w(m + v))
                    gap = abs(_safe_value(acc) - 1.0)
                    if not gap < eps - tol:
                        blocker = Blocker(
                            k, n, "ratio-target", m + n, i + 1, l + 1, gap,
                            extra={"preimage_i": m, "preimage_l": m},
                        )
                        break
                if blocker:
                    break
            if blocker:
                break
        if blocker is None:
            return CriterionCertificate(
                S_RATIO, params, VERIFIED, witness_k=k, witness_n=n,
                blockers=tuple(blockers),
            )
        blockers.append(blocker)
    return CriterionCertificate(S_RATIO, params, REFUTED, blockers=tuple(blockers))


def check_hereditary_powers(
    Bs: Sequence[WeightRule],
    rs: Sequence[int],
    nks: Optional[Sequence[int]],
    eps: float,
    M: int,
    k_bound: int = 64,
    K: int = 1,
    tol: float = DEFAULT_TOL,
) -> CriterionCertificate:
    """Distinct powers B_i^{r_i} of weighted shifts, checked directly on the
    raw weight sequences.

    The verdict searches k for the pairwise conditions of the d-criterion on
    the converted pseudo-shifts (interval disjointness of the image windows
    plus cross-product domination); the per-operator divergence products are
    evaluated at the witness and recorded in the details.
    """
    if len(Bs) != len(rs) or len(Bs) < 2:
        raise ValueError("need matching weight rules and powers, N >= 2")
    if any(b <= a for a, b in zip(rs, rs[1:])) or any(r < 1 for r in rs):
        raise ValueError("powers must be strictly increasing positive integers")
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    _validate_nks(nks)
    N = len(Bs)
    params = {
        "M": M, "K": K, "eps": eps, "k_bound": k_bound,
        "nks": None if nks is None else list(nks), "rs": list(rs),
    }

    def log_window(rule: WeightRule, lo: int, hi: int) -> float:
        return sum(math.log(abs(rule(idx))) for idx in range(lo, hi + 1))

    log_eps = math.log(eps - tol) if eps - tol > 0 else -math.inf
    blockers: list[Blocker] = []
    for k in range(K, k_bound + 1):
        n = _nk(nks, k)
        if n is None:
            return CriterionCertificate(
                HEREDITARY, params, EXHAUSTED, blockers=tuple(blockers),
                details={"exhausted_at_k": k, "nks_length": len(nks)},
            )
        blocker = None
        for s in range(N):
            for t in range(s + 1, N):
                if n * (rs[t] - rs[s]) < M:
                    overlap = sorted(
                        set(range(1 + n * rs[t], M + n * rs[t] + 1))
                        & set(range(1 + n * rs[s], M + n * rs[s] + 1))
                    )
                    blocker = Blocker(
                        k, n, "overlap-nonempty", overlap[0], s + 1, t + 1,
                        float(len(overlap)), extra={"overlap": overlap},
                    )
                    break
                for m in range(1, M + 1):
                    j = m + n * rs[t]
                    lhs = log_window(Bs[s], j - n * rs[s] + 1, j)
                    rhs = log_window(Bs[t], m + 1, m + n * rs[t])
                    if not lhs - rhs < log_eps:
                        blocker = Blocker(
                            k, n, "cross-ratio", j, s + 1, t + 1,
                            math.exp(min(lhs - rhs, 700.0)),
                            extra={"m": m},
                        )
                        break
                if blocker:
                    break
            if blocker:
                break
        if blocker is None:
            divergence = {
                f"op{i + 1}": min(
                    log_window(Bs[i], m + 1, m + rs[i] * n) for m in range(1, M + 1)
                )
                for i in range(N)
            }
            return CriterionCertificate(
                HEREDITARY, params, VERIFIED, witness_k=k, witness_n=n,
                blockers=tuple(blockers),
                details={"min_log_divergence_products": divergence},
            )
        blockers.append(blocker)
    return CriterionCertificate(HEREDITARY, params, REFUTED, blockers=tuple(blockers))


def salas_direct_sum(Ts: Sequence[PseudoShift], n_max: int) -> dict:
    """Salas direct-sum statistic for weighted shifts: running max over n of
    min_i log|prod_{v<=n} w^(i)_{1+v}|, with a finite divergence flag."""
    _require_plain_shifts(Ts)
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    partial = [0.0] * len(Ts)
    stats: list[float] = []
    for n in range(1, n_max + 1):
        for i, T in enumerate(Ts):
            partial[i] += math.log(abs(T.w(1 + n)))
        stats.append(min(partial))
    running = []
    best = -math.inf
    for v in stats:
        best = max(best, v)
        running.append(best)
    q = min(n_max - 1, (3 * n_max) // 4)
    diverging = running[-1] > running[q - 1] if q >= 1 else running[-1] > 0.0
    argmax = stats.index(max(stats)) + 1
    return {
        "argmax_n": argmax,
        "diverging": diverging,
        "n_max": n_max,
        "statistic_log": max(stats),
        "stats_log": stats,
    }


@dataclass(frozen=True)
class StructuralBlocker:
    i: int
    l: int
    probe_depth: int

    def as_dict(self) -> dict:
        return {"i": self.i, "l": self.l, "probe_depth": self.probe_depth}


def structural_dcriterion_blocker(
    Ts: Sequence[PseudoShift], probe_depth: int = 64
) -> Optional[StructuralBlocker]:
    """Pair (i, l) of operators whose maps agree on [1..probe_depth]; such a
    pair makes the d-Hypercyclicity Criterion impossible."""
    if probe_depth < 1:
        raise ValueError("probe depth must be >= 1")
    N = len(Ts)
    for i in range(N):
        for l in range(i + 1, N):
            if maps_agree(Ts[i].f, Ts[l].f, probe_depth):
                return StructuralBlocker(i + 1, l + 1, probe_depth)
    return None


def weighted_shift_alpha(Ts: Sequence[PseudoShift], i: int, m: int, n: int) -> LogScalar:
    """alpha^(i)_{m,n} = prod_{v<=n} w^(i)_{m+v} / w^(1)_{m+v} for weighted
    shifts, so that W^(i)_{m,n} = alpha^(i)_{m,n} W^(1)_{m,n}."""
    _require_plain_shifts(Ts)
    if i < 2 or i > len(Ts):
        raise ValueError("operator index must satisfy 2 <= i <= N")
    acc = LogScalar.one()
    for v in range(1, n + 1):
        acc = acc * LogScalar.from_value(Ts[i - 1].w(m + v))
        acc = acc / LogScalar.from_value(Ts[0].w(m + v))
    return acc


# ---------------------------------------------------------------------------
# certificate replay


def replay_certificate(cert: CriterionCertificate, operators) -> CriterionCertificate:
    """Re-run a checker from the certificate's recorded parameters.

    ``operators`` is whatever the original checker took first: pseudo-shifts
    for the condition checks, weight rules for the hereditary check.
    """
    p = cert.params
    cid = cert.condition_id
    if cid == DHC_A:
        return check_divergence(operators, p["m"], p["nks"], p["threshold"])
    if cid == DHC_B:
        return check_dhc_condition_b(
            operators, p["eps"], p["K"], p["M"], p["family"], p["nks"], p["k_bound"]
        )
    if cid == DCRIT_B:
        return check_dcriterion_condition(
            operators, p["eps"], p["K"], p["M"], p["nks"], p["k_bound"]
        )
    if cid == SHC_B:
        return check_shc_condition_b(
            operators, p["eps"], p["K"], p["M"], p["family"], p["nks"], p["k_bound"]
        )
    if cid == SCRIT_B:
        return check_scriterion_condition(
            operators, p["eps"], p["K"], p["M"], p["nks"], p["k_bound"]
        )
    if cid == S_RATIO:
        return check_weighted_s_ratio(
            operators, p["eps"], p["K"], p["M"], p["nks"], p["k_bound"]
        )
    if cid == HEREDITARY:
        return check_hereditary_powers(
            operators, p["rs"], p["nks"], p["eps"], p["M"], p["k_bound"], p["K"]
        )
    raise ValueError(f"cannot replay condition {cid!r}")
