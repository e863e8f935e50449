"""Strictly increasing index maps and their iterate/inverse algebra.

A shift map is a strictly increasing f: N -> N with f(1) > 1, which
forces f(m) >= m + 1 and f^n(m) >= m + n.  The map kinds form a closed
set so that equality testing, serialization and inverse computation stay
decidable; user extensions go through ``table-plus-rule``.

Indices are plain Python ints (arbitrary precision): the doubling maps
of the worked example reach m * 2**n, which overflows any fixed width by
n of about 60.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

AFFINE = "affine"
EXAMPLE_A = "example-a"
EXAMPLE_B = "example-b"
TABLE_PLUS_RULE = "table-plus-rule"

_KINDS = (AFFINE, EXAMPLE_A, EXAMPLE_B, TABLE_PLUS_RULE)


def _is_pow2(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


@dataclass(frozen=True)
class ShiftMap:
    """A strictly increasing index map with f(1) > 1.

    kind:
      * ``affine``: f(m) = m + offset, offset >= 1.
      * ``example-a``: 1 -> 4, 2 -> 5, m -> 2m otherwise.
      * ``example-b``: m -> 2m when m is a power of two, m -> 2m+1 otherwise.
      * ``table-plus-rule``: explicit values on [1..len(table)] extended by
        f(m) = m + tail_offset beyond the table.
    """

    kind: str
    offset: int = 1
    table: tuple[int, ...] = ()
    tail_offset: int = 1
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown shift map kind {self.kind!r}")
        if self.kind == AFFINE and self.offset < 1:
            raise ValueError("affine offset must be >= 1")
        if self.kind == TABLE_PLUS_RULE:
            t = self.table
            if not t:
                raise ValueError("table-plus-rule needs a nonempty table")
            if t[0] <= 1:
                raise ValueError("f(1) must exceed 1")
            if any(b <= a for a, b in zip(t, t[1:])):
                raise ValueError("table must be strictly increasing")
            if self.tail_offset < 1:
                raise ValueError("tail offset must be >= 1")
            # first off-table value must continue the increase
            if len(t) + 1 + self.tail_offset <= t[-1]:
                raise ValueError("tail rule breaks monotonicity at the table edge")

    # -- single step ------------------------------------------------------

    def step(self, m: int) -> int:
        if m < 1:
            raise ValueError("indices start at 1")
        if self.kind == AFFINE:
            return m + self.offset
        if self.kind == EXAMPLE_A:
            if m == 1:
                return 4
            if m == 2:
                return 5
            return 2 * m
        if self.kind == EXAMPLE_B:
            return 2 * m if _is_pow2(m) else 2 * m + 1
        if m <= len(self.table):
            return self.table[m - 1]
        return m + self.tail_offset

    def step_inverse(self, j: int) -> Optional[int]:
        """m with f(m) = j, or None when j is outside the image."""
        if j < 1:
            return None
        if self.kind == AFFINE:
            m = j - self.offset
            return m if m >= 1 else None
        if self.kind == EXAMPLE_A:
            if j == 4:
                return 1
            if j == 5:
                return 2
            if j % 2 == 0 and j >= 6:
                return j // 2
            return None
        if self.kind == EXAMPLE_B:
            if j % 2 == 0:
                m = j // 2
                return m if _is_pow2(m) else None
            m = (j - 1) // 2
            return m if m >= 1 and not _is_pow2(m) else None
        return self._table_inverse(j)

    def _table_inverse(self, j: int) -> Optional[int]:
        # bisection over the table (f is strictly increasing), then the tail rule
        t = self.table
        if t and j <= t[-1]:
            lo, hi = 0, len(t) - 1
            while lo <= hi:
                mid = (lo + hi) // 2
                if t[mid] == j:
                    return mid + 1
                if t[mid] < j:
                    lo = mid + 1
                else:
                    hi = mid - 1
            return None
        m = j - self.tail_offset
        return m if m > len(t) else None

    # -- iterates ---------------------------------------------------------

    def iterate(self, n: int, m: int) -> int:
        """f^n(m).  Closed forms where available, otherwise n steps."""
        if n < 0:
            raise ValueError("iterate count must be >= 0")
        if m < 1:
            raise ValueError("indices start at 1")
        if n == 0:
            return m
        if self.kind == AFFINE:
            return m + n * self.offset
        if self.kind == EXAMPLE_A:
            if m == 1:
                return 2 ** (n + 1)
            if m == 2:
                return 5 * 2 ** (n - 1)
            return m * 2**n
        if self.kind == EXAMPLE_B:
            if _is_pow2(m):
                return m * 2**n
            # the odd chain m -> 2m+1 closes as (m+1)*2^n - 1
            return (m + 1) * 2**n - 1
        key = (n, m)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        j = m
        steps = n
        t_len = len(self.table)
        while steps > 0 and j <= t_len:
            j = self.table[j - 1]
            steps -= 1
        j += steps * self.tail_offset
        self._cache[key] = j
        return j

    def inverse_iterate(self, n: int, j: int) -> Optional[int]:
        """m with f^n(m) = j, or None when j is not in f^n(N)."""
        if n < 0:
            raise ValueError("iterate count must be >= 0")
        for _ in range(n):
            j = self.step_inverse(j)
            if j is None:
                return None
        return j

    def image_prefix(self, n: int, M: int) -> list[int]:
        """Sorted image f^n([M]) = {f^n(1), ..., f^n(M)}."""
        if M < 1:
            raise ValueError("M must be >= 1")
        return [self.iterate(n, m) for m in range(1, M + 1)]

    def tail_membership(self, n: int, M: int, j: int) -> bool:
        """True iff j = f^n(m) for some m > M."""
        m = self.inverse_iterate(n, j)
        return m is not None and m > M


def affine(offset: int) -> ShiftMap:
    return ShiftMap(AFFINE, offset=offset)


def example_a() -> ShiftMap:
    return ShiftMap(EXAMPLE_A)


def example_b() -> ShiftMap:
    return ShiftMap(EXAMPLE_B)


def table_plus_rule(table: tuple[int, ...], tail_offset: int) -> ShiftMap:
    return ShiftMap(TABLE_PLUS_RULE, table=tuple(table), tail_offset=tail_offset)


def maps_agree(f: ShiftMap, g: ShiftMap, probe_depth: int) -> bool:
    """True when the maps are the same rule, or agree on [1..probe_depth].

    Rule-level equality short-circuits; table-based rules are probed to at
    least depth 64 to guard against a table that merely re-encodes a rule.
    """
    if f.kind == g.kind:
        if f.kind == AFFINE and f.offset == g.offset:
            return True
        if f.kind in (EXAMPLE_A, EXAMPLE_B):
            return True
    depth = probe_depth
    if TABLE_PLUS_RULE in (f.kind, g.kind):
        depth = max(depth, 64, len(f.table), len(g.table))
    return all(f.step(m) == g.step(m) for m in range(1, depth + 1))
