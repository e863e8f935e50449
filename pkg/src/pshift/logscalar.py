"""Log-magnitude scalar arithmetic.

Weight products along long pull-back paths grow like beta**n, which
overflows a float near n*ln(beta) > 709.  All product accumulation is
therefore done as (log-magnitude, unit phase) pairs; ratios of products
become differences of log-magnitudes and are only exponentiated when a
criterion compares them against a finite threshold.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

# exp() overflows past this; exponentiating anything larger is reported as inf
_EXP_OVERFLOW = 700.0


@dataclass(frozen=True)
class LogScalar:
    """A nonzero scalar stored as natural-log magnitude plus unit phase.

    ``phase`` is a complex number of modulus 1; for real scalars it is
    +1 or -1.  Multiplication adds log-magnitudes and multiplies phases,
    so products of thousands of bounded weights never overflow.
    """

    logabs: float
    phase: complex = 1.0 + 0.0j

    @classmethod
    def one(cls) -> "LogScalar":
        return cls(0.0, 1.0 + 0.0j)

    @classmethod
    def from_value(cls, value: complex) -> "LogScalar":
        if value == 0:
            raise ValueError("LogScalar cannot represent zero")
        mag = abs(value)
        return cls(math.log(mag), value / mag)

    @classmethod
    def product_of(cls, values) -> "LogScalar":
        """Product of plain scalars with an exactly-rounded log-magnitude.

        math.fsum makes the log-magnitude of a product of n equal factors
        w identical to n * log|w|, which keeps closed-form growth rates
        (like n ln 2 for a constant weight) reproducible bit for bit.
        """
        logs = []
        phase = 1.0
        for v in values:
            if v == 0:
                raise ValueError("LogScalar cannot represent zero")
            mag = abs(v)
            logs.append(math.log(mag))
            phase = _unit(phase * (v / mag))
        return cls(math.fsum(logs), phase)

    @property
    def magnitude(self) -> float:
        """|value|, or math.inf when the log-magnitude is too large."""
        if self.logabs > _EXP_OVERFLOW:
            return math.inf
        return math.exp(self.logabs)

    @property
    def value(self) -> complex:
        return self.phase * self.magnitude

    def real_value(self) -> float:
        """Value as a float; requires a (nearly) real phase."""
        v = self.value
        if abs(v.imag) > 1e-9 * max(1.0, abs(v.real)):
            raise ValueError(f"phase is not real: {self.phase}")
        return v.real

    def __mul__(self, other: "LogScalar") -> "LogScalar":
        return LogScalar(self.logabs + other.logabs, _unit(self.phase * other.phase))

    def __truediv__(self, other: "LogScalar") -> "LogScalar":
        return LogScalar(self.logabs - other.logabs, _unit(self.phase / other.phase))

    def inverse(self) -> "LogScalar":
        return LogScalar(-self.logabs, _unit(1.0 / self.phase))

    def __pow__(self, n: int) -> "LogScalar":
        return LogScalar(n * self.logabs, _unit(self.phase**n))


def _unit(z: complex) -> complex:
    # renormalize to kill accumulated rounding in the modulus
    m = abs(z)
    if m == 0.0 or not math.isfinite(m):
        raise ValueError(f"degenerate phase {z}")
    return z / m


def log_of(value: complex) -> LogScalar:
    """Shorthand for LogScalar.from_value."""
    return LogScalar.from_value(value)


def phase_of(value: complex) -> complex:
    if value == 0:
        raise ValueError("zero has no phase")
    return value / abs(value)


def polar_angle(z: complex) -> float:
    return cmath.phase(z)
