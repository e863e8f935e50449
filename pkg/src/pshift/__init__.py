"""Checkers, correctors, and orbit diagnostics for disjoint and
simultaneous hypercyclicity of unilateral pseudo-shifts on l^p."""

__version__ = "0.1.0"

from .core import (  # noqa: F401
    COMPLEX,
    DEFAULT_TOL,
    REAL,
    PseudoShift,
    SparseVector,
    apply,
    apply_power,
    p_norm,
    power_as_pseudoshift,
    weight_product,
    weighted_shift,
)
from .logscalar import LogScalar  # noqa: F401
from .shiftmaps import ShiftMap, affine, example_a, example_b, table_plus_rule  # noqa: F401
from .weights import WeightRule, constant, pow2_override, shift_power, table  # noqa: F401
