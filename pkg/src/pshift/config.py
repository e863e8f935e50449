"""Strict JSON configuration for operator tuples and run commands.

Parsing is strict: unknown fields and duplicate keys are rejected with
the offending name, and numeric preconditions (nonzero weights, positive
epsilon) are enforced at parse time so a bad document never reaches a
checker.  Serialization is canonical (sorted keys, fixed indentation):
serialize(parse(text)) is a fixed point of parse/serialize.

Complex scalars are written as two-element [re, im] arrays; bare numbers
are real scalars.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Optional

from .core import COMPLEX, REAL, PseudoShift
from .shiftmaps import (
    AFFINE,
    EXAMPLE_A,
    EXAMPLE_B,
    TABLE_PLUS_RULE,
    ShiftMap,
    affine,
    example_a,
    example_b,
    table_plus_rule,
)
from .weights import (
    CONSTANT,
    POW2_OVERRIDE,
    TABLE,
    Scalar,
    WeightRule,
    constant,
    pow2_override,
    table,
)

COMMANDS = ("check", "construct", "orbit", "gallery")


class ConfigError(ValueError):
    """Raised for malformed configuration documents."""


def _no_duplicates(pairs):
    seen = set()
    out = {}
    for key, value in pairs:
        if key in seen:
            raise ConfigError(f"duplicate field {key!r}")
        seen.add(key)
        out[key] = value
    return out


def _loads(text: str) -> dict:
    try:
        doc = json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as e:
        raise ConfigError(f"parse error at line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    return doc


def _take(doc: dict, ctx: str, required: tuple[str, ...], optional: tuple[str, ...] = ()):
    if not isinstance(doc, dict):
        raise ConfigError(f"{ctx} must be an object")
    for key in doc:
        if key not in required and key not in optional:
            raise ConfigError(f"unknown field {key!r} in {ctx}")
    for key in required:
        if key not in doc:
            raise ConfigError(f"missing field {key!r} in {ctx}")


def parse_scalar(v: Any, ctx: str) -> Scalar:
    if isinstance(v, bool):
        raise ConfigError(f"{ctx} must be a number or [re, im] pair")
    if isinstance(v, (int, float)):
        return float(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(c, (int, float)) for c in v):
        return complex(float(v[0]), float(v[1]))
    raise ConfigError(f"{ctx} must be a number or [re, im] pair")


def scalar_doc(v: Scalar):
    if isinstance(v, complex):
        if v.imag == 0.0:
            return v.real
        return [v.real, v.imag]
    return float(v)


# -- shift maps -------------------------------------------------------------


def map_from_doc(doc: dict, ctx: str = "map") -> ShiftMap:
    _take(doc, ctx, ("kind",), ("offset", "table", "tail_offset"))
    kind = doc["kind"]
    try:
        if kind == AFFINE:
            _take(doc, ctx, ("kind", "offset"))
            return affine(int(doc["offset"]))
        if kind == EXAMPLE_A:
            _take(doc, ctx, ("kind",))
            return example_a()
        if kind == EXAMPLE_B:
            _take(doc, ctx, ("kind",))
            return example_b()
        if kind == TABLE_PLUS_RULE:
            _take(doc, ctx, ("kind", "table", "tail_offset"))
            return table_plus_rule(tuple(int(v) for v in doc["table"]), int(doc["tail_offset"]))
    except ValueError as e:
        raise ConfigError(f"{ctx}: {e}") from e
    raise ConfigError(f"unknown map kind {kind!r} in {ctx}")


def map_doc(f: ShiftMap) -> dict:
    if f.kind == AFFINE:
        return {"kind": AFFINE, "offset": f.offset}
    if f.kind in (EXAMPLE_A, EXAMPLE_B):
        return {"kind": f.kind}
    return {"kind": TABLE_PLUS_RULE, "table": list(f.table), "tail_offset": f.tail_offset}


# -- weight rules -----------------------------------------------------------


def _scalar_map(doc: dict, ctx: str) -> dict[int, Scalar]:
    if not isinstance(doc, dict):
        raise ConfigError(f"{ctx} must be an object of index -> scalar")
    out = {}
    for key, v in doc.items():
        try:
            idx = int(key)
        except ValueError:
            raise ConfigError(f"{ctx} has a non-integer index {key!r}") from None
        out[idx] = parse_scalar(v, f"{ctx}[{key}]")
    return out


def weights_from_doc(doc: dict, ctx: str = "weights") -> WeightRule:
    _take(doc, ctx, ("kind",), ("value", "overrides", "base", "tail", "entries", "default"))
    kind = doc["kind"]
    try:
        if kind == CONSTANT:
            _take(doc, ctx, ("kind", "value"))
            return constant(parse_scalar(doc["value"], f"{ctx}.value"))
        if kind == POW2_OVERRIDE:
            _take(doc, ctx, ("kind", "overrides", "base"), ("tail",))
            tail = parse_scalar(doc["tail"], f"{ctx}.tail") if "tail" in doc else None
            return pow2_override(
                _scalar_map(doc["overrides"], f"{ctx}.overrides"),
                parse_scalar(doc["base"], f"{ctx}.base"),
                tail,
            )
        if kind == TABLE:
            _take(doc, ctx, ("kind", "entries", "default"))
            return table(
                _scalar_map(doc["entries"], f"{ctx}.entries"),
                parse_scalar(doc["default"], f"{ctx}.default"),
            )
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(f"{ctx}: {e}") from e
    raise ConfigError(f"unknown weight rule kind {kind!r} in {ctx}")


def weights_doc(w: WeightRule) -> dict:
    if w.kind == CONSTANT:
        return {"kind": CONSTANT, "value": scalar_doc(w.value)}
    if w.kind == POW2_OVERRIDE:
        return {
            "base": scalar_doc(w.base),
            "kind": POW2_OVERRIDE,
            "overrides": {str(r): scalar_doc(v) for r, v in sorted(w.overrides.items())},
            "tail": scalar_doc(w.tail),
        }
    if w.kind == TABLE:
        return {
            "default": scalar_doc(w.value),
            "entries": {str(m): scalar_doc(v) for m, v in sorted(w.overrides.items())},
            "kind": TABLE,
        }
    raise ConfigError(f"weight rule kind {w.kind!r} does not serialize")


# -- operators --------------------------------------------------------------


def operator_from_doc(doc: dict, ctx: str = "operator") -> PseudoShift:
    _take(doc, ctx, ("map", "weights"), ("scalar_field", "p"))
    f = map_from_doc(doc["map"], f"{ctx}.map")
    w = weights_from_doc(doc["weights"], f"{ctx}.weights")
    fld = doc.get("scalar_field", REAL)
    if fld not in (REAL, COMPLEX):
        raise ConfigError(f"{ctx}.scalar_field must be 'real' or 'complex'")
    p = float(doc.get("p", 2.0))
    try:
        return PseudoShift(f, w, scalar_field=fld, p=p)
    except ValueError as e:
        raise ConfigError(f"{ctx}: {e}") from e


def operator_doc(T: PseudoShift) -> dict:
    return {
        "map": map_doc(T.f),
        "p": T.p,
        "scalar_field": T.scalar_field,
        "weights": weights_doc(T.w),
    }


# -- sparse vectors ---------------------------------------------------------


def vector_from_doc(doc: dict, ctx: str = "vector") -> dict[int, Scalar]:
    return {m: v for m, v in _scalar_map(doc, ctx).items()}


def vector_doc(entries: dict[int, Scalar]) -> dict:
    return {str(m): scalar_doc(v) for m, v in sorted(entries.items())}


# -- the run configuration --------------------------------------------------

_CONDITION_FIELDS = {
    "dhc-a": (("id", "m", "nks", "threshold"), ()),
    "dhc-b": (("id", "eps", "K", "M", "family"), ("nks", "k_bound")),
    "dcrit-b": (("id", "eps", "K", "M"), ("nks", "k_bound")),
    "shc-b": (("id", "eps", "K", "M", "family"), ("nks", "k_bound")),
    "scrit-b": (("id", "eps", "K", "M"), ("nks", "k_bound")),
    "s-ratio": (("id", "eps", "K", "M"), ("nks", "k_bound")),
    "hereditary": (("id", "eps", "M", "rs"), ("nks", "k_bound", "K")),
    "salas": (("id", "n_max"), ()),
}


def _validate_condition(doc: dict) -> dict:
    _take(doc, "condition", ("id",), tuple(
        k for req, opt in _CONDITION_FIELDS.values() for k in req + opt
    ))
    cid = doc["id"]
    if cid not in _CONDITION_FIELDS:
        raise ConfigError(f"unknown condition id {cid!r}")
    required, optional = _CONDITION_FIELDS[cid]
    _take(doc, f"condition {cid!r}", required, optional)
    if "eps" in doc and not (isinstance(doc["eps"], (int, float)) and doc["eps"] > 0):
        raise ConfigError("condition field 'eps' must be a positive number")
    if "nks" in doc and doc["nks"] is not None:
        if not isinstance(doc["nks"], list) or not all(isinstance(v, int) for v in doc["nks"]):
            raise ConfigError("condition field 'nks' must be a list of integers or null")
    return dict(doc)


@dataclass(frozen=True)
class RunConfig:
    command: str
    operators: tuple[PseudoShift, ...]
    condition: Optional[dict]
    orbit: Optional[dict]
    gallery: Optional[dict]
    construct: Optional[dict]
    seed: int
    tol: float
    out: Optional[str]

    def as_dict(self) -> dict:
        doc: dict[str, Any] = {
            "command": self.command,
            "operators": [operator_doc(T) for T in self.operators],
            "seed": self.seed,
            "tol": self.tol,
        }
        if self.condition is not None:
            doc["condition"] = self.condition
        if self.orbit is not None:
            doc["orbit"] = self.orbit
        if self.gallery is not None:
            doc["gallery"] = self.gallery
        if self.construct is not None:
            doc["construct"] = self.construct
        if self.out is not None:
            doc["out"] = self.out
        return doc


def parse_config(text: str) -> RunConfig:
    doc = _loads(text)
    _take(
        doc, "configuration", ("command",),
        ("operators", "condition", "orbit", "gallery", "construct", "seed", "tol", "out"),
    )
    command = doc["command"]
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r} (expected one of {', '.join(COMMANDS)})")
    operators = tuple(
        operator_from_doc(op, f"operators[{i}]")
        for i, op in enumerate(doc.get("operators", []))
    )
    condition = None
    if "condition" in doc:
        condition = _validate_condition(doc["condition"])
    orbit = doc.get("orbit")
    if orbit is not None:
        _take(orbit, "orbit", ("n_max", "d"), ("x", "targets", "eps_schedule", "n_search_bound"))
    gallery = doc.get("gallery")
    if gallery is not None:
        _take(
            gallery, "gallery", ("name",),
            ("beta", "alpha", "lambda", "targets", "k_max", "n_max", "n", "M"),
        )
    construct = doc.get("construct")
    if construct is not None:
        _take(construct, "construct", ("beta",), ("targets", "k_max"))
    seed = doc.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("field 'seed' must be an integer")
    tol = doc.get("tol", 1e-12)
    if not (isinstance(tol, (int, float)) and tol >= 0):
        raise ConfigError("field 'tol' must be a nonnegative number")
    out = doc.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigError("field 'out' must be a string path")

    if command == "check" and condition is None:
        raise ConfigError("command 'check' requires a 'condition' section")
    if command == "orbit" and orbit is None:
        raise ConfigError("command 'orbit' requires an 'orbit' section")
    if command == "gallery" and gallery is None:
        raise ConfigError("command 'gallery' requires a 'gallery' section")
    if command == "construct" and construct is None:
        raise ConfigError("command 'construct' requires a 'construct' section")

    return RunConfig(
        command=command, operators=operators, condition=condition, orbit=orbit,
        gallery=gallery, construct=construct, seed=seed, tol=float(tol), out=out,
    )


def serialize_config(cfg: RunConfig) -> str:
    return json.dumps(cfg.as_dict(), sort_keys=True, indent=2) + "\n"
