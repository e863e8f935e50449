"""Command line entry point: config ingestion, dispatch, report emission.

Commands: check, construct, orbit, gallery, selftest.  Exit status is 0
for a verified condition or successful run, 2 for a refuted condition or
failed construction/assembly, and 1 for input errors.  Reports are
deterministic for a fixed config and seed (excluding the wall-time
field); with --out, CSV data and PNG figures are written alongside the
report file.
"""

from __future__ import annotations

import argparse
import math
import random
import sys
import time
from pathlib import Path
from typing import Optional

from .config import (
    ConfigError,
    RunConfig,
    parse_config,
    parse_scalar,
    vector_doc,
    vector_from_doc,
    weights_doc,
)
from .core import PseudoShift, SparseVector, weighted_shift
from .corrector import build_corrector, verify_bounds
from .criteria import (
    REFUTED,
    VERIFIED,
    check_dcriterion_condition,
    check_dhc_condition_b,
    check_divergence,
    check_hereditary_powers,
    check_scriterion_condition,
    check_shc_condition_b,
    check_weighted_s_ratio,
    salas_direct_sum,
    structural_dcriterion_blocker,
)
from .gallery import (
    construct_dhc_weighted_pair,
    counterexample_direct_sum,
    counterexample_operators,
    example_operators,
    rolewicz,
    shc_failure_witness,
)
from .orbitlab import blowup_collapse_assemble, orbit
from .shiftmaps import affine
from .report import (
    build_report,
    render_report,
    render_orbit_figure,
    render_series_figure,
    render_visit_figure,
    write_csv,
    write_report,
)
from .weights import constant, table

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_REFUTED = 2


# ---------------------------------------------------------------------------
# command implementations: each returns (payload, exit_code, artifacts)
# where artifacts is a list of (suffix, writer) callables applied under --out


def _run_check(cfg: RunConfig, k_bound_override: Optional[int]):
    cond = cfg.condition
    cid = cond["id"]
    ops = cfg.operators
    tol = cfg.tol
    nks = cond.get("nks")
    k_bound = k_bound_override if k_bound_override is not None else cond.get("k_bound", 64)
    artifacts = []

    if cid == "salas":
        if not ops:
            raise ConfigError("salas check needs operators")
        stats = salas_direct_sum(ops, cond["n_max"])
        payload = {"condition_id": "salas", "salas": stats}
        xs = list(range(1, stats["n_max"] + 1))
        artifacts.append(
            ("salas.csv", lambda p: write_csv(p, ["n", "min_log_product"],
                                              list(zip(xs, stats["stats_log"]))))
        )
        artifacts.append(
            ("salas.png", lambda p: render_series_figure(
                xs, {"min log product": stats["stats_log"]},
                "direct-sum statistic", "n", "log magnitude", p))
        )
        return payload, EXIT_OK if stats["diverging"] else EXIT_REFUTED, artifacts

    if cid == "dhc-a":
        if not ops:
            raise ConfigError("divergence check needs an operator")
        cert = check_divergence(ops[0], cond["m"], cond["nks"], cond["threshold"], tol)
    elif cid == "dhc-b":
        family = [[parse_scalar(v, "condition.family") for v in row] for row in cond["family"]]
        cert = check_dhc_condition_b(ops, cond["eps"], cond["K"], cond["M"],
                                     family, nks, k_bound, tol)
    elif cid == "dcrit-b":
        cert = check_dcriterion_condition(ops, cond["eps"], cond["K"], cond["M"],
                                          nks, k_bound, tol)
    elif cid == "shc-b":
        family = [parse_scalar(v, "condition.family") for v in cond["family"]]
        cert = check_shc_condition_b(ops, cond["eps"], cond["K"], cond["M"],
                                     family, nks, k_bound, tol)
    elif cid == "scrit-b":
        cert = check_scriterion_condition(ops, cond["eps"], cond["K"], cond["M"],
                                          nks, k_bound, tol)
    elif cid == "s-ratio":
        cert = check_weighted_s_ratio(ops, cond["eps"], cond["K"], cond["M"],
                                      nks, k_bound, tol)
    elif cid == "hereditary":
        for T in ops:
            if not T.is_weighted_shift():
                raise ConfigError("hereditary check needs unilateral weighted shifts")
        cert = check_hereditary_powers([T.w for T in ops], cond["rs"], nks,
                                       cond["eps"], cond["M"], k_bound,
                                       cond.get("K", 1), tol)
    else:  # unreachable behind config validation
        raise ConfigError(f"unknown condition id {cid!r}")

    payload = {"certificate": cert.as_dict(), "condition_id": cid}
    if cid == "dcrit-b":
        blocker = structural_dcriterion_blocker(ops)
        payload["structural_blocker"] = None if blocker is None else blocker.as_dict()
    code = EXIT_OK if cert.verdict == VERIFIED else EXIT_REFUTED
    return payload, code, artifacts


def _run_construct(cfg: RunConfig):
    c = cfg.construct
    beta = c["beta"]
    if not isinstance(beta, (int, float)) or beta <= 1:
        raise ConfigError("construct field 'beta' must exceed 1")
    targets = None
    if c.get("targets") is not None:
        targets = [parse_scalar(v, "construct.targets") for v in c["targets"]]
        if any(g == 0 for g in targets):
            raise ConfigError("construct targets must be nonzero")
    k_max = c.get("k_max", 3)
    if not isinstance(k_max, int) or k_max < 1:
        raise ConfigError("construct field 'k_max' must be a positive integer")
    try:
        built = construct_dhc_weighted_pair(float(beta), targets, k_max)
    except ValueError as e:
        return {"failure": str(e), "ok": False}, EXIT_REFUTED, []
    payload = {
        "beta": built.beta,
        "nks": list(built.nks),
        "ok": True,
        "report": built.report,
        "targets": [t for t in built.targets],
        "weights": [weights_doc(built.rule1), weights_doc(built.rule2)],
    }
    rows = [(k, n, g) for k, (n, g) in enumerate(zip(built.nks, built.targets), start=1)]
    artifacts = [
        ("construct.csv", lambda p: write_csv(p, ["k", "n_k", "gamma_k"], rows)),
    ]
    return payload, EXIT_OK, artifacts


def _run_orbit(cfg: RunConfig):
    o = cfg.orbit
    d = int(o["d"])
    n_max = int(o["n_max"])
    has_x = o.get("x") is not None
    has_targets = o.get("targets") is not None
    if has_x == has_targets:
        raise ConfigError("orbit section needs exactly one of 'x' or 'targets'")
    if not cfg.operators:
        raise ConfigError("orbit command needs operators")
    artifacts = []

    if has_x:
        x = SparseVector(vector_from_doc(o["x"], "orbit.x"))
        points = orbit(cfg.operators[0], x, n_max, d)
        payload = {"d": d, "n_max": n_max, "points": points, "x": vector_doc(x.entries)}
        rows = [[n] + list(pt) for n, pt in enumerate(points)]
        artifacts.append(
            ("orbit.csv", lambda p: write_csv(
                p, ["n"] + [f"coordinate_{m + 1}" for m in range(d)], rows))
        )
        artifacts.append(("orbit.png", lambda p: render_orbit_figure(points, d, p)))
        return payload, EXIT_OK, artifacts

    if o.get("eps_schedule") is None:
        raise ConfigError("orbit assembly needs an 'eps_schedule'")
    targets = [SparseVector(vector_from_doc(t, "orbit.targets")) for t in o["targets"]]
    schedule = [float(e) for e in o["eps_schedule"]]
    bound = int(o.get("n_search_bound", 256))
    x, log = blowup_collapse_assemble(cfg.operators, targets, schedule, bound, d)
    log_dict = log.as_dict()
    payload = {"visit_log": log_dict, "x": vector_doc(x.entries)}
    if log.steps:
        n_ops = len(cfg.operators)
        rows = [
            [s["stage"], s["n"], s["eps"], s["z_norm"]] + list(s["distances"])
            for s in log_dict["steps"]
        ]
        header = ["stage", "n", "eps", "z_norm"] + [
            f"distance_{i + 1}" for i in range(n_ops)
        ]
        artifacts.append(("visits.csv", lambda p: write_csv(p, header, rows)))
        artifacts.append(("visits.png", lambda p: render_visit_figure(log_dict, p)))
    return payload, EXIT_OK if log.ok else EXIT_REFUTED, artifacts


def _gallery_doubling_pair(g: dict, tol: float):
    beta = float(g.get("beta", 2.0))
    n = int(g.get("n", 4))
    M = int(g.get("M", 4))
    k_max = int(g.get("k_max", 3))
    targets = None
    if g.get("targets") is not None:
        targets = [parse_scalar(v, "gallery.targets") for v in g["targets"]]
    built = construct_dhc_weighted_pair(beta, targets, k_max)
    ops = example_operators((built.rule1, built.rule2), beta)
    witness = shc_failure_witness(n, M)
    scrit = check_scriterion_condition(ops, 0.5, 1, M, nks=[n], k_bound=1, tol=tol)
    scrit_ok = (
        scrit.verdict == REFUTED
        and scrit.blockers
        and scrit.blockers[0].kind == "preimage-mismatch"
        and scrit.blockers[0].j == witness.j
    )
    shc_certs = []
    shc_ok = True
    for k in range(1, k_max + 1):
        gamma = built.targets[k - 1]
        cert = check_shc_condition_b(
            ops, 2.0 / k, k, 2, [gamma, 1.0], nks=built.nks, k_bound=k, tol=tol
        )
        shc_certs.append(cert.as_dict())
        shc_ok = shc_ok and cert.verdict == VERIFIED
    payload = {
        "construction": {
            "nks": list(built.nks),
            "report": built.report,
            "weights": [weights_doc(built.rule1), weights_doc(built.rule2)],
        },
        "expected": {"scrit_refuted_at_witness": scrit_ok, "shc_verified": shc_ok},
        "name": "doubling-pair",
        "scrit_certificate": scrit.as_dict(),
        "shc_certificates": shc_certs,
        "witness": witness.as_dict(),
    }
    rows = [(k, nk, gm) for k, (nk, gm) in enumerate(zip(built.nks, built.targets), 1)]
    artifacts = [
        ("doubling.csv", lambda p: write_csv(p, ["k", "n_k", "gamma_k"], rows)),
    ]
    return payload, EXIT_OK if (scrit_ok and shc_ok) else EXIT_REFUTED, artifacts


def _gallery_ratio_gap_pair(g: dict, tol: float):
    alpha = float(g.get("alpha", 2.0))
    beta = float(g.get("beta", 3.0))
    n_max = int(g.get("n_max", 100))
    rep = counterexample_direct_sum(alpha, beta, n_max)
    ops = counterexample_operators(alpha, beta)
    gap = rep["gap"]
    below = check_weighted_s_ratio(ops, gap / 2.0, 1, 1, nks=None, k_bound=8, tol=tol)
    above = check_weighted_s_ratio(ops, gap * 1.2, 1, 1, nks=None, k_bound=8, tol=tol)
    expected = {
        "gap_constant": rep["gap_constant"],
        "refuted_below_gap": below.verdict == REFUTED,
        "salas_diverging": rep["salas"]["diverging"],
        "verified_above_gap": above.verdict == VERIFIED,
    }
    payload = {
        "above_certificate": above.as_dict(),
        "below_certificate": below.as_dict(),
        "expected": expected,
        "name": "ratio-gap-pair",
        "report": {k: v for k, v in rep.items() if k != "gaps"},
    }
    xs = list(range(1, n_max + 1))
    series = {"ratio gap": rep["gaps"], "salas min log product": rep["salas"]["stats_log"]}
    rows = list(zip(xs, rep["gaps"], rep["salas"]["stats_log"]))
    artifacts = [
        ("ratio-gap.csv", lambda p: write_csv(p, ["n", "gap", "salas_log"], rows)),
        ("ratio-gap.png", lambda p: render_series_figure(
            xs, series, "constant ratio gap vs diverging direct sum", "n", "value", p)),
    ]
    code = EXIT_OK if all(expected.values()) else EXIT_REFUTED
    return payload, code, artifacts


def _gallery_rolewicz(g: dict):
    lam = parse_scalar(g.get("lambda", 2.0), "gallery.lambda")
    n_max = int(g.get("n_max", 64))
    rep = rolewicz(lam, n_max)
    expected = rep["diverging"] == (abs(lam) > 1)
    payload = {"expected": {"diverging_iff_modulus_above_1": expected},
               "name": "rolewicz", "report": rep}
    xs = list(range(1, n_max + 1))
    logs = [n * math.log(abs(lam)) for n in xs]
    artifacts = [
        ("rolewicz.csv", lambda p: write_csv(p, ["n", "log_W_1_n"], list(zip(xs, logs)))),
        ("rolewicz.png", lambda p: render_series_figure(
            xs, {"log |W_{1,n}|": logs}, "scalar-multiple shift growth", "n",
            "log magnitude", p)),
    ]
    return payload, EXIT_OK if expected else EXIT_REFUTED, artifacts


def _run_gallery(cfg: RunConfig):
    g = cfg.gallery
    name = g["name"]
    if name == "doubling-pair":
        return _gallery_doubling_pair(g, cfg.tol)
    if name == "ratio-gap-pair":
        return _gallery_ratio_gap_pair(g, cfg.tol)
    if name == "rolewicz":
        return _gallery_rolewicz(g)
    raise ConfigError(
        f"unknown gallery name {name!r} "
        "(expected doubling-pair, ratio-gap-pair, or rolewicz)"
    )


# ---------------------------------------------------------------------------
# selftest: a seeded canned battery with fully deterministic output


def _random_corrector_check(rng: random.Random) -> dict:
    n = rng.randint(2, 6)
    M = rng.randint(1, 4)
    T1 = weighted_shift(table({rng.randint(1, 8): rng.uniform(0.5, 2.0)}, 2.0))
    T2 = PseudoShift(affine(2), constant(rng.uniform(1.2, 3.0)))
    targets = [
        SparseVector({m: rng.choice([-1, 1]) * rng.randint(1, 4) for m in range(1, M + 1)})
        for _ in range(2)
    ]
    z, cert = build_corrector([T1, T2], n, M, targets)
    rep = verify_bounds([T1, T2], n, z, targets, cert)
    return {"M": M, "n": n, "passed": rep.passed, "report": rep.as_dict()}


def _run_selftest(seed: int, tol: float):
    rng = random.Random(seed)
    checks = []

    for lam, expect in ((2.0, True), (1.0, False), (0.5, False)):
        rep = rolewicz(lam, 40)
        checks.append({
            "name": f"rolewicz-{lam}",
            "ok": rep["diverging"] == expect,
            "verdict": rep["certificate"]["verdict"],
        })

    rep = counterexample_direct_sum(2.0, 3.0, 50)
    checks.append({
        "gap": rep["gap"],
        "name": "ratio-gap-pair",
        "ok": rep["gap_constant"] and rep["salas"]["diverging"]
        and abs(rep["gap"] - 1.0 / 3.0) <= 1e-12,
    })

    built = construct_dhc_weighted_pair(2.0, [2.0, 0.5], 2)
    ops = example_operators((built.rule1, built.rule2), 2.0)
    scrit = check_scriterion_condition(ops, 0.5, 1, 4, nks=[3], k_bound=1, tol=tol)
    checks.append({
        "name": "doubling-pair-scrit",
        "ok": scrit.verdict == REFUTED and scrit.blockers[0].j == 2**4,
        "witness_j": scrit.blockers[0].j if scrit.blockers else None,
    })
    shc_ok = all(
        check_shc_condition_b(
            ops, 2.0 / k, k, 2, [built.targets[k - 1], 1.0],
            nks=built.nks, k_bound=k, tol=tol,
        ).verdict == VERIFIED
        for k in range(1, 3)
    )
    checks.append({"name": "doubling-pair-shc", "ok": shc_ok})

    dcrit = check_dcriterion_condition(
        [weighted_shift(constant(2.0)), weighted_shift(constant(3.0))],
        0.5, 1, 2, nks=None, k_bound=4, tol=tol,
    )
    checks.append({
        "name": "shared-map-dcrit",
        "ok": dcrit.verdict == REFUTED
        and all(b.kind == "overlap-nonempty" for b in dcrit.blockers),
    })

    corr = [_random_corrector_check(rng) for _ in range(5)]
    checks.append({
        "instances": corr,
        "name": "corrector-bounds",
        "ok": all(c["passed"] for c in corr),
    })

    ok = all(c["ok"] for c in checks)
    payload = {"checks": checks, "ok": ok, "seed": seed}
    return payload, EXIT_OK if ok else EXIT_REFUTED, []


# ---------------------------------------------------------------------------
# argument handling


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pshift",
        description="criterion checkers and orbit diagnostics for pseudo-shift tuples",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("check", "construct", "orbit", "gallery", "selftest"):
        sp = sub.add_parser(name)
        if name != "selftest":
            sp.add_argument("--config", required=True, help="path to a JSON run configuration")
        sp.add_argument("--out", help="report path; CSV/PNG artifacts land alongside")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--k-bound", type=int, default=None, dest="k_bound")
        sp.add_argument("--quiet", action="store_true")
    return parser


def _emit(report: dict, artifacts, out: Optional[str], quiet: bool) -> None:
    rendered = render_report(report)
    if out:
        out_path = Path(out)
        write_report(report, out_path)
        for suffix, writer in artifacts:
            writer(out_path.with_name(out_path.stem + "-" + suffix))
    if not quiet:
        sys.stdout.write(rendered)


def main(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    started = time.monotonic()
    try:
        if args.command == "selftest":
            payload, code, artifacts = _run_selftest(args.seed, args.tol or 1e-12)
            report = build_report(None, payload, started)
            _emit(report, artifacts, args.out, args.quiet)
            return code

        cfg = parse_config(Path(args.config).read_text())
        if cfg.command != args.command:
            raise ConfigError(
                f"config command {cfg.command!r} does not match subcommand {args.command!r}"
            )
        if args.tol is not None:
            cfg = RunConfig(**{**cfg.__dict__, "tol": args.tol})
        if args.seed:
            cfg = RunConfig(**{**cfg.__dict__, "seed": args.seed})

        if args.command == "check":
            payload, code, artifacts = _run_check(cfg, args.k_bound)
        elif args.command == "construct":
            payload, code, artifacts = _run_construct(cfg)
        elif args.command == "orbit":
            payload, code, artifacts = _run_orbit(cfg)
        else:
            payload, code, artifacts = _run_gallery(cfg)

        report = build_report(cfg, payload, started)
        _emit(report, artifacts, args.out or cfg.out, args.quiet)
        return code
    except (ConfigError, ValueError, OSError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
