"""Command-line entry point.

Subcommands: ``verify``, ``oracle``, ``defect-table``, ``corona-demo`` and
``selftest``.  Exit status is 0 when every check passes, 1 when a check fails
and 2 for usage or configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import lru_cache

from . import asymptotic as asy
from .config import ConfigError, RunConfig, load_config, parse_config
from .corona import (
    CSV_COLUMNS,
    DefectReport,
    closed_form_defect,
    defect_sq,
    defect_stability,
    l1_bound_holds,
    l1_defect,
    nonincreasing,
    stated_defect_formula,
)
from .group_action import make_action
from .oracle import Oracle, oracle_window
from .report import write_report
from .scalar import AlgebraicReal
from .witness import build_witness, gram_defect

log = logging.getLogger("treecorona")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

CHECK_COLUMNS = ["family", "gamma1", "i", "n", "check", "passed", "detail"]


@lru_cache(maxsize=None)
def _action(family: str):
    return make_action(family)


def _check(cell: dict, name: str, passed: bool, detail="") -> dict:
    return {
        "family": cell["family"],
        "gamma1": cell["gamma1"],
        "i": cell["i"],
        "n": cell["n"],
        "check": name,
        "passed": bool(passed),
        "detail": str(detail),
    }


def verify_cell(family: str, g1_text: str, i: int, n: int, checks: tuple) -> dict:
    """Run the per-cell checks; returns the defect row and the check rows."""
    action = _action(family)
    g1 = action.parse(g1_text)
    k = action.displacement(g1)
    head = {"family": action.tag, "gamma1": action.format(g1), "i": i, "n": n}
    rows = []
    if "positivity" in checks or "gram" in checks:
        w = build_witness(action, i, n)
        if "positivity" in checks:
            rows.append(_check(head, "positivity", w.nonnegative()))
        if "gram" in checks:
            bad = gram_defect(w, n)
            rows.append(_check(head, "gram", not bad, f"{len(bad)} bad vertices" if bad else ""))
    res = defect_sq(action, i, n, g1)
    if "defect" in checks:
        rows.append(_check(head, "defect", res.clean, "empty far region" if res.empty_region else ""))
    stable = None
    if "stability" in checks:
        st = defect_stability(action, i, g1, range(n, n + 5))
        stable = st.stable
        rows.append(_check(head, "stability", stable, " ".join(str(v) for v in st.values.values())))
    oracle_value = None
    if "oracle" in checks:
        oracle_value = Oracle(action).cell(i, n, g1).defect_sq
        rows.append(_check(head, "oracle", oracle_value == res.value, oracle_value))
    if "l1" in checks and res.worst is not None:
        x = action.apply(action.inverse(g1), res.worst)
        l1 = l1_defect(action, i, n, g1, x)
        rows.append(_check(head, "l1", l1_bound_holds(l1, res.value), f"l1={l1} at {action.tree.format_vertex(x)}"))
    report = DefectReport(
        family=action.tag,
        gamma1=action.format(g1),
        k=k,
        i=i,
        n=n,
        m=action.stabilizer_order(),
        defect_sq=res.value,
        region_size=res.region_size,
        oracle_defect_sq=oracle_value,
        stability=stable,
        clean=res.clean,
    )
    return {"defect": report.row(), "checks": rows, "value": str(res.value)}


def oracle_cell(family: str, g1_text: str, i: int, n: int, full_limit: int) -> dict:
    action = _action(family)
    g1 = action.parse(g1_text)
    window = oracle_window(action, n, g1, full_limit)
    return Oracle(action).cell(i, n, g1, window=window).row()


def table_cell(family: str, g1_text: str, i: int, n: int) -> dict:
    action = _action(family)
    g1 = action.parse(g1_text)
    k = action.displacement(g1)
    res = defect_sq(action, i, n, g1)
    value, bound = res.value.to_float()
    closed = closed_form_defect(i, k)
    return {
        "family": action.tag,
        "gamma1": action.format(g1),
        "k": k,
        "i": i,
        "n": n,
        "defect_sq_exact": str(res.value),
        "defect_sq_float": repr(value),
        "float_bound": repr(bound),
        "closed_form_value": str(closed),
        "closed_form_match": res.value == AlgebraicReal.rational(closed),
        "stated_formula_value": str(stated_defect_formula(i, k, action.stabilizer_order())),
    }


def _star(args):
    fn, rest = args
    return fn(*rest)


def _run_cells(fn, arglist: list, jobs: int) -> list:
    """Evaluate cells in config order, optionally across processes."""
    if jobs <= 1 or len(arglist) <= 1:
        return [fn(*a) for a in arglist]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_star, [(fn, a) for a in arglist]))


def _cells(cfg: RunConfig) -> list:
    act = cfg.action
    return [(cfg.family, act.format(g), i, cfg.n_for(g, i)) for g in cfg.gamma1 for i in cfg.i_values]


def run_verify(cfg: RunConfig, jobs: int = 1) -> tuple[int, dict]:
    results = _run_cells(verify_cell, [c + (cfg.checks,) for c in _cells(cfg)], jobs)
    defects = [r["defect"] for r in results]
    checks = [row for r in results for row in r["checks"]]
    if "decay" in cfg.checks:
        act = cfg.action
        for g in cfg.gamma1:
            word = act.format(g)
            ordered = sorted((r["i"], AlgebraicReal.parse(r["defect_sq_exact"])) for r in defects if r["gamma1"] == word)
            ok = nonincreasing(v for _, v in ordered)
            head = {"family": cfg.family, "gamma1": word, "i": "", "n": ""}
            checks.append(_check(head, "decay", ok, " ".join(str(v) for _, v in ordered)))
    failed = [c for c in checks if not c["passed"]]
    summary = {
        "command": "verify",
        "family": cfg.family,
        "cells": len(defects),
        "checks": len(checks),
        "failed": len(failed),
        "status": "pass" if not failed else "fail",
    }
    tables = {"defects": defects, "checks": checks}
    return (EXIT_OK if not failed else EXIT_FAIL), {"tables": tables, "summary": summary,
                                                    "columns": {"defects": CSV_COLUMNS, "checks": CHECK_COLUMNS}}


def run_oracle(cfg: RunConfig, jobs: int = 1) -> tuple[int, dict]:
    tree = cfg.action.tree
    limit = cfg.oracle_max_window if cfg.oracle_window == "full" else None
    cells = _cells(cfg)
    if limit is not None:
        for _, _, _, n in cells:
            if tree.ball_size(2 * n) > limit:
                raise ConfigError(
                    f"oracle window B({2 * n}) has {tree.ball_size(2 * n)} vertices, above oracle_max_window={limit}"
                )
    full_limit = limit if limit is not None else 20000
    rows = _run_cells(oracle_cell, [c + (full_limit,) for c in cells], jobs)
    summary = {"command": "oracle", "family": cfg.family, "cells": len(rows), "status": "pass"}
    return EXIT_OK, {"tables": {"oracle": rows}, "summary": summary, "columns": {}}


def run_defect_table(cfg: RunConfig, jobs: int = 1) -> tuple[int, dict]:
    rows = _run_cells(table_cell, _cells(cfg), jobs)
    summary = {"command": "defect-table", "family": cfg.family, "cells": len(rows), "status": "pass"}
    return EXIT_OK, {"tables": {"defect_table": rows}, "summary": summary, "columns": {}}


def _space(cfg: RunConfig) -> asy.DiscretizedSpace:
    spec = cfg.space
    if spec.get("kind") == "tree":
        action = make_action(spec.get("family", cfg.family))
        return asy.DiscretizedSpace.from_tree(action.tree, spec["radius"])
    return asy.DiscretizedSpace.segment(spec["radius"])


def sequence_row(space: asy.DiscretizedSpace, stages: int, spec) -> dict:
    seq = asy.make_sequence(space, stages, spec)
    h, levels = asy.cutoff_project(seq)
    bad = asy.cutoff_bound_holds(seq, h, levels)
    witness = asy.ideal_witness(h)
    radii_ok = all(
        lv < 1 or (r is not None and r >= lv - 1) for r, lv in zip(witness.radii, levels)
    )
    delta = asy.equicontinuity_check(seq, min(5, space.radius), Fraction(1, 10))
    return {
        "sequence": seq.name,
        "stages": stages,
        "bound": str(seq.bound),
        "levels": " ".join(map(str, levels)),
        "cutoff_bound_ok": not bad,
        "h_radii_ok": radii_ok,
        "h_in_ideal": witness.accepted,
        "g_in_ideal": asy.ideal_witness(seq).accepted,
        "equicontinuity_delta": "" if delta is None else str(delta),
    }


def round_trip_row(space: asy.DiscretizedSpace, support: int, stages: int) -> dict:
    f = {t: Fraction(1, 1 + int(space.norm(t))) for t in space.ball(support)}
    seq = asy.embed_bounded(space, f, stages)
    const = asy.FunctionSequence(space, [dict(f)] * stages, list(seq.windows))
    exact = all(seq.stages[n] == f for n in range(support, stages))
    semi = asy.corona_seminorm(seq - const, 0, support)
    return {"support_radius": support, "stages_equal_f": exact, "seminorm": str(semi), "ok": exact and semi == 0}


def run_corona_demo(cfg: RunConfig, jobs: int = 1) -> tuple[int, dict]:
    space = _space(cfg)
    seq_rows = [sequence_row(space, cfg.stages, spec) for spec in cfg.sequences]
    trips = [round_trip_row(space, s, cfg.stages) for s in range(0, min(10, cfg.stages))]
    ok = all(r["cutoff_bound_ok"] and r["h_radii_ok"] for r in seq_rows) and all(r["ok"] for r in trips)
    summary = {"command": "corona-demo", "sequences": len(seq_rows), "status": "pass" if ok else "fail"}
    return (EXIT_OK if ok else EXIT_FAIL), {
        "tables": {"sequences": seq_rows, "round_trip": trips},
        "summary": summary,
        "columns": {},
    }


SELFTEST_CONFIGS = [
    {"family": "line", "gamma1": ["t", "t^2"], "i": [1, 2, 4], "checks": ["positivity", "gram", "defect", "stability", "l1", "decay", "oracle"]},
    {"family": "dihedral", "gamma1": ["t", "t^2·s"], "i": [1, 2, 4], "checks": ["positivity", "gram", "defect", "stability", "l1", "decay", "oracle"]},
    {"family": "free:2", "gamma1": ["a", "aB"], "i": [1, 2, 3], "checks": ["positivity", "gram", "defect", "l1", "decay", "oracle"]},
]


def run_selftest(jobs: int = 1) -> tuple[int, dict]:
    tables, worst = {}, EXIT_OK
    for data in SELFTEST_CONFIGS:
        code, out = run_verify(parse_config(data), jobs)
        worst = max(worst, code)
        tables[f"checks_{out['summary']['family'].replace(':', '')}"] = out["tables"]["checks"]
    demo = parse_config({"family": "line", "stages": 20, "space": {"kind": "segment", "radius": 50}})
    code, out = run_corona_demo(demo)
    worst = max(worst, code)
    tables["sequences"] = out["tables"]["sequences"]
    summary = {"command": "selftest", "status": "pass" if worst == EXIT_OK else "fail"}
    return worst, {"tables": tables, "summary": summary, "columns": {}}


COMMANDS = {
    "verify": run_verify,
    "oracle": run_oracle,
    "defect-table": run_defect_table,
    "corona-demo": run_corona_demo,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="treecorona", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in (*COMMANDS, "selftest"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=name != "selftest", help="JSON run configuration")
        sp.add_argument("--out", help="output directory (overrides the config)")
        sp.add_argument("--format", choices=["csv", "json"], help="report format (overrides the config)")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes for independent cells")
        sp.add_argument("-v", "--verbose", action="store_true")
    return p


def _print_summary(out: dict) -> None:
    for name, rows in out["tables"].items():
        for row in rows:
            if "check" in row:
                mark = "PASS" if row["passed"] else "FAIL"
                print(f"{mark} {row['check']:<10} {row['family']} gamma1={row['gamma1']} i={row['i']} {row['detail']}")
    s = out["summary"]
    print(f"{s['command']}: {s['status']}")


def main(argv: list | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "selftest":
            code, out = run_selftest(args.jobs)
            out_dir, fmt = args.out, args.format or "csv"
        else:
            cfg = load_config(args.config)
            code, out = COMMANDS[args.command](cfg, args.jobs)
            out_dir, fmt = args.out or cfg.out, args.format or cfg.format
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _print_summary(out)
    if out_dir:
        write_report(out_dir, out["tables"], fmt, out["summary"], out["columns"])
    return code


if __name__ == "__main__":
    sys.exit(main())
