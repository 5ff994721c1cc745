"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the lines appear even when
output capture is on.
"""

import json
import random
import time
from fractions import Fraction

import pytest

from helpers import actions, random_element
from treecorona.asymptotic import (
    SHIPPED,
    DiscretizedSpace,
    FunctionSequence,
    corona_seminorm,
    cutoff_bound_holds,
    cutoff_project,
    embed_bounded,
    make_sequence,
)
from treecorona.cli import main
from treecorona.corona import (
    default_n,
    defect_sq,
    l1_bound_holds,
    l1_defect,
    nonincreasing,
)
from treecorona.group_action import make_action
from treecorona.hilbert_module import convolve, inner, involution
from treecorona.oracle import Oracle
from treecorona.scalar import ONE, ZERO, AlgebraicReal, inv_sqrt
from treecorona.witness import build_witness, gram_defect

MOVERS = {
    "line": [1, 2, 3],
    "dihedral": [(1, 1), (2, -1), (3, 1)],
    "free:2": ["a", "aB", "abA"],
}
I_RANGE = range(1, 21)


@pytest.fixture
def report(capsys):
    start = time.perf_counter()

    def emit(number: int, ok: bool, detail: str, budget: float | None = None):
        took = time.perf_counter() - start
        in_time = budget is None or took < budget
        status = "PASS" if ok and in_time else "FAIL"
        limit = f" (budget {budget:g}s)" if budget is not None else ""
        with capsys.disabled():
            print(f"\n[criterion {number:2d}] {status} {detail} [{took:.1f}s{limit}]")
        assert ok, detail
        assert in_time, f"took {took:.1f}s, budget {budget}s"

    return emit


@pytest.fixture(scope="module")
def defect_grid():
    """Module-path defects for every (family, mover, i) cell at ``n = i + k + 2``."""
    grid = {}
    for fam, movers in MOVERS.items():
        act = make_action(fam)
        for g1 in movers:
            for i in I_RANGE:
                res = defect_sq(act, i, default_n(act, i, g1), g1)
                grid[fam, act.displacement(g1), i] = (g1, res)
    return grid


def test_criterion_01_gram_identity(report):
    bad = []
    for act in (make_action("line"), make_action("free:2"), make_action("dihedral")):
        for n in range(1, 13):
            for i in range(1, 9):
                if gram_defect(build_witness(act, i, n), n):
                    bad.append((act.tag, i, n))
    report(1, not bad, f"<T,T> == chi_B(2n) for 3 families, i<=8, n<=12; failures={bad[:3]}", 30)


def test_criterion_02_oracle_equivalence(report, defect_grid):
    mismatches = []
    for fam, movers in MOVERS.items():
        act = make_action(fam)
        orc = Oracle(act)
        for g1 in movers:
            k = act.displacement(g1)
            for i in I_RANGE:
                _, res = defect_grid[fam, k, i]
                cell = orc.cell(i, default_n(act, i, g1), g1)
                if cell.defect_sq != res.value or cell.region_size != res.region_size or not res.clean:
                    mismatches.append((fam, k, i))
    report(2, not mismatches, f"defect_sq == oracle on {3 * 3 * len(I_RANGE)} cells; mismatches={mismatches[:3]}", 60)


def test_criterion_03_decay(report, defect_grid):
    monotone = all(
        nonincreasing(defect_grid[fam, k, i][1].value for i in I_RANGE)
        for fam in MOVERS
        for k in (1, 2, 3)
    )
    value = defect_sq(make_action("line"), 199, 202, 1).value
    ok = monotone and value == AlgebraicReal.rational(Fraction(1, 100))
    report(3, ok, f"tables nonincreasing in i: {monotone}; line i=199 k=1 defect_sq = {value} (want 1/100)", 120)


def test_criterion_04_m_independence(report, defect_grid):
    diff = [
        (k, i)
        for k in (1, 2, 3)
        for i in I_RANGE
        if defect_grid["dihedral", k, i][1].value != defect_grid["line", k, i][1].value
    ]
    sample = defect_grid["dihedral", 1, 4][1].value
    report(4, not diff, f"dihedral (m=2) == line (m=1) on all (i, k); i=4 k=1 gives {sample}, printed formula 5/4")


def test_criterion_05_n_stability(report, defect_grid):
    unstable = []
    for fam, movers in MOVERS.items():
        act = make_action(fam)
        for g1 in movers:
            k = act.displacement(g1)
            for i in I_RANGE:
                base = defect_grid[fam, k, i][1].value
                for n in range(i + k + 3, i + k + 7):
                    if defect_sq(act, i, n, g1).value != base:
                        unstable.append((fam, k, i, n))
                        break
    report(5, not unstable, f"defect_sq constant over n in [i+k+2, i+k+6] on all cells; unstable={unstable[:3]}")


def test_criterion_06_l1_bridge(report, defect_grid):
    line = make_action("line")
    anchor = l1_defect(line, 4, 12, 1, 20)
    failures = []
    for (fam, k, i), (g1, res) in defect_grid.items():
        act = make_action(fam)
        x = act.apply(act.inverse(g1), res.worst)
        l1 = l1_defect(act, i, default_n(act, i, g1), g1, x)
        if not l1_bound_holds(l1, res.value):
            failures.append((fam, k, i))
    ok = anchor == AlgebraicReal.rational(Fraction(2, 5)) and not failures
    report(6, ok, f"line i=4 k=1 l1 = {anchor} (want 2/5); l1 <= 2 sqrt(defect_sq) on {len(defect_grid)} cells; failures={failures[:3]}")


def test_criterion_07_star_algebra(report):
    rng = random.Random(20261015)
    acts = actions()
    failures = 0
    for trial in range(200):
        act = acts[trial % len(acts)]
        f, g, h = (random_element(rng, act) for _ in range(3))
        checks = [
            convolve(convolve(f, g), h) == convolve(f, convolve(g, h)),
            involution(convolve(f, g)) == convolve(involution(g), involution(f)),
            inner(f, g) == inner(g, f),
            all(x.sign() >= 0 for x in inner(f, f).values.values()),
        ]
        failures += not all(checks)
    report(7, failures == 0, f"200 random elements: associativity, (fg)* = g*f*, <f,g>* = <g,f>, <f,f> >= 0; failures={failures}", 30)


def test_criterion_08_cutoff_bound(report):
    space = DiscretizedSpace.segment(110)
    bad = {}
    for name in SHIPPED:
        seq = make_sequence(space, 50, name)
        h, levels = cutoff_project(seq)
        fails = cutoff_bound_holds(seq, h, levels)
        if fails:
            bad[name] = fails
    report(8, not bad, f"sup|g_n - h_n| <= 1/l(n) on {', '.join(SHIPPED)} with N=50; failures={bad}", 10)


def test_criterion_09_round_trip(report):
    space = DiscretizedSpace.segment(40)
    rng = random.Random(9)
    failures = []
    for j in range(10):
        s = j  # support radius
        f = {t: Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for t in space.ball(s)}
        f = {t: v for t, v in f.items() if v}
        seq = embed_bounded(space, f, 20)
        const = FunctionSequence(space, [dict(f)] * 20, list(seq.windows))
        exact = all(seq.stages[n] == f for n in range(s, 20))
        semi = corona_seminorm(seq - const, 0, s)
        if not exact or semi != 0:
            failures.append(s)
    report(9, not failures, f"10 compact functions: stages n >= support radius equal f, seminorm 0; failures={failures}")


def _random_value(rng):
    terms = {}
    for _ in range(rng.randint(0, 3)):
        d = rng.choice([1, 2, 3, 5, 6, 7, 10, 12])
        terms[d] = terms.get(d, Fraction(0)) + Fraction(rng.randint(-40, 40), rng.randint(1, 9))
    return AlgebraicReal(terms)


def test_criterion_10_scalar_kernel(report):
    rng = random.Random(10)
    vals = [_random_value(rng) for _ in range(1000)]
    ring_bad = 0
    for j in range(1000):
        a, b, c = vals[j], vals[(j * 7 + 1) % 1000], vals[(j * 13 + 5) % 1000]
        ring_bad += not (
            a + b == b + a
            and a * b == b * a
            and (a * b) * c == a * (b * c)
            and a * (b + c) == a * b + a * c
            and a - a == ZERO
            and a * ONE == a
            and AlgebraicReal.parse(str(a)) == a
        )
    sign_bad = checked = 0
    j = 0
    while checked < 1000:
        d = vals[j % 1000] - vals[(j * 31 + 17) % 1000]
        j += 1
        val, bound = d.to_float()
        if abs(val) <= 1e-6:
            continue
        checked += 1
        sign_bad += d.sign() != (1 if val > 0 else -1) or bound >= abs(val)
    sqrt_bad = sum(1 for n in range(1, 1001) if inv_sqrt(n) * inv_sqrt(n) * n != ONE)
    ok = ring_bad == sign_bad == sqrt_bad == 0
    report(10, ok, f"ring laws on 1000 values ({ring_bad} bad), sign vs certified float on 1000 ({sign_bad} bad), inv_sqrt squared ({sqrt_bad} bad)", 10)


def test_criterion_11_determinism(report, tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"family": "free:2", "gamma1": ["a", "aB"], "i": [1, 2, 4, 8]}))
    blobs = []
    for run in ("a", "b"):
        out = tmp_path / run
        main(["verify", "--config", str(cfg), "--out", str(out)])
        main(["verify", "--config", str(cfg), "--out", str(out / "json"), "--format", "json"])
        blobs.append({p.relative_to(out).as_posix(): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()})
    capsys.readouterr()
    same = blobs[0] == blobs[1] and len(blobs[0]) >= 4
    report(11, same, f"two verify runs produced byte-identical reports ({', '.join(blobs[0])})")
