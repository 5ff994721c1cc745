"""Finite-stage stand-ins for sequences of functions on a proper metric space.

A :class:`FunctionSequence` is a list of stages ``f_0, ..., f_{N-1}``; stage
``n`` is a bounded function on the ball ``B(W(n))`` of a finite
:class:`DiscretizedSpace`.  Statements that hold "for almost every ``n``" along
an ultrafilter are checked here on a tail ``n >= N0`` instead, which is a
stronger requirement.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .group_action import GroupAction
from .tree import TreeGeometry

__all__ = [
    "DiscretizedSpace",
    "FunctionSequence",
    "IdealWitness",
    "chi",
    "equicontinuity_check",
    "ideal_witness",
    "cutoff_project",
    "cutoff_bound_holds",
    "embed_bounded",
    "corona_seminorm",
    "pointwise_limit",
    "translate_sequence",
    "SEQUENCE_FAMILIES",
    "make_sequence",
]


@dataclass(frozen=True)
class DiscretizedSpace:
    """A finite point set with a metric and a basepoint.

    ``tree`` spaces are balls of a simplicial tree (genuinely discrete).  Without
    a tree the points are ``j*mesh`` on the real line; ``continuum=True`` marks
    them as a sampling of R, where distances below the mesh carry no information.
    """

    points: tuple
    radius: int | Fraction
    tree: TreeGeometry | None = None
    mesh: Fraction = Fraction(1)
    continuum: bool = False

    @classmethod
    def from_tree(cls, tree: TreeGeometry, radius: int) -> "DiscretizedSpace":
        return cls(tuple(tree.ball(radius)), radius, tree)

    @classmethod
    def segment(cls, radius, mesh=1, continuum: bool = False) -> "DiscretizedSpace":
        mesh, radius = Fraction(mesh), Fraction(radius)
        steps = int(radius / mesh)
        pts = tuple(j * mesh for j in range(-steps, steps + 1))
        return cls(pts, radius, None, mesh, continuum)

    @property
    def origin(self):
        return self.tree.origin if self.tree is not None else Fraction(0)

    def dist(self, s, t):
        if self.tree is not None:
            return self.tree.distance(s, t)
        return abs(s - t)

    def norm(self, t):
        return self.tree.norm(t) if self.tree is not None else abs(t)

    def ball(self, r) -> list:
        return [p for p in self.points if self.norm(p) <= r]

    def default_grid(self) -> list:
        if self.continuum:
            return [j * self.mesh for j in range(2, 9)]
        return [Fraction(1, 2)]


def chi(space: DiscretizedSpace, n) -> dict:
    """Cutoff vanishing on ``B(n)`` and equal to 1 from distance ``n+1`` on.

    Sharp indicator on integer-distance spaces; a linear ramp across
    ``n < d < n+1`` on continuum samplings.
    """
    out = {}
    for p in space.points:
        d = space.norm(p)
        if space.continuum:
            out[p] = min(Fraction(1), max(Fraction(0), Fraction(d) - n))
        else:
            out[p] = Fraction(1) if d >= n + 1 else Fraction(0)
    return out


@dataclass
class FunctionSequence:
    space: DiscretizedSpace
    stages: list
    windows: list
    name: str = ""

    def __post_init__(self):
        if len(self.stages) != len(self.windows):
            raise ValueError("one window per stage")
        if any(b < a for a, b in zip(self.windows, self.windows[1:])):
            raise ValueError("window schedule must be nondecreasing")

    def __len__(self) -> int:
        return len(self.stages)

    def points(self, n: int) -> list:
        return self.space.ball(self.windows[n])

    def value(self, n: int, t):
        return self.stages[n].get(t, 0)

    @property
    def bound(self):
        return max((abs(v) for st in self.stages for v in st.values()), default=0)

    def _combine(self, other: "FunctionSequence", op: Callable) -> "FunctionSequence":
        if other.space != self.space or len(other) != len(self):
            raise ValueError("sequences must share space and length")
        stages, windows = [], []
        for n in range(len(self)):
            w = min(self.windows[n], other.windows[n])
            pts = self.space.ball(w)
            stages.append(_prune({t: op(self.value(n, t), other.value(n, t)) for t in pts}))
            windows.append(w)
        return FunctionSequence(self.space, stages, windows)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __mul__(self, other):
        if isinstance(other, FunctionSequence):
            return self._combine(other, lambda a, b: a * b)
        return FunctionSequence(
            self.space, [_prune({t: other * v for t, v in st.items()}) for st in self.stages], list(self.windows)
        )

    __rmul__ = __mul__


def _prune(stage: dict) -> dict:
    return {t: v for t, v in stage.items() if v != 0}


def _tail(seq: FunctionSequence, n0: int | None) -> range:
    start = len(seq) // 2 if n0 is None else n0
    return range(start, len(seq))


def equicontinuity_check(seq: FunctionSequence, r, eps, n0: int | None = None, grid: Iterable | None = None):
    """Smallest ``delta`` in the grid with ``|f_n(s) - f_n(t)| <= eps`` whenever
    ``s, t in B(r)``, ``d(s, t) < delta`` and ``n >= n0``; ``None`` if none works."""
    space = seq.space
    cands = sorted(space.default_grid() if grid is None else grid)
    tail = _tail(seq, n0)
    for delta in cands:
        if _equicontinuous(seq, r, eps, delta, tail):
            return delta
    return None


def _equicontinuous(seq, r, eps, delta, tail) -> bool:
    space = seq.space
    for n in tail:
        pts = [p for p in seq.points(n) if space.norm(p) <= r]
        for a in range(len(pts)):
            s = pts[a]
            fs = seq.value(n, s)
            for b in range(a + 1, len(pts)):
                t = pts[b]
                if space.dist(s, t) < delta and abs(fs - seq.value(n, t)) > eps:
                    return False
    return True


@dataclass
class IdealWitness:
    radii: list
    accepted: bool
    threshold: object = None
    tail_start: int = 0


def vanishing_radius(seq: FunctionSequence, n: int):
    """Largest ``r`` with ``f_n = 0`` on ``B(r)``; ``None`` if ``f_n(o) != 0``."""
    space = seq.space
    by_norm: dict = {}
    for p in seq.points(n):
        by_norm.setdefault(space.norm(p), []).append(p)
    best = None
    for d in sorted(by_norm):
        if any(seq.value(n, p) != 0 for p in by_norm[d]):
            return best
        best = d
    return best


def ideal_witness(seq: FunctionSequence, n0: int | None = None, threshold=None) -> IdealWitness:
    """Per-stage vanishing radii; accepted when the tail is defined, nondecreasing,
    and never below ``threshold`` (default: half the tail start)."""
    radii = [vanishing_radius(seq, n) for n in range(len(seq))]
    tail = _tail(seq, n0)
    thr = tail.start // 2 if threshold is None else threshold
    tail_r = [radii[n] for n in tail]
    ok = (
        bool(tail_r)
        and all(r is not None for r in tail_r)
        and all(b >= a for a, b in zip(tail_r, tail_r[1:]))
        and min(tail_r) >= thr
    )
    return IdealWitness(radii, ok, thr, tail.start)


def cutoff_level(seq: FunctionSequence, n: int) -> int:
    """``max{k <= n : |g_n| < 1/k on B(k)}``, or 0 when no ``k >= 1`` qualifies."""
    space = seq.space
    level = 0
    for k in range(1, n + 1):
        pts = [p for p in seq.points(n) if space.norm(p) <= k]
        if all(abs(seq.value(n, p)) < Fraction(1, k) for p in pts):
            level = k
        else:
            break
    return level


def cutoff_project(seq: FunctionSequence) -> tuple[FunctionSequence, list]:
    """``h_n = g_n * chi_{l(n)-1}`` with ``l(n)`` from :func:`cutoff_level`."""
    levels = [cutoff_level(seq, n) for n in range(len(seq))]
    stages = []
    for n, lv in enumerate(levels):
        cut = chi(seq.space, lv - 1)
        stages.append(_prune({t: v * cut[t] for t, v in seq.stages[n].items()}))
    return FunctionSequence(seq.space, stages, list(seq.windows), f"cutoff({seq.name})"), levels


def cutoff_bound_holds(seq: FunctionSequence, h: FunctionSequence, levels: list) -> list:
    """Stages where ``sup |g_n - h_n| <= 1/l(n)`` fails (``l(n) >= 1`` only)."""
    bad = []
    for n, lv in enumerate(levels):
        if lv < 1:
            continue
        gap = max((abs(seq.value(n, t) - h.value(n, t)) for t in seq.points(n)), default=0)
        if gap > Fraction(1, lv):
            bad.append(n)
    return bad


def embed_bounded(space: DiscretizedSpace, f: Mapping, stages: int) -> FunctionSequence:
    """``f_n = (1 - chi_n) * f`` for ``n < stages``."""
    out = []
    for n in range(stages):
        cut = chi(space, n)
        out.append(_prune({t: (1 - cut[t]) * v for t, v in f.items()}))
    return FunctionSequence(space, out, [space.radius] * stages, "embed")


def corona_seminorm(seq: FunctionSequence, r, n0: int = 0):
    """``max_{n >= n0} sup{|f_n(t)| : d(o, t) >= r}``."""
    space = seq.space
    best = 0
    for n in range(n0, len(seq)):
        for t, v in seq.stages[n].items():
            if space.norm(t) >= r and abs(v) > best:
                best = abs(v)
    return best


def pointwise_limit(seq: FunctionSequence, n0: int | None = None) -> tuple[dict, object]:
    """Last-stage values and the largest tail deviation from them."""
    tail = _tail(seq, n0)
    last = seq.stages[-1]
    osc = 0
    for n in tail:
        for t in seq.points(n):
            osc = max(osc, abs(seq.value(n, t) - last.get(t, 0)))
    return dict(last), osc


def translate_sequence(seq: FunctionSequence, action: GroupAction, g) -> FunctionSequence:
    """``(g.f_n)(t) = f_n(g^-1 t)``, kept on ``B(W(n) - k)`` so every lookup is in range."""
    space = seq.space
    if space.tree is None or space.tree != action.tree:
        raise ValueError("translation needs a tree space matching the action")
    k = action.displacement(g)
    ginv = action.inverse(g)
    stages, windows = [], []
    for n, st in enumerate(seq.stages):
        w = max(seq.windows[n] - k, 0)
        stages.append(_prune({t: st.get(action.apply(ginv, t), 0) for t in space.ball(w)}))
        windows.append(w)
    return FunctionSequence(space, stages, windows, f"translate({seq.name})")


# shipped sequence families


def _bump(space, stages, **_):
    out = []
    for n in range(stages):
        out.append({t: Fraction(1) for t in space.points if n < space.norm(t) <= 2 * n})
    return FunctionSequence(space, out, [space.radius] * stages, "bump")


def _reciprocal(space, stages, scale=1, **_):
    scale = Fraction(scale)
    out = [{t: scale / max(n, 1) for t in space.points} for n in range(stages)]
    return FunctionSequence(space, [_prune(s) for s in out], [space.radius] * stages, "reciprocal")


def _embed(space, stages, support=4, **_):
    f = {t: Fraction(1) for t in space.points if space.norm(t) <= support}
    seq = embed_bounded(space, f, stages)
    seq.name = "embed"
    return seq


def _product(space, stages, factors=None, **_):
    factors = factors or [{"name": "reciprocal"}, {"name": "bump"}]
    seq = make_sequence(space, stages, factors[0])
    for spec in factors[1:]:
        seq = seq * make_sequence(space, stages, spec)
    seq.name = "product"
    return seq


def _sum(space, stages, terms=None, **_):
    terms = terms or [{"name": "bump"}, {"name": "reciprocal"}]
    seq = make_sequence(space, stages, terms[0])
    for spec in terms[1:]:
        seq = seq + make_sequence(space, stages, spec)
    seq.name = "sum"
    return seq


def _table(space, stages, rows=None, seed=0, **_):
    """Explicit radial rows ``rows[n][d]`` (value at distance ``d``), or seeded random ones."""
    if rows is None:
        rng = random.Random(seed)
        rows = [
            [Fraction(rng.randint(-16, 16), 16) for _ in range(int(space.radius) + 1)]
            for _ in range(stages)
        ]
    out = []
    for n in range(stages):
        row = rows[min(n, len(rows) - 1)]
        st = {}
        for t in space.points:
            d = space.norm(t)
            j = int(d)
            if j < len(row):
                st[t] = Fraction(row[j])
        out.append(_prune(st))
    return FunctionSequence(space, out, [space.radius] * stages, "table")


def _sine(space, stages, **_):
    out = [{t: math.sin(n * float(t if space.tree is None else space.norm(t))) for t in space.points}
           for n in range(stages)]
    return FunctionSequence(space, out, [space.radius] * stages, "sine")


def _ramp(space, stages, **_):
    out = [{t: Fraction(t) / max(n, 1) for t in space.points} for n in range(stages)]
    return FunctionSequence(space, [_prune(s) for s in out], [space.radius] * stages, "ramp")


SEQUENCE_FAMILIES: dict = {
    "bump": _bump,
    "reciprocal": _reciprocal,
    "embed": _embed,
    "product": _product,
    "table": _table,
    "sum": _sum,
    "sine": _sine,
    "ramp": _ramp,
}

SHIPPED = ("bump", "reciprocal", "embed", "product", "table")


def make_sequence(space: DiscretizedSpace, stages: int, spec) -> FunctionSequence:
    """Build a named family; ``spec`` is a name or ``{"name": ..., **params}``."""
    if isinstance(spec, str):
        spec = {"name": spec}
    params = dict(spec)
    name = params.pop("name")
    try:
        factory = SEQUENCE_FAMILIES[name]
    except KeyError:
        raise ValueError(f"unknown sequence family {name!r}") from None
    return factory(space, stages, **params)
