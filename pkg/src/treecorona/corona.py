"""Finite-stage defect of the witnesses in the corona norm.

Given a mover ``g1`` with ``k = d(g1.o, o)``, the squared corona norm of
``T - delta_g1 * T`` reduces to the supremum of ``|2 - 2 <T, delta_g1*T>(t)|``
over the far region

    O(i, n) = (B(2n) & g1.B(2n)) - (B(i) | g1.B(i)),

because the parts near the basepoint (a compactly supported ``a``) and near
the sphere of radius ``2n`` (a sequence in the ideal ``I``) are quotiented
away.  Everything here goes through the module operations: the witness is
built, convolved with ``delta_g1``, and paired with itself.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .group_action import GroupAction
from .hilbert_module import (
    ModuleElement,
    OutOfWindow,
    WindowFunction,
    convolve,
    inner,
)
from .scalar import ONE, TWO, ZERO, AlgebraicReal
from .witness import build_witness, x_set

log = logging.getLogger(__name__)

__all__ = [
    "DefectContext",
    "DefectResult",
    "DefectReport",
    "ProbabilityWeights",
    "defect_windows",
    "defect_context",
    "far_region",
    "z_set",
    "cross_term",
    "defect_sq",
    "defect_stability",
    "default_n",
    "probability_weights",
    "l1_defect",
    "l1_bound_holds",
    "closed_form_defect",
    "stated_defect_formula",
    "stated_z_count",
    "nonincreasing",
    "CSV_COLUMNS",
]

# Balls above this size are replaced by skeleton windows.
FULL_BALL_LIMIT = 20000


def default_n(action: GroupAction, i: int, g1) -> int:
    return i + action.displacement(g1) + 2


def defect_windows(action: GroupAction, n: int, g1) -> tuple[frozenset, frozenset]:
    """Evaluation window ``W`` covering ``B(2n) | g1.B(2n)``, and ``W | g1^-1.W``.

    When ``B(2n)`` is too large to list (free groups of rank >= 2), ``W`` is
    the part of a skeleton around the hull of ``{o, g1.o}`` lying in
    ``B(2n) | g1.B(2n)``; every vertex of the full union is carried onto ``W``
    by a tree automorphism fixing ``o`` and ``g1.o``, and all quantities here
    only depend on distances to those points.
    """
    tree = action.tree
    r = 2 * n
    g1o = action.apply(g1, tree.origin)
    if tree.ball_size(r) <= FULL_BALL_LIMIT:
        ball = tree.ball(r)
        ev = set(ball)
        ev.update(action.apply(g1, v) for v in ball)
    else:
        k = tree.norm(g1o)
        skel = tree.skeleton(r + k, centers=(tree.origin, g1o), thickness=1)
        ev = {t for t in skel if tree.norm(t) <= r or tree.distance(g1o, t) <= r}
    g1inv = action.inverse(g1)
    ext = set(ev)
    ext.update(action.apply(g1inv, t) for t in ev)
    return frozenset(ev), frozenset(ext)


def far_region(action: GroupAction, i: int, n: int, g1, window: Iterable | None = None) -> list:
    """``(B(2n) & g1.B(2n)) - (B(i) | g1.B(i))``, restricted to ``window``.

    Membership in ``g1.B(r)`` is tested as ``g1^-1 t in B(r)``.
    """
    if i < 1 or n < 1:
        raise ValueError("need i >= 1 and n >= 1")
    tree = action.tree
    if window is None:
        window = defect_windows(action, n, g1)[0]
    g1inv = action.inverse(g1)
    r = 2 * n
    out = []
    for t in window:
        dt = tree.norm(t)
        ds = tree.norm(action.apply(g1inv, t))
        if dt <= r and ds <= r and not (dt <= i or ds <= i):
            out.append(t)
    return sorted(out)


def z_set(action: GroupAction, i: int, t, g1) -> frozenset:
    """``X(i, t) & g1.X(i, g1^-1 t)``, by filtering."""
    g1inv = action.inverse(g1)
    here = x_set(action, i, t)
    there = x_set(action, i, action.apply(g1inv, t))
    return frozenset(g for g in here if action.compose(g1inv, g) in there)


@dataclass
class DefectContext:
    action: GroupAction
    i: int
    n: int
    g1: object
    window: frozenset
    witness: ModuleElement
    moved: ModuleElement
    cross: WindowFunction

    @property
    def clean(self) -> bool:
        return self.witness.clean and self.moved.clean and self.cross.clean

    def region(self) -> list:
        return far_region(self.action, self.i, self.n, self.g1, self.window)

    def pointwise_defect(self) -> WindowFunction:
        """``<T - dT, T - dT>`` on the window (before quotienting)."""
        diff = self.witness.restrict(self.window) - self.moved
        return inner(diff, diff)

    def expanded_defect(self) -> WindowFunction:
        """``chi_B(2n) + chi_{g1.B(2n)} - 2 <T, dT>`` on the window."""
        tree = self.action.tree
        g1inv = self.action.inverse(self.g1)
        r = 2 * self.n
        vals = {}
        for t in self.window:
            c = (tree.norm(t) <= r) + (tree.norm(self.action.apply(g1inv, t)) <= r)
            v = AlgebraicReal.rational(c) - TWO * self.cross(t)
            if v:
                vals[t] = v
        out = None if self.cross.outside is None else -TWO * self.cross.outside
        return WindowFunction._build(self.window, vals, out, True)

    def residual(self) -> WindowFunction:
        """The expanded defect after subtracting the ideal part and the compact part."""
        tree = self.action.tree
        g1inv = self.action.inverse(self.g1)
        r, i = 2 * self.n, self.i
        full = self.expanded_defect()
        vals = {}
        for t in self.window:
            dt = tree.norm(t)
            ds = tree.norm(self.action.apply(g1inv, t))
            f = full(t)
            g_n = 1 if (dt <= r) != (ds <= r) else 0
            a = f if (dt <= i or ds <= i) else ZERO
            v = f - g_n - a
            if v:
                vals[t] = v
        return WindowFunction._build(self.window, vals, None, True)


@lru_cache(maxsize=64)
def defect_context(action: GroupAction, i: int, n: int, g1, window: frozenset | None = None) -> DefectContext:
    ev, ext = defect_windows(action, n, g1)
    if window is not None:
        ev = frozenset(ev | window)
        g1inv = action.inverse(g1)
        ext = frozenset(ext | ev | {action.apply(g1inv, t) for t in ev})
    witness = build_witness(action, i, n, window=ext)
    delta = ModuleElement.delta(action, g1, WindowFunction.one(ext))
    moved = convolve(delta, witness, target=ev)
    cross = inner(witness.restrict(ev), moved)
    return DefectContext(action, i, n, g1, ev, witness, moved, cross)


def cross_term(action: GroupAction, i: int, n: int, g1, t) -> AlgebraicReal:
    """``sum_g T(g)(t) * T(g1^-1 g)(g1^-1 t)`` for ``t`` in ``B(2n)``."""
    if action.tree.norm(t) > 2 * n:
        raise OutOfWindow(f"{action.tree.format_vertex(t)} is outside B({2 * n})")
    ctx = defect_context(action, i, n, g1)
    if t not in ctx.window:
        ctx = defect_context(action, i, n, g1, frozenset([t]))
    return ctx.cross(t)


@dataclass
class DefectResult:
    value: AlgebraicReal
    region_size: int
    empty_region: bool
    clean: bool
    worst: object = None

    def __post_init__(self):
        if self.empty_region:
            log.warning("far region is empty; defect reported as 0")


def defect_sq(action: GroupAction, i: int, n: int, g1, window: frozenset | None = None) -> DefectResult:
    """``sup_{t in O(i,n)} |2 - 2 <T, delta_g1*T>(t)|``, exactly."""
    ctx = defect_context(action, i, n, g1, window)
    region = ctx.region()
    best, worst = ZERO, None
    for t in region:
        v = abs(TWO - TWO * ctx.cross(t))
        if worst is None or v > best:
            best, worst = v, t
    return DefectResult(best, len(region), not region, ctx.clean, worst)


@dataclass
class StabilityResult:
    stable: bool
    values: dict
    excluded: list = field(default_factory=list)

    @property
    def value(self) -> AlgebraicReal | None:
        vals = list(self.values.values())
        return vals[0] if vals else None


def defect_stability(action: GroupAction, i: int, g1, n_range: Iterable[int] | None = None) -> StabilityResult:
    """Whether the defect is the same for every ``n`` in range (default ``i+k+2 .. i+k+6``)."""
    k = action.displacement(g1)
    ns = list(n_range) if n_range is not None else list(range(i + k + 2, i + k + 7))
    values, excluded = {}, []
    for n in ns:
        res = defect_sq(action, i, n, g1)
        if res.empty_region:
            excluded.append(n)
            continue
        values[n] = res.value
    stable = bool(values) and len(set(values.values())) == 1
    return StabilityResult(stable, values, excluded)


@dataclass
class ProbabilityWeights:
    weights: dict

    def total(self) -> AlgebraicReal:
        return AlgebraicReal.sum(self.weights.values())

    def valid(self) -> bool:
        return self.total() == ONE and all(w.sign() >= 0 for w in self.weights.values())


def probability_weights(witness: ModuleElement, x) -> ProbabilityWeights:
    """``mu^x(g) = T(g)(x)^2``."""
    out = {}
    for g, b in witness.support.items():
        v = b(x)
        if v:
            out[g] = v * v
    return ProbabilityWeights(out)


def l1_defect(action: GroupAction, i: int, n: int, g1, x) -> AlgebraicReal:
    """``|| g1.mu^x - mu^(g1 x) ||_1`` with ``(g1.mu)(g) = mu(g1^-1 g)``."""
    tree = action.tree
    gx = action.apply(g1, x)
    if tree.norm(x) > 2 * n or tree.norm(gx) > 2 * n:
        raise OutOfWindow("basepoint and its translate must lie in B(2n)")
    witness = build_witness(action, i, n, window=[x, gx])
    mu_x = probability_weights(witness, x)
    mu_gx = probability_weights(witness, gx)
    if not (mu_x.valid() and mu_gx.valid()):
        raise ArithmeticError("weights do not form probability vectors")
    moved = {action.compose(g1, g): w for g, w in mu_x.weights.items()}
    keys = set(moved) | set(mu_gx.weights)
    return AlgebraicReal.sum(abs(moved.get(g, ZERO) - mu_gx.weights.get(g, ZERO)) for g in keys)


def l1_bound_holds(l1: AlgebraicReal, dsq: AlgebraicReal) -> bool:
    """``l1 <= 2*sqrt(dsq)``, decided as ``4*dsq - l1^2 >= 0`` (both sides nonnegative)."""
    if l1.sign() < 0 or dsq.sign() < 0:
        raise ValueError("expected nonnegative inputs")
    return (4 * dsq - l1 * l1).sign() >= 0


def closed_form_defect(i: int, k: int) -> Fraction:
    """``2*min(k, i+1)/(i+1)``: what the oracle finds for every built-in family."""
    return Fraction(2 * min(k, i + 1), i + 1)


def stated_defect_formula(i: int, k: int, m: int) -> Fraction:
    """The value ``2 - 2(i-k)/(i*m)`` as printed with the construction."""
    return 2 - Fraction(2 * (i - k), i * m)


def stated_z_count(i: int, k: int) -> int:
    return i - k


def nonincreasing(values: Iterable[AlgebraicReal]) -> bool:
    vals = list(values)
    return all(b <= a for a, b in zip(vals, vals[1:]))


CSV_COLUMNS = [
    "family",
    "gamma1",
    "k",
    "i",
    "n",
    "region_size",
    "defect_sq_exact",
    "defect_sq_float",
    "oracle_defect_sq_exact",
    "stated_formula_value",
    "match_oracle",
    "stability",
]


@dataclass
class DefectReport:
    family: str
    gamma1: str
    k: int
    i: int
    n: int
    m: int
    defect_sq: AlgebraicReal
    region_size: int
    oracle_defect_sq: AlgebraicReal | None = None
    stability: bool | None = None
    clean: bool = True

    @property
    def stated_value(self) -> Fraction:
        return stated_defect_formula(self.i, self.k, self.m)

    @property
    def match_oracle(self) -> bool:
        return self.oracle_defect_sq is not None and self.oracle_defect_sq == self.defect_sq

    def row(self) -> dict:
        value, _ = self.defect_sq.to_float()
        return {
            "family": self.family,
            "gamma1": self.gamma1,
            "k": self.k,
            "i": self.i,
            "n": self.n,
            "region_size": self.region_size,
            "defect_sq_exact": str(self.defect_sq),
            "defect_sq_float": repr(value),
            "oracle_defect_sq_exact": "" if self.oracle_defect_sq is None else str(self.oracle_defect_sq),
            "stated_formula_value": str(self.stated_value),
            "match_oracle": self.match_oracle,
            "stability": bool(self.stability),
        }
