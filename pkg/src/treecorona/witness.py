"""Geodesic element sets and the finitely supported witnesses built from them.

For a vertex ``t`` the set ``X(i, t)`` collects the group elements that move
the basepoint onto the geodesic ``[o, t]`` without leaving ``B(i)``.  The
witness at stage ``n`` puts weight ``|X(i, t)|^(-1/2)`` on each of them for
every ``t`` in ``B(2n)``, so its values square-sum to 1 there.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .group_action import GroupAction
from .hilbert_module import ModuleElement, WindowFunction, inner
from .scalar import ZERO, AlgebraicReal, inv_sqrt

__all__ = [
    "WitnessParams",
    "x_set",
    "x_value",
    "x_count_formula",
    "stated_x_count",
    "build_witness",
    "gram_defect",
    "default_window",
]


@dataclass(frozen=True)
class WitnessParams:
    action: GroupAction
    i: int
    n: int

    def __post_init__(self):
        if self.i < 1 or self.n < 1:
            raise ValueError("need i >= 1 and n >= 1")

    @property
    def radius(self) -> int:
        return 2 * self.n


def x_set(action: GroupAction, i: int, t) -> frozenset:
    """``{g : g.o in B(i) and g.o on [o, t]}``."""
    if i < 0:
        raise ValueError("i must be nonnegative")
    tree = action.tree
    out = []
    for v in tree.geodesic(tree.origin, t):
        if tree.norm(v) > i:
            break
        out.extend(action.elements_at(v))
    return frozenset(out)


def x_value(action: GroupAction, i: int, t) -> AlgebraicReal:
    return inv_sqrt(len(x_set(action, i, t)))


def x_count_formula(action: GroupAction, i: int, t) -> int:
    """``m * (min(i, d(o, t)) + 1)``: orbit points on a geodesic segment, times ``m``."""
    return action.stabilizer_order() * (min(i, action.tree.norm(t)) + 1)


def stated_x_count(action: GroupAction, i: int, t) -> int:
    """The count as stated alongside the definition: ``m * min(i, d(o, t))``."""
    return action.stabilizer_order() * min(i, action.tree.norm(t))


def default_window(action: GroupAction, n: int) -> list:
    """``B(2n)`` for thin trees; a skeleton of it when the ball is too large to list."""
    tree = action.tree
    if tree.ball_size(2 * n) <= 20000:
        return tree.ball(2 * n)
    return tree.skeleton(2 * n, thickness=2)


def build_witness(action: GroupAction, i: int, n: int, window: Iterable | None = None) -> ModuleElement:
    """The stage-``n`` witness: ``T(g)(t) = |X(i,t)|^(-1/2)`` if ``t in B(2n)`` and ``g in X(i,t)``.

    ``window`` may be any finite vertex set.  The witness is exactly 0 off
    ``B(2n)``, so it is recorded as known-zero outside the window whenever the
    window contains all of ``B(2n)`` (checked by counting).
    """
    WitnessParams(action, i, n)
    tree = action.tree
    win = frozenset(default_window(action, n) if window is None else window)
    radius = 2 * n
    inside = 0
    columns: dict = {}
    for t in win:
        if tree.norm(t) > radius:
            continue
        inside += 1
        xs = x_set(action, i, t)
        val = inv_sqrt(len(xs))
        for g in xs:
            col = columns.get(g)
            if col is None:
                columns[g] = col = {}
            col[t] = val
    outside = ZERO if inside == tree.ball_size(radius) else None
    support = {g: WindowFunction._build(win, col, outside, True) for g, col in columns.items()}
    return ModuleElement(action, win, support)


def gram_defect(witness: ModuleElement, n: int) -> list:
    """Vertices where ``<T, T>`` differs from the indicator of ``B(2n)``; empty if the identity holds."""
    tree = witness.action.tree
    gram = inner(witness, witness)
    bad = []
    for t in sorted(witness.window):
        want = 1 if tree.norm(t) <= 2 * n else 0
        if gram(t) != want:
            bad.append(t)
    if gram.outside is not None and gram.outside != 0:
        bad.append("outside")
    return bad
