"""Random small module elements whose every translate stays inside the window."""

import random
from fractions import Fraction

from treecorona.group_action import make_action
from treecorona.hilbert_module import ModuleElement, WindowFunction
from treecorona.scalar import AlgebraicReal

WINDOW_RADIUS = 7
VALUE_RADIUS = 1
ELEMENT_RADIUS = 1

_RADICALS = [1, 1, 1, 2, 3]


def random_scalar(rng: random.Random) -> AlgebraicReal:
    d = rng.choice(_RADICALS)
    return AlgebraicReal({d: Fraction(rng.randint(-6, 6), rng.randint(1, 4))})


def random_element(rng: random.Random, action, nonneg: bool = False) -> ModuleElement:
    tree = action.tree
    window = frozenset(tree.ball(WINDOW_RADIUS))
    pts = tree.ball(VALUE_RADIUS)
    elems = action.orbit_ball_elements(ELEMENT_RADIUS)
    support = {}
    for g in rng.sample(elems, rng.randint(1, min(3, len(elems)))):
        vals = {}
        for t in rng.sample(pts, rng.randint(1, min(3, len(pts)))):
            x = random_scalar(rng)
            vals[t] = abs(x) if nonneg else x
        support[g] = WindowFunction(window, vals)
    return ModuleElement(action, window, support)


def actions():
    return [make_action(f) for f in ("line", "dihedral", "free:2")]
