"""Groups acting isometrically, properly and transitively on the built-in trees.

Three families ship: the free group ``F_k`` acting on its Cayley tree by left
multiplication, the integers acting on the line by translation, and the
infinite dihedral group acting on the line by ``t -> flip*t + shift``.
Group elements are plain hashables (reduced words, ints, ``(shift, flip)``
pairs); the action object carries the arithmetic.
"""

from __future__ import annotations

import random
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable

from .tree import FamilyMismatch, FreeTree, LineTree, TreeGeometry, free_inverse, free_reduce

__all__ = [
    "GroupAction",
    "FreeGroupAction",
    "TranslationAction",
    "DihedralAction",
    "ActionReport",
    "make_action",
]

Element = Hashable


@dataclass
class ActionReport:
    family: str
    radius: int
    stabilizer_order: int
    isometry: bool = True
    transitivity: bool = True
    properness: bool = True
    orbit_size: int = 0
    predicted_size: int = 0
    failure: str | None = None
    witness: tuple | None = None

    @property
    def ok(self) -> bool:
        return self.isometry and self.transitivity and self.properness

    @property
    def label(self) -> str:
        return f"verified up to R={self.radius}" if self.ok else f"FAILED: {self.failure}"


class GroupAction:
    tree: TreeGeometry
    identity: Element

    @property
    def tag(self) -> str:
        raise NotImplementedError

    def check(self, g: Element) -> Element:
        raise NotImplementedError

    def compose(self, g: Element, h: Element) -> Element:
        """The product ``g*h``: act by ``h`` first, then ``g``."""
        raise NotImplementedError

    def inverse(self, g: Element) -> Element:
        raise NotImplementedError

    def apply(self, g: Element, v) -> object:
        raise NotImplementedError

    def generators(self) -> list:
        raise NotImplementedError

    def stabilizer(self) -> list:
        """Elements fixing the basepoint."""
        raise NotImplementedError

    def section(self, v) -> Element:
        """Some element carrying the basepoint to ``v``."""
        raise NotImplementedError

    def format(self, g: Element) -> str:
        raise NotImplementedError

    def parse(self, text: str) -> Element:
        raise NotImplementedError

    def stabilizer_order(self) -> int:
        return len(self.stabilizer())

    def displacement(self, g: Element) -> int:
        return self.tree.norm(self.apply(g, self.tree.origin))

    def elements_at(self, v) -> list:
        """All elements carrying the basepoint to ``v`` (a stabilizer coset)."""
        s = self.section(v)
        return [self.compose(s, h) for h in self.stabilizer()]

    def orbit_ball_elements(self, radius: int) -> list:
        """``{g : d(g.o, o) <= radius}``, found by search in the Cayley graph."""
        if radius < 0:
            raise ValueError("radius must be nonnegative")
        o = self.tree.origin
        seen = {self.identity}
        queue = deque([self.identity])
        gens = self.generators()
        while queue:
            g = queue.popleft()
            for s in gens:
                h = self.compose(g, s)
                if h in seen or self.tree.norm(self.apply(h, o)) > radius:
                    continue
                seen.add(h)
                queue.append(h)
        return sorted(seen, key=self.sort_key)

    def sort_key(self, g: Element):
        return g

    def check_action(self, radius: int, pairs: int = 400, seed: int = 0) -> ActionReport:
        """Finite-scale check of isometry, transitivity and properness on ``B(radius)``."""
        if radius < 1:
            raise ValueError("radius must be >= 1")
        tree = self.tree
        o = tree.origin
        m = self.stabilizer_order()
        rep = ActionReport(self.tag, radius, m)

        found_stab = sorted(
            (g for g in self.orbit_ball_elements(0)), key=self.sort_key
        )
        if found_stab != sorted(self.stabilizer(), key=self.sort_key):
            rep.properness = False
            rep.failure = "stabilizer mismatch"
            rep.witness = (tuple(found_stab),)
            return rep

        ball = tree.ball(radius)
        elems = self.orbit_ball_elements(radius)
        rng = random.Random(seed)
        movers = self.generators() + rng.sample(elems, min(len(elems), 8))
        for _ in range(pairs):
            u, v = rng.choice(ball), rng.choice(ball)
            for g in movers:
                if tree.distance(self.apply(g, u), self.apply(g, v)) != tree.distance(u, v):
                    rep.isometry = False
                    rep.failure = "isometry"
                    rep.witness = (self.format(g), tree.format_vertex(u), tree.format_vertex(v))
                    return rep

        orbit = {self.apply(g, o) for g in elems}
        missing = [v for v in ball if v not in orbit]
        if missing:
            rep.transitivity = False
            rep.failure = "transitivity"
            rep.witness = (tree.format_vertex(missing[0]),)
            return rep

        rep.orbit_size = len(elems)
        rep.predicted_size = m * tree.ball_size(radius)
        if rep.orbit_size != rep.predicted_size:
            rep.properness = False
            rep.failure = "properness"
            rep.witness = (rep.orbit_size, rep.predicted_size)
        return rep


@dataclass(frozen=True)
class FreeGroupAction(GroupAction):
    rank: int = 2
    tree: FreeTree = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "tree", FreeTree(self.rank))

    identity = ""

    @property
    def tag(self):
        return f"free:{self.rank}"

    def check(self, g):
        if not isinstance(g, str):
            raise FamilyMismatch(f"free-group element must be a word, got {g!r}")
        return self.tree.check(g)

    def compose(self, g, h):
        return free_reduce(g + h)

    def inverse(self, g):
        return free_inverse(g)

    def apply(self, g, v):
        return free_reduce(g + v)

    def generators(self):
        return list(self.tree.letters)

    def stabilizer(self):
        return [""]

    def section(self, v):
        return v

    def elements_at(self, v):
        return [v]

    def format(self, g):
        return g or "e"

    def parse(self, text):
        text = text.strip()
        word = "" if text in ("e", "1", "") else text
        if any(ch not in self.tree.letters for ch in word):
            raise FamilyMismatch(f"{text!r} is not a word over {self.tree.letters!r}")
        return free_reduce(word)


@dataclass(frozen=True)
class TranslationAction(GroupAction):
    """The integers acting on the line by shifts."""

    tree: LineTree = field(default_factory=LineTree)

    identity = 0

    @property
    def tag(self):
        return "line"

    def check(self, g):
        if isinstance(g, bool) or not isinstance(g, int):
            raise FamilyMismatch(f"line element must be an int shift, got {g!r}")
        return g

    def compose(self, g, h):
        return g + h

    def inverse(self, g):
        return -g

    def apply(self, g, v):
        return self.tree.check(v) + g

    def generators(self):
        return [-1, 1]

    def stabilizer(self):
        return [0]

    def section(self, v):
        return v

    def elements_at(self, v):
        return [v]

    def format(self, g):
        return f"t^{g}"

    def parse(self, text):
        shift, flip = _parse_dihedral(text)
        if flip != 1:
            raise FamilyMismatch(f"{text!r} has a reflection; not a line translation")
        return shift


@dataclass(frozen=True)
class DihedralAction(GroupAction):
    """``D_inf`` acting on the line; ``(shift, flip)`` means ``t -> flip*t + shift``."""

    tree: LineTree = field(default_factory=LineTree)

    identity = (0, 1)

    @property
    def tag(self):
        return "dihedral"

    def check(self, g):
        if not (isinstance(g, tuple) and len(g) == 2 and g[1] in (1, -1)):
            raise FamilyMismatch(f"dihedral element must be (shift, +-1), got {g!r}")
        return g

    def compose(self, g, h):
        s2, f2 = g
        s1, f1 = h
        return (f2 * s1 + s2, f2 * f1)

    def inverse(self, g):
        s, f = g
        return (-f * s, f)

    def apply(self, g, v):
        s, f = g
        return f * self.tree.check(v) + s

    def generators(self):
        return [(1, 1), (-1, 1), (0, -1)]

    def stabilizer(self):
        return [(0, 1), (0, -1)]

    def section(self, v):
        return (v, 1)

    def format(self, g):
        s, f = g
        return f"t^{s}" if f == 1 else f"t^{s}·s"

    def parse(self, text):
        return _parse_dihedral(text)


_DIHEDRAL_RE = re.compile(r"^(?:t(?:\^(?P<n>[+-]?\d+))?)?(?:[·*.]?(?P<s>s))?$")


def _parse_dihedral(text: str) -> tuple[int, int]:
    t = text.strip().replace(" ", "")
    if t in ("e", "1", ""):
        return (0, 1)
    match = _DIHEDRAL_RE.match(t)
    if not match or not t:
        raise FamilyMismatch(f"cannot parse {text!r} as t^n or t^n·s")
    n = match.group("n")
    shift = int(n) if n is not None else (1 if t.startswith("t") else 0)
    flip = -1 if match.group("s") else 1
    return (shift, flip)


def make_action(family: str) -> GroupAction:
    """Build an action from a family tag: ``line``, ``dihedral`` or ``free:k``."""
    key = family.strip().lower()
    if key in ("line", "z", "integers"):
        return TranslationAction()
    if key in ("dihedral", "dinf", "d_inf", "d∞"):
        return DihedralAction()
    if key.startswith("free"):
        _, _, rank = key.partition(":")
        return FreeGroupAction(int(rank) if rank else 2)
    if key.startswith("f") and key[1:].isdigit():
        return FreeGroupAction(int(key[1:]))
    raise ValueError(f"unknown group family {family!r}")
