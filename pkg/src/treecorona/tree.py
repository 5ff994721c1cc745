"""Vertex-transitive simplicial trees: the line and Cayley trees of free groups.

Vertices are plain hashable addresses: integers for the line, freely reduced
words for the Cayley tree of ``F_k`` (generators ``a, b, ...``, inverses
``A, B, ...``; the empty word is the basepoint and prints as ``"e"``).
Trees are never stored; adjacency is computed from addresses.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass
from typing import Hashable, Iterable

__all__ = [
    "FamilyMismatch",
    "TreeGeometry",
    "LineTree",
    "FreeTree",
    "free_reduce",
    "free_inverse",
]

Vertex = Hashable


class FamilyMismatch(ValueError):
    """A vertex or group element was handed to the wrong family."""


def free_reduce(word: str) -> str:
    out: list[str] = []
    for ch in word:
        if out and out[-1] == ch.swapcase():
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def free_inverse(word: str) -> str:
    return word[::-1].swapcase()


class TreeGeometry:
    """Shared window logic; subclasses supply the metric and adjacency."""

    origin: Vertex
    degree: int

    def check(self, v: Vertex) -> Vertex:
        raise NotImplementedError

    def distance(self, u: Vertex, v: Vertex) -> int:
        raise NotImplementedError

    def geodesic(self, u: Vertex, v: Vertex) -> list:
        raise NotImplementedError

    def children(self, v: Vertex) -> list:
        """Neighbours of ``v`` one step further from the basepoint, sorted."""
        raise NotImplementedError

    def norm(self, v: Vertex) -> int:
        return self.distance(self.origin, v)

    def sphere_size(self, r: int) -> int:
        if r == 0:
            return 1
        return self.degree * (self.degree - 1) ** (r - 1)

    def ball_size(self, r: int) -> int:
        return sum(self.sphere_size(j) for j in range(r + 1))

    def ball(self, r: int) -> list:
        """Vertices at distance <= r from the basepoint, in address order."""
        if r < 0:
            raise ValueError("radius must be nonnegative")
        out = [self.origin]
        frontier = [self.origin]
        for _ in range(r):
            frontier = [c for v in frontier for c in self.children(v)]
            out.extend(frontier)
        return sorted(out)

    def in_ball(self, v: Vertex, r: int) -> bool:
        return self.norm(v) <= r

    def hull_distance(self, v: Vertex, centers: Iterable[Vertex]) -> int:
        """Distance from ``v`` to the union of geodesics ``[o, c]``."""
        dv = self.norm(v)
        return min((dv + self.distance(v, c) - self.norm(c)) // 2 for c in centers)

    def skeleton(self, radius: int, centers: Iterable[Vertex] = (), thickness: int = 1) -> list:
        """A thin window that meets every vertex type relative to a hull.

        Keeps every vertex within ``thickness`` of the hull of ``{o} | centers``
        and, beyond that, only the first child of each kept vertex, out to
        ``radius``.  Each vertex of the full ball is the image of a kept vertex
        under a tree automorphism fixing the hull pointwise.  On the line this
        is the whole ball.
        """
        centers = tuple(centers) or (self.origin,)
        keep = [self.origin]
        frontier = [self.origin]
        for _ in range(radius):
            nxt = []
            for v in frontier:
                kids = self.children(v)
                near = [c for c in kids if self.hull_distance(c, centers) <= thickness]
                if near:
                    nxt.extend(near)
                if len(near) < len(kids) and self.hull_distance(v, centers) >= thickness:
                    far = [c for c in kids if c not in near]
                    nxt.append(far[0])
            keep.extend(nxt)
            frontier = nxt
        return sorted(set(keep))

    def format_vertex(self, v: Vertex) -> str:
        return str(v)

    def parse_vertex(self, text: str) -> Vertex:
        raise NotImplementedError


@dataclass(frozen=True)
class LineTree(TreeGeometry):
    """The bi-infinite path with vertex set Z."""

    origin: int = 0
    degree: int = 2

    @property
    def tag(self) -> str:
        return "line"

    def check(self, v):
        if isinstance(v, bool) or not isinstance(v, int):
            raise FamilyMismatch(f"line vertex must be an int, got {v!r}")
        return v

    def distance(self, u, v):
        return abs(self.check(u) - self.check(v))

    def norm(self, v):
        return abs(self.check(v))

    def geodesic(self, u, v):
        self.check(u), self.check(v)
        step = 1 if v >= u else -1
        return list(range(u, v + step, step))

    def children(self, v):
        if v == 0:
            return [-1, 1]
        return [v + 1] if v > 0 else [v - 1]

    def neighbors(self, v):
        return [v - 1, v + 1]

    def ball(self, r):
        if r < 0:
            raise ValueError("radius must be nonnegative")
        return list(range(-r, r + 1))

    def ball_size(self, r):
        return 2 * r + 1

    def skeleton(self, radius, centers=(), thickness=1):
        return self.ball(radius)

    def parse_vertex(self, text):
        return int(text)


@dataclass(frozen=True)
class FreeTree(TreeGeometry):
    """Cayley tree of the free group of the given rank (degree ``2*rank``)."""

    rank: int = 2
    origin: str = ""

    def __post_init__(self):
        if not 1 <= self.rank <= 26:
            raise ValueError("rank must be between 1 and 26")
        low = string.ascii_lowercase[: self.rank]
        letters = "".join(sorted(low + low.upper()))
        object.__setattr__(self, "_letters", letters)
        object.__setattr__(self, "_letterset", frozenset(letters))
        pairs = "|".join(f"{c}{c.upper()}|{c.upper()}{c}" for c in low)
        object.__setattr__(self, "_cancel", re.compile(pairs))

    @property
    def tag(self) -> str:
        return f"free:{self.rank}"

    @property
    def degree(self) -> int:
        return 2 * self.rank

    @property
    def letters(self) -> str:
        return self._letters

    def check(self, v):
        if not isinstance(v, str):
            raise FamilyMismatch(f"free-group vertex must be a word, got {v!r}")
        if not self._letterset.issuperset(v):
            raise FamilyMismatch(f"word {v!r} uses letters outside {self.letters!r}")
        if self._cancel.search(v):
            raise ValueError(f"word {v!r} is not freely reduced")
        return v

    def distance(self, u, v):
        self.check(u), self.check(v)
        p = _common_prefix(u, v)
        return len(u) + len(v) - 2 * p

    def norm(self, v):
        return len(self.check(v))

    def geodesic(self, u, v):
        self.check(u), self.check(v)
        p = _common_prefix(u, v)
        down = [u[:j] for j in range(len(u), p - 1, -1)]
        up = [v[:j] for j in range(p + 1, len(v) + 1)]
        return down + up

    def children(self, v):
        back = v[-1].swapcase() if v else None
        return [v + ch for ch in self.letters if ch != back]

    def neighbors(self, v):
        out = self.children(v)
        return out + [v[:-1]] if v else out

    def ball_size(self, r):
        d = self.degree
        if d == 2:
            return 2 * r + 1
        return 1 + d * ((d - 1) ** r - 1) // (d - 2)

    def format_vertex(self, v):
        return v or "e"

    def parse_vertex(self, text):
        word = "" if text in ("e", "") else text
        return self.check(free_reduce(word))


def _common_prefix(u: str, v: str) -> int:
    n = min(len(u), len(v))
    j = 0
    while j < n and u[j] == v[j]:
        j += 1
    return j

