"""Finitely supported ``Gamma -> B`` maps with convolution, involution and inner product.

``B`` is realised as real functions on a tree that are stored on a finite
window ``W`` and known to equal a constant off ``W`` (``outside``), or unknown
there (``outside is None``).  Any evaluation that needs an unknown value
counts as 0 and clears the ``clean`` flag, so truncation is never silent.

Scalars are :class:`~treecorona.scalar.AlgebraicReal`; every ``B`` here is
real, so ``*`` on values is the identity.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Hashable, Iterable, Mapping

from .group_action import GroupAction
from .scalar import ONE, ZERO, AlgebraicReal

__all__ = [
    "WindowMismatch",
    "OutOfWindow",
    "WindowFunction",
    "ModuleElement",
    "convolve",
    "involution",
    "inner",
    "module_norm",
    "module_norm_sq",
    "sup_norm",
    "group_translate",
]


class WindowMismatch(ValueError):
    pass


class OutOfWindow(KeyError):
    pass


def _same(w1: frozenset, w2: frozenset) -> bool:
    return w1 is w2 or w1 == w2


class WindowFunction:
    """A real function on the tree: ``values`` on ``window``, ``outside`` elsewhere."""

    __slots__ = ("window", "values", "outside", "clean", "_unit")

    def __init__(
        self,
        window: Iterable,
        values: Mapping | None = None,
        outside: AlgebraicReal | None = ZERO,
        clean: bool = True,
    ):
        self.window = window if isinstance(window, frozenset) else frozenset(window)
        vals = {}
        for v, x in (values or {}).items():
            if v not in self.window:
                raise OutOfWindow(v)
            x = AlgebraicReal.coerce(x)
            if x:
                vals[v] = x
        self.values = vals
        self.outside = None if outside is None else AlgebraicReal.coerce(outside)
        self.clean = clean
        self._unit = None

    @classmethod
    def _build(cls, window, values, outside, clean) -> "WindowFunction":
        obj = cls.__new__(cls)
        obj.window = window
        obj.values = values
        obj.outside = outside
        obj.clean = clean
        obj._unit = None
        return obj

    @classmethod
    def zero(cls, window) -> "WindowFunction":
        return cls(window)

    @classmethod
    def one(cls, window) -> "WindowFunction":
        """The unit of ``B``: constant 1 everywhere."""
        w = window if isinstance(window, frozenset) else frozenset(window)
        return cls._build(w, {v: ONE for v in w}, ONE, True)

    @classmethod
    def indicator(cls, window, vertices: Iterable, value=ONE) -> "WindowFunction":
        """Indicator of a finite vertex set (must lie inside the window)."""
        return cls(window, {v: value for v in vertices})

    def is_unit(self) -> bool:
        if self._unit is None:
            self._unit = (
                self.outside == ONE
                and len(self.values) == len(self.window)
                and all(x == ONE for x in self.values.values())
            )
        return self._unit

    def __call__(self, v) -> AlgebraicReal:
        if v in self.window:
            return self.values.get(v, ZERO)
        if self.outside is None:
            raise OutOfWindow(v)
        return self.outside

    def is_zero(self) -> bool:
        return not self.values and self.outside is not None and not self.outside

    def support(self) -> set:
        return set(self.values)

    def _check(self, other: "WindowFunction") -> None:
        if not _same(self.window, other.window):
            raise WindowMismatch("window functions live on different windows")

    def __add__(self, other: "WindowFunction") -> "WindowFunction":
        self._check(other)
        vals = dict(self.values)
        for v, x in other.values.items():
            y = vals.get(v)
            s = x if y is None else y + x
            if s:
                vals[v] = s
            else:
                vals.pop(v, None)
        out = None if self.outside is None or other.outside is None else self.outside + other.outside
        return WindowFunction._build(self.window, vals, out, self.clean and other.clean)

    def __neg__(self) -> "WindowFunction":
        out = None if self.outside is None else -self.outside
        return WindowFunction._build(
            self.window, {v: -x for v, x in self.values.items()}, out, self.clean
        )

    def __sub__(self, other: "WindowFunction") -> "WindowFunction":
        return self + (-other)

    def scale(self, c) -> "WindowFunction":
        c = AlgebraicReal.coerce(c)
        if not c:
            return WindowFunction._build(self.window, {}, ZERO, self.clean)
        out = None if self.outside is None else self.outside * c
        return WindowFunction._build(
            self.window, {v: x * c for v, x in self.values.items()}, out, self.clean
        )

    def __mul__(self, other: "WindowFunction") -> "WindowFunction":
        """Pointwise product."""
        if not isinstance(other, WindowFunction):
            return self.scale(other)
        self._check(other)
        if self.is_unit():
            return other
        if other.is_unit():
            return self
        a, b = (self, other) if len(self.values) <= len(other.values) else (other, self)
        vals = {}
        for v, x in a.values.items():
            y = b.values.get(v)
            if y is not None:
                p = x * y
                if p:
                    vals[v] = p
        if (self.outside is not None and not self.outside) or (
            other.outside is not None and not other.outside
        ):
            out = ZERO
        elif self.outside is None or other.outside is None:
            out = None
        else:
            out = self.outside * other.outside
        return WindowFunction._build(self.window, vals, out, self.clean and other.clean)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WindowFunction):
            return NotImplemented
        return (
            _same(self.window, other.window)
            and self.values == other.values
            and self.outside == other.outside
        )

    def __hash__(self):  # pragma: no cover - mutable-looking, keep unhashable semantics explicit
        raise TypeError("WindowFunction is not hashable")

    def restrict(self, window: Iterable) -> "WindowFunction":
        """Same function, stored on a smaller window."""
        w = window if isinstance(window, frozenset) else frozenset(window)
        if not w <= self.window:
            raise WindowMismatch("restriction window must be a subset")
        vals = {v: x for v, x in self.values.items() if v in w}
        out = self.outside
        if out is not None:
            dropped = self.window - w
            if out:
                if any(self.values.get(v) != out for v in dropped):
                    out = None
            elif len(vals) != len(self.values):
                out = None
        return WindowFunction._build(w, vals, out, self.clean)

    def translate(self, action: GroupAction, g, target: frozenset | None = None) -> "WindowFunction":
        """``(g.f)(t) = f(g^-1 t)``, evaluated on ``target`` (default: own window)."""
        target = self.window if target is None else target
        covered, _ = _coverage(action, g, self.window, target)
        return _translate(self, action, g, target, covered)

    def sup_norm(self) -> AlgebraicReal:
        best = ZERO
        pool = list(self.values.values())
        if self.outside is not None:
            pool.append(self.outside)
        for x in pool:
            ax = abs(x)
            if ax > best:
                best = ax
        return best

    def __repr__(self) -> str:
        head = ", ".join(f"{k!r}: {v}" for k, v in sorted(self.values.items(), key=lambda kv: str(kv[0]))[:6])
        more = "..." if len(self.values) > 6 else ""
        return f"WindowFunction({{{head}{more}}}, |W|={len(self.window)}, outside={self.outside})"


_COVERAGE_CACHE: dict = {}


def _coverage(action, g, window: frozenset, target: frozenset) -> tuple[bool, object]:
    """Whether ``g^-1 . target`` stays inside ``window``."""
    key = (action, g, id(window), id(target))
    hit = _COVERAGE_CACHE.get(key)
    if hit is not None and hit[1] is window and hit[2] is target:
        return hit[0], None
    ginv = action.inverse(g)
    covered = all(action.apply(ginv, t) in window for t in target)
    if len(_COVERAGE_CACHE) > 4096:
        _COVERAGE_CACHE.clear()
    _COVERAGE_CACHE[key] = (covered, window, target)
    return covered, None


def _translate(f: WindowFunction, action, g, target: frozenset, covered: bool) -> WindowFunction:
    vals = {}
    escaped = False
    for s, x in f.values.items():
        t = action.apply(g, s)
        if t in target:
            vals[t] = x
        else:
            escaped = True
    clean = f.clean
    if not covered:
        if f.outside is None:
            clean = False
        elif f.outside:
            ginv = action.inverse(g)
            for t in target:
                if action.apply(ginv, t) not in f.window:
                    vals[t] = f.outside
    # value off the target: f.outside, unless some stored window value landed there
    out = f.outside
    if out is not None:
        if out:
            if len(f.values) != len(f.window) or any(
                action.apply(g, s) not in target and x != out for s, x in f.values.items()
            ):
                out = None
        elif escaped:
            out = None
    return WindowFunction._build(target, vals, out, clean)


class ModuleElement:
    """A finitely supported map ``Gamma -> B``; all components share one window."""

    __slots__ = ("action", "window", "support", "clean")

    def __init__(self, action: GroupAction, window: Iterable, support: Mapping | None = None, clean: bool = True):
        self.action = action
        self.window = window if isinstance(window, frozenset) else frozenset(window)
        comp = {}
        for g, b in (support or {}).items():
            if not isinstance(b, WindowFunction):
                raise TypeError("components must be WindowFunction instances")
            if not _same(b.window, self.window):
                raise WindowMismatch(f"component at {g!r} has a different window")
            if not b.is_zero():
                comp[g] = b
        self.support = comp
        self.clean = clean and all(b.clean for b in comp.values())

    @classmethod
    def delta(cls, action: GroupAction, g, b: WindowFunction) -> "ModuleElement":
        """``delta_g (x) b``."""
        return cls(action, b.window, {g: b})

    def __call__(self, g) -> WindowFunction:
        return self.support.get(g) or WindowFunction.zero(self.window)

    def value(self, g, t) -> AlgebraicReal:
        b = self.support.get(g)
        return ZERO if b is None else b(t)

    def _check(self, other: "ModuleElement") -> None:
        if self.action != other.action:
            raise WindowMismatch("module elements over different group actions")
        if not _same(self.window, other.window):
            raise WindowMismatch("module elements on different windows")

    def __add__(self, other: "ModuleElement") -> "ModuleElement":
        self._check(other)
        comp = dict(self.support)
        for g, b in other.support.items():
            comp[g] = comp[g] + b if g in comp else b
        return ModuleElement(self.action, self.window, comp, self.clean and other.clean)

    def __neg__(self) -> "ModuleElement":
        return ModuleElement(self.action, self.window, {g: -b for g, b in self.support.items()}, self.clean)

    def __sub__(self, other: "ModuleElement") -> "ModuleElement":
        return self + (-other)

    def scale(self, c) -> "ModuleElement":
        return ModuleElement(self.action, self.window, {g: b.scale(c) for g, b in self.support.items()}, self.clean)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModuleElement):
            return NotImplemented
        return (
            self.action == other.action
            and _same(self.window, other.window)
            and self.support.keys() == other.support.keys()
            and all(self.support[g] == other.support[g] for g in self.support)
        )

    __hash__ = None

    def restrict(self, window: Iterable) -> "ModuleElement":
        w = window if isinstance(window, frozenset) else frozenset(window)
        return ModuleElement(self.action, w, {g: b.restrict(w) for g, b in self.support.items()}, self.clean)

    def nonnegative(self) -> bool:
        """Every value at every group element is >= 0 (exact)."""
        for b in self.support.values():
            if any(x.sign() < 0 for x in b.values.values()):
                return False
            if b.outside is not None and b.outside.sign() < 0:
                return False
        return True

    def nnz(self) -> int:
        return sum(len(b.values) for b in self.support.values())

    def __repr__(self) -> str:
        return f"ModuleElement({self.action.tag}, |supp|={len(self.support)}, |W|={len(self.window)}, clean={self.clean})"


def group_translate(g, f, target: frozenset | None = None):
    """Translate a window function, or every value of a module element, by ``g``."""
    if isinstance(f, WindowFunction):
        raise TypeError("use WindowFunction.translate(action, g) for bare window functions")
    target = f.window if target is None else target
    covered, _ = _coverage(f.action, g, f.window, target)
    comp = {h: _translate(b, f.action, g, target, covered) for h, b in f.support.items()}
    return ModuleElement(f.action, target, comp, f.clean)


def convolve(f: ModuleElement, g: ModuleElement, target: frozenset | None = None) -> ModuleElement:
    """``(f*g)(x) = sum_{x1 x2 = x} f(x1) (x1 . g(x2))``, evaluated on ``target``."""
    f._check(g)
    act = f.action
    target = f.window if target is None else target
    if not target <= f.window:
        raise WindowMismatch("convolution target must lie in the operands' window")
    acc: dict = defaultdict(list)
    clean = f.clean and g.clean
    for x1, a in f.support.items():
        a_t = a if target is f.window else a.restrict(target)
        covered, _ = _coverage(act, x1, g.window, target)
        for x2, b in g.support.items():
            moved = _translate(b, act, x1, target, covered)
            clean = clean and moved.clean
            acc[act.compose(x1, x2)].append(a_t * moved)
    comp = {}
    for x, parts in acc.items():
        total = parts[0]
        for p in parts[1:]:
            total = total + p
        comp[x] = total
    return ModuleElement(act, target, comp, clean)


def involution(f: ModuleElement) -> ModuleElement:
    """``f^*(x) = x . f(x^-1)`` (values are real, so no conjugation)."""
    act = f.action
    comp = {}
    for x, b in f.support.items():
        xi = act.inverse(x)
        covered, _ = _coverage(act, xi, f.window, f.window)
        comp[xi] = _translate(b, act, xi, f.window, covered)
    return ModuleElement(act, f.window, comp, f.clean)


def inner(f: ModuleElement, g: ModuleElement) -> WindowFunction:
    """``<f, g>(t) = sum_x f(x)(t) g(x)(t)``."""
    f._check(g)
    per_vertex: dict = defaultdict(list)
    outs = []
    outside_known = True
    clean = f.clean and g.clean
    for x, a in f.support.items():
        b = g.support.get(x)
        if b is None:
            continue
        small, big = (a, b) if len(a.values) <= len(b.values) else (b, a)
        for v, val in small.values.items():
            w = big.values.get(v)
            if w is not None:
                per_vertex[v].append(val * w)
        if a.outside is None or b.outside is None:
            if not ((a.outside is not None and not a.outside) or (b.outside is not None and not b.outside)):
                outside_known = False
        else:
            outs.append(a.outside * b.outside)
    vals = {}
    for v, parts in per_vertex.items():
        s = parts[0] if len(parts) == 1 else AlgebraicReal.sum(parts)
        if s:
            vals[v] = s
    out = AlgebraicReal.sum(outs) if outside_known else None
    return WindowFunction._build(f.window, vals, out, clean)


def sup_norm(b: WindowFunction) -> AlgebraicReal:
    return b.sup_norm()


def module_norm_sq(f: ModuleElement) -> AlgebraicReal:
    return inner(f, f).sup_norm()


def module_norm(f: ModuleElement) -> AlgebraicReal:
    """``||<f, f>||^(1/2)``; exact when the squared norm is rational."""
    return module_norm_sq(f).sqrt()
