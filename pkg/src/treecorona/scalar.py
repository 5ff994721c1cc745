"""Exact arithmetic in the rational span of square roots of square-free integers.

An :class:`AlgebraicReal` is a finite sum ``c_1*sqrt(d_1) + ... + c_r*sqrt(d_r)``
with rational ``c_j != 0`` and distinct square-free ``d_j >= 1``.  Square roots of
distinct square-free integers are linearly independent over Q, so this form is
unique and structural equality is real equality.

The set is closed under +, -, * (``sqrt(a)*sqrt(b) = g*sqrt(a*b/g**2)`` with
``g = gcd(a, b)``), which is all the witness and defect computations need.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Union

__all__ = ["AlgebraicReal", "inv_sqrt", "sqrt_int", "ZERO", "ONE", "TWO"]

Number = Union[int, Fraction, "AlgebraicReal"]

FLOAT_BOUND = 2.0**-40


@lru_cache(maxsize=4096)
def _square_split(n: int) -> tuple[int, int]:
    """Return ``(s, d)`` with ``n == s*s*d`` and ``d`` square-free (trial division)."""
    if n < 1:
        raise ValueError(f"expected a positive integer, got {n}")
    s, d = 1, 1
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        s *= p ** (e // 2)
        if e % 2:
            d *= p
        p += 1 if p == 2 else 2
    return s, d * n


def _canon(terms: dict[int, Fraction]) -> tuple[tuple[int, Fraction], ...]:
    return tuple(sorted((d, c) for d, c in terms.items() if c))


class AlgebraicReal:
    """Immutable exact real of the form ``sum c_d * sqrt(d)``."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: dict[int, Fraction] | Iterable[tuple[int, Fraction]] = ()):
        # Accepts raw (radicand, coefficient) pairs; radicands need not be square-free.
        acc: dict[int, Fraction] = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for d, c in items:
            c = Fraction(c)
            if not c:
                continue
            s, core = _square_split(int(d))
            acc[core] = acc.get(core, Fraction(0)) + c * s
        self._terms = _canon(acc)
        self._hash = None

    @classmethod
    def _raw(cls, terms: tuple[tuple[int, Fraction], ...]) -> "AlgebraicReal":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def rational(cls, q: int | Fraction) -> "AlgebraicReal":
        q = Fraction(q)
        return cls._raw(((1, q),) if q else ())

    @classmethod
    def coerce(cls, x: Number) -> "AlgebraicReal":
        if isinstance(x, AlgebraicReal):
            return x
        if isinstance(x, (int, Rational)):
            return cls.rational(Fraction(x))
        raise TypeError(f"cannot convert {type(x).__name__} to AlgebraicReal exactly")

    @classmethod
    def sum(cls, values: Iterable["AlgebraicReal"]) -> "AlgebraicReal":
        """Exact sum, accumulated once (cheaper than repeated ``+``)."""
        acc: dict[int, Fraction] = {}
        for v in values:
            for d, c in v._terms:
                acc[d] = acc.get(d, 0) + c
        return cls._raw(_canon(acc))

    @classmethod
    def parse(cls, text: str) -> "AlgebraicReal":
        """Inverse of ``str()``: parses e.g. ``"1/2 - 3/4*sqrt(5)"``."""
        s = text.replace(" ", "")
        if s in ("", "0"):
            return ZERO
        pieces: list[str] = []
        start = 0
        for j in range(1, len(s)):
            if s[j] in "+-" and s[j - 1] != "(":
                pieces.append(s[start:j])
                start = j
        pieces.append(s[start:])
        acc: dict[int, Fraction] = {}
        for piece in pieces:
            sign = -1 if piece.startswith("-") else 1
            piece = piece.lstrip("+-")
            if "sqrt(" in piece:
                coef, _, rad = piece.partition("sqrt(")
                coef = coef.rstrip("*") or "1"
                d = int(rad.rstrip(")"))
            else:
                coef, d = piece, 1
            acc[d] = acc.get(d, Fraction(0)) + sign * Fraction(coef)
        return cls(acc)

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and self._terms[0][0] == 1)

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self._terms[0][1] if self._terms else Fraction(0)

    # ring operations

    def __add__(self, other: Number) -> "AlgebraicReal":
        try:
            other = AlgebraicReal.coerce(other)
        except TypeError:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        acc = dict(self._terms)
        for d, c in other._terms:
            acc[d] = acc.get(d, 0) + c
        return AlgebraicReal._raw(_canon(acc))

    __radd__ = __add__

    def __neg__(self) -> "AlgebraicReal":
        return AlgebraicReal._raw(tuple((d, -c) for d, c in self._terms))

    def __pos__(self) -> "AlgebraicReal":
        return self

    def __sub__(self, other: Number) -> "AlgebraicReal":
        try:
            other = AlgebraicReal.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Number) -> "AlgebraicReal":
        return AlgebraicReal.coerce(other) - self

    def __mul__(self, other: Number) -> "AlgebraicReal":
        try:
            other = AlgebraicReal.coerce(other)
        except TypeError:
            return NotImplemented
        return _mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "AlgebraicReal":
        """Division by a nonzero rational or a single radical term."""
        try:
            other = AlgebraicReal.coerce(other)
        except TypeError:
            return NotImplemented
        if not other._terms:
            raise ZeroDivisionError("division by zero")
        if len(other._terms) != 1:
            raise NotImplementedError("division only by single-term values")
        d, c = other._terms[0]
        return self * AlgebraicReal._raw(((d, 1 / (c * d)),))

    def __pow__(self, k: int) -> "AlgebraicReal":
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out, base = ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def sqrt(self) -> "AlgebraicReal":
        """Square root of a nonnegative rational value."""
        q = self.as_fraction()
        if q < 0:
            raise ValueError("square root of a negative value")
        if not q:
            return ZERO
        return AlgebraicReal({q.numerator * q.denominator: Fraction(1, q.denominator)})

    # order

    def sign(self) -> int:
        """Exact sign, by interval refinement of each ``sqrt(d)``."""
        t = self._terms
        if not t:
            return 0
        if len(t) == 1:
            return 1 if t[0][1] > 0 else -1
        bits = 32
        while True:
            lo, hi = self._enclose(bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2

    def _enclose(self, bits: int) -> tuple[Fraction, Fraction]:
        scale = 1 << bits
        lo = hi = Fraction(0)
        for d, c in self._terms:
            if d == 1:
                lo += c
                hi += c
                continue
            r = math.isqrt(d * scale * scale)
            if r * r == d * scale * scale:  # pragma: no cover - d is square-free > 1
                a = b = Fraction(r, scale)
            else:
                a, b = Fraction(r, scale), Fraction(r + 1, scale)
            if c > 0:
                lo += c * a
                hi += c * b
            else:
                lo += c * b
                hi += c * a
        return lo, hi

    def to_float(self) -> tuple[float, float]:
        """Return ``(value, bound)`` with ``|value - self| <= bound <= 2**-40``."""
        if not self._terms:
            return 0.0, 0.0
        mass = sum(abs(c) for _, c in self._terms)
        bits = 44 + max(0, math.ceil(math.log2(mass + 1)))
        lo, hi = self._enclose(bits)
        mid = (lo + hi) / 2
        value = float(mid)
        err = abs(Fraction(value) - mid) + (hi - lo) / 2
        bound = float(err)
        if Fraction(bound) < err:
            bound = math.nextafter(bound, math.inf)
        return value, bound

    def __float__(self) -> float:
        return self.to_float()[0]

    def __abs__(self) -> "AlgebraicReal":
        return -self if self.sign() < 0 else self

    def _cmp(self, other: Number) -> int:
        return (self - AlgebraicReal.coerce(other)).sign()

    def __lt__(self, other: Number) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: Number) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other: Number) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other: Number) -> bool:
        return self._cmp(other) >= 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, AlgebraicReal):
            return self._terms == other._terms
        if isinstance(other, (int, Rational)):
            return self._terms == AlgebraicReal.rational(Fraction(other))._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        out = []
        for j, (d, c) in enumerate(self._terms):
            neg = c < 0
            a = abs(c)
            if d == 1:
                body = str(a)
            elif a == 1:
                body = f"sqrt({d})"
            else:
                body = f"{a}*sqrt({d})"
            if j == 0:
                out.append(("-" if neg else "") + body)
            else:
                out.append((" - " if neg else " + ") + body)
        return "".join(out)

    def __repr__(self) -> str:
        return f"AlgebraicReal({str(self)!r})"

    def __reduce__(self):
        return (AlgebraicReal, (self._terms,))


@lru_cache(maxsize=1 << 16)
def _mul_terms(a: tuple, b: tuple) -> tuple:
    acc: dict[int, Fraction] = {}
    for d1, c1 in a:
        for d2, c2 in b:
            if d1 == 1 or d2 == 1:
                d, c = d1 * d2, c1 * c2
            elif d1 == d2:
                d, c = 1, c1 * c2 * d1
            else:
                g = math.gcd(d1, d2)
                d, c = (d1 // g) * (d2 // g), c1 * c2 * g
            acc[d] = acc.get(d, 0) + c
    return _canon(acc)


def _mul(a: AlgebraicReal, b: AlgebraicReal) -> AlgebraicReal:
    if not a._terms or not b._terms:
        return ZERO
    if b._terms is ONE._terms or b._terms == ONE._terms:
        return a
    if a._terms == ONE._terms:
        return b
    return AlgebraicReal._raw(_mul_terms(a._terms, b._terms))


@lru_cache(maxsize=4096)
def inv_sqrt(n: int) -> AlgebraicReal:
    """``1/sqrt(n)`` in canonical form: with ``n = s*s*d``, ``(1/(s*d))*sqrt(d)``."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"inv_sqrt needs a positive integer, got {n!r}")
    s, d = _square_split(n)
    return AlgebraicReal._raw(((d, Fraction(1, s * d)),))


def sqrt_int(n: int) -> AlgebraicReal:
    if n < 0:
        raise ValueError("negative radicand")
    return AlgebraicReal({n: Fraction(1)}) if n else ZERO


ZERO = AlgebraicReal._raw(())
ONE = AlgebraicReal._raw(((1, Fraction(1)),))
TWO = AlgebraicReal._raw(((1, Fraction(2)),))
