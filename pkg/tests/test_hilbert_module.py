import random

import pytest

from helpers import actions, random_element
from treecorona.group_action import make_action
from treecorona.hilbert_module import (
    ModuleElement,
    OutOfWindow,
    WindowFunction,
    WindowMismatch,
    convolve,
    group_translate,
    inner,
    involution,
    module_norm,
    module_norm_sq,
)
from treecorona.scalar import ONE, ZERO, AlgebraicReal, sqrt_int

LINE = make_action("line")


def test_window_function_lookup():
    f = WindowFunction(range(-2, 3), {0: 1, 1: 2})
    assert f(1) == 2 and f(-2) == ZERO and f(10) == ZERO
    g = WindowFunction(range(-2, 3), {0: 1}, outside=None)
    with pytest.raises(OutOfWindow):
        g(10)
    with pytest.raises(OutOfWindow):
        WindowFunction(range(3), {5: 1})


def test_translation_tracks_unknown_values():
    w = frozenset(range(-3, 4))
    f = WindowFunction(w, {3: 1}, outside=None)
    moved = f.translate(LINE, 1)
    assert not moved.clean
    known = WindowFunction(w, {3: 1}).translate(LINE, 1)
    assert known.clean and known(-3) == ZERO and known.outside is None


def test_mismatched_windows_rejected():
    a = WindowFunction(range(3), {0: 1})
    b = WindowFunction(range(4), {0: 1})
    with pytest.raises(WindowMismatch):
        a + b


def test_delta_convolution_is_translation():
    w = frozenset(range(-6, 7))
    b = WindowFunction(w, {0: 2, 2: 1})
    c = WindowFunction(w, {0: 3})
    prod = convolve(ModuleElement.delta(LINE, 2, b), ModuleElement.delta(LINE, -1, c))
    assert set(prod.support) == {1}
    assert prod(1) == b * c.translate(LINE, 2)
    assert prod(1)(2) == AlgebraicReal.rational(3)


def test_inner_product_and_norm():
    w = frozenset(range(-3, 4))
    f = ModuleElement(LINE, w, {0: WindowFunction(w, {0: sqrt_int(2)}), 1: WindowFunction(w, {0: 1, 1: 3})})
    ip = inner(f, f)
    assert ip(0) == AlgebraicReal.rational(3) and ip(1) == AlgebraicReal.rational(9)
    assert module_norm_sq(f) == AlgebraicReal.rational(9)
    assert module_norm(f) == AlgebraicReal.rational(3)


def test_involution_of_delta():
    w = frozenset(range(-5, 6))
    b = WindowFunction(w, {0: 1})
    star = involution(ModuleElement.delta(LINE, 2, b))
    assert set(star.support) == {-2}
    assert star(-2)(-2) == ONE


def test_group_translate():
    w = frozenset(range(-5, 6))
    f = ModuleElement(LINE, w, {0: WindowFunction(w, {0: 1})})
    assert group_translate(3, f)(0)(3) == ONE


@pytest.mark.parametrize("seed", range(15))
def test_star_algebra_axioms(seed):
    rng = random.Random(seed)
    for act in actions():
        f, g, h = (random_element(rng, act) for _ in range(3))
        left = convolve(convolve(f, g), h)
        right = convolve(f, convolve(g, h))
        assert left.clean and right.clean
        assert left == right
        assert involution(convolve(f, g)) == convolve(involution(g), involution(f))
        assert involution(involution(f)) == f
        fg, gf = inner(f, g), inner(g, f)
        assert fg == gf
        ff = inner(f, f)
        assert all(x.sign() >= 0 for x in ff.values.values())


def test_nonnegative_flag():
    w = frozenset(range(-2, 3))
    assert ModuleElement(LINE, w, {0: WindowFunction(w, {0: 1})}).nonnegative()
    assert not ModuleElement(LINE, w, {0: WindowFunction(w, {0: -1})}).nonnegative()
