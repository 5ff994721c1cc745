from fractions import Fraction

import pytest

from treecorona import corona
from treecorona.corona import (
    closed_form_defect,
    cross_term,
    defect_context,
    defect_sq,
    defect_stability,
    default_n,
    far_region,
    l1_bound_holds,
    l1_defect,
    stated_defect_formula,
    z_set,
)
from treecorona.group_action import make_action
from treecorona.hilbert_module import OutOfWindow
from treecorona.scalar import AlgebraicReal

LINE = make_action("line")
DINF = make_action("dihedral")
F2 = make_action("free:2")


def q(x):
    return AlgebraicReal.rational(Fraction(x))


def test_far_region_on_the_line():
    assert far_region(LINE, 2, 5, 1) == list(range(-9, -2)) + list(range(4, 11))


def test_z_set_and_cross_term():
    assert len(z_set(LINE, 4, 20, 1)) == 4
    assert cross_term(LINE, 4, 8, 1, 10) == q("4/5")
    with pytest.raises(OutOfWindow):
        cross_term(LINE, 4, 8, 1, 40)


# values frozen from the brute-force oracle
@pytest.mark.parametrize(
    "act,g1,i,expected",
    [
        (LINE, 1, 4, "2/5"),
        (LINE, 1, 1, "1"),
        (LINE, 3, 1, "2"),
        (LINE, 2, 5, "2/3"),
        (DINF, (1, 1), 4, "2/5"),
        (DINF, (2, -1), 3, "1"),
        (F2, "a", 4, "2/5"),
        (F2, "ab", 4, "4/5"),
        (F2, "aaa", 4, "6/5"),
        (F2, "aaa", 20, "2/7"),
    ],
)
def test_defect_values(act, g1, i, expected):
    res = defect_sq(act, i, default_n(act, i, g1), g1)
    assert res.value == q(expected)
    assert res.clean


def test_long_line_case():
    assert defect_sq(LINE, 199, 202, 1).value == q("1/100")


def test_identity_has_no_defect():
    assert defect_sq(LINE, 3, 5, 0).value == 0
    assert defect_sq(F2, 3, 5, "").value == 0


def test_residual_lives_on_the_far_region():
    ctx = defect_context(LINE, 3, 6, 1)
    res = ctx.residual()
    region = set(ctx.region())
    assert set(res.values) <= region
    assert max(abs(x) for x in res.values.values()) == defect_sq(LINE, 3, 6, 1).value


def test_expanded_defect_matches_direct_norm():
    ctx = defect_context(LINE, 3, 6, 1)
    direct, expanded = ctx.pointwise_defect(), ctx.expanded_defect()
    for t in ctx.region():
        assert direct(t) == expanded(t)


def test_empty_region_is_flagged(caplog):
    res = defect_sq(LINE, 6, 3, 1)
    assert res.empty_region and res.value == 0


def test_stability_over_n():
    st = defect_stability(F2, 3, "ab")
    assert st.stable and st.value == q("1")


def test_closed_form_and_printed_formula():
    assert closed_form_defect(4, 1) == Fraction(2, 5)
    assert closed_form_defect(1, 3) == 2
    assert stated_defect_formula(4, 1, 1) == Fraction(1, 2)
    assert stated_defect_formula(4, 1, 2) == Fraction(5, 4)


def test_l1_bridge():
    l1 = l1_defect(LINE, 4, 12, 1, 20)
    assert l1 == q("2/5")
    assert l1_bound_holds(l1, q("2/5"))
    with pytest.raises(OutOfWindow):
        l1_defect(LINE, 4, 5, 1, 20)


@pytest.mark.parametrize("g1,i", [("a", 2), ("aB", 3), ("abA", 2), ("ab", 5)])
def test_skeleton_window_agrees_with_full_ball(monkeypatch, g1, i):
    n = default_n(F2, i, g1)
    full = defect_sq(F2, i, n, g1)
    defect_context.cache_clear()
    monkeypatch.setattr(corona, "FULL_BALL_LIMIT", 10)
    ev, _ = corona.defect_windows(F2, n, g1)
    assert len(ev) < F2.tree.ball_size(2 * n)
    skel = defect_sq(F2, i, n, g1)
    defect_context.cache_clear()
    assert skel.value == full.value
    assert skel.clean
