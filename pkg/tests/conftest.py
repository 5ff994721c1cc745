from fractions import Fraction

from hypothesis import strategies as st

from treecorona.scalar import AlgebraicReal

RADICANDS = [1, 2, 3, 5, 6, 7, 10, 12, 18]


@st.composite
def algebraic(draw, max_terms=3):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        d = draw(st.sampled_from(RADICANDS))
        q = Fraction(draw(st.integers(-30, 30)), draw(st.integers(1, 12)))
        terms[d] = terms.get(d, Fraction(0)) + q
    return AlgebraicReal(terms)
