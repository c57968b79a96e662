from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from mocktheta.coefficients import CycloNum
from mocktheta.errors import PoleError, UnsupportedSubstitution
from mocktheta.series import (Affine, Monomial, PuiseuxSeries, Substitution, TermSink, TruncationBox,
                              product_within, series_equal_up_to, series_geom_expand, series_substitute)

BOX = TruncationBox(4, (-4, 4), (-4, 4))
# nonnegative exponents: truncation then commutes with multiplication, so the
# truncated product is associative
EXP = st.fractions(min_value=0, max_value=3, max_denominator=2)


@st.composite
def series(draw, box=BOX):
    terms = {}
    for _ in range(draw(st.integers(0, 6))):
        m = Monomial(draw(st.fractions(min_value=0, max_value=3, max_denominator=2)), draw(EXP), draw(EXP))
        terms[m] = CycloNum.rational(draw(st.integers(-5, 5)))
    return PuiseuxSeries(terms, box)


@given(series(), series(), series())
def test_ring_axioms_inside_box(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero()


@given(series(), series())
def test_product_is_compatible_with_restriction(a, b):
    small = TruncationBox(2, (-4, 4), (-4, 4))
    assert (a * b).restrict(small) == a.restrict(small) * b.restrict(small)


@given(series(), series())
def test_embed_is_linear(a, b):
    pt = ("1.3i", "0.11+0.2i", "-0.07+0.25i")
    assert abs((a - b).embed(*pt) - (a.embed(*pt) - b.embed(*pt))) < 1e-25


def test_geometric_expansion_direction():
    box = TruncationBox.single(3, (-5, 5))
    small = series_geom_expand(Monomial.of(1, 0, 0), box)
    assert sorted(m.q for m in small.terms) == [0, 1, 2]
    big = series_geom_expand(Monomial.of(0, -1, 0), box)
    assert all(c == -1 for c in big.terms.values()) and min(m.x1 for m in big.terms) == 1
    with pytest.raises(PoleError):
        series_geom_expand(Monomial.of(0, 0, 0), box)


def test_twisted_geometric_series_embeds():
    box = TruncationBox.single(8, (-5, 5))
    s = series_geom_expand(Monomial.of(1, 1, 0), box, twist=F(1, 3))
    import cmath
    q = cmath.exp(2j * cmath.pi * 1.5j)
    y = cmath.exp(2j * cmath.pi * 0.1)
    exact = 1 / (1 - cmath.exp(2j * cmath.pi / 3) * q * y)
    assert abs(complex(s.embed("1.5i", "0.1")) - exact) < 1e-14 + abs(q) ** 8


def test_substitution_rules():
    s = PuiseuxSeries.monomial(Monomial.of(1, 1, 0), BOX)
    t = series_substitute(s, Substitution(tau=2, z1=Affine.z1() + Affine.tau()))
    assert list(t.terms) == [Monomial.of(3, 1, 0)]
    with pytest.raises(UnsupportedSubstitution):
        Substitution(tau=-1)


def test_equality_reports_first_mismatch():
    a = PuiseuxSeries.monomial(Monomial.of(1, 0, 0), BOX)
    b = PuiseuxSeries.monomial(Monomial.of(2, 0, 0), BOX)
    ok, where = series_equal_up_to(a, a + b)
    assert not ok and where == Monomial.of(2, 0, 0)


def test_product_within_handles_negative_leading_exponents():
    box = TruncationBox.single(3, (-6, 6))
    inv = lambda b: PuiseuxSeries.monomial(Monomial.of(-2, 0, 0), b)
    geo = lambda b: series_geom_expand(Monomial.of(1, 0, 0), b)
    out = product_within([inv, geo], box)
    assert sorted(m.q for m in out.terms) == [-2, -1, 0, 1, 2]


def test_term_sink_applies_prefactor_and_twist():
    sink = TermSink(BOX)
    sub = sink.scaled(Monomial.of(1, 0, 0), F(1, 4), 2)
    sub.add(Monomial.of(0, 1, 0), F(0))
    (m, c), = sink.series().terms.items()
    assert m == Monomial.of(1, 1, 0) and c == 2 * CycloNum.root(1, 4)
