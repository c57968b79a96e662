import cmath
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from mocktheta.coefficients import (CycloNum, as_fraction, cyclo_canonicalize, cyclo_embed,
                                    cyclotomic_polynomial, root_of_unity)
from mocktheta.errors import UsageError

ORDERS = st.sampled_from([1, 2, 3, 4, 5, 6, 7, 8, 9, 12, 15, 16, 24])
RATS = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def cyclo(draw, order=None):
    L = order if order is not None else draw(ORDERS)
    raw = draw(st.dictionaries(st.integers(0, 3 * L), RATS, max_size=5))
    return cyclo_canonicalize(raw, L)


@st.composite
def same_order(draw, n=3):
    L = draw(ORDERS)
    return [draw(cyclo(L)) for _ in range(n)]


@given(same_order())
def test_ring_axioms(abc):
    a, b, c = abc
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert (a - b) + b == a


@given(cyclo())
def test_inverse(a):
    if a.is_zero():
        with pytest.raises(ZeroDivisionError):
            a.inverse()
    else:
        assert a * a.inverse() == 1


@given(cyclo(), cyclo())
def test_mixed_orders_agree_with_embedding(a, b):
    # lifting to a common order is exact; the embedding only double-checks it
    assert abs(complex(a * b) - complex(a) * complex(b)) < 1e-9 * (1 + abs(complex(a)) * abs(complex(b)))
    assert abs(complex(a + b) - complex(a) - complex(b)) < 1e-9 * (1 + abs(complex(a)) + abs(complex(b)))


@given(ORDERS, st.integers(-50, 50), RATS)
def test_canonical_form_absorbs_cyclotomic_multiples(L, r, c):
    x = cyclo_canonicalize({0: F(1, 3), 1: F(-2)}, L)
    raw = dict(x.terms())
    for k, v in enumerate(cyclotomic_polynomial(L)):
        raw[k + r % L] = raw.get(k + r % L, 0) + c * v
    assert cyclo_canonicalize(raw, L) == x


@given(st.integers(2, 40))
def test_sum_of_all_roots_is_zero(L):
    assert cyclo_canonicalize({k: 1 for k in range(L)}, L).is_zero()


@given(st.fractions(min_value=-4, max_value=4, max_denominator=24))
def test_root_of_unity_embedding(r):
    assert abs(cyclo_embed(root_of_unity(r)) - cmath.exp(2j * cmath.pi * float(r))) < 1e-12


@given(cyclo())
def test_json_round_trip(a):
    assert CycloNum.from_json(a.to_json()) == a


def test_as_fraction_rejects_garbage():
    assert as_fraction("3/2") == F(3, 2)
    with pytest.raises((UsageError, ValueError)):
        as_fraction("three halves")
