from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from mocktheta.characters import (CharKind, ModuleLabel, char_closed, char_expand, char_general,
                                  char_via_definition)
from mocktheta.errors import ScopeError, UsageError
from mocktheta.numeric import residual
from mocktheta.series import TruncationBox

LABELS = st.integers(1, 4).flatmap(lambda m: st.integers(0, m).map(lambda m2: ModuleLabel(m, m2)))
KINDS = st.sampled_from(["plus", "minus"])
TAUS = st.builds(complex, st.floats(-0.3, 0.3), st.floats(0.6, 1.2))
ZS = st.builds(complex, st.floats(-0.4, 0.4), st.floats(0.02, 0.1))


def test_label_validation():
    with pytest.raises(UsageError, match="m2"):
        ModuleLabel(2, 5)
    lab = ModuleLabel(3, 1)
    assert lab.level == F(-5, 4)
    assert lab.phi_index == (F(3, 2), 1)


def test_kind_spellings():
    assert CharKind.of("+") is CharKind.of("plus") is CharKind.PLUS


@given(LABELS, KINDS, TAUS, ZS)
@settings(max_examples=15)
def test_routes_agree(lab, kind, tau, z):
    assert residual(char_general(lab, kind, tau, z), char_via_definition(lab, kind, tau, z)) < 1e-8


def test_closed_form_scope():
    with pytest.raises(ScopeError):
        char_closed(ModuleLabel(2, 1), "plus", "0.9i", "0.1")
    with pytest.raises(ScopeError):
        char_closed(ModuleLabel(3, 2), "plus", "0.9i", "0.1")


@pytest.mark.parametrize("kind", ["plus", "minus"])
def test_expansion_is_deterministic_and_embeds(kind):
    lab = ModuleLabel(2, 0)
    box = TruncationBox.single(4, (-8, 8))
    a, b = char_expand(lab, kind, box), char_expand(lab, kind, box)
    assert a.to_json() == b.to_json()
    assert residual(a.embed("1.2i", "0.05+0.2i"), char_via_definition(lab, kind, "1.2i", "0.05+0.2i")) < 1e-10


def test_expansion_leading_exponents():
    # golden values computed once from the expansion and checked against the definition above
    box = TruncationBox.single(3, (-8, 8))
    assert char_expand(ModuleLabel(2, 1), "minus", box).leading_q() == F(7, 48)
    assert char_expand(ModuleLabel(1, 0), "plus", box).leading_q() is not None


def test_expansion_needs_single_variable_box():
    with pytest.raises(UsageError):
        char_expand(ModuleLabel(1, 0), "plus", TruncationBox(3))
