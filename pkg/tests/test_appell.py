from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from mocktheta.appell import (EvalPoint, HalfInt, PhiSpec, phi_component, phi_direct, phi_eval_plan, phi_formal,
                              phi_resolve, shift_correction)
from mocktheta.errors import PoleError, UsageError
from mocktheta.numeric import ctx, residual
from mocktheta.series import DEFAULT_REGION, TruncationBox

HALVES = st.integers(-6, 6).map(lambda n: F(n, 2))
MS = st.integers(1, 6).map(lambda n: F(n, 2))
PT = (ctx.mpc("0.07", "0.93"), ctx.mpc("0.21", "0.03"), ctx.mpc("-0.13", "0.05"), ctx.mpc("0.02", "-0.04"))


def test_half_int_parsing():
    assert HalfInt.of("3/2").value == F(3, 2)
    assert HalfInt.of(-2).value == -2
    with pytest.raises(UsageError):
        HalfInt.of("1/3")


def test_pole_guard():
    with pytest.raises(PoleError):
        phi_direct(PhiSpec.of(1, 0), EvalPoint.of("0.9i", "0", "0.1"))
    with pytest.raises(PoleError):
        # z1 + tau hits a denominator zero of the j = -1 term
        phi_direct(PhiSpec.of(1, 0), EvalPoint.of("0.9i", "-0.9i", "0.1"))


@given(MS, HALVES)
@settings(max_examples=25)
def test_swap_symmetry_of_components(m, s):
    tau, z1, z2, t = PT
    a = phi_component(m, s, 1, tau, z1, z2, t)
    b = phi_component(m, s, 2, tau, -z2, -z1, t)
    assert residual(a, b) < 1e-25


@given(MS, HALVES, st.integers(-3, 3))
@settings(max_examples=25)
def test_shift_correction_is_the_index_shift(m, s, j):
    tau, z1, z2, _ = PT
    diff = phi_direct(PhiSpec.of(m, s + j), (tau, z1, z2, 0)) - phi_direct(PhiSpec.of(m, s), (tau, z1, z2, 0))
    assert residual(diff, shift_correction(m, s, j, tau, z1, z2)) < 1e-14


@pytest.mark.parametrize("m,s", [(1, 0), (F(1, 2), F(1, 2)), (2, F(-1, 2)), (F(3, 2), 1)])
def test_formal_expansion_embeds_to_direct_sum(m, s):
    box = TruncationBox(12, (-14, 14), (-14, 14))
    tau, z1, z2 = DEFAULT_REGION.sample_point()
    for comp in ("one", "two"):
        ser = phi_formal(PhiSpec.of(m, s, comp), box)
        val = phi_direct(PhiSpec.of(m, s, comp), (tau, z1, z2, 0))
        assert abs(ser.embed(tau, z1, z2) - val) < 1e-6 * max(1, abs(val))


def test_plan_structure():
    p = phi_resolve(4, F(5, 2))
    assert p.kind == "shift" and p.depth == 0
    assert phi_resolve(4, 0).depth == 2
    assert {leaf.kind for leaf in phi_resolve(4, 0).leaves()} <= {"leaf_half_odd", "leaf_odd_zero"}
    assert phi_resolve(3, 0).kind == "base_doubling"


@pytest.mark.parametrize("m", [F(1, 2), 1, F(3, 2), 2, 3, 4])
def test_plan_matches_direct(m):
    for s in (F(-1), F(0), F(1, 2), F(2)):
        assert residual(phi_eval_plan(phi_resolve(m, s), PT), phi_direct(PhiSpec.of(m, s), PT)) < 1e-20


def test_eval_point_rejects_lower_half_plane():
    with pytest.raises(Exception):
        EvalPoint.of("-0.5i", 0, 0)
