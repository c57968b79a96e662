from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from mocktheta.errors import ScopeError, UsageError
from mocktheta.numeric import ctx, e, qpow, residual
from mocktheta.series import TruncationBox
from mocktheta.thetas import (SPECIAL_FORMS, ThetaIndex, check_form_scope, dedekind_eta, dedekind_eta_series,
                              mumford_vartheta, mumford_vartheta_series, theta_km, theta_km_series,
                              theta_km_tail_bound, theta_special_forms)

TAUS = st.builds(complex, st.floats(-0.3, 0.3), st.floats(0.6, 1.2))
ZS = st.builds(complex, st.floats(-0.4, 0.4), st.floats(-0.1, 0.1))
KS = st.integers(-6, 6).map(lambda n: F(n, 2))
MS = st.integers(1, 8).map(lambda n: F(n, 2))


def _eta_product(tau, terms=400):
    q = e(tau)
    out = qpow(F(1, 24), tau)
    for n in range(1, terms):
        out *= 1 - q ** n
    return out


@given(TAUS)
def test_eta_matches_product(tau):
    tau = ctx.mpc(tau)
    assert residual(dedekind_eta(tau), _eta_product(tau)) < 1e-25


@given(KS, MS, TAUS, ZS)
def test_theta_index_periodicity(k, m, tau, z):
    # k is defined modulo 2m
    assert residual(theta_km(ThetaIndex(k, m), tau, z), theta_km(ThetaIndex(k + 2 * m, m), tau, z)) < 1e-25


@given(KS, MS, TAUS, ZS)
def test_theta_symmetry(k, m, tau, z):
    assert residual(theta_km(ThetaIndex(k, m), tau, -ctx.mpc(z)), theta_km(ThetaIndex(-k, m), tau, z)) < 1e-25


@given(st.integers(-4, 4), TAUS, ZS)
def test_vartheta11_quasi_period(n, tau, z):
    tau, z = ctx.mpc(tau), ctx.mpc(z)
    lhs = mumford_vartheta((1, 1), tau, z + n * tau)
    rhs = (-1) ** n * qpow(-F(n * n, 2), tau) * e(-n * z) * mumford_vartheta((1, 1), tau, z)
    # near a zero both sides are cancellations of summands as large as the factor
    scale = abs(qpow(-F(n * n, 2), tau) * e(-n * z))
    assert abs(lhs - rhs) < 1e-20 * max(1, scale, abs(lhs), abs(rhs))


@given(KS, MS, st.booleans(), TAUS, ZS, st.integers(1, 6))
def test_series_embedding_within_tail_bound(k, m, alt, tau, z, q_order):
    idx = ThetaIndex(k, m, alt)
    box = TruncationBox.single(q_order, (-20, 20))
    value = theta_km(idx, tau, z)
    bound = theta_km_tail_bound(idx, box, tau, z) + 1e-18 * max(1, abs(value))
    assert abs(theta_km_series(idx, box).embed(tau, z) - value) <= bound


def test_tail_bound_refuses_narrow_windows():
    with pytest.raises(UsageError):
        theta_km_tail_bound(ThetaIndex(0, 1), TruncationBox.single(9, (-1, 1)), "0.9i", "0.1")


def test_eta_series_golden():
    s = dedekind_eta_series(TruncationBox.single(6, (0, 0)))
    got = sorted((m.q, str(c)) for m, c in s.terms.items())
    assert got == [(F(1, 24), "1"), (F(25, 24), "-1"), (F(49, 24), "-1"), (F(121, 24), "1")]


def test_vartheta_series_golden():
    s = mumford_vartheta_series((0, 0), TruncationBox.single(3, (-4, 4)))
    assert {(str(m), str(c)) for m, c in s.terms.items()} == {
        ("1", "1"), ("q^2*x1^(-2)", "1"), ("q^2*x1^2", "1"), ("q^(1/2)*x1", "1"), ("q^(1/2)*x1^(-1)", "1")}


def test_special_forms_catalogue():
    assert len(SPECIAL_FORMS) == 13
    assert {f.scope for f in SPECIAL_FORMS.values()} <= {"none", "m in N", "m in N_odd", "m in 1/2 N_odd"}


@pytest.mark.parametrize("fid", sorted(SPECIAL_FORMS))
def test_special_forms_hold(fid):
    form = SPECIAL_FORMS[fid]
    m = {"none": None, "m in N": 2, "m in N_odd": 3, "m in 1/2 N_odd": F(3, 2)}[form.scope]
    params = {"m": m} if m is not None else {}
    if form.signed:
        params["sign"] = -1
    assert theta_special_forms(fid, params, "0.1+0.85i", "0.13+0.02i", "-0.21+0.04i") < 1e-20


def test_special_form_scope_violation():
    fid = next(f for f, d in SPECIAL_FORMS.items() if d.scope == "m in N_odd")
    with pytest.raises(ScopeError):
        check_form_scope(fid, 2)
