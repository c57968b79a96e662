r"""
Characters and supercharacters of the N=3 modules `H(\Lambda^{[K(m), m_2]})`,
`K(m) = -(m+2)/4`, `0 \le m_2 \le m`.

Both are quotients of an Appell-Lerch sum by an N=3 denominator:

.. MATH::

    R^{(+)} \mathrm{ch}^{(+)} = q^{-m/16}\,\Phi^{[\frac m2,\frac{m_2+1}2]}
        (2\tau, z+\tfrac\tau2-\tfrac12, z-\tfrac\tau2+\tfrac12, 0),\qquad
    R^{(-)} \mathrm{ch}^{(-)} = q^{-m/16}\,\Phi^{[\frac m2,\frac{m_2+1}2]}
        (2\tau, z+\tfrac\tau2, z-\tfrac\tau2, 0),

    R^{(+)} = \eta(\tfrac\tau2)\eta(2\tau)\frac{\vartheta_{11}}{\vartheta_{00}},\qquad
    R^{(-)} = \frac{\eta(\tau)^3}{\eta(\frac\tau2)}\frac{\vartheta_{11}}{\vartheta_{01}}.

Two routes are provided: :func:`char_via_definition` sums `\Phi`
directly, :func:`char_general` uses the theta/eta closed forms for
`m_2 \in \{0, 1\}` and the finite theta-difference correction for larger
`m_2`.  Sign conventions of the closed forms are the ones that agree
with the direct route (see the ``RESOLUTIONS`` notes).

EXAMPLES::

    >>> from mocktheta.characters import ModuleLabel, char_general, char_via_definition
    >>> lab = ModuleLabel(3, 2)
    >>> a = char_general(lab, "plus", "0.05+0.9i", "0.13+0.02i")
    >>> b = char_via_definition(lab, "plus", "0.05+0.9i", "0.13+0.02i")
    >>> abs(a - b) < 1e-20
    True
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .appell import HalfInt, PhiSpec, phi_component, phi_eval_plan, phi_formal, phi_resolve
from .coefficients import as_fraction
from .errors import PoleError, ScopeError, UsageError
from .numeric import ctx, e, mpq, outer_sum, qpow, require_upper_half, to_mpc
from .series import Affine, Monomial, PuiseuxSeries, TruncationBox, product_within
from .thetas import (ThetaIndex, dedekind_eta, dedekind_eta_series, eta_reciprocal_series,
                     mumford_vartheta, mumford_vartheta_series, theta_km, vartheta11_reciprocal_series)

__all__ = [
    "ModuleLabel",
    "CharKind",
    "r_denominator",
    "r_denominator_reciprocal_series",
    "char_via_definition",
    "char_closed",
    "char_general",
    "char_diff_correction",
    "char_expand",
    "RESOLUTIONS",
]

_HALF = Fraction(1, 2)
_QUARTER = Fraction(1, 4)

#: how each sign or reading question in the closed forms was settled
RESOLUTIONS = {
    "m2=0 triple sums": "the outer exponent is j^2 (not (m+1)j^2); only j^2 matches the direct route",
    "m2=1 plus leading term": "carries an extra e^{-pi i m/2}",
    "m2=1 triple sums": "the two (j, r) sums enter as A - B",
    "m2=1 supercharacter": "uses vartheta_01 (vartheta_00 fails the route check)",
    "difference prefactors": "even m2: +i (plus), -1 (minus); odd m2: -1 (both kinds)",
    "m even, m2 odd": "base m2 = 1 has no closed form; evaluated through the resolution plan",
}


class CharKind(str, enum.Enum):
    """``plus``: character, ``minus``: supercharacter."""

    PLUS = "plus"
    MINUS = "minus"

    @classmethod
    def of(cls, x) -> CharKind:
        if isinstance(x, CharKind):
            return x
        key = {"+": "plus", "-": "minus", "1": "plus", "-1": "minus"}.get(str(x).strip(), str(x).strip().lower())
        try:
            return cls(key)
        except ValueError:
            raise UsageError(f"sign must be plus or minus, got {x!r}") from None


@dataclass(frozen=True)
class ModuleLabel:
    r"""
    `(m, m_2)` with `m \ge 1`, `0 \le m_2 \le m`.

    EXAMPLES::

        >>> ModuleLabel(2, 1).level
        Fraction(-1, 1)
        >>> ModuleLabel(2, 5)
        Traceback (most recent call last):
        ...
        mocktheta.errors.UsageError: need 0 <= m2 <= m, got m = 2, m2 = 5
    """

    m: int
    m2: int

    def __post_init__(self):
        if not isinstance(self.m, int) or not isinstance(self.m2, int) or isinstance(self.m, bool):
            raise UsageError("m and m2 must be integers")
        if self.m < 1:
            raise UsageError(f"m must be a positive integer, got {self.m}")
        if not 0 <= self.m2 <= self.m:
            raise UsageError(f"need 0 <= m2 <= m, got m = {self.m}, m2 = {self.m2}")

    @property
    def level(self) -> Fraction:
        """`K(m) = -(m+2)/4`."""
        return Fraction(-(self.m + 2), 4)

    @property
    def phi_index(self) -> tuple[Fraction, Fraction]:
        """`(m/2, (m_2+1)/2)`."""
        return Fraction(self.m, 2), Fraction(self.m2 + 1, 2)

    def to_json(self) -> dict:
        return {"m": self.m, "m2": self.m2, "K": str(self.level)}


def _vt(a, b, tau, z):
    return mumford_vartheta((a, b), tau, z)


def _th(k, m, tau, z, alt=False):
    return theta_km(ThetaIndex(k, m, alt), tau, z)


def _thd(k, m, tau, z):
    return _th(k, m, tau, z) - _th(-as_fraction(k), m, tau, z)


def _check_v11(tau, z):
    v11 = _vt(1, 1, tau, z)
    if abs(v11) < 1e-12 * abs(qpow(Fraction(1, 8), tau)):
        raise PoleError("the N=3 denominator vanishes (vartheta_11(tau, z) = 0)")
    return v11


# --------------------------------------------------------------------------
# denominators
# --------------------------------------------------------------------------

def r_denominator(kind, tau, z):
    r"""
    `R^{(\pm)}(\tau, z)`.

    EXAMPLES::

        >>> from mocktheta.thetas import dedekind_eta, mumford_vartheta
        >>> from mocktheta.numeric import to_mpc
        >>> t, z = to_mpc("0.9i"), to_mpc("0.21")
        >>> lhs = r_denominator("minus", t, z) * mumford_vartheta((0, 1), t, z)
        >>> rhs = dedekind_eta(t) ** 3 * mumford_vartheta((1, 1), t, z) / dedekind_eta(t / 2)
        >>> abs(lhs - rhs) < 1e-25
        True
        >>> r_denominator("plus", t, 0)
        Traceback (most recent call last):
        ...
        mocktheta.errors.PoleError: the N=3 denominator vanishes (vartheta_11(tau, z) = 0)
    """
    kind = CharKind.of(kind)
    tau, z = to_mpc(tau), to_mpc(z)
    require_upper_half(tau)
    v11 = _check_v11(tau, z)
    if kind is CharKind.PLUS:
        return dedekind_eta(tau / 2) * dedekind_eta(2 * tau) * v11 / _vt(0, 0, tau, z)
    return dedekind_eta(tau) ** 3 / dedekind_eta(tau / 2) * v11 / _vt(0, 1, tau, z)


def r_denominator_reciprocal_series(kind, box: TruncationBox) -> PuiseuxSeries:
    r"""
    `1/R^{(\pm)}` in `q` and `y = e^{2\pi i z}` (``box`` should be a
    single-variable box, see :meth:`TruncationBox.single`).

    EXAMPLES::

        >>> box = TruncationBox.single(2, (-4, 4))
        >>> s = r_denominator_reciprocal_series("minus", box)
        >>> str(s.leading_q())
        '-11/48'
    """
    kind = CharKind.of(kind)
    tau = Affine.tau()
    if kind is CharKind.PLUS:
        makers = [lambda b: mumford_vartheta_series((0, 0), b),
                  lambda b: eta_reciprocal_series(b, tau / 2),
                  lambda b: eta_reciprocal_series(b, tau * 2),
                  lambda b: vartheta11_reciprocal_series(b)]
    else:
        makers = [lambda b: mumford_vartheta_series((0, 1), b),
                  lambda b: dedekind_eta_series(b, tau / 2),
                  lambda b: eta_reciprocal_series(b),
                  lambda b: eta_reciprocal_series(b),
                  lambda b: eta_reciprocal_series(b),
                  lambda b: vartheta11_reciprocal_series(b)]
    return product_within(makers, box)


# --------------------------------------------------------------------------
# route A: definition
# --------------------------------------------------------------------------

def _phi_args(kind: CharKind, tau, z):
    if kind is CharKind.PLUS:
        h = mpq(_HALF)
        return 2 * tau, z + tau / 2 - h, z - tau / 2 + h
    return 2 * tau, z + tau / 2, z - tau / 2


def char_via_definition(label: ModuleLabel, kind, tau, z, *, fold_t: bool = False, guard: float = 1e-10):
    r"""
    `q^{-m/16}\Phi^{[m/2,(m_2+1)/2]}(\dots)/R^{(\pm)}(\tau,z)` with `\Phi`
    summed directly.

    With ``fold_t=True`` the factor `q^{-m/16}` is produced instead by
    the `t`-prefactor of `\Phi` at `t = \tau/8`.

    EXAMPLES::

        >>> lab = ModuleLabel(1, 0)
        >>> a = char_via_definition(lab, "plus", "0.9i", "0.23")
        >>> b = char_via_definition(lab, "plus", "0.9i", "0.23", fold_t=True)
        >>> abs(a - b) < 1e-25
        True
    """
    kind = CharKind.of(kind)
    tau, z = to_mpc(tau), to_mpc(z)
    require_upper_half(tau)
    R = r_denominator(kind, tau, z)
    m, s = label.phi_index
    T, Z1, Z2 = _phi_args(kind, tau, z)
    if fold_t:
        t = tau / 8
        val = (phi_component(m, s, 1, T, Z1, Z2, t, guard) - phi_component(m, s, 2, T, Z1, Z2, t, guard))
    else:
        val = qpow(-Fraction(label.m, 16), tau) * (phi_component(m, s, 1, T, Z1, Z2, 0, guard)
                                                  - phi_component(m, s, 2, T, Z1, Z2, 0, guard))
    return val / R


# --------------------------------------------------------------------------
# route B: closed forms
# --------------------------------------------------------------------------

def _m2_zero(m: int, kind: CharKind, tau, z):
    ks = range(1, m, 2)
    v11 = _check_v11(tau, z)
    th = {k: _thd(k, m, tau, z) for k in ks}
    M = Fraction(m)
    eta_half, eta2 = dedekind_eta(tau / 2), dedekind_eta(2 * tau)

    def tri(plus: bool):
        if not ks:
            return ctx.mpc(0)

        def block(j):
            tot = ctx.mpc(0)
            for k in ks:
                part = ctx.mpc(0)
                for r in range(1, j + 1):
                    c = 2 * m * r - k
                    base = Fraction(j * j) - Fraction(c * c) / (4 * M) - M / 16
                    if plus:
                        pair = (qpow(base + (j + _QUARTER) * c, tau) * e(Fraction(2 * m * r + k, 4))
                                + qpow(base + (j - _QUARTER) * c, tau) * e(Fraction(c, 4)))
                    else:
                        pair = qpow(base + (j + _QUARTER) * c, tau) + qpow(base + (j - _QUARTER) * c, tau)
                    part += pair
                for r in range(0, j):
                    c = 2 * m * r + k
                    base = Fraction(j * j) - Fraction(c * c) / (4 * M) - M / 16
                    if plus:
                        pair = (qpow(base + (j + _QUARTER) * c, tau) * e(Fraction(2 * m * r - k, 4))
                                + qpow(base + (j - _QUARTER) * c, tau) * e(Fraction(c, 4)))
                    else:
                        pair = qpow(base + (j + _QUARTER) * c, tau) + qpow(base + (j - _QUARTER) * c, tau)
                    part -= pair
                tot += part * th[k]
            return -tot if j % 2 else tot

        return outer_sum(block)

    lead_q = qpow(M * M / (16 * (M + 1)), tau)
    if kind is CharKind.PLUS:
        v = _vt(0, 0, tau, z) / v11
        T = _th(-M / 2, M + 1, tau, mpq(_HALF))
        ph = e(-M / 8)
        quot = (_th(_HALF, M + 1, tau, z) / _th(-_HALF, 1, tau, z)
                - _th(-_HALF, M + 1, tau, z) / _th(_HALF, 1, tau, z))
        return (-ctx.j * ph * eta2 ** 2 / eta_half * v / T * quot
                + lead_q * ph / (eta_half * eta2) * v / T * tri(True))
    eta1 = dedekind_eta(tau)
    v = _vt(0, 1, tau, z) / v11
    T = _th(M / 2, M + 1, tau, 0, True)
    quot = (_th(_HALF, M + 1, tau, z, True) / _th(-_HALF, 1, tau, z, True)
            - _th(-_HALF, M + 1, tau, z, True) / _th(_HALF, 1, tau, z, True))
    return (eta_half * eta2 ** 3 / eta1 ** 3 * v / T * quot
            + lead_q * eta_half / eta1 ** 3 * v / T * tri(False))


def _m2_one(m: int, kind: CharKind, tau, z):
    ks = range(0, m, 2)
    v11 = _check_v11(tau, z)
    th = {k: _thd(k, m, tau, z) for k in ks if k}
    M = Fraction(m)
    plus = kind is CharKind.PLUS
    eta_half, eta2 = dedekind_eta(tau / 2), dedekind_eta(2 * tau)

    def pair(a: int):
        if plus:
            return (e(-Fraction(a, 4)) * qpow(-Fraction(a, 4), tau)
                    + e(Fraction(a, 4)) * qpow(Fraction(a, 4), tau))
        return qpow(-Fraction(a, 4), tau) + qpow(Fraction(a, 4), tau)

    def block(j):
        tot = ctx.mpc(0)
        for k in th:
            part = ctx.mpc(0)
            for r in range(1, j + 1):
                ex = (M + 1) * j * j - Fraction((2 * m * (j - r) + m - k) ** 2) / (4 * M)
                part += qpow(ex, tau) * pair(2 * m * r - m + k)
            for r in range(0, j):
                ex = (M + 1) * j * j - Fraction((2 * m * (j - r) - m + k) ** 2) / (4 * M)
                part -= qpow(ex, tau) * pair(2 * m * r + m - k)
            tot += part * th[k]
        return -tot if j % 2 else tot

    tri = outer_sum(block) if th else ctx.mpc(0)
    lead_q = qpow(-M / (16 * (M + 1)), tau)
    t2, z2 = 2 * tau, 2 * z
    fin = ctx.mpc(0)
    for k in range(1, (m - 1) // 2 + 1):
        sg = (-1) ** k if plus else 1
        fin += sg * qpow(-Fraction((4 * k - m) ** 2, 16 * m), tau) * _thd(k, M / 2, t2, z2)
    if plus:
        v = _vt(0, 0, tau, z) / v11
        T = _th(M / 2, M + 1, tau, 0)
        ph = e(-M / 4)
        quot = (_th(M + _HALF, M + 1, tau, z) / _th(-_HALF, 1, tau, z)
                - _th(-M - _HALF, M + 1, tau, z) / _th(_HALF, 1, tau, z))
        return (-ctx.j * ph * eta2 ** 2 / eta_half * v / T * quot
                - lead_q * ph / (eta_half * eta2) * v / T * tri
                + v / (eta_half * eta2) * fin)
    eta1 = dedekind_eta(tau)
    v = _vt(0, 1, tau, z) / v11
    T = _th(M / 2, M + 1, tau, 0, True)
    quot = (_th(M + _HALF, M + 1, tau, z, True) / _th(-_HALF, 1, tau, z, True)
            - _th(-M - _HALF, M + 1, tau, z, True) / _th(_HALF, 1, tau, z, True))
    return (eta_half * eta2 ** 3 / eta1 ** 3 * v / T * quot
            - lead_q * eta_half / eta1 ** 3 * v / T * tri
            + eta_half / eta1 ** 3 * v * fin)


def char_closed(label: ModuleLabel, kind, tau, z):
    r"""
    Closed theta/eta form of `\mathrm{ch}^{(\pm)}` for `m_2 = 0` (any `m`)
    and `m_2 = 1` (odd `m`).

    EXAMPLES::

        >>> lab = ModuleLabel(3, 1)
        >>> abs(char_closed(lab, "minus", "0.9i", "0.23") - char_via_definition(lab, "minus", "0.9i", "0.23")) < 1e-20
        True
        >>> char_closed(ModuleLabel(2, 1), "plus", "0.9i", "0.23")
        Traceback (most recent call last):
        ...
        mocktheta.errors.ScopeError: the m2 = 1 closed form needs odd m, got m = 2
    """
    kind = CharKind.of(kind)
    tau, z = to_mpc(tau), to_mpc(z)
    require_upper_half(tau)
    if label.m2 == 0:
        return _m2_zero(label.m, kind, tau, z)
    if label.m2 == 1:
        if label.m % 2 == 0:
            raise ScopeError(f"the m2 = 1 closed form needs odd m, got m = {label.m}")
        return _m2_one(label.m, kind, tau, z)
    raise ScopeError(f"closed forms exist for m2 in {{0, 1}}, got m2 = {label.m2}")


def char_diff_correction(label: ModuleLabel, kind, tau, z):
    r"""
    `\mathrm{ch}^{(\pm)}_{m_2} - \mathrm{ch}^{(\pm)}_{m_2 \bmod 2}` as a finite sum of
    `[\theta_{a,m/2}-\theta_{-a,m/2}](2\tau,2z)` with `a = k+\frac12` (even
    `m_2`) or `a = k` (odd `m_2`).

    EXAMPLES::

        >>> char_diff_correction(ModuleLabel(4, 0), "plus", "0.9i", "0.2") == 0
        True
    """
    kind = CharKind.of(kind)
    tau, z = to_mpc(tau), to_mpc(z)
    m, m2 = label.m, label.m2
    if m2 < 2:
        return ctx.mpc(0)
    M = Fraction(m)
    plus = kind is CharKind.PLUS
    t2, z2 = 2 * tau, 2 * z
    total = ctx.mpc(0)
    if m2 % 2 == 0:
        for k in range(m2 // 2):
            a = k + _HALF
            sg = (-1) ** k if plus else 1
            total += sg * qpow(-a * a / M + a / 2, tau) * _thd(a, M / 2, t2, z2)
        fac = ctx.j if plus else -1
    else:
        for k in range(1, (m2 - 1) // 2 + 1):
            sg = (-1) ** k if plus else 1
            total += sg * qpow(-Fraction(k * k) / M + Fraction(k, 2), tau) * _thd(k, M / 2, t2, z2)
        fac = -1
    v11 = _check_v11(tau, z)
    if plus:
        pre = 1 / (dedekind_eta(tau / 2) * dedekind_eta(2 * tau)) * _vt(0, 0, tau, z) / v11
    else:
        pre = dedekind_eta(tau / 2) / dedekind_eta(tau) ** 3 * _vt(0, 1, tau, z) / v11
    return fac * qpow(-M / 16, tau) * pre * total


def _base_via_plan(m: int, kind: CharKind, tau, z):
    # ch for m2 = 1 through the resolution plan (m even: no closed form)
    plan = phi_resolve(HalfInt.of(Fraction(m, 2)), HalfInt(2))
    T, Z1, Z2 = _phi_args(kind, tau, z)
    val = phi_eval_plan(plan, (T, Z1, Z2))
    return qpow(-Fraction(m, 16), tau) * val / r_denominator(kind, tau, z)


def char_general(label: ModuleLabel, kind, tau, z):
    r"""
    `\mathrm{ch}^{(\pm)}` for every `0 \le m_2 \le m` from closed forms:
    the `m_2 \bmod 2` base case plus :func:`char_diff_correction`.

    For even `m` and odd `m_2` the base case `m_2 = 1` is evaluated
    through :func:`~mocktheta.appell.phi_resolve`.

    EXAMPLES::

        >>> lab = ModuleLabel(4, 3)
        >>> a = char_general(lab, "minus", "0.1+0.85i", "0.17-0.03i")
        >>> b = char_via_definition(lab, "minus", "0.1+0.85i", "0.17-0.03i")
        >>> abs(a - b) < 1e-20
        True
    """
    kind = CharKind.of(kind)
    tau, z = to_mpc(tau), to_mpc(z)
    require_upper_half(tau)
    base_m2 = label.m2 % 2
    if base_m2 == 1 and label.m % 2 == 0:
        base = _base_via_plan(label.m, kind, tau, z)
    else:
        base = char_closed(ModuleLabel(label.m, base_m2), kind, tau, z)
    return base + char_diff_correction(label, kind, tau, z)


# --------------------------------------------------------------------------
# expansion
# --------------------------------------------------------------------------

def char_expand(label: ModuleLabel, kind, box: TruncationBox) -> PuiseuxSeries:
    r"""
    Expansion of `\mathrm{ch}^{(\pm)}` in `q` and `y = e^{2\pi iz}` (stored
    in the `x_1` slot), exact inside ``box``.

    `\Phi` is expanded at the substituted arguments and multiplied by the
    factorwise expansion of `1/R^{(\pm)}`; ``box`` should come from
    :meth:`~mocktheta.series.TruncationBox.single`.

    EXAMPLES::

        >>> lab = ModuleLabel(2, 1)
        >>> s = char_expand(lab, "minus", TruncationBox.single(4, (-8, 8)))
        >>> a = s.embed("1.2i", "0.05+0.2i")
        >>> abs(a - char_via_definition(lab, "minus", "1.2i", "0.05+0.2i")) < 1e-10
        True
    """
    kind = CharKind.of(kind)
    if box.x2_window != (0, 0):
        raise UsageError("character expansions use a single variable; build the box with TruncationBox.single")
    m, s = label.phi_index
    spec = PhiSpec.of(m, s)
    T = Affine.tau() * 2
    if kind is CharKind.PLUS:
        Z1 = Affine.z1() + Affine.tau() / 2 - _HALF
        Z2 = Affine.z1() - Affine.tau() / 2 + _HALF
    else:
        Z1 = Affine.z1() + Affine.tau() / 2
        Z2 = Affine.z1() - Affine.tau() / 2
    lead = Monomial(-Fraction(label.m, 16), Fraction(0), Fraction(0))
    makers = [lambda b: PuiseuxSeries.monomial(lead, b),
              lambda b: phi_formal(spec, b, T, Z1, Z2),
              lambda b: r_denominator_reciprocal_series(kind, b)]
    return product_within(makers, box)
