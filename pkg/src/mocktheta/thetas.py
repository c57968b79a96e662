r"""
Theta and eta building blocks.

- `\theta_{k,m}(\tau,z) = \sum_{j\in\ZZ} e^{2\pi i m (j+k/2m) z} q^{m(j+k/2m)^2}`
  and its alternating variant `\theta^{(-)}_{k,m}` with an extra `(-1)^j`;
- Mumford's `\vartheta_{ab}(\tau,z) = \sum_n e^{\pi i (n+a/2)^2\tau + 2\pi i (n+a/2)(z+b/2)}`;
- Dedekind's `\eta(\tau) = q^{1/24}\prod_{n\ge1}(1-q^n)`.

Each has a numeric evaluator (mpmath, see :mod:`mocktheta.numeric`)
and a formal expander that writes the exact expansion at affine
arguments into a truncation box.  Reciprocals of `\eta` and
`\vartheta_{11}` are expanded from their product forms.

EXAMPLES::

    >>> from mocktheta.thetas import ThetaIndex, theta_km, dedekind_eta
    >>> abs(complex(dedekind_eta(1j)) - 0.768225422326057) < 1e-14
    True
    >>> t = ThetaIndex(1, 1)
    >>> abs(complex(theta_km(t, 0.9j, 0) - theta_km(ThetaIndex(-1, 1), 0.9j, 0))) < 1e-25
    True
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .coefficients import as_fraction
from .errors import ScopeError, UsageError
from .numeric import ctx, e, memoized, mpq, qpow, quad_sum, residual, to_mpc
from .series import (
    Affine,
    Monomial,
    PuiseuxSeries,
    TermSink,
    TruncationBox,
    geom_terms,
    product_within,
    quadratic_index_range,
    series_one,
    tau_scale,
)

__all__ = [
    "ThetaIndex",
    "MumfordLabel",
    "theta_km",
    "theta_diff",
    "mumford_vartheta",
    "dedekind_eta",
    "theta_km_series",
    "theta_km_terms",
    "mumford_vartheta_series",
    "dedekind_eta_series",
    "eta_reciprocal_series",
    "vartheta11_reciprocal_series",
    "SPECIAL_FORMS",
    "theta_special_forms",
    "theta_km_tail_bound",
]

_HALF = Fraction(1, 2)


@dataclass(frozen=True)
class ThetaIndex:
    r"""
    Index `(k, m)` of `\theta_{k,m}`, plus the alternating flag.

    EXAMPLES::

        >>> ThetaIndex("1/2", "3/2", alternating=True)
        ThetaIndex(k=Fraction(1, 2), m=Fraction(3, 2), alternating=True)
        >>> ThetaIndex(1, 0)
        Traceback (most recent call last):
        ...
        mocktheta.errors.UsageError: theta index m must be positive, got 0
    """

    k: Fraction
    m: Fraction
    alternating: bool = False

    def __post_init__(self):
        object.__setattr__(self, "k", as_fraction(self.k))
        object.__setattr__(self, "m", as_fraction(self.m))
        if self.m <= 0:
            raise UsageError(f"theta index m must be positive, got {self.m}")


@dataclass(frozen=True)
class MumfordLabel:
    """Characteristics `(a, b)` of `\\vartheta_{ab}`, each 0 or 1."""

    a: int
    b: int

    def __post_init__(self):
        if self.a not in (0, 1) or self.b not in (0, 1):
            raise UsageError("Mumford characteristics must be 0 or 1")


def _idx(idx) -> ThetaIndex:
    return idx if isinstance(idx, ThetaIndex) else ThetaIndex(*idx)


# --------------------------------------------------------------------------
# numeric
# --------------------------------------------------------------------------

def theta_km(idx: ThetaIndex, tau, z):
    r"""
    Numeric `\theta_{k,m}(\tau,z)` (or `\theta^{(-)}_{k,m}`).

    INPUT:

    - ``idx`` -- :class:`ThetaIndex` or a tuple ``(k, m[, alternating])``
    - ``tau`` -- point of the upper half plane
    - ``z`` -- complex

    OUTPUT: ``mpc``; terms below `10^{-38}` of the largest are dropped.

    EXAMPLES::

        >>> from mocktheta.numeric import to_mpc
        >>> a = theta_km((3, 1), to_mpc("0.1+0.8i"), to_mpc("0.2+0.05i"))
        >>> b = theta_km((1, 1), to_mpc("0.1+0.8i"), to_mpc("0.2+0.05i"))
        >>> abs(a - b) < 1e-25
        True
        >>> theta_km((0, 1), -1j, 0)
        Traceback (most recent call last):
        ...
        mocktheta.errors.DomainError: Im(tau) must be positive, got tau = -1j
    """
    idx = _idx(idx)
    return _theta_cached(idx.k, idx.m, idx.alternating, to_mpc(tau), to_mpc(z))


@memoized()
def _theta_cached(k: Fraction, m: Fraction, alt: bool, tau, z):
    return quad_sum(m, k / (2 * m), mpq(m) * z, tau, alt)


def theta_diff(k, m, tau, z, alternating: bool = False):
    r"""`[\theta_{k,m} - \theta_{-k,m}](\tau, z)`."""
    return theta_km(ThetaIndex(k, m, alternating), tau, z) - theta_km(ThetaIndex(-as_fraction(k), m, alternating), tau, z)


def mumford_vartheta(label, tau, z):
    r"""
    Numeric `\vartheta_{ab}(\tau, z)`.

    EXAMPLES::

        >>> abs(mumford_vartheta((1, 1), 0.9j, 0)) < 1e-30
        True
    """
    lab = label if isinstance(label, MumfordLabel) else MumfordLabel(*label)
    return _vartheta_cached(lab.a, lab.b, to_mpc(tau), to_mpc(z))


@memoized()
def _vartheta_cached(a: int, b: int, tau, z):
    return quad_sum(_HALF, Fraction(a, 2), z + mpq(Fraction(b, 2)), tau)


def dedekind_eta(tau):
    r"""
    Numeric `\eta(\tau)`, summed as `\sum_j (-1)^j q^{(6j+1)^2/24}`
    (Euler's pentagonal theorem), i.e. `\theta^{(-)}_{1/2,3/2}(\tau,0)`.

    EXAMPLES::

        >>> from fractions import Fraction
        >>> from mocktheta.numeric import e, mpq, to_mpc
        >>> t = to_mpc("0.13+0.7i")
        >>> abs(dedekind_eta(t + 1) - e(mpq(Fraction(1, 24))) * dedekind_eta(t)) < 1e-25
        True
    """
    return _eta_cached(to_mpc(tau))


@memoized(10_000)
def _eta_cached(tau):
    return quad_sum(Fraction(3, 2), Fraction(1, 6), ctx.mpc(0), tau, True)


# --------------------------------------------------------------------------
# formal
# --------------------------------------------------------------------------

def _quad_terms(sink: TermSink, a: Fraction, n0: Fraction, lin: Affine, alpha: Fraction,
                alt: bool, coeff=1) -> None:
    # writes sum_j (+-1)^j e(a n^2 alpha tau + n lin), n = j + n0
    bound = sink.box.q_max - sink.pre.q
    A = a * alpha
    lt = lin.tauc
    # q-exponent: A (j+n0)^2 + lt (j+n0)
    rng = quadratic_index_range(A, 2 * A * n0 + lt, A * n0 * n0 + lt * n0, bound)
    for j in rng:
        n = j + n0
        mon, tw = lin.expo(n)
        mon = Monomial(mon.q + A * n * n, mon.x1, mon.x2)
        c = -coeff if (alt and j % 2) else coeff
        sink.add(mon, tw, c)


def theta_km_terms(sink: TermSink, idx: ThetaIndex, tau: Affine = Affine.tau(),
                   z: Affine = Affine.z1(), coeff=1) -> None:
    r"""Write ``coeff`` times `\theta_{k,m}(\alpha\tau, Z)` into ``sink``."""
    idx = _idx(idx)
    _quad_terms(sink, idx.m, idx.k / (2 * idx.m), z * idx.m, tau_scale(tau), idx.alternating, coeff)


def theta_km_series(idx: ThetaIndex, box: TruncationBox, tau: Affine = Affine.tau(),
                    z: Affine = Affine.z1()) -> PuiseuxSeries:
    r"""
    Exact expansion of `\theta_{k,m}(\alpha\tau, Z)` inside ``box``.

    INPUT:

    - ``idx`` -- :class:`ThetaIndex`
    - ``box`` -- :class:`~mocktheta.series.TruncationBox`
    - ``tau`` -- modular argument `\alpha\tau` as an
      :class:`~mocktheta.series.Affine` (default `\tau`)
    - ``z`` -- elliptic argument as an affine form (default `z_1`)

    EXAMPLES::

        >>> box = TruncationBox.single(3, (-12, 12))
        >>> s = theta_km_series(ThetaIndex(0, 1), box)
        >>> sorted((str(m), str(c)) for m, c in s.terms.items())
        [('1', '1'), ('q*x1', '1'), ('q*x1^(-1)', '1')]
    """
    sink = TermSink(box)
    theta_km_terms(sink, idx, tau, z)
    return sink.series()


def theta_km_tail_bound(idx: ThetaIndex, box: TruncationBox, tau, z) -> float:
    r"""
    Upper bound for `|\theta_{k,m}(\tau, z) - \text{embed}|` where the
    expansion is :func:`theta_km_series` in ``box`` (single variable).

    The ``box`` window must contain every `y`-exponent `mn` with
    `mn^2 <` ``q_max``, so only terms with `q`-exponent at least ``q_max``
    are dropped.  Their moduli are summed outward from the cut until the
    ratio of consecutive terms falls below `1/2`; past that point the
    ratio keeps decreasing, so the rest is bounded by the last term.

    EXAMPLES::

        >>> from mocktheta.series import TruncationBox
        >>> theta_km_tail_bound(ThetaIndex(1, 2), TruncationBox.single(4, (-6, 6)), "1.1i", "0.1+0.05i") < 1e-11
        True
    """
    import math

    idx = _idx(idx)
    tau, z = to_mpc(tau), to_mpc(z)
    m, n0 = idx.m, idx.k / (2 * idx.m)
    lo, hi = box.x1_window
    reach = math.sqrt(float(box.q_max / m)) + 1
    for j in range(math.floor(-reach - n0) - 1, math.ceil(reach - n0) + 2):
        n = j + n0
        if m * n * n < box.q_max and not (lo <= m * n <= hi):
            raise UsageError("the y-window cuts terms below q_max; no tail bound is available")
    y = float(ctx.im(tau))
    b = float(ctx.im(z))

    def logmag(n):
        # log |q^{m n^2} e(m n z)|
        return -2 * math.pi * (float(m) * n * n * y + float(m) * n * b)

    total = 0.0
    for sgn in (1, -1):
        j = math.ceil(-n0) if sgn > 0 else math.ceil(-n0) - 1
        prev = None
        while True:
            n = j + n0
            if m * n * n >= box.q_max:
                cur = math.exp(logmag(float(n)))
                total += cur
                if prev is not None and prev > 0 and cur / prev < 0.5 and float(n) * sgn > 0:
                    total += cur
                    break
                prev = cur
            j += sgn
    return total


def mumford_vartheta_terms(sink: TermSink, label, tau: Affine = Affine.tau(),
                           z: Affine = Affine.z1(), coeff=1) -> None:
    lab = label if isinstance(label, MumfordLabel) else MumfordLabel(*label)
    _quad_terms(sink, _HALF, Fraction(lab.a, 2), z + Fraction(lab.b, 2), tau_scale(tau), False, coeff)


def mumford_vartheta_series(label, box: TruncationBox, tau: Affine = Affine.tau(),
                            z: Affine = Affine.z1()) -> PuiseuxSeries:
    r"""
    Exact expansion of `\vartheta_{ab}(\alpha\tau, Z)` inside ``box``.

    EXAMPLES::

        >>> box = TruncationBox.single(2, (-12, 12))
        >>> s = mumford_vartheta_series((0, 1), box)
        >>> sorted((str(m), str(c)) for m, c in s.terms.items())
        [('1', '1'), ('q^(1/2)*x1', '-1'), ('q^(1/2)*x1^(-1)', '-1')]
    """
    sink = TermSink(box)
    mumford_vartheta_terms(sink, label, tau, z)
    return sink.series()


def dedekind_eta_series(box: TruncationBox, tau: Affine = Affine.tau()) -> PuiseuxSeries:
    r"""
    Exact expansion of `\eta(\alpha\tau)`.

    EXAMPLES::

        >>> box = TruncationBox.single(6, (0, 0))
        >>> s = dedekind_eta_series(box)
        >>> [(str(m.q), str(c)) for m, c in s.sorted_terms()]
        [('1/24', '1'), ('25/24', '-1'), ('49/24', '-1'), ('121/24', '1')]
    """
    sink = TermSink(box)
    _quad_terms(sink, Fraction(3, 2), Fraction(1, 6), Affine(), tau_scale(tau), True)
    return sink.series()


def _geom_maker(u: Monomial, tw: Fraction, coeff=1):
    def make(box: TruncationBox) -> PuiseuxSeries:
        sink = TermSink(box)
        geom_terms(sink, u, tw, coeff)
        return sink.series()
    return make


def _monomial_maker(m: Monomial, tw: Fraction = Fraction(0), coeff=1):
    def make(box: TruncationBox) -> PuiseuxSeries:
        sink = TermSink(box)
        sink.add(m, tw, coeff)
        return sink.series()
    return make


def _euler_makers(alpha: Fraction, q_max: Fraction) -> list:
    # 1/prod_{n>=1}(1 - q^{alpha n}) up to q^{q_max}
    out = []
    n = 1
    while alpha * n < q_max:
        out.append(_geom_maker(Monomial(alpha * n, Fraction(0), Fraction(0)), Fraction(0)))
        n += 1
    return out


def eta_reciprocal_series(box: TruncationBox, tau: Affine = Affine.tau()) -> PuiseuxSeries:
    r"""
    `1/\eta(\alpha\tau) = q^{-\alpha/24}\prod_n (1-q^{\alpha n})^{-1}`,
    expanded factor by factor.

    EXAMPLES::

        >>> box = TruncationBox.single(5, (0, 0))
        >>> s = eta_reciprocal_series(box) * dedekind_eta_series(box)
        >>> [str(m) for m in s.terms]
        ['1']
    """
    alpha = tau_scale(tau)
    # leading power can be negative, so the product is assembled in an enlarged box
    makers = [_monomial_maker(Monomial(-alpha / 24, Fraction(0), Fraction(0)))]
    makers += _euler_makers(alpha, box.q_max + alpha / 24)
    return product_within(makers, box)


def vartheta11_reciprocal_series(box: TruncationBox, tau: Affine = Affine.tau(),
                                 z: Affine = Affine.z1()) -> PuiseuxSeries:
    r"""
    `1/\vartheta_{11}(\alpha\tau, Z)` from the triple product

    .. MATH::

        \vartheta_{11}(\tau,z) = i q^{1/8} y^{1/2} (1-y^{-1})
        \prod_{n\ge1}(1-q^n)(1-yq^n)(1-y^{-1}q^n),\qquad y = e^{2\pi i z}.

    Requires `Z` to be a nonconstant form (so no factor is a pole).

    EXAMPLES::

        >>> box = TruncationBox.single(3, (-6, 6))
        >>> from mocktheta.series import series_mul
        >>> inv = vartheta11_reciprocal_series(box)
        >>> one = series_mul(inv, mumford_vartheta_series((1, 1), TruncationBox.single(3, (-9, 9))).restrict(box))
        >>> sorted(str(m) for m in one.terms)[:1]
        ['1']
    """
    alpha = tau_scale(tau)
    y, ytw = z.expo(1)
    yi, yitw = z.expo(-1)
    lead, leadtw = z.expo(Fraction(-1, 2))
    lead = Monomial(lead.q - alpha / 8, lead.x1, lead.x2)
    makers = [_monomial_maker(lead, leadtw - Fraction(1, 4)),  # -i = e(-1/4)
              _geom_maker(yi, yitw)]
    n = 1
    # enough factors for every q-exponent below the box plus the largest negative drift
    limit = box.q_max + alpha / 8 + abs(z.tauc) * 2 + 2
    while alpha * n - abs(z.tauc) < limit:
        qn = Monomial(alpha * n, Fraction(0), Fraction(0))
        makers.append(_geom_maker(qn, Fraction(0)))
        makers.append(_geom_maker(qn * y, ytw))
        makers.append(_geom_maker(qn * yi, yitw))
        n += 1
    return product_within(makers, box)


# --------------------------------------------------------------------------
# special values and shift laws
# --------------------------------------------------------------------------

def _th(k, m, tau, z):
    return theta_km(ThetaIndex(k, m), tau, z)


def _thm(k, m, tau, z):
    return theta_km(ThetaIndex(k, m, True), tau, z)


def _vt(a, b, tau, z):
    return mumford_vartheta(MumfordLabel(a, b), tau, z)


def _f(x):
    return mpq(as_fraction(x))


@dataclass(frozen=True)
class SpecialForm:
    """One specialization or shift formula: scope, signs, and the two sides."""

    form_id: str
    scope: str
    signed: bool
    sides: Callable
    description: str


def _sc_none(m):
    return True


def _sc_nat(m):
    return m is not None and m.denominator == 1 and m >= 1


def _sc_nat_odd(m):
    return _sc_nat(m) and m.numerator % 2 == 1


def _sc_half_odd(m):
    return m is not None and m > 0 and m.denominator == 2


_SCOPES = {"none": _sc_none, "m in N": _sc_nat, "m in N_odd": _sc_nat_odd, "m in 1/2 N_odd": _sc_half_odd}


def _b1a(m, tau, z, zp, sg):
    return (_vt(1, 0, 2 * tau, z + sg * tau / 2),
            qpow(Fraction(-1, 16), tau) * e(-sg * z / 4) * _th(Fraction(-sg, 2), 1, tau, z))


def _b1b(m, tau, z, zp, sg):
    return (_vt(1, 1, 2 * tau, z + sg * tau / 2),
            -sg * ctx.j * qpow(Fraction(-1, 16), tau) * e(-sg * z / 4) * _thm(Fraction(-sg, 2), 1, tau, z))


def _b2a(m, tau, z, zp, sg):
    M = _f(m)
    return (_th(0, m + 1, tau, -_f(_HALF) + M * tau / (2 * (M + 1))),
            qpow(-m * m / (16 * (m + 1)), tau) * e(_f(m / 8)) * _th(-m / 2, m + 1, tau, _f(_HALF)))


def _b2b(m, tau, z, zp, sg):
    M = _f(m)
    return (_th(0, m + 1, tau, -(tau + 1) / (2 * (M + 1)) + tau / 2),
            qpow(-m * m / (16 * (m + 1)), tau) * _thm(m / 2, m + 1, tau, 0))


def _b3a(m, tau, z, zp, sg):
    M = _f(m)
    return (_th(0, m + 1, tau, tau / (2 * (M + 1)) + sg * z),
            qpow(-1 / (16 * (m + 1)), tau) * e(-sg * z / 4) * _th(Fraction(sg, 2), m + 1, tau, z))


def _b3b(m, tau, z, zp, sg):
    M = _f(m)
    return (_th(0, m + 1, tau, (tau + 1) / (2 * (M + 1)) + sg * z),
            qpow(-1 / (16 * (m + 1)), tau) * e(-sg * z / 4) * _thm(Fraction(sg, 2), m + 1, tau, z))


def _s1(m, tau, z, zp, sg):
    M = _f(m)
    return (_thm(0, 2 * m + 1, tau, 2 * M * (z - tau) / (2 * M + 1)),
            qpow(-m * m / (2 * m + 1), tau) * e(2 * M * M * z / (2 * M + 1))
            * _thm(-2 * m, 2 * m + 1, tau, 2 * M * z / (2 * M + 1)))


def _s2(m, tau, z, zp, sg):
    M = _f(m)
    return (_thm(0, 2 * m + 1, tau, (z - tau) / (2 * M + 1) + zp + tau),
            qpow(-m * m / (2 * m + 1), tau) * e(-M * (z / (2 * M + 1) + zp))
            * _thm(2 * m, 2 * m + 1, tau, z / (2 * M + 1) + zp))


def _s3(m, tau, z, zp, sg):
    # the printed q-power -m^2/(2m+1) is corrected to -(m+1)^2/(2m+1)
    M = _f(m)
    return (_thm(0, 2 * m + 1, tau, (z - tau) / (2 * M + 1) - zp - tau),
            -qpow(-(m + 1) ** 2 / (2 * m + 1), tau) * e((M + 1) * (z / (2 * M + 1) - zp))
            * _thm(2 * m, 2 * m + 1, tau, z / (2 * M + 1) - zp))


def _p1(m, tau, z, zp, sg):
    M = _f(m)
    return (_thm(-m, m + 1, tau, M * (tau - 1) / (2 * (M + 1))),
            qpow(-m * m / (16 * (m + 1)), tau) * e(_f(m * m / (4 * (m + 1)))) * _th(m / 2, m + 1, tau, 0))


def _p2(m, tau, z, zp, sg):
    M = _f(m)
    return (_thm(-m, m + 1, tau, M * tau / (2 * (M + 1))),
            qpow(-m * m / (16 * (m + 1)), tau) * _thm(m / 2, m + 1, tau, 0))


def _p3(m, tau, z, zp, sg):
    M = _f(m)
    return (_thm(m, m + 1, tau, (tau - 1) / (2 * (M + 1)) + sg * z),
            qpow(-1 / (16 * (m + 1)), tau) * e(_f(-m / (4 * (m + 1)))) * e(-sg * z / 4)
            * _th(sg * (m + _HALF), m + 1, tau, z))


def _p4(m, tau, z, zp, sg):
    M = _f(m)
    return (_thm(m, m + 1, tau, tau / (2 * (M + 1)) + sg * z),
            qpow(-1 / (16 * (m + 1)), tau) * e(-sg * z / 4) * _thm(sg * (m + _HALF), m + 1, tau, z))


SPECIAL_FORMS: dict[str, SpecialForm] = {f.form_id: f for f in [
    SpecialForm("THETA_SPECIAL_1A", "none", True, _b1a,
                "vartheta_10(2tau, z +- tau/2) as q^{-1/16} e(-+z/4) theta_{-+1/2,1}(tau,z)"),
    SpecialForm("THETA_SPECIAL_1B", "none", True, _b1b,
                "vartheta_11(2tau, z +- tau/2) as -+i q^{-1/16} e(-+z/4) theta^(-)_{-+1/2,1}(tau,z)"),
    SpecialForm("THETA_SPECIAL_2A", "m in N", False, _b2a,
                "theta_{0,m+1} at -1/2 + m tau/2(m+1) via theta_{-m/2,m+1}(tau,1/2)"),
    SpecialForm("THETA_SPECIAL_2B", "m in N", False, _b2b,
                "theta_{0,m+1} at tau/2 - (tau+1)/2(m+1) via theta^(-)_{m/2,m+1}(tau,0)"),
    SpecialForm("THETA_SPECIAL_3A", "m in N", True, _b3a,
                "theta_{0,m+1} at tau/2(m+1) +- z via theta_{+-1/2,m+1}(tau,z)"),
    SpecialForm("THETA_SPECIAL_3B", "m in N", True, _b3b,
                "theta_{0,m+1} at (tau+1)/2(m+1) +- z via theta^(-)_{+-1/2,m+1}(tau,z)"),
    SpecialForm("THETA_MINUS_SHIFT_1", "m in 1/2 N_odd", False, _s1,
                "theta^(-)_{0,2m+1}(tau, 2m(z-tau)/(2m+1)) via theta^(-)_{-2m,2m+1}"),
    SpecialForm("THETA_MINUS_SHIFT_2", "m in 1/2 N_odd", False, _s2,
                "theta^(-)_{0,2m+1}(tau, (z-tau)/(2m+1) + z' + tau) via theta^(-)_{2m,2m+1}"),
    SpecialForm("THETA_MINUS_SHIFT_3", "m in 1/2 N_odd", False, _s3,
                "theta^(-)_{0,2m+1}(tau, (z-tau)/(2m+1) - z' - tau) via theta^(-)_{2m,2m+1}; "
                "q-power corrected to -(m+1)^2/(2m+1)"),
    SpecialForm("THETA_MINUS_SPECIAL_1", "m in N_odd", False, _p1,
                "theta^(-)_{-m,m+1}(tau, m(tau-1)/2(m+1)) via theta_{m/2,m+1}(tau,0)"),
    SpecialForm("THETA_MINUS_SPECIAL_2", "m in N_odd", False, _p2,
                "theta^(-)_{-m,m+1}(tau, m tau/2(m+1)) via theta^(-)_{m/2,m+1}(tau,0)"),
    SpecialForm("THETA_MINUS_SPECIAL_3", "m in N_odd", True, _p3,
                "theta^(-)_{m,m+1}(tau, (tau-1)/2(m+1) +- z) via theta_{+-(m+1/2),m+1}(tau,z)"),
    SpecialForm("THETA_MINUS_SPECIAL_4", "m in N_odd", True, _p4,
                "theta^(-)_{m,m+1}(tau, tau/2(m+1) +- z) via theta^(-)_{+-(m+1/2),m+1}(tau,z)"),
]}


def check_form_scope(form_id: str, m) -> SpecialForm:
    form = SPECIAL_FORMS.get(form_id)
    if form is None:
        raise UsageError(f"unknown special form {form_id!r}")
    mm = None if m is None else as_fraction(m)
    if form.scope != "none" and not _SCOPES[form.scope](mm):
        raise ScopeError(f"{form_id} requires {form.scope}, got m = {m}")
    return form


def theta_special_forms(form_id: str, params: Optional[dict], tau, z=0, zp=0) -> float:
    r"""
    Residual `|L-R|/\max(1,|L|,|R|)` of one specialization formula.

    INPUT:

    - ``form_id`` -- a key of :data:`SPECIAL_FORMS`
    - ``params`` -- ``{"m": ..., "sign": +1 or -1}``; ``sign`` only for
      the signed forms (default: both signs, worst residual returned)
    - ``tau``, ``z``, ``zp`` -- the point (``zp`` is the second elliptic
      variable of the shift laws)

    EXAMPLES::

        >>> theta_special_forms("THETA_SPECIAL_2B", {"m": 3}, 0.8j) < 1e-10
        True
        >>> theta_special_forms("THETA_MINUS_SPECIAL_1", {"m": 2}, 0.8j)
        Traceback (most recent call last):
        ...
        mocktheta.errors.ScopeError: THETA_MINUS_SPECIAL_1 requires m in N_odd, got m = 2
    """
    params = dict(params or {})
    m = params.get("m")
    form = check_form_scope(form_id, m)
    mm = as_fraction(m) if m is not None else Fraction(1)
    tau, z, zp = to_mpc(tau), to_mpc(z), to_mpc(zp)
    signs = [params["sign"]] if (form.signed and "sign" in params) else ([1, -1] if form.signed else [1])
    worst = 0.0
    for sg in signs:
        if sg not in (1, -1):
            raise UsageError("sign must be +1 or -1")
        lhs, rhs = form.sides(mm, tau, z, zp, sg)
        worst = max(worst, residual(lhs, rhs))
    return worst
