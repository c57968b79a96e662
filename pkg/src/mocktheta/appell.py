r"""
The Appell-Lerch sums `\Phi^{[m,s]}`.

For `m \in \tfrac12\NN`, `s \in \tfrac12\ZZ`:

.. MATH::

    \Phi^{[m,s]}_1(\tau,z_1,z_2,t) = e^{-2\pi i m t}\sum_{j\in\ZZ}
        \frac{e^{2\pi i m j(z_1+z_2) + 2\pi i s z_1} q^{mj^2+sj}}{1-e^{2\pi i z_1}q^j},

    \Phi^{[m,s]}_2(\tau,z_1,z_2,t) = e^{-2\pi i m t}\sum_{j\in\ZZ}
        \frac{e^{-2\pi i m j(z_1+z_2) - 2\pi i s z_2} q^{mj^2+sj}}{1-e^{-2\pi i z_2}q^j},

and `\Phi^{[m,s]} = \Phi^{[m,s]}_1 - \Phi^{[m,s]}_2`.

This module evaluates them by direct summation, expands them formally
at affine arguments, evaluates the two closed forms
(:func:`phi_closed_half_odd`, :func:`phi_closed_odd_zero`), and builds
and runs the evaluation plan that reaches every `(m, s)` from those
closed forms by index shifts in `s` and index doubling in `m`
(:func:`phi_resolve`, :func:`phi_eval_plan`).

EXAMPLES::

    >>> from mocktheta.appell import PhiSpec, EvalPoint, phi_direct, phi_resolve, phi_eval_plan
    >>> pt = EvalPoint.of("0.8i", "0.19+0.02i", "0.05-0.01i")
    >>> spec = PhiSpec.of(2, 0)
    >>> plan = phi_resolve(spec.m, spec.s)
    >>> abs(phi_eval_plan(plan, pt) - phi_direct(spec, pt)) < 1e-20
    True
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .coefficients import as_fraction
from .errors import PoleError, PrefactorZeroError, ScopeError, UsageError
from .numeric import ctx, e, index_interval, memoized, mpq, outer_sum, qpow, require_upper_half, to_mpc
from .series import Affine, PuiseuxSeries, TermSink, TruncationBox, geom_terms, quadratic_index_range, tau_scale
from .thetas import ThetaIndex, dedekind_eta, mumford_vartheta, theta_km

__all__ = [
    "HalfInt",
    "PhiSpec",
    "EvalPoint",
    "phi_direct",
    "phi_component",
    "phi_formal",
    "phi_formal_terms",
    "phi_closed_half_odd",
    "phi_closed_odd_zero",
    "shift_correction",
    "eta_vartheta_block",
    "half_odd_triple_sum",
    "odd_zero_triple_sum",
    "PhiPlan",
    "phi_resolve",
    "phi_eval_plan",
    "PREFACTOR_REL_TOL",
]

_HALF = Fraction(1, 2)

#: closed forms refuse points where the divided-out theta prefactor is below this times its size
PREFACTOR_REL_TOL = 1e-6


# --------------------------------------------------------------------------
# index types
# --------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class HalfInt:
    r"""
    An element of `\tfrac12\ZZ`, stored as twice its value.

    EXAMPLES::

        >>> h = HalfInt.of("3/2")
        >>> h.value, h.is_half_odd(), h.is_half_nat_odd(), h.is_nat()
        (Fraction(3, 2), True, True, False)
        >>> HalfInt.of("1/3")
        Traceback (most recent call last):
        ...
        mocktheta.errors.UsageError: 1/3 is not a half-integer
    """

    twice: int

    @classmethod
    def of(cls, x) -> HalfInt:
        if isinstance(x, HalfInt):
            return x
        v = as_fraction(x)
        if (2 * v).denominator != 1:
            raise UsageError(f"{v} is not a half-integer")
        return cls(int(2 * v))

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice, 2)

    def is_int(self) -> bool:
        return self.twice % 2 == 0

    def is_half_odd(self) -> bool:
        r"""Member of `\tfrac12\ZZ_{odd}`."""
        return self.twice % 2 == 1

    def is_nat(self) -> bool:
        return self.is_int() and self.twice > 0

    def is_half_nat(self) -> bool:
        return self.twice > 0

    def is_half_nat_odd(self) -> bool:
        r"""Member of `\tfrac12\NN_{odd}` (positive half-odd)."""
        return self.is_half_odd() and self.twice > 0

    def __str__(self):
        return str(self.value)


_COMPONENTS = ("one", "two", "diff")


@dataclass(frozen=True)
class PhiSpec:
    r"""
    `(m, s, \text{component})` with component ``"one"``, ``"two"`` or
    ``"diff"`` (the difference `\Phi_1 - \Phi_2`).

    EXAMPLES::

        >>> PhiSpec.of("1/2", -1, "two")
        PhiSpec(m=HalfInt(twice=1), s=HalfInt(twice=-2), component='two')
        >>> PhiSpec.of(0, 0)
        Traceback (most recent call last):
        ...
        mocktheta.errors.UsageError: m must be positive, got 0
    """

    m: HalfInt
    s: HalfInt
    component: str = "diff"

    def __post_init__(self):
        if self.m.twice <= 0:
            raise UsageError(f"m must be positive, got {self.m}")
        if self.component not in _COMPONENTS:
            raise UsageError(f"component must be one of {_COMPONENTS}")

    @classmethod
    def of(cls, m, s, component: str = "diff") -> PhiSpec:
        return cls(HalfInt.of(m), HalfInt.of(s), component)


@dataclass(frozen=True)
class EvalPoint:
    r"""
    Numeric argument `(\tau, z_1, z_2, t)`, coordinates stored as ``mpc``.

    ``guard`` is the pole distance `\delta`: evaluations raise
    :class:`~mocktheta.errors.PoleError` if some summed denominator
    `1 - e^{2\pi i z_1}q^j` or `1 - e^{-2\pi i z_2}q^j` has modulus below it.

    EXAMPLES::

        >>> EvalPoint.of("-0.5i", 0, 0)
        Traceback (most recent call last):
        ...
        mocktheta.errors.DomainError: Im(tau) must be positive, got tau = -0.5j
    """

    tau: object
    z1: object
    z2: object
    t: object = 0
    guard: float = 1e-10

    def __post_init__(self):
        for name in ("tau", "z1", "z2", "t"):
            object.__setattr__(self, name, to_mpc(getattr(self, name)))
        require_upper_half(self.tau)

    @classmethod
    def of(cls, tau, z1, z2, t=0, guard: float = 1e-10) -> EvalPoint:
        return cls(tau, z1, z2, t, guard)

    def scaled(self, factor) -> EvalPoint:
        r"""`(c\tau, cz_1, cz_2, ct)`."""
        f = mpq(as_fraction(factor)) if not isinstance(factor, (int,)) else factor
        return EvalPoint(self.tau * f, self.z1 * f, self.z2 * f, self.t * f, self.guard)

    def as_complex(self) -> dict:
        return {k: [float(ctx.re(v)), float(ctx.im(v))] for k, v in
                (("tau", self.tau), ("z1", self.z1), ("z2", self.z2), ("t", self.t))}


def _point(p) -> EvalPoint:
    if isinstance(p, EvalPoint):
        return p
    return EvalPoint(*p)


# --------------------------------------------------------------------------
# direct summation
# --------------------------------------------------------------------------

def _appell_sum(m: Fraction, s: Fraction, tau, w, x, guard: float):
    r"""
    `\sum_j e^{2\pi i (m j w + s x)} q^{mj^2+sj} / (1 - e^{2\pi i x} q^j)`.

    Component one is ``w = z1+z2, x = z1``; component two is
    ``w = -(z1+z2), x = -z2``.
    """
    two_pi = 2 * math.pi
    ti = float(ctx.im(tau))
    wi = float(ctx.im(w))
    xi = float(ctx.im(x))
    mf, sf = float(m), float(s)

    def logmag(j):
        num = -two_pi * (mf * j * wi + sf * xi + (mf * j * j + sf * j) * ti)
        den = -two_pi * (xi + j * ti)
        return num - (den if den > 0 else 0.0)

    lo, hi = index_interval(logmag, -(mf * wi + sf * ti) / (2 * mf * ti))
    M, S = mpq(m), mpq(s)
    A = M * tau
    B = M * w + S * tau
    num = e(A * lo * lo + B * lo + S * x)
    ratio = e(A * (2 * lo + 1) + B)
    step = e(2 * A)
    X = e(x + lo * tau)
    q = e(tau)
    total = ctx.mpc(0)
    for _ in range(lo, hi + 1):
        den = 1 - X
        if abs(den) < guard:
            raise PoleError("evaluation point is within the pole guard of a denominator")
        total += num / den
        num *= ratio
        ratio *= step
        X *= q
    return total


@memoized(200_000)
def _component_cached(m: Fraction, s: Fraction, which: int, tau, z1, z2, guard: float):
    if which == 1:
        return _appell_sum(m, s, tau, z1 + z2, z1, guard)
    return _appell_sum(m, s, tau, -(z1 + z2), -z2, guard)


def phi_component(m, s, which: int, tau, z1, z2, t=0, guard: float = 1e-10):
    r"""
    `\Phi^{[m,s]}_{which}(\tau,z_1,z_2,t)` by direct summation (memoized
    at `t = 0`; the `t`-prefactor is applied afterwards).
    """
    m, s = as_fraction(m), as_fraction(s)
    tau, z1, z2, t = to_mpc(tau), to_mpc(z1), to_mpc(z2), to_mpc(t)
    require_upper_half(tau)
    v = _component_cached(m, s, which, tau, z1, z2, guard)
    if t != 0:
        v = v * e(-mpq(m) * t)
    return v


def phi_direct(spec: PhiSpec, point) -> "ctx.mpc":
    r"""
    `\Phi^{[m,s]}_1`, `\Phi^{[m,s]}_2` or `\Phi^{[m,s]}` from the defining
    sums; terms below `10^{-38}` of the largest are dropped.

    INPUT:

    - ``spec`` -- :class:`PhiSpec`
    - ``point`` -- :class:`EvalPoint` or a tuple ``(tau, z1, z2[, t])``

    EXAMPLES::

        >>> pt = EvalPoint.of("0.85i", "0.21+0.03i", "0.11-0.04i", "0.3+0.1i")
        >>> p0 = EvalPoint.of("0.85i", "0.21+0.03i", "0.11-0.04i")
        >>> from mocktheta.numeric import e, mpq
        >>> spec = PhiSpec.of(1, "1/2")
        >>> abs(phi_direct(spec, pt) - e(-pt.t) * phi_direct(spec, p0)) < 1e-25
        True
    """
    p = _point(point)
    m, s = spec.m.value, spec.s.value
    if spec.component == "one":
        return phi_component(m, s, 1, p.tau, p.z1, p.z2, p.t, p.guard)
    if spec.component == "two":
        return phi_component(m, s, 2, p.tau, p.z1, p.z2, p.t, p.guard)
    return (phi_component(m, s, 1, p.tau, p.z1, p.z2, p.t, p.guard)
            - phi_component(m, s, 2, p.tau, p.z1, p.z2, p.t, p.guard))


# --------------------------------------------------------------------------
# formal expansion
# --------------------------------------------------------------------------

def phi_formal_terms(sink: TermSink, spec: PhiSpec, tau: Affine = Affine.tau(),
                     z1: Affine = Affine.z1(), z2: Affine = Affine.z2(),
                     t: Affine = Affine(), coeff=1) -> None:
    r"""
    Write ``coeff`` times the expansion of `\Phi^{[m,s]}_i(\alpha\tau, Z_1, Z_2, T)`
    into ``sink``, term by term in `j` with each denominator expanded
    according to the region.
    """
    m, s = spec.m.value, spec.s.value
    alpha = tau_scale(tau)
    parts = []
    if spec.component in ("one", "diff"):
        parts.append((1, z1 + z2, z1, z1))
    if spec.component in ("two", "diff"):
        parts.append((-1 if spec.component == "diff" else 1, -(z1 + z2), -z2, -z2))
    bound = sink.box.q_max - sink.pre.q
    for sign, W, Xs, U in parts:
        # prefactor exponent: -mT + m j W + s Xs + (m j^2 + s j) alpha tau
        a = alpha * m
        b = alpha * s + m * W.tauc
        c = s * Xs.tauc - m * t.tauc
        for j in quadratic_index_range(a, b, c, bound):
            P = t * (-m) + W * (m * j) + Xs * s + Affine.tau() * (alpha * (m * j * j + s * j))
            pm, ptw = P.expo()
            um, utw = (U + Affine.tau() * (alpha * j)).expo()
            sub = sink.scaled(pm, ptw, sign)
            geom_terms(sub, um, utw, coeff)


@lru_cache(maxsize=4096)
def _phi_formal_cached(spec: PhiSpec, box: TruncationBox, tau: Affine, z1: Affine, z2: Affine,
                       t: Affine) -> PuiseuxSeries:
    sink = TermSink(box)
    phi_formal_terms(sink, spec, tau, z1, z2, t)
    return sink.series()


def phi_formal(spec: PhiSpec, box: TruncationBox, tau: Affine = Affine.tau(),
               z1: Affine = Affine.z1(), z2: Affine = Affine.z2(), t: Affine = Affine()) -> PuiseuxSeries:
    r"""
    Exact expansion of `\Phi^{[m,s]}_i` inside ``box`` at affine
    arguments (default `(\tau, z_1, z_2, 0)`).

    Only `j` with `\alpha(mj^2+sj) + (\text{argument shifts}) < q_{max}`
    contribute; each `1/(1-u)` is expanded by the region rule.

    EXAMPLES::

        >>> box = TruncationBox(q_max=1, x1_window=(-2, 2), x2_window=(-2, 2))
        >>> s = phi_formal(PhiSpec.of(1, 0, "one"), box)
        >>> sorted(str(m) for m in s.terms)
        ['1', 'x1', 'x1^2']
        >>> z = phi_formal(PhiSpec.of(2, 0), box) - phi_formal(PhiSpec.of(2, 1), box)
        >>> z.is_zero()
        True
    """
    return _phi_formal_cached(spec, box, tau, z1, z2, t)


# --------------------------------------------------------------------------
# theta corrections for shifts in s
# --------------------------------------------------------------------------

def shift_correction(m, s, j: int, tau, z1, z2, component: str = "diff", t=0):
    r"""
    `\Phi^{[m,s+j]}_i - \Phi^{[m,s]}_i` as a finite theta sum (index-shift
    law in `s`).

    For `j \ge 0` it is `-\sum_{k=0}^{j-1} c_k \Theta_k`, for `j < 0`
    `+\sum_{k=j}^{-1} c_k\Theta_k`, with
    `c_k = e^{\pi i (s+k)(z_1-z_2)} q^{-(s+k)^2/4m}` and `\Theta_k`
    equal to `\theta_{s+k,m}`, `\theta_{-(s+k),m}` or their difference
    at `(\tau, z_1+z_2)` for component one, two, diff.
    """
    m, s = as_fraction(m), as_fraction(s)
    tau, z1, z2 = to_mpc(tau), to_mpc(z1), to_mpc(z2)
    if j >= 0:
        ks, sign = range(0, j), -1
    else:
        ks, sign = range(j, 0), 1
    total = ctx.mpc(0)
    w = z1 + z2
    for k in ks:
        a = s + k
        c = e(mpq(a) * (z1 - z2) / 2) * qpow(-a * a / (4 * m), tau)
        if component == "one":
            th = theta_km(ThetaIndex(a, m), tau, w)
        elif component == "two":
            th = theta_km(ThetaIndex(-a, m), tau, w)
        else:
            th = theta_km(ThetaIndex(a, m), tau, w) - theta_km(ThetaIndex(-a, m), tau, w)
        total += c * th
    total = sign * total
    t = to_mpc(t)
    if t != 0:
        total *= e(-mpq(m) * t)
    return total


# --------------------------------------------------------------------------
# closed forms
# --------------------------------------------------------------------------

def _guard_prefactor(pre, scale, what: str) -> None:
    if abs(pre) < PREFACTOR_REL_TOL * max(1.0, float(scale)):
        raise PrefactorZeroError(f"{what} prefactor is (nearly) zero at this point")


def _theta_scale(m: Fraction, tau, z) -> float:
    # modulus of the dominant term of theta_{*,m}(tau, z): a cheap size estimate
    ti = float(ctx.im(tau))
    zi = float(ctx.im(z))
    n = -zi / (2 * ti)
    return math.exp(-2 * math.pi * float(m) * (n * zi + n * n * ti))


def _cosh_pair(a, x):
    # e^{pi i a x} + e^{-pi i a x}
    v = e(a * x / 2)
    return v + 1 / v


def eta_vartheta_block(tau, z1, z2, num1, num2):
    r"""`-i\eta(2\tau)^3 [num1/\vartheta_{11}(2\tau,2z_1) + num2/\vartheta_{11}(2\tau,2z_2)]`."""
    t2 = 2 * tau
    v1 = mumford_vartheta((1, 1), t2, 2 * z1)
    v2 = mumford_vartheta((1, 1), t2, 2 * z2)
    if abs(v1) < 1e-25 or abs(v2) < 1e-25:
        raise PoleError("vartheta_11 vanishes at this point")
    return -ctx.j * dedekind_eta(t2) ** 3 * (num1 / v1 + num2 / v2)


def half_odd_triple_sum(m: Fraction, tau, z1, z2):
    r"""
    The double-lattice correction shared by the half-odd closed forms:
    `\sum_{j\ge1}(-1)^j [\sum_{r=1}^{j} - \sum_{r=0}^{j-1}]\sum_{k\ odd}`
    of `q^{(2m+1)j^2-(4m(j-r)\pm k)^2/8m}` times a cosine pair times
    `[\theta_{k,2m}-\theta_{-k,2m}](\tau,z_1+z_2)`.
    """
    ks = [k for k in range(1, int(2 * m)) if k % 2 == 1]
    if not ks:
        return ctx.mpc(0)
    w = z1 + z2
    d = z1 - z2
    th = {k: theta_km(ThetaIndex(k, 2 * m), tau, w) - theta_km(ThetaIndex(-k, 2 * m), tau, w) for k in ks}
    M = mpq(m)

    def block(j):
        sgn = -1 if j % 2 else 1
        tot = ctx.mpc(0)
        for k in ks:
            part = ctx.mpc(0)
            for r in range(1, j + 1):
                ex = (2 * m + 1) * j * j - Fraction((4 * m * (j - r) + k) ** 2) / (8 * m)
                part += qpow(ex, tau) * _cosh_pair(4 * M * r - k, d)
            for r in range(0, j):
                ex = (2 * m + 1) * j * j - Fraction((4 * m * (j - r) - k) ** 2) / (8 * m)
                part -= qpow(ex, tau) * _cosh_pair(4 * M * r + k, d)
            tot += part * th[k]
        return sgn * tot

    return outer_sum(block)


def phi_closed_half_odd(m, s, point, *, alternating: bool = False):
    r"""
    `\Phi^{[m,s]}(2\tau, 2z_1, 2z_2, 0)` for `m\in\tfrac12\NN`, `s\in\tfrac12\NN_{odd}`
    from its closed form.

    With `P = \theta_{0,2m+1}(\tau, \frac{-1/2 + 2m(z_1-z_2)}{2m+1})`:

    .. MATH::

        P\,\Phi^{[m,\frac12]}(2\tau,2z_1,2z_2,0) = -i\eta(2\tau)^3\Big\{
        \frac{\theta_{0,2m+1}(\tau, \frac{1/2+z_1-z_2}{2m+1}+z_1+z_2)}{\vartheta_{11}(2\tau,2z_1)}
        + \frac{\theta_{0,2m+1}(\tau, \frac{1/2+z_1-z_2}{2m+1}-z_1-z_2)}{\vartheta_{11}(2\tau,2z_2)}\Big\}
        + T_m(\tau, z_1, z_2)

    with `T_m` from :func:`half_odd_triple_sum`; larger `s` subtract
    `\sum_{k=0}^{s-3/2} e^{\pi i(1+2k)(z_1-z_2)} q^{-(1+2k)^2/8m}
    [\theta_{k+1/2,m}-\theta_{-(k+1/2),m}](2\tau, 2z_1+2z_2)`.
    With ``alternating=True`` the variant built on `\theta^{(-)}_{0,2m+1}`
    is used (arguments without the `\pm 1/2` shifts).

    INPUT:

    - ``m``, ``s`` -- half-integers (``HalfInt``, Fraction or string)
    - ``point`` -- :class:`EvalPoint` or ``(tau, z1, z2)``; `t` is ignored

    EXAMPLES::

        >>> pt = EvalPoint.of("0.45i", "0.115", "0.035")
        >>> v = phi_closed_half_odd(1, "1/2", pt)
        >>> w = phi_direct(PhiSpec.of(1, "1/2"), pt.scaled(2))
        >>> abs(v - w) < 1e-20
        True
        >>> phi_closed_half_odd(1, 2, pt)
        Traceback (most recent call last):
        ...
        mocktheta.errors.ScopeError: s must be a positive half-odd integer, got 2
    """
    mh, sh = HalfInt.of(m), HalfInt.of(s)
    if not mh.is_half_nat():
        raise ScopeError(f"m must be a positive half-integer, got {mh}")
    if not sh.is_half_nat_odd():
        raise ScopeError(f"s must be a positive half-odd integer, got {sh}")
    m, s = mh.value, sh.value
    p = _point(point)
    tau, z1, z2 = p.tau, p.z1, p.z2
    M = mpq(m)
    N = 2 * m + 1
    NM = mpq(N)
    d = z1 - z2
    w = z1 + z2
    if alternating:
        parg = 2 * M * d / NM
        pre = theta_km(ThetaIndex(0, N, True), tau, parg)
        base = d / NM
        num1 = theta_km(ThetaIndex(0, N, True), tau, base + w)
        num2 = theta_km(ThetaIndex(0, N, True), tau, base - w)
    else:
        half = mpq(_HALF)
        parg = (-half + 2 * M * d) / NM
        pre = theta_km(ThetaIndex(0, N), tau, parg)
        base = (half + d) / NM
        num1 = theta_km(ThetaIndex(0, N), tau, base + w)
        num2 = theta_km(ThetaIndex(0, N), tau, base - w)
    _guard_prefactor(pre, _theta_scale(N, tau, parg), "theta_{0,2m+1}")
    rhs = eta_vartheta_block(tau, z1, z2, num1, num2) + half_odd_triple_sum(m, tau, z1, z2)
    val = rhs / pre
    kmax = s - Fraction(3, 2)
    if kmax >= 0:
        t2, w2 = 2 * tau, 2 * w
        for k in range(0, int(kmax) + 1):
            a = k + _HALF
            val -= (e(mpq(1 + 2 * k) * d / 2) * qpow(-Fraction((1 + 2 * k) ** 2) / (8 * m), tau)
                    * (theta_km(ThetaIndex(a, m), t2, w2) - theta_km(ThetaIndex(-a, m), t2, w2)))
    return val


def odd_zero_triple_sum(m: Fraction, tau, z1, z2):
    r"""
    `-cA + cB` of the closed form for `\Phi^{[m,0]}`, `m\in\tfrac12\NN_{odd}`,
    `c = q^{-m/2(2m+1)} e^{2\pi i m(z_1-z_2)/(2m+1)}`, `k` even.
    """
    ks = [k for k in range(0, int(2 * m)) if k % 2 == 0 and k > 0]
    if not ks:
        return ctx.mpc(0)
    w = z1 + z2
    d = z1 - z2
    th = {k: theta_km(ThetaIndex(k, 2 * m), tau, w) - theta_km(ThetaIndex(-k, 2 * m), tau, w) for k in ks}
    N = 2 * m + 1
    c = qpow(-m / (2 * N), tau) * e(mpq(m) * d / mpq(N))

    def pair(a):
        # e^{pi i a d} q^{-a/2} + e^{-pi i a d} q^{a/2}
        return e(mpq(a) * d / 2) * qpow(-a / 2, tau) + e(-mpq(a) * d / 2) * qpow(a / 2, tau)

    def block(j):
        sgn = -1 if j % 2 else 1
        tot = ctx.mpc(0)
        for k in ks:
            part = ctx.mpc(0)
            for r in range(1, j + 1):
                a = 4 * m * r - 2 * m + k
                ex = N * j * j - (4 * m * (j - r) + 2 * m - k) ** 2 / (8 * m)
                part -= qpow(ex, tau) * pair(a)
            for r in range(0, j):
                a = 4 * m * r + 2 * m - k
                ex = N * j * j - (4 * m * (j - r) - 2 * m + k) ** 2 / (8 * m)
                part += qpow(ex, tau) * pair(a)
            tot += part * th[k]
        return sgn * tot

    return c * outer_sum(block)


def phi_closed_odd_zero(m, point):
    r"""
    `\Phi^{[m,0]}(2\tau, 2z_1, 2z_2, 0)` for `m \in \tfrac12\NN_{odd}`.

    With `P = \theta^{(-)}_{-2m,2m+1}(\tau, \frac{2m(z_1-z_2)}{2m+1})`:

    .. MATH::

        \Phi^{[m,0]}(2\tau,2z_1,2z_2,0) = P^{-1}\Big[-i\eta(2\tau)^3\Big\{
        \frac{\theta^{(-)}_{2m,2m+1}(\tau,\frac{z_1-z_2}{2m+1}+z_1+z_2)}{\vartheta_{11}(2\tau,2z_1)}
        + \frac{\theta^{(-)}_{2m,2m+1}(\tau,\frac{z_1-z_2}{2m+1}-z_1-z_2)}{\vartheta_{11}(2\tau,2z_2)}\Big\}
        - cA + cB\Big]
        + \sum_{k=1}^{m-1/2} e^{2\pi i k(z_1-z_2)} q^{-k^2/2m}
          [\theta_{k,m}-\theta_{-k,m}](2\tau, 2z_1+2z_2)

    EXAMPLES::

        >>> pt = EvalPoint.of("0.4+0.05i", "0.11+0.02i", "-0.07+0.03i")
        >>> v = phi_closed_odd_zero("3/2", pt)
        >>> abs(v - phi_direct(PhiSpec.of("3/2", 0), pt.scaled(2))) < 1e-20
        True
        >>> phi_closed_odd_zero(1, pt)
        Traceback (most recent call last):
        ...
        mocktheta.errors.ScopeError: m must be a positive half-odd integer, got 1
    """
    mh = HalfInt.of(m)
    if not mh.is_half_nat_odd():
        raise ScopeError(f"m must be a positive half-odd integer, got {mh}")
    m = mh.value
    p = _point(point)
    tau, z1, z2 = p.tau, p.z1, p.z2
    M = mpq(m)
    N = 2 * m + 1
    NM = mpq(N)
    d = z1 - z2
    w = z1 + z2
    parg = 2 * M * d / NM
    pre = theta_km(ThetaIndex(-2 * m, N, True), tau, parg)
    _guard_prefactor(pre, _theta_scale(N, tau, parg), "theta^(-)_{-2m,2m+1}")
    num1 = theta_km(ThetaIndex(2 * m, N, True), tau, d / NM + w)
    num2 = theta_km(ThetaIndex(2 * m, N, True), tau, d / NM - w)
    rhs = eta_vartheta_block(tau, z1, z2, num1, num2) + odd_zero_triple_sum(m, tau, z1, z2)
    val = rhs / pre
    t2, w2 = 2 * tau, 2 * w
    for k in range(1, int(m - _HALF) + 1):
        val += (e(k * d) * qpow(-Fraction(k * k) / (2 * m), tau)
                * (theta_km(ThetaIndex(k, m), t2, w2) - theta_km(ThetaIndex(-k, m), t2, w2)))
    return val


# --------------------------------------------------------------------------
# resolution plan
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PhiPlan:
    r"""
    Evaluation tree for `\Phi^{[m,s]}(\tau,z_1,z_2,t)`.

    ``kind`` is one of

    - ``"leaf_half_odd"`` -- closed form for `s \in \tfrac12\NN_{odd}` at
      `(\tau/2, z_1/2, z_2/2)`, times `e^{-2\pi i m t}`
    - ``"leaf_odd_zero"`` -- closed form for `s = 0`, `m\in\tfrac12\NN_{odd}`
    - ``"shift"`` -- child at `(m, s_0)` plus the theta correction for
      `s = s_0 + j`
    - ``"doubling"`` -- even `m`: children `(m/2, 0)` and `(m/2, 1/2)` at
      `(2\tau, 2z_1, 2z_2, 2t)`
    - ``"base_doubling"`` -- odd integer `m`, same split onto half-odd
      indices (the last step, not counted in :attr:`depth`)
    """

    kind: str
    m: HalfInt
    s: HalfInt
    children: tuple = ()
    shift: int = 0

    @property
    def depth(self) -> int:
        """Number of doublings of even `m` on the deepest path (the `p` of `m = 2^p m'`)."""
        own = 1 if self.kind == "doubling" else 0
        return own + max((c.depth for c in self.children), default=0)

    def node_count(self) -> int:
        return 1 + sum(c.node_count() for c in self.children)

    def leaves(self) -> list:
        if not self.children:
            return [self]
        out = []
        for c in self.children:
            out.extend(c.leaves())
        return out

    def describe(self, indent: int = 0) -> str:
        pad = "  " * indent
        head = f"{pad}{self.kind} m={self.m} s={self.s}" + (f" shift={self.shift}" if self.kind == "shift" else "")
        return "\n".join([head] + [c.describe(indent + 1) for c in self.children])

    def to_json(self) -> dict:
        d = {"kind": self.kind, "m": str(self.m), "s": str(self.s)}
        if self.kind == "shift":
            d["shift"] = self.shift
        if self.children:
            d["children"] = [c.to_json() for c in self.children]
        return d


@lru_cache(maxsize=None)
def _resolve(m: HalfInt, s: HalfInt) -> PhiPlan:
    if s.is_half_odd():
        s0 = HalfInt(1)
    else:
        s0 = HalfInt(0)
    j = (s.twice - s0.twice) // 2
    if j:
        return PhiPlan("shift", m, s, (_resolve(m, s0),), j)
    if s0.twice == 1:
        return PhiPlan("leaf_half_odd", m, s)
    if m.is_half_odd():
        return PhiPlan("leaf_odd_zero", m, s)
    half = HalfInt(m.twice // 2)
    kind = "doubling" if (m.twice // 2) % 2 == 0 else "base_doubling"
    return PhiPlan(kind, m, s, (_resolve(half, HalfInt(0)), _resolve(half, HalfInt(1))))


def phi_resolve(m, s) -> PhiPlan:
    r"""
    Plan reaching `\Phi^{[m,s]}` from the closed forms.

    Order: the `s`-shift to `s_0\in\{0, 1/2\}` first, then the parity
    dispatch (half-odd `s_0` or half-odd `m`: closed form), otherwise
    index doubling `\Phi^{[2m,0]}(\tau,\dots) = \Phi^{[m,0]}(2\tau,\dots) +
    \Phi^{[m,1/2]}(2\tau,\dots)`.

    EXAMPLES::

        >>> p = phi_resolve(2, 0)
        >>> p.kind, [(str(c.m), str(c.s)) for c in p.children], p.depth
        ('doubling', [('1', '0'), ('1', '1/2')], 1)
        >>> phi_resolve("3/2", "1/2").kind
        'leaf_half_odd'
        >>> phi_resolve(4, 0).depth
        2
        >>> phi_resolve(0, 1)
        Traceback (most recent call last):
        ...
        mocktheta.errors.UsageError: m must be positive, got 0
    """
    mh, sh = HalfInt.of(m), HalfInt.of(s)
    if mh.twice <= 0:
        raise UsageError(f"m must be positive, got {mh}")
    return _resolve(mh, sh)


def phi_eval_plan(plan: PhiPlan, point):
    r"""
    Evaluate a :class:`PhiPlan` at ``point`` (:class:`EvalPoint` or tuple).

    EXAMPLES::

        >>> pt = EvalPoint.of("0.9i", "0.23+0.01i", "0.07-0.02i")
        >>> v = phi_eval_plan(phi_resolve(1, "7/2"), pt)
        >>> abs(v - phi_direct(PhiSpec.of(1, "7/2"), pt)) < 1e-18
        True
    """
    p = _point(point)
    k = plan.kind
    m = plan.m.value
    if k in ("leaf_half_odd", "leaf_odd_zero"):
        half = EvalPoint(p.tau / 2, p.z1 / 2, p.z2 / 2, 0, p.guard)
        if k == "leaf_half_odd":
            v = phi_closed_half_odd(plan.m, plan.s, half)
        else:
            v = phi_closed_odd_zero(plan.m, half)
        if p.t != 0:
            v = v * e(-mpq(m) * p.t)
        return v
    if k == "shift":
        child = plan.children[0]
        return phi_eval_plan(child, p) + shift_correction(m, child.s.value, plan.shift, p.tau, p.z1, p.z2,
                                                          "diff", p.t)
    if k in ("doubling", "base_doubling"):
        dbl = EvalPoint(2 * p.tau, 2 * p.z1, 2 * p.z2, 2 * p.t, p.guard)
        return phi_eval_plan(plan.children[0], dbl) + phi_eval_plan(plan.children[1], dbl)
    raise UsageError(f"unknown plan node {k!r}")
