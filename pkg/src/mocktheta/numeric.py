r"""
Shared numeric backend.

All numeric evaluation runs in a private mpmath context (30 significant
digits by default) so that cancellation between large Appell-Lerch terms
cannot eat into the 1e-8 residual budget, and so the global
``mpmath.mp`` precision of the caller is left alone.

Sums over a lattice index `j` are cut by a float scan of the
log-magnitude of the summand: every term whose modulus is below
`10^{-(\text{dps}+8)}` times the largest one is dropped.  Because the
log-magnitudes are concave in `j` (quadratic, possibly minus a convex
piecewise-linear correction from a denominator), the kept indices form
an interval and the dropped tail is bounded by a convergent geometric
series.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import mpmath

from .errors import DomainError, UsageError

__all__ = [
    "ctx",
    "set_precision",
    "to_mpc",
    "mpq",
    "e",
    "qpow",
    "index_interval",
    "residual",
    "quad_sum",
    "require_upper_half",
    "memoized",
    "outer_sum",
]

ctx = mpmath.MPContext()
ctx.dps = 30

#: natural-log window below the peak term that is kept in every sum
_DROP = [math.log(10.0) * (ctx.dps + 8)]


_CACHES: list = []


def memoized(maxsize: int = 100_000):
    """``lru_cache`` whose entries are dropped when the precision changes."""
    def wrap(fn):
        cached = lru_cache(maxsize=maxsize)(fn)
        _CACHES.append(cached)
        return cached
    return wrap


def set_precision(dps: int) -> None:
    """Change the working precision (significant decimal digits)."""
    if dps < 15:
        raise UsageError("precision below double is not supported")
    ctx.dps = dps
    _DROP[0] = math.log(10.0) * (dps + 8)
    for c in _CACHES:
        c.cache_clear()


def drop_window() -> float:
    return _DROP[0]


def mpq(x) -> "mpmath.mpf":
    """Exact rational (or int) as an mpf of the private context."""
    if isinstance(x, Fraction):
        return ctx.mpf(x.numerator) / x.denominator
    return ctx.mpf(x)


def to_mpc(x):
    r"""
    Coerce a Python number, string or mp value to an ``mpc``.

    Strings accept ``"0.2+0.9i"`` / ``"0.9i"`` / ``"1/2"`` forms.

    EXAMPLES::

        >>> from mocktheta.numeric import to_mpc
        >>> complex(to_mpc("0.1+0.9i"))
        (0.1+0.9j)
        >>> complex(to_mpc("1/2"))
        (0.5+0j)
    """
    if isinstance(x, str):
        s = x.strip().replace(" ", "").replace("I", "i").replace("j", "i")
        try:
            if "i" not in s:
                return ctx.mpc(mpq(Fraction(s)) if "/" in s else ctx.mpf(s))
            return ctx.mpc(complex(s.replace("i", "j")))
        except (ValueError, ZeroDivisionError) as err:
            raise UsageError(f"not a complex number: {x!r}") from err
    if isinstance(x, Fraction):
        return ctx.mpc(mpq(x))
    if isinstance(x, complex):
        return ctx.mpc(x.real, x.imag)
    return ctx.mpc(x)


def e(x):
    r"""`e^{2\pi i x}` in the private context."""
    return ctx.expjpi(2 * x)


def qpow(a, tau):
    r"""`q^a = e^{2\pi i a\tau}` (never a principal-branch power)."""
    return ctx.expjpi(2 * mpq(a) * tau) if isinstance(a, Fraction) else ctx.expjpi(2 * a * tau)


def require_upper_half(tau) -> None:
    if ctx.im(tau) <= 0:
        raise DomainError(f"Im(tau) must be positive, got tau = {complex(tau)}")


def index_interval(logmag: Callable[[int], float], center: float) -> tuple[int, int]:
    r"""
    Smallest integer interval outside which the summand is negligible.

    INPUT:

    - ``logmag`` -- concave function `j \mapsto \log|a_j|` (float)
    - ``center`` -- a guess for the maximizer

    OUTPUT: ``(lo, hi)`` inclusive.

    EXAMPLES::

        >>> from mocktheta.numeric import index_interval
        >>> lo, hi = index_interval(lambda j: -2.0 * j * j, 0.0)
        >>> lo == -hi and 6 <= hi <= 8
        True
    """
    drop = _DROP[0]
    c = int(math.floor(center)) if math.isfinite(center) else 0
    peak = logmag(c)
    # walk right
    prev = peak
    j = c
    while True:
        j += 1
        v = logmag(j)
        if v > peak:
            peak = v
        if v < peak - drop and v <= prev:
            break
        prev = v
        if j - c > 100000:
            raise UsageError("summation range did not close; is the sum convergent?")
    hi = j - 1
    prev = logmag(c)
    j = c
    while True:
        j -= 1
        v = logmag(j)
        if v > peak:
            peak = v
        if v < peak - drop and v <= prev:
            break
        prev = v
        if c - j > 100000:
            raise UsageError("summation range did not close; is the sum convergent?")
    lo = j + 1
    return lo, hi


def quad_sum(a, n0, lin, tau, alt: bool = False):
    r"""
    `\sum_{j\in\ZZ} (\pm1)^j e^{2\pi i (a n^2 \tau + n\,\ell)}` with
    `n = j + n_0`.

    This single kernel evaluates `\theta_{k,m}` (`a = m`,
    `n_0 = k/2m`, `\ell = mz`), the Mumford thetas and `\eta`.

    INPUT:

    - ``a`` -- positive rational (coefficient of `n^2\tau`)
    - ``n0`` -- rational offset
    - ``lin`` -- complex `\ell`
    - ``tau`` -- point of the upper half plane
    - ``alt`` -- insert `(-1)^j`

    The sum is evaluated with three exponentials and a two-term
    multiplicative recurrence.
    """
    require_upper_half(tau)
    af = float(a)
    n0f = float(n0)
    ti = float(ctx.im(tau))
    li = float(ctx.im(lin))
    two_pi = 2 * math.pi

    def logmag(j):
        n = j + n0f
        return -two_pi * (af * n * n * ti + n * li)

    lo, hi = index_interval(logmag, -n0f - li / (2 * af * ti))
    A = mpq(a) if isinstance(a, Fraction) else ctx.mpf(a)
    N0 = mpq(n0) if isinstance(n0, Fraction) else ctx.mpf(n0)
    n = lo + N0
    term = e(A * n * n * tau + n * lin)
    ratio = e(A * (2 * n + 1) * tau + lin)
    step = e(2 * A * tau)
    total = ctx.mpc(0)
    sign = -1 if (alt and lo % 2) else 1
    for _ in range(lo, hi + 1):
        total += term if sign > 0 else -term
        term *= ratio
        ratio *= step
        if alt:
            sign = -sign
    return total


def outer_sum(block: Callable[[int], object], j0: int = 1):
    r"""
    `\sum_{j \ge j_0}` ``block(j)`` for blocks that eventually decay
    like `|q|^{cj^2}`: stops after two consecutive blocks below
    `10^{-(\text{dps}+8)}` of the largest one (and at least three blocks).

    EXAMPLES::

        >>> from mocktheta.numeric import outer_sum, ctx
        >>> abs(outer_sum(lambda j: ctx.mpf(2) ** (-j * j)) - ctx.mpf("0.5644684136")) < 1e-10
        True
    """
    total = ctx.mpc(0)
    big = 0.0
    small = 0
    j = j0
    limit = math.exp(-_DROP[0])
    while True:
        v = block(j)
        total += v
        a = float(abs(v))
        big = max(big, a)
        small = small + 1 if a <= limit * max(big, 1e-300) else 0
        if small >= 2 and j >= j0 + 2:
            return total
        j += 1
        if j > j0 + 10000:
            raise UsageError("outer summation did not converge")


def residual(lhs, rhs) -> float:
    r"""`|L - R| / \max(1, |L|, |R|)` as a float."""
    diff = abs(lhs - rhs)
    return float(diff / max(1, abs(lhs), abs(rhs)))
