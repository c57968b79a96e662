r"""
Truncated formal Puiseux/Laurent series in `q, x_1, x_2`.

A monomial is `q^a x_1^b x_2^c` with rational exponents, where
`x_j = e^{2\pi i z_j}`.  A series is a finite map monomial -> CycloNum
together with the :class:`TruncationBox` it is exact in and the
expansion :class:`Region`.

Region
------

Appell-Lerch denominators `1 - u` are expanded in `u` or in `u^{-1}`
according to a fixed ordering of `|q|, |x_1|, |x_2|`.  The default
region `|q| < |x_2| \le |x_1| < 1` is realized as an ordering that is
infinitesimal in each step: the monomial `q^a x_1^b x_2^c` is *small*
(modulus below one) iff `(a, b+c, c)` is lexicographically positive.
So `q` is smaller than any power of the `x`'s, both `x`'s lie just
inside the unit circle, and `x_2/x_1` is small.  The monomial `1`
itself is neither; `1/(1-\zeta)` with `\zeta \ne 1` a root of unity is a
constant, and `\zeta = 1` is a pole.

Truncation
----------

A box keeps `a < q_{max}` (strict) and `b, c` in closed windows.
Every generator in this package enumerates exactly the terms of an
expansion that land inside the box, by solving the linear or quadratic
exponent constraints, so results are exact within the box.  Applying
a substitution to an already truncated series is only exact if the box
was large enough; functions that need exactness therefore generate
expansions directly under an affine change of arguments (see
:class:`Affine`).

EXAMPLES::

    >>> from fractions import Fraction as F
    >>> from mocktheta.series import Monomial, TruncationBox, series_geom_expand
    >>> box = TruncationBox(q_max=3, x1_window=(-3, 3), x2_window=(0, 0))
    >>> s = series_geom_expand(Monomial(F(0), F(1), F(0)), box)
    >>> sorted(str(m) for m in s.terms)
    ['1', 'x1', 'x1^2', 'x1^3']
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Optional, Sequence

from .coefficients import CycloNum, as_fraction, root_of_unity
from .errors import PoleError, UsageError, UnsupportedSubstitution

__all__ = [
    "Monomial",
    "TruncationBox",
    "Region",
    "DEFAULT_REGION",
    "PuiseuxSeries",
    "Affine",
    "TermSink",
    "series_add",
    "series_mul",
    "series_geom_expand",
    "series_substitute",
    "series_equal_up_to",
    "series_zero",
    "series_one",
    "product_within",
    "binomial_product",
    "Substitution",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)


class Monomial(NamedTuple):
    r"""`q^{q} x_1^{x1} x_2^{x2}` with :class:`Fraction` exponents."""

    q: Fraction
    x1: Fraction
    x2: Fraction

    @classmethod
    def of(cls, q=0, x1=0, x2=0) -> Monomial:
        return cls(as_fraction(q), as_fraction(x1), as_fraction(x2))

    def __mul__(self, other: Monomial) -> Monomial:  # type: ignore[override]
        return Monomial(self.q + other.q, self.x1 + other.x1, self.x2 + other.x2)

    def inverse(self) -> Monomial:
        return Monomial(-self.q, -self.x1, -self.x2)

    def power(self, n) -> Monomial:
        return Monomial(self.q * n, self.x1 * n, self.x2 * n)

    def is_one(self) -> bool:
        return not (self.q or self.x1 or self.x2)

    def __str__(self):
        parts = []
        for name, v in (("q", self.q), ("x1", self.x1), ("x2", self.x2)):
            if v == 1:
                parts.append(name)
            elif v:
                parts.append(f"{name}^{v}" if v.denominator == 1 and v > 0 else f"{name}^({v})")
        return "*".join(parts) or "1"


ONE_MONOMIAL = Monomial(_ZERO, _ZERO, _ZERO)

Window = tuple[Optional[Fraction], Optional[Fraction]]


def _window(w) -> Window:
    lo, hi = w
    lo = None if lo is None else as_fraction(lo)
    hi = None if hi is None else as_fraction(hi)
    if lo is not None and hi is not None and lo > hi:
        raise UsageError(f"empty window [{lo}, {hi}]")
    return lo, hi


@dataclass(frozen=True)
class TruncationBox:
    r"""
    Exponent box: `a < q_{max}`, `b \in` ``x1_window``, `c \in` ``x2_window``.

    Window ends are rationals; ``None`` marks a side without bound (used
    internally for working boxes where the region already bounds it).

    EXAMPLES::

        >>> b = TruncationBox()
        >>> b.q_max, b.x1_window
        (Fraction(10, 1), (Fraction(-12, 1), Fraction(12, 1)))
        >>> b.contains(Monomial.of(10, 0, 0))
        False
    """

    q_max: Fraction = Fraction(10)
    x1_window: Window = (Fraction(-12), Fraction(12))
    x2_window: Window = (Fraction(-12), Fraction(12))

    def __post_init__(self):
        object.__setattr__(self, "q_max", as_fraction(self.q_max))
        object.__setattr__(self, "x1_window", _window(self.x1_window))
        object.__setattr__(self, "x2_window", _window(self.x2_window))

    @classmethod
    def single(cls, q_max=10, y_window=(-12, 12)) -> TruncationBox:
        """Box for series in `q` and one variable `y` (stored in the `x_1` slot)."""
        return cls(q_max, y_window, (0, 0))

    def contains(self, m: Monomial) -> bool:
        if m.q >= self.q_max:
            return False
        lo, hi = self.x1_window
        if (lo is not None and m.x1 < lo) or (hi is not None and m.x1 > hi):
            return False
        lo, hi = self.x2_window
        if (lo is not None and m.x2 < lo) or (hi is not None and m.x2 > hi):
            return False
        return True

    def to_json(self) -> dict:
        def w(x):
            return [None if v is None else str(v) for v in x]

        return {"q_max": str(self.q_max), "x1": w(self.x1_window), "x2": w(self.x2_window)}


@dataclass(frozen=True)
class Region:
    r"""
    Expansion region.  Only the default ordering
    `|q| < |x_2| \le |x_1| < 1` (realized lexicographically, see the
    module docstring) is implemented; the tag travels with every series
    so that mixing series from different conventions is refused.
    """

    name: str = "|q|<|x2|<=|x1|<1"

    @staticmethod
    def key(m: Monomial) -> tuple[Fraction, Fraction, Fraction]:
        return (m.q, m.x1 + m.x2, m.x2)

    def is_small(self, m: Monomial) -> bool:
        return self.key(m) > (_ZERO, _ZERO, _ZERO)

    def sample_point(self, scale: float = 1.0):
        """A numeric point `(\\tau, z_1, z_2)` inside the region, as floats."""
        # |q| ~ 1e-4, |x1| ~ 0.25, |x2| slightly smaller
        return (0.03 + 1.45j * scale, 0.11 + 0.22j, -0.07 + 0.26j)


DEFAULT_REGION = Region()


class PuiseuxSeries:
    r"""
    Box-truncated formal series; immutable by convention.

    INPUT:

    - ``terms`` -- map :class:`Monomial` -> :class:`CycloNum`; zero
      coefficients and monomials outside ``box`` are dropped
    - ``box`` -- :class:`TruncationBox`
    - ``region`` -- :class:`Region`

    EXAMPLES::

        >>> box = TruncationBox.single(4, (-4, 4))
        >>> q = PuiseuxSeries.monomial(Monomial.of(1, 0, 0), box)
        >>> (q * q).terms
        {Monomial(q=Fraction(2, 1), x1=Fraction(0, 1), x2=Fraction(0, 1)): CycloNum(1, {0: 1})}
        >>> (q * q * q * q).is_zero()
        True
    """

    __slots__ = ("terms", "box", "region")

    def __init__(self, terms: Mapping[Monomial, CycloNum], box: TruncationBox,
                 region: Region = DEFAULT_REGION, *, trusted: bool = False):
        if trusted:
            self.terms = dict(terms)
        else:
            self.terms = {m: c for m, c in terms.items() if c and box.contains(m)}
        self.box = box
        self.region = region

    # -- constructors ----------------------------------------------------------

    @classmethod
    def monomial(cls, m: Monomial, box: TruncationBox, coeff=1,
                 region: Region = DEFAULT_REGION) -> PuiseuxSeries:
        c = coeff if isinstance(coeff, CycloNum) else CycloNum.rational(coeff)
        return cls({m: c}, box, region)

    # -- basic queries ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def coefficient(self, m: Monomial) -> CycloNum:
        return self.terms.get(m, CycloNum.zero())

    def sorted_terms(self) -> list[tuple[Monomial, CycloNum]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    def leading_q(self) -> Optional[Fraction]:
        """Smallest `q`-exponent present, or ``None`` for the zero series."""
        return min((m.q for m in self.terms), default=None)

    def _check(self, other: PuiseuxSeries) -> None:
        if other.box != self.box or other.region != self.region:
            raise UsageError("series live in different boxes or regions")

    # -- arithmetic -------------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return series_add(self, other)

    def __neg__(self):
        return PuiseuxSeries({m: -c for m, c in self.terms.items()}, self.box, self.region, trusted=True)

    def __sub__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return series_add(self, -other)

    def __mul__(self, other):
        if isinstance(other, PuiseuxSeries):
            return series_mul(self, other)
        if isinstance(other, (int, Fraction, CycloNum)):
            if not other:
                return PuiseuxSeries({}, self.box, self.region, trusted=True)
            return PuiseuxSeries({m: c * other for m, c in self.terms.items()}, self.box, self.region,
                                 trusted=True)
        return NotImplemented

    __rmul__ = __mul__

    def shift(self, m: Monomial, coeff=1) -> PuiseuxSeries:
        """Multiply by the monomial ``coeff * m`` and re-truncate."""
        return PuiseuxSeries({k * m: c * coeff for k, c in self.terms.items()}, self.box, self.region)

    def restrict(self, box: TruncationBox) -> PuiseuxSeries:
        """The same terms seen in a smaller box."""
        return PuiseuxSeries(self.terms, box, self.region)

    def __eq__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self.box == other.box and self.region == other.region and self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    # -- numeric bridge ------------------------------------------------------------

    def embed(self, tau, z1=0, z2=0):
        r"""
        Value of the truncated sum at `(\tau, z_1, z_2)`, as an ``mpc``.

        ``q^a`` is `e^{2\pi i a\tau}`, ``x_j^b`` is `e^{2\pi i b z_j}`.
        """
        from .numeric import ctx, e, mpq, to_mpc

        tau, z1, z2 = to_mpc(tau), to_mpc(z1), to_mpc(z2)
        total = ctx.mpc(0)
        for m, c in self.terms.items():
            total += c.embed_mp(ctx) * e(mpq(m.q) * tau + mpq(m.x1) * z1 + mpq(m.x2) * z2)
        return total

    # -- serialization -----------------------------------------------------------------

    def to_json(self) -> list[dict]:
        return [{"q": str(m.q), "x1": str(m.x1), "x2": str(m.x2), "coeff": c.to_json()}
                for m, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, data: Iterable[Mapping], box: TruncationBox,
                  region: Region = DEFAULT_REGION) -> PuiseuxSeries:
        terms = {}
        for d in data:
            m = Monomial.of(Fraction(d["q"]), Fraction(d["x1"]), Fraction(d["x2"]))
            terms[m] = CycloNum.from_json(d["coeff"])
        return cls(terms, box, region)

    def __repr__(self):
        if not self.terms:
            return "0"
        shown = self.sorted_terms()
        parts = [f"({c})*{m}" for m, c in shown[:8]]
        more = " + ..." if len(shown) > 8 else ""
        return " + ".join(parts) + more


def series_zero(box: TruncationBox, region: Region = DEFAULT_REGION) -> PuiseuxSeries:
    return PuiseuxSeries({}, box, region, trusted=True)


def series_one(box: TruncationBox, region: Region = DEFAULT_REGION) -> PuiseuxSeries:
    return PuiseuxSeries({ONE_MONOMIAL: CycloNum.one()}, box, region)


def series_add(a: PuiseuxSeries, b: PuiseuxSeries) -> PuiseuxSeries:
    r"""
    Coefficient-wise sum; cancelled terms disappear.

    EXAMPLES::

        >>> box = TruncationBox()
        >>> t = Monomial.of("1/2", 1, 0)
        >>> a = PuiseuxSeries.monomial(t, box)
        >>> series_add(a, -a).is_zero()
        True
    """
    a._check(b)
    out = dict(a.terms)
    for m, c in b.terms.items():
        v = out.get(m)
        if v is None:
            out[m] = c
        else:
            s = v + c
            if s:
                out[m] = s
            else:
                del out[m]
    return PuiseuxSeries(out, a.box, a.region, trusted=True)


def _mul_terms(at: Mapping[Monomial, CycloNum], bt: Mapping[Monomial, CycloNum],
               box: TruncationBox) -> dict[Monomial, CycloNum]:
    out: dict[Monomial, CycloNum] = {}
    qmax = box.q_max
    bs = sorted(bt.items(), key=lambda kv: kv[0].q)
    contains = box.contains
    for ma, ca in at.items():
        limit = qmax - ma.q
        for mb, cb in bs:
            if mb.q >= limit:
                break
            m = Monomial(ma.q + mb.q, ma.x1 + mb.x1, ma.x2 + mb.x2)
            if not contains(m):
                continue
            v = ca * cb
            prev = out.get(m)
            out[m] = v if prev is None else prev + v
    return {m: c for m, c in out.items() if c}


def series_mul(a: PuiseuxSeries, b: PuiseuxSeries) -> PuiseuxSeries:
    r"""
    Truncated product.  Exact for the coefficients it keeps whenever
    neither factor has terms below the box that could reach into it,
    which holds for series generated in this package when all
    `q`-exponents are nonnegative; otherwise use :func:`product_within`.

    EXAMPLES::

        >>> box = TruncationBox()
        >>> a = PuiseuxSeries.monomial(Monomial.of("1/2", 1, 0), box)
        >>> b = PuiseuxSeries.monomial(Monomial.of("1/2", -1, 0), box)
        >>> list((a * b).terms) == [Monomial.of(1, 0, 0)]
        True
    """
    a._check(b)
    return PuiseuxSeries(_mul_terms(a.terms, b.terms, a.box), a.box, a.region, trusted=True)


# --------------------------------------------------------------------------
# term generation
# --------------------------------------------------------------------------

class TermSink:
    r"""
    Accumulator for generated terms.

    Every term is ``coeff * prefactor * monomial``; the prefactor (a
    monomial and a rational twist `r`, standing for `e^{2\pi i r}`) is
    applied before the box test, so generators can enumerate terms of
    a bare sum while the sink places them correctly.
    """

    __slots__ = ("box", "terms", "pre", "twist", "coeff")

    def __init__(self, box: TruncationBox, pre: Monomial = ONE_MONOMIAL, twist: Fraction = _ZERO,
                 coeff: CycloNum | int | Fraction = 1, terms: Optional[dict] = None):
        self.box = box
        self.terms = {} if terms is None else terms
        self.pre = pre
        self.twist = twist
        self.coeff = coeff if isinstance(coeff, CycloNum) else CycloNum.rational(coeff)

    def scaled(self, pre: Monomial = ONE_MONOMIAL, twist=_ZERO, coeff=1) -> TermSink:
        """A sink writing into the same terms with an extra prefactor."""
        c = coeff if isinstance(coeff, CycloNum) else CycloNum.rational(coeff)
        return TermSink(self.box, self.pre * pre, self.twist + as_fraction(twist), self.coeff * c, self.terms)

    def shifted_box(self) -> TruncationBox:
        r"""The box seen by the bare sum (``box`` divided by the prefactor)."""
        p = self.pre
        b = self.box

        def w(win, s):
            lo, hi = win
            return (None if lo is None else lo - s, None if hi is None else hi - s)

        return TruncationBox(b.q_max - p.q, w(b.x1_window, p.x1), w(b.x2_window, p.x2))

    def add(self, m: Monomial, twist: Fraction, coeff: CycloNum | int | Fraction = 1) -> None:
        mm = Monomial(m.q + self.pre.q, m.x1 + self.pre.x1, m.x2 + self.pre.x2)
        if not self.box.contains(mm):
            return
        self.add_unchecked(mm, twist, coeff)

    def add_unchecked(self, mm: Monomial, twist: Fraction, coeff=1) -> None:
        r = twist + self.twist
        r = r - math.floor(r)
        c = self.coeff if not r else self.coeff * root_of_unity(r)
        if coeff != 1:
            c = c * coeff
        prev = self.terms.get(mm)
        if prev is None:
            self.terms[mm] = c
        else:
            s = prev + c
            if s:
                self.terms[mm] = s
            else:
                del self.terms[mm]

    def series(self, region: Region = DEFAULT_REGION) -> PuiseuxSeries:
        return PuiseuxSeries({m: c for m, c in self.terms.items() if c}, self.box, region, trusted=True)


def _linear_range(start: Monomial, step: Monomial, box: TruncationBox, n0: int) -> tuple[int, Optional[int]]:
    # integers n >= n0 with start + n*step in box; step is lex-positive
    lo, hi = n0, None

    def upper(v):
        nonlocal hi
        hi = v if hi is None else min(hi, v)

    def lower(v):
        nonlocal lo
        lo = max(lo, v)

    def constrain(s0, d, wlo, whi, strict_hi=False):
        # wlo <= s0 + n d <= whi  (or < whi when strict_hi)
        if d == 0:
            bad = (wlo is not None and s0 < wlo) or (whi is not None and (s0 >= whi if strict_hi else s0 > whi))
            if bad:
                upper(n0 - 1)
            return
        if whi is not None:
            bound = (whi - s0) / d
            if d > 0:
                upper(math.ceil(bound) - 1 if strict_hi else math.floor(bound))
            else:
                lower(math.floor(bound) + 1 if strict_hi else math.ceil(bound))
        elif d > 0 and not strict_hi:
            pass
        if wlo is not None:
            bound = (wlo - s0) / d
            if d > 0:
                lower(math.ceil(bound))
            else:
                upper(math.floor(bound))

    constrain(start.q, step.q, None, box.q_max, strict_hi=True)
    constrain(start.x1, step.x1, *box.x1_window)
    constrain(start.x2, step.x2, *box.x2_window)
    return lo, hi


def geom_terms(sink: TermSink, u: Monomial, u_twist: Fraction = _ZERO, coeff=1,
               region: Region = DEFAULT_REGION) -> None:
    r"""
    Write the region expansion of ``coeff / (1 - e^{2\pi i r} u)`` into
    ``sink`` (`r` = ``u_twist``), keeping exactly the terms inside the
    sink's box.

    Raises :class:`~mocktheta.errors.PoleError` when `u = 1` exactly.
    """
    u_twist = as_fraction(u_twist)
    if u.is_one():
        r = u_twist - math.floor(u_twist)
        if not r:
            raise PoleError("expansion of 1/(1-u) at u = 1")
        inv = (1 - root_of_unity(r)).inverse()
        c = inv if coeff == 1 else inv * coeff
        sink.add(ONE_MONOMIAL, _ZERO, c)
        return
    if region.is_small(u):
        step, tw, n0, sign = u, u_twist, 0, 1
    else:
        step, tw, n0, sign = u.inverse(), -u_twist, 1, -1
    p = sink.pre
    start = Monomial(p.q, p.x1, p.x2)
    lo, hi = _linear_range(start, step, sink.box, n0)
    if hi is None:
        raise UsageError("geometric expansion is unbounded in the box; give finite x-windows")
    c = coeff if sign > 0 else -coeff
    for n in range(lo, hi + 1):
        mm = Monomial(start.q + n * step.q, start.x1 + n * step.x1, start.x2 + n * step.x2)
        sink.add_unchecked(mm, n * tw, c)


def series_geom_expand(u: Monomial, box: TruncationBox, twist=_ZERO,
                       region: Region = DEFAULT_REGION) -> PuiseuxSeries:
    r"""
    Expansion of `1/(1 - \zeta u)` in the region, `\zeta = e^{2\pi i\,\mathrm{twist}}`.

    If `u` is small this is `\sum_{n\ge0} (\zeta u)^n`, otherwise
    `-\sum_{n\ge1} (\zeta u)^{-n}`; both truncated to ``box``.

    INPUT:

    - ``u`` -- :class:`Monomial`
    - ``box`` -- :class:`TruncationBox`
    - ``twist`` -- rational `r`

    EXAMPLES::

        >>> box = TruncationBox(q_max=5, x1_window=(-12, 12), x2_window=(0, 0))
        >>> s = series_geom_expand(Monomial.of(-2, 1, 0), box)
        >>> sorted((str(m), str(c)) for m, c in s.terms.items())
        [('q^2*x1^(-1)', '-1'), ('q^4*x1^(-2)', '-1')]
        >>> series_geom_expand(Monomial.of(0, 0, 0), box)
        Traceback (most recent call last):
        ...
        mocktheta.errors.PoleError: expansion of 1/(1-u) at u = 1
    """
    sink = TermSink(box)
    geom_terms(sink, u, as_fraction(twist), 1, region)
    return sink.series(region)


def quadratic_index_range(a: Fraction, b: Fraction, c: Fraction, bound: Fraction) -> range:
    r"""
    Integers `j` with `a j^2 + b j + c < \mathrm{bound}` (`a > 0`).

    EXAMPLES::

        >>> from fractions import Fraction as F
        >>> list(quadratic_index_range(F(1), F(0), F(0), F(5)))
        [-2, -1, 0, 1, 2]
    """
    if a <= 0:
        raise UsageError("quadratic exponent must have positive leading coefficient")
    disc = b * b - 4 * a * (c - bound)
    if disc <= 0:
        return range(0)
    r = math.sqrt(float(disc))
    lo = math.floor((-float(b) - r) / (2 * float(a))) - 1
    hi = math.ceil((-float(b) + r) / (2 * float(a))) + 1
    while a * lo * lo + b * lo + c >= bound and lo <= hi:
        lo += 1
    while a * hi * hi + b * hi + c >= bound and hi >= lo:
        hi -= 1
    return range(lo, hi + 1)


# --------------------------------------------------------------------------
# affine arguments
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Affine:
    r"""
    Affine form `a_1 z_1 + a_2 z_2 + b\tau + c` with rational coefficients.

    `e^{2\pi i\lambda Z}` is the monomial `x_1^{\lambda a_1} x_2^{\lambda a_2} q^{\lambda b}`
    times the root of unity `e^{2\pi i\lambda c}`; see :meth:`expo`.

    EXAMPLES::

        >>> Z = Affine.z1() + Affine.tau() / 2 - Fraction(1, 2)
        >>> Z.expo(2)
        (Monomial(q=Fraction(1, 1), x1=Fraction(2, 1), x2=Fraction(0, 1)), Fraction(-1, 1))
    """

    z1c: Fraction = _ZERO
    z2c: Fraction = _ZERO
    tauc: Fraction = _ZERO
    const: Fraction = _ZERO

    def __post_init__(self):
        for name in ("z1c", "z2c", "tauc", "const"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))

    @classmethod
    def z1(cls) -> Affine:
        return cls(_ONE, _ZERO, _ZERO, _ZERO)

    @classmethod
    def z2(cls) -> Affine:
        return cls(_ZERO, _ONE, _ZERO, _ZERO)

    @classmethod
    def tau(cls) -> Affine:
        return cls(_ZERO, _ZERO, _ONE, _ZERO)

    @classmethod
    def constant(cls, c) -> Affine:
        return cls(_ZERO, _ZERO, _ZERO, as_fraction(c))

    @staticmethod
    def coerce(x) -> Affine:
        return x if isinstance(x, Affine) else Affine.constant(x)

    def __add__(self, o):
        o = Affine.coerce(o)
        return Affine(self.z1c + o.z1c, self.z2c + o.z2c, self.tauc + o.tauc, self.const + o.const)

    __radd__ = __add__

    def __neg__(self):
        return Affine(-self.z1c, -self.z2c, -self.tauc, -self.const)

    def __sub__(self, o):
        return self + (-Affine.coerce(o))

    def __rsub__(self, o):
        return Affine.coerce(o) - self

    def __mul__(self, k):
        k = as_fraction(k)
        return Affine(self.z1c * k, self.z2c * k, self.tauc * k, self.const * k)

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self * (1 / as_fraction(k))

    def expo(self, lam=1) -> tuple[Monomial, Fraction]:
        """Monomial and twist of `e^{2\\pi i\\,\\lambda\\,Z}`."""
        lam = as_fraction(lam)
        return Monomial(self.tauc * lam, self.z1c * lam, self.z2c * lam), self.const * lam

    def is_tau_multiple(self) -> bool:
        return not (self.z1c or self.z2c or self.const) and self.tauc > 0

    def evaluate(self, tau, z1, z2):
        """Numeric value (mpc) at a point."""
        from .numeric import mpq

        return mpq(self.z1c) * z1 + mpq(self.z2c) * z2 + mpq(self.tauc) * tau + mpq(self.const)


def tau_scale(tau_form: Affine) -> Fraction:
    r"""The `\alpha` of a modular argument `\alpha\tau`; refuses anything else."""
    if not tau_form.is_tau_multiple():
        raise UnsupportedSubstitution("the modular argument must be a positive multiple of tau")
    return tau_form.tauc


@dataclass(frozen=True)
class Substitution:
    r"""
    Monomial-affine change of arguments `\tau \mapsto \alpha\tau`,
    `z_j \mapsto Z_j` with `Z_j` affine.

    Defaults leave everything unchanged.
    """

    tau: Fraction = _ONE
    z1: Affine = Affine.z1()
    z2: Affine = Affine.z2()

    def __post_init__(self):
        object.__setattr__(self, "tau", as_fraction(self.tau))
        if self.tau <= 0:
            raise UnsupportedSubstitution("tau must map to a positive multiple of tau")
        for f in (self.z1, self.z2):
            if not isinstance(f, Affine):
                raise UnsupportedSubstitution("z-images must be affine forms with rational coefficients")


def series_substitute(a: PuiseuxSeries, sub: Substitution,
                      box: Optional[TruncationBox] = None) -> PuiseuxSeries:
    r"""
    Apply a monomial-affine substitution termwise and re-truncate.

    `q^a x_1^b x_2^c` becomes `e^{2\pi i(a\alpha\tau + b Z_1 + c Z_2)}`;
    root-of-unity factors are folded into the coefficients.

    EXAMPLES::

        >>> box = TruncationBox()
        >>> s = PuiseuxSeries.monomial(Monomial.of(0, 1, 0), box)
        >>> t = series_substitute(s, Substitution(z1=Affine.z1() + Fraction(1, 2)))
        >>> [str(c) for c in t.terms.values()]
        ['-1']
    """
    out_box = box or a.box
    sink = TermSink(out_box)
    for m, c in a.terms.items():
        form = Affine.tau() * (m.q * sub.tau) + sub.z1 * m.x1 + sub.z2 * m.x2
        mon, tw = form.expo()
        sink.add(mon, tw, c)
    return sink.series(a.region)


def series_equal_up_to(a: PuiseuxSeries, b: PuiseuxSeries) -> tuple[bool, Optional[Monomial]]:
    r"""
    Exact comparison inside the common box.

    OUTPUT: ``(True, None)`` or ``(False, m)`` with `m` the smallest
    monomial (ordered by `(q, x_1, x_2)`) whose coefficients differ.

    EXAMPLES::

        >>> box = TruncationBox()
        >>> a = PuiseuxSeries.monomial(Monomial.of(1, 0, 0), box)
        >>> series_equal_up_to(a, a)
        (True, None)
        >>> out = PuiseuxSeries({Monomial.of(10, 1, 0): CycloNum.one()}, box)
        >>> series_equal_up_to(a, a + out)
        (True, None)
    """
    a._check(b)
    diff = [m for m in set(a.terms) | set(b.terms) if a.terms.get(m) != b.terms.get(m)]
    if not diff:
        return True, None
    return False, min(diff)


# --------------------------------------------------------------------------
# products of factors generated on demand
# --------------------------------------------------------------------------

Maker = Callable[[TruncationBox], PuiseuxSeries]


def _min_exponents(s: PuiseuxSeries, box: TruncationBox) -> tuple[Fraction, Fraction, Fraction]:
    # lower bounds valid for the factor's full expansion (see product_within)
    qmin = min((m.q for m in s.terms), default=box.q_max)
    qmin = min(qmin, box.q_max)
    out = [qmin]
    for attr, win in (("x1", box.x1_window), ("x2", box.x2_window)):
        hi = win[1]
        v = min((getattr(m, attr) for m in s.terms), default=hi)
        if hi is not None and v is not None:
            v = min(v, hi)
        out.append(v)
    return tuple(out)  # type: ignore[return-value]


def product_within(makers: Sequence[Maker], box: TruncationBox,
                   region: Region = DEFAULT_REGION) -> PuiseuxSeries:
    r"""
    Exact truncated product of factors that are produced on demand.

    Each maker returns the expansion of one factor inside any box it is
    given.  Factors may have negative exponents; working boxes are
    enlarged by the other factors' minimal `q` and `x` exponents so the
    product is exact inside ``box``.  Each factor must be bounded below
    in every exponent at bounded `q` (true for theta quotients in one
    variable `y`), because working boxes are unbounded below in `x`.

    EXAMPLES::

        >>> box = TruncationBox.single(3, (-6, 6))
        >>> qinv = lambda b: PuiseuxSeries.monomial(Monomial.of(-1, 0, 0), b)
        >>> qgeo = lambda b: series_geom_expand(Monomial.of(1, 0, 0), b)
        >>> sorted(str(m) for m in product_within([qinv, qgeo], box).terms)
        ['1', 'q', 'q^(-1)', 'q^2']
    """
    k = len(makers)
    if k == 0:
        return series_one(box, region)
    w1 = (None, box.x1_window[1])
    w2 = (None, box.x2_window[1])
    # pass 1: minimal q-exponents (lower bounds)
    probe = TruncationBox(box.q_max, w1, w2)
    qmins = [_min_exponents(m(probe), probe)[0] for m in makers]
    total_q = sum(qmins, _ZERO)
    qmax_k = [box.q_max - (total_q - qmins[i]) for i in range(k)]
    # pass 2: minimal x-exponents at the relevant q-range
    xmins = []
    for i, mk in enumerate(makers):
        b = TruncationBox(qmax_k[i], w1, w2)
        _, a1, a2 = _min_exponents(mk(b), b)
        xmins.append((a1, a2))

    def upper(hi, idx, skip):
        if hi is None:
            return None
        return hi - sum((xmins[j][idx] for j in range(k) if j not in skip), _ZERO)

    # pass 3: factors in their working boxes
    factors = []
    for i, mk in enumerate(makers):
        b = TruncationBox(qmax_k[i], (None, upper(box.x1_window[1], 0, {i})),
                          (None, upper(box.x2_window[1], 1, {i})))
        factors.append(mk(b).terms)
    acc = factors[0]
    for r in range(1, k):
        rest = set(range(r + 1, k))
        qcap = box.q_max - sum((qmins[j] for j in rest), _ZERO)
        wb = TruncationBox(qcap, (None, upper(box.x1_window[1], 0, set(range(r + 1)))),
                           (None, upper(box.x2_window[1], 1, set(range(r + 1)))))
        acc = _mul_terms(acc, factors[r], wb)
    return PuiseuxSeries(acc, box, region)


def binomial_product(factors: Iterable[tuple[Monomial, Fraction]], box: TruncationBox,
                     power: int = 1, region: Region = DEFAULT_REGION) -> PuiseuxSeries:
    r"""
    `\prod (1 - \zeta u)^{\pm1}` for small monomials `u` with nonnegative
    `q`-exponent, truncated to ``box``.

    INPUT:

    - ``factors`` -- pairs ``(u, r)`` meaning `1 - e^{2\pi i r} u`
    - ``power`` -- ``1`` for the product, ``-1`` for its formal inverse
      (a product of geometric series)

    EXAMPLES::

        >>> box = TruncationBox.single(6, (0, 0))
        >>> fac = [(Monomial.of(n, 0, 0), Fraction(0)) for n in range(1, 6)]
        >>> p = binomial_product(fac, box)
        >>> sorted((m.q, int(c.to_fraction())) for m, c in p.terms.items())
        [(Fraction(0, 1), 1), (Fraction(1, 1), -1), (Fraction(2, 1), -1), (Fraction(5, 1), 1)]
        >>> (p * binomial_product(fac, box, power=-1)).terms == {Monomial.of(0, 0, 0): CycloNum.one()}
        True
    """
    if power not in (1, -1):
        raise UsageError("power must be 1 or -1")
    acc = series_one(box, region)
    for u, r in factors:
        if u.q < 0 or not region.is_small(u):
            raise UsageError("binomial factors must be small with nonnegative q-exponent")
        r = as_fraction(r)
        if power == 1:
            f = PuiseuxSeries({ONE_MONOMIAL: CycloNum.one(), u: -root_of_unity(r)}, box, region)
        else:
            f = series_geom_expand(u, box, r, region)
        acc = series_mul(acc, f)
    return acc
