r"""
Exact coefficients: rationals and elements of cyclotomic fields.

Rationals are :class:`fractions.Fraction` (aliased as :data:`BigRational`).
A :class:`CycloNum` is an element of `\QQ(\zeta_L)`, `\zeta_L = e^{2\pi i/L}`,
stored in the power basis `1, \zeta_L, \dots, \zeta_L^{\varphi(L)-1}`,
i.e. reduced modulo the `L`-th cyclotomic polynomial.  In that form an
element is zero iff all of its coordinates vanish, which is what makes
exact zero tests (and hence exact series comparison) possible.

EXAMPLES::

    >>> from mocktheta.coefficients import CycloNum
    >>> z8 = CycloNum.root(1, 8)
    >>> z8 * z8 == CycloNum.root(2, 8)
    True
    >>> (1 + z8) * (1 - z8)
    CycloNum(8, {0: 1, 2: -1})
    >>> CycloNum.from_terms({0: 1, 4: 1}, 8).is_zero()
    True
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Mapping, Sequence

from .errors import UsageError

__all__ = [
    "BigRational",
    "CycloNum",
    "as_fraction",
    "cyclotomic_polynomial",
    "cyclo_canonicalize",
    "cyclo_embed",
    "cyclo_inv",
    "cyclo_mul",
    "root_of_unity",
]

BigRational = Fraction


def as_fraction(x) -> Fraction:
    r"""
    Convert ``x`` to an exact :class:`Fraction`.

    Accepts integers, fractions and strings such as ``"3/2"``; floats
    are refused, because a silent binary approximation would defeat
    the purpose of exact arithmetic.

    EXAMPLES::

        >>> as_fraction("3/2"), as_fraction(2)
        (Fraction(3, 2), Fraction(2, 1))
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise UsageError("booleans are not rationals")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as err:
            raise UsageError(f"not a rational number: {x!r}") from err
    raise UsageError(f"expected an exact rational, got {type(x).__name__}")


# --------------------------------------------------------------------------
# cyclotomic polynomials and reduction tables
# --------------------------------------------------------------------------

def _poly_divexact(num: list[int], den: Sequence[int]) -> list[int]:
    # exact division of integer polynomials, den monic; low degree first
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + dn]
        out[i] = c
        if c:
            for k, d in enumerate(den):
                num[i + k] -= c * d
    if any(num[:dn]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(L: int) -> tuple[int, ...]:
    r"""
    Integer coefficients (constant term first) of the `L`-th cyclotomic
    polynomial, computed by dividing `x^L - 1` by `\Phi_d` for the
    proper divisors `d` of `L`.

    EXAMPLES::

        >>> cyclotomic_polynomial(8)
        (1, 0, 0, 0, 1)
        >>> cyclotomic_polynomial(6)
        (1, -1, 1)
    """
    if L < 1:
        raise UsageError("cyclotomic order must be positive")
    poly = [-1] + [0] * (L - 1) + [1]
    for d in range(1, L):
        if L % d == 0:
            poly = _poly_divexact(poly, cyclotomic_polynomial(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def _phi(L: int) -> int:
    return len(cyclotomic_polynomial(L)) - 1


@lru_cache(maxsize=None)
def _power_table(L: int) -> tuple[tuple[int, ...], ...]:
    # row a holds x^a mod Phi_L for 0 <= a < max(L, 2 phi - 1)
    cp = cyclotomic_polynomial(L)
    n = len(cp) - 1
    rows = []
    cur = [1] + [0] * (n - 1)
    for _ in range(max(L, 2 * n - 1)):
        rows.append(tuple(cur))
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for k in range(n):
                cur[k] -= top * cp[k]
    return tuple(rows)


_ZERO = Fraction(0)
_ONE = Fraction(1)


class CycloNum:
    r"""
    Element of `\QQ(\zeta_L)`, immutable.

    INPUT (of the constructor, which expects canonical data):

    - ``order`` -- positive integer `L`
    - ``coeffs`` -- `\varphi(L)` rationals, the power-basis coordinates

    Most callers use :meth:`from_terms`, :meth:`root`, :meth:`rational`
    or arithmetic with ints and fractions.

    Equality between numbers of different orders compares their values
    (both are lifted to the lcm of the orders).

    EXAMPLES::

        >>> i = CycloNum.root(1, 4)
        >>> i * i
        CycloNum(4, {0: -1})
        >>> (i + 1).inverse() * (i + 1) == 1
        True
        >>> CycloNum.root(3, 8).terms()
        {3: Fraction(1, 1)}
    """

    __slots__ = ("order", "coeffs", "_hash")

    def __init__(self, order: int, coeffs: Sequence[Fraction]):
        self.order = order
        self.coeffs = tuple(coeffs)
        self._hash = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, order: int = 1) -> CycloNum:
        return cls(order, (_ZERO,) * _phi(order))

    @classmethod
    def one(cls, order: int = 1) -> CycloNum:
        return cls.rational(1, order)

    @classmethod
    def rational(cls, x, order: int = 1) -> CycloNum:
        """The rational ``x`` as an element of order ``order``."""
        c = [_ZERO] * _phi(order)
        c[0] = as_fraction(x)
        return cls(order, c)

    @classmethod
    def root(cls, a: int, order: int) -> CycloNum:
        r"""`\zeta_L^a` with `L` = ``order``."""
        row = _power_table(order)[a % order]
        return cls(order, [Fraction(v) for v in row])

    @classmethod
    def from_terms(cls, raw: Mapping[int, object], order: int) -> CycloNum:
        r"""Canonical form of `\sum_a c_a \zeta_L^a`; see :func:`cyclo_canonicalize`."""
        return cyclo_canonicalize(raw, order)

    # -- inspection --------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational number")
        return self.coeffs[0]

    def terms(self) -> dict[int, Fraction]:
        """Nonzero power-basis coordinates as ``{exponent: coefficient}``."""
        return {a: c for a, c in enumerate(self.coeffs) if c}

    # -- order changes -----------------------------------------------------

    def lift(self, order: int) -> CycloNum:
        r"""The same number regarded in `\QQ(\zeta_M)`, `L \mid M`."""
        if order == self.order:
            return self
        if order % self.order:
            raise UsageError(f"cannot lift order {self.order} to {order}")
        if self.is_rational():
            return CycloNum.rational(self.coeffs[0], order)
        step = order // self.order
        return cyclo_canonicalize({a * step: c for a, c in enumerate(self.coeffs) if c}, order)

    def _pair(self, other) -> tuple[CycloNum, CycloNum]:
        if not isinstance(other, CycloNum):
            other = CycloNum.rational(other, self.order)
            return self, other
        if other.order == self.order:
            return self, other
        if other.is_rational():
            return self, CycloNum.rational(other.coeffs[0], self.order)
        if self.is_rational():
            return CycloNum.rational(self.coeffs[0], other.order), other
        L = math.lcm(self.order, other.order)
        return self.lift(L), other.lift(L)

    # -- arithmetic (mixed orders are lifted to the lcm) --------------------

    def __add__(self, other):
        if not isinstance(other, (CycloNum, int, Fraction)):
            return NotImplemented
        a, b = self._pair(other)
        return CycloNum(a.order, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycloNum(self.order, [-x for x in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, (CycloNum, int, Fraction)):
            return NotImplemented
        a, b = self._pair(other)
        return CycloNum(a.order, [x - y for x, y in zip(a.coeffs, b.coeffs)])

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloNum(self.order, [x * other for x in self.coeffs])
        if not isinstance(other, CycloNum):
            return NotImplemented
        if other.is_rational():
            c = other.coeffs[0]
            return CycloNum(self.order, [x * c for x in self.coeffs])
        if self.is_rational():
            c = self.coeffs[0]
            return CycloNum(other.order, [x * c for x in other.coeffs])
        a, b = self._pair(other)
        return cyclo_mul(a, b)

    __rmul__ = __mul__

    def inverse(self) -> CycloNum:
        return cyclo_inv(self)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return CycloNum(self.order, [x / other for x in self.coeffs])
        if not isinstance(other, CycloNum):
            return NotImplemented
        a, b = self._pair(other)
        return cyclo_mul(a, cyclo_inv(b))

    def __rtruediv__(self, other):
        return CycloNum.rational(other, self.order) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else cyclo_inv(self)
        n = abs(n)
        out = CycloNum.one(self.order)
        while n:
            if n & 1:
                out = cyclo_mul(out, base)
            n >>= 1
            if n:
                base = cyclo_mul(base, base)
        return out

    def conjugate(self) -> CycloNum:
        r"""Complex conjugate (`\zeta \mapsto \zeta^{-1}`)."""
        return cyclo_canonicalize({-a: c for a, c in enumerate(self.coeffs) if c}, self.order)

    # -- comparison ----------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, CycloNum):
            return NotImplemented
        if other.order == self.order:
            return self.coeffs == other.coeffs
        a, b = self._pair(other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        # rationals hash like Fractions; other values by (order, coords)
        if self._hash is None:
            self._hash = hash(self.coeffs[0]) if self.is_rational() else hash((self.order, self.coeffs))
        return self._hash

    # -- conversion ------------------------------------------------------------

    def __complex__(self):
        return cyclo_embed(self)

    def embed_mp(self, ctx):
        """Value as an ``mpc`` of the mpmath context ``ctx``."""
        if self.is_rational():
            return ctx.mpc(ctx.mpf(self.coeffs[0].numerator) / self.coeffs[0].denominator)
        total = ctx.mpc(0)
        for a, c in enumerate(self.coeffs):
            if c:
                total += (ctx.mpf(c.numerator) / c.denominator) * ctx.expjpi(ctx.mpf(2 * a) / self.order)
        return total

    def to_json(self) -> list[dict[str, str]]:
        """Serialization as ``[{"exponent": "a/L", "coeff": "p/q"}, ...]``."""
        return [{"exponent": f"{a}/{self.order}", "coeff": str(c)} for a, c in self.terms().items()]

    @classmethod
    def from_json(cls, data: Iterable[Mapping[str, str]]) -> CycloNum:
        data = list(data)
        if not data:
            return cls.zero()
        raw = [(Fraction(d["exponent"]), Fraction(d["coeff"])) for d in data]
        L = 1
        for e, _ in raw:
            L = math.lcm(L, e.denominator)
        acc: dict[int, Fraction] = {}
        for e, c in raw:
            a = int(e * L)
            acc[a] = acc.get(a, _ZERO) + c
        return cyclo_canonicalize(acc, L)

    def __repr__(self):
        inner = ", ".join(f"{a}: {c}" for a, c in self.terms().items())
        return f"CycloNum({self.order}, {{{inner}}})"

    def __str__(self):
        if self.is_rational():
            return str(self.coeffs[0])
        parts = []
        for a, c in self.terms().items():
            parts.append(str(c) if a == 0 else f"{c}*z{self.order}^{a}")
        return " + ".join(parts)


def cyclo_canonicalize(raw: Mapping[int, object], order: int) -> CycloNum:
    r"""
    Reduce `\sum_a c_a \zeta_L^a` modulo `\Phi_L`.

    INPUT:

    - ``raw`` -- map from integer exponents (any residue) to rationals
    - ``order`` -- `L`

    OUTPUT: the canonical :class:`CycloNum`; zero is detected exactly.

    EXAMPLES::

        >>> cyclo_canonicalize({0: 1, 2: 1, 4: 1, 6: 1}, 8).is_zero()
        True
        >>> cyclo_canonicalize({0: 1, 1: 1}, 2).is_zero()
        True
    """
    if order < 1:
        raise UsageError("cyclotomic order must be positive")
    table = _power_table(order)
    n = _phi(order)
    out = [_ZERO] * n
    for a, c in raw.items():
        c = as_fraction(c)
        if not c:
            continue
        for k, v in enumerate(table[a % order]):
            if v:
                out[k] += c * v
    return CycloNum(order, out)


def cyclo_mul(a: CycloNum, b: CycloNum) -> CycloNum:
    r"""
    Exact product of two numbers of the same order.

    EXAMPLES::

        >>> z8 = CycloNum.root(1, 8)
        >>> cyclo_mul(z8, z8) == CycloNum.root(2, 8)
        True
        >>> cyclo_mul(z8, CycloNum.root(1, 4))
        Traceback (most recent call last):
        ...
        mocktheta.errors.UsageError: mismatched cyclotomic orders 8 and 4
    """
    if a.order != b.order:
        raise UsageError(f"mismatched cyclotomic orders {a.order} and {b.order}")
    L = a.order
    n = len(a.coeffs)
    if n == 1:
        return CycloNum(L, (a.coeffs[0] * b.coeffs[0],))
    if b.is_rational():
        c = b.coeffs[0]
        return CycloNum(L, [x * c for x in a.coeffs])
    if a.is_rational():
        c = a.coeffs[0]
        return CycloNum(L, [x * c for x in b.coeffs])
    prod = [_ZERO] * (2 * n - 1)
    for i, x in enumerate(a.coeffs):
        if x:
            for j, y in enumerate(b.coeffs):
                if y:
                    prod[i + j] += x * y
    out = list(prod[:n])
    table = _power_table(L)
    for d in range(n, 2 * n - 1):
        c = prod[d]
        if c:
            for k, v in enumerate(table[d]):
                if v:
                    out[k] += c * v
    return CycloNum(L, out)


def _solve(mat: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    # Gauss-Jordan over Q
    n = len(rhs)
    aug = [row[:] + [r] for row, r in zip(mat, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("singular multiplication matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def cyclo_inv(a: CycloNum) -> CycloNum:
    r"""
    Multiplicative inverse, by solving `a \cdot b = 1` as a linear system.

    EXAMPLES::

        >>> cyclo_inv(CycloNum.root(1, 8)) == CycloNum.root(7, 8)
        True
        >>> cyclo_inv(CycloNum.rational(2))
        CycloNum(1, {0: 1/2})
        >>> cyclo_inv(CycloNum.zero(8))
        Traceback (most recent call last):
        ...
        ZeroDivisionError: inverse of zero in Q(zeta_8)
    """
    if a.is_zero():
        raise ZeroDivisionError(f"inverse of zero in Q(zeta_{a.order})")
    L = a.order
    n = len(a.coeffs)
    if a.is_rational():
        c = [_ZERO] * n
        c[0] = 1 / a.coeffs[0]
        return CycloNum(L, c)
    # column j of the matrix is a * zeta^j
    cols = []
    basis = [_ZERO] * n
    for j in range(n):
        e = list(basis)
        e[j] = _ONE
        cols.append(cyclo_mul(a, CycloNum(L, e)).coeffs)
    mat = [[cols[j][i] for j in range(n)] for i in range(n)]
    rhs = [_ONE] + [_ZERO] * (n - 1)
    return CycloNum(L, _solve(mat, rhs))


def cyclo_embed(a: CycloNum) -> complex:
    r"""
    Standard complex embedding `\zeta_L \mapsto e^{2\pi i/L}` in double
    precision.

    EXAMPLES::

        >>> cyclo_embed(CycloNum.root(1, 4) + 1)
        (1+1j)
        >>> abs(cyclo_embed(CycloNum.root(1, 8)) - 0.7071067811865476 * (1 + 1j)) < 1e-15
        True
    """
    total = 0j
    for k, c in enumerate(a.coeffs):
        if c:
            total += float(c) * cmath.exp(2j * math.pi * k / a.order)
    return total


def root_of_unity(r) -> CycloNum:
    r"""
    `e^{2\pi i r}` for rational `r`, with order the reduced denominator.

    EXAMPLES::

        >>> root_of_unity(Fraction(1, 2))
        CycloNum(2, {0: -1})
        >>> root_of_unity(Fraction(5, 4)) == CycloNum.root(1, 4)
        True
    """
    r = as_fraction(r)
    L = r.denominator
    return CycloNum.root(r.numerator % L, L)
