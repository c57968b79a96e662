r"""
Registry of checkable identities.

Every identity is a pair of independently evaluated sides.  Numeric mode
samples admissible random points and reports the normalized residual
`|L-R|/\max(1,|L|,|R|)`; formal mode (only for identities whose sides are
plain sums of expanded terms, with no series division) compares the
two term maps exactly inside a truncation box.

Sample points are drawn from a generator seeded by ``(seed, family)``,
so every parameter choice of the same family sees the same points.
Points too close to a pole of either side are skipped and counted.

EXAMPLES::

    >>> from mocktheta.identities import check_identity
    >>> r = check_identity("DOUBLING", {"m": 1}, samples=3)
    >>> r.passed, r.max_residual < 1e-20
    (True, True)
    >>> check_identity("SHIFT_S_POS", {"m": 1, "s": 0, "j": 2, "case": "iii"}, mode="formal").passed
    True
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional

from .appell import (HalfInt, PhiSpec, eta_vartheta_block, half_odd_triple_sum, odd_zero_triple_sum,
                     phi_component, phi_direct, phi_eval_plan, phi_formal_terms, phi_resolve)
from .characters import ModuleLabel, char_closed, char_diff_correction, char_general, char_via_definition
from .coefficients import as_fraction
from .errors import DomainError, MockThetaError, PoleError, ScopeError, UsageError
from .numeric import ctx, e, mpq, outer_sum, qpow, residual
from .series import Affine, Monomial, PuiseuxSeries, TermSink, TruncationBox, series_equal_up_to
from .thetas import SPECIAL_FORMS, ThetaIndex, check_form_scope, dedekind_eta, mumford_vartheta, theta_km, \
    theta_km_terms

__all__ = [
    "GridSpec",
    "IdentityDef",
    "IdentityReport",
    "Sample",
    "D21APoint",
    "REGISTRY",
    "REGISTRY_SIZE",
    "GROUPS",
    "list_identities",
    "check_identity",
    "run_suite",
    "suite_summary",
    "sample_points",
    "d21a_lattice_sum",
    "d21a_lattice_tail",
    "d21a_reduce_b",
    "d21a_reduce_c",
    "d21a_bridge_sides",
    "p_poly",
]

F = Fraction
_HALF = F(1, 2)
#: distance to a denominator zero below which a sample point is rejected
POLE_GUARD = 1e-4
_MAX_RESAMPLE = 1000
_CASES = {"i": "one", "ii": "two", "iii": "diff"}
_COMP_OF_INDEX = {1: "one", 2: "two"}


# --------------------------------------------------------------------------
# sampling
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Sample:
    """A random point: `\\tau` and up to three elliptic variables plus `t`."""

    tau: object
    z1: object
    z2: object
    z3: object
    t: object

    def to_json(self, family: str) -> dict:
        keys = {"phi": ("tau", "z1", "z2", "t"), "d21a": ("tau", "z1", "z2", "z3"),
                "char": ("tau", "z1"), "theta": ("tau", "z1", "z2")}[family]
        names = {"char": {"z1": "z"}, "theta": {"z1": "z", "z2": "zp"}}.get(family, {})
        return {names.get(k, k): _cstr(getattr(self, k)) for k in keys}


def _cstr(z) -> str:
    z = complex(z)
    return f"{z.real!r}{z.imag:+}i"


def sample_points(family: str, seed: int = 0) -> Iterator[Sample]:
    r"""
    Endless reproducible stream of points: `\tau = x+iy`, `x\in[-0.3,0.3]`,
    `y\in[0.6,1.2]`; `z`'s and `t` in `[-0.4,0.4]+i[-0.1,0.1]`.

    EXAMPLES::

        >>> a = next(sample_points("phi", 3)); b = next(sample_points("phi", 3))
        >>> a == b, 0.6 <= float(a.tau.imag) <= 1.2
        (True, True)
    """
    rng = random.Random(f"{seed}:{family}")

    def z():
        return ctx.mpc(rng.uniform(-0.4, 0.4), rng.uniform(-0.1, 0.1))

    while True:
        tau = ctx.mpc(rng.uniform(-0.3, 0.3), rng.uniform(0.6, 1.2))
        yield Sample(tau, z(), z(), z(), z())


# --------------------------------------------------------------------------
# grids and parameters
# --------------------------------------------------------------------------

def _halves(lo, hi):
    lo, hi = F(lo), F(hi)
    out = []
    v = lo
    while v <= hi:
        out.append(v)
        v += _HALF
    return tuple(out)


@dataclass(frozen=True)
class GridSpec:
    r"""
    Parameter grid of the suite.  Each identity takes the part of the grid
    inside its scope.

    EXAMPLES::

        >>> g = GridSpec()
        >>> [str(x) for x in g.m]
        ['1/2', '1', '3/2', '2', '5/2', '3']
        >>> g.p
        (-2, -1, 0, 1, 2)
    """

    m: tuple = _halves(_HALF, 3)
    s: tuple = _halves(F(-3, 2), F(5, 2))
    p: tuple = (-2, -1, 0, 1, 2)
    plan_m: tuple = _halves(_HALF, 4)
    plan_s: tuple = _halves(-2, F(5, 2))
    char_m: tuple = (1, 2, 3, 4)

    @classmethod
    def of(cls, **kw) -> GridSpec:
        conv = {}
        for k, v in kw.items():
            if v is None:
                continue
            if k in ("m", "s", "plan_m", "plan_s"):
                conv[k] = tuple(HalfInt.of(x).value for x in v)
            else:
                conv[k] = tuple(int(x) for x in v)
        return cls(**conv)


_PARAM_KINDS = {"m": "half", "s": "half", "p": "int", "j": "int", "n": "int", "m2": "int", "a": "int",
                "b": "int", "i": "int", "sign": "int", "case": "str", "form": "str"}


def _normalize(params: Optional[dict]) -> dict:
    out = {}
    for k, v in (params or {}).items():
        kind = _PARAM_KINDS.get(k)
        if kind is None:
            raise UsageError(f"unknown parameter {k!r}")
        if kind == "half":
            out[k] = HalfInt.of(v).value
        elif kind == "int":
            fv = as_fraction(v)
            if fv.denominator != 1:
                raise UsageError(f"parameter {k} must be an integer, got {v}")
            out[k] = int(fv)
        else:
            out[k] = str(v)
    return out


def _pjson(params: dict) -> dict:
    return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in params.items()}


def _is_nat(x) -> bool:
    return x.denominator == 1 and x >= 1


def _is_half_odd(x) -> bool:
    return x.denominator == 2


def _need(P: dict, *names) -> None:
    missing = [n for n in names if n not in P]
    if missing:
        raise UsageError(f"missing parameter(s): {', '.join(missing)}")


# --------------------------------------------------------------------------
# numeric helpers
# --------------------------------------------------------------------------

def _phi(m, s, comp, tau, z1, z2, t=0):
    if comp == "diff":
        return (phi_component(m, s, 1, tau, z1, z2, t, POLE_GUARD)
                - phi_component(m, s, 2, tau, z1, z2, t, POLE_GUARD))
    return phi_component(m, s, 1 if comp == "one" else 2, tau, z1, z2, t, POLE_GUARD)


def _th(k, m, tau, z, alt=False):
    return theta_km(ThetaIndex(k, m, alt), tau, z)


def _thd(k, m, tau, z):
    k = as_fraction(k)
    return _th(k, m, tau, z) - _th(-k, m, tau, z)


def _v11(tau, z):
    # vartheta_11 vanishes on the lattice; reject points close to it
    v = mumford_vartheta((1, 1), tau, z)
    if abs(v) < POLE_GUARD * abs(qpow(F(1, 8), tau)):
        raise PoleError("vartheta_11 denominator close to zero")
    return v


def _corr(m, s, ks, comp, tau, z1, z2):
    # sum_k e^{pi i (s+k)(z1-z2)} q^{-(s+k)^2/4m} Theta_k(tau, z1+z2)
    total = ctx.mpc(0)
    w = z1 + z2
    for k in ks:
        a = s + k
        c = e(mpq(a) * (z1 - z2) / 2) * qpow(-a * a / (4 * m), tau)
        if comp == "one":
            total += c * _th(a, m, tau, w)
        elif comp == "two":
            total += c * _th(-a, m, tau, w)
        else:
            total += c * _thd(a, m, tau, w)
    return total


def _zsum(f):
    # sum over all integers j of f(j)
    return f(0) + outer_sum(lambda j: f(j) + f(-j))


# --------------------------------------------------------------------------
# formal helpers
# --------------------------------------------------------------------------

_TAU = Affine.tau()
_Z1 = Affine.z1()
_Z2 = Affine.z2()


class _Side:
    """One side of an identity accumulated as a term map."""

    def __init__(self, box: TruncationBox):
        self.sink = TermSink(box)

    def _sub(self, pre: Optional[Affine], q, coeff, twist) -> TermSink:
        if pre is None:
            mon, tw = Monomial(F(0), F(0), F(0)), F(0)
        else:
            mon, tw = pre.expo()
        return self.sink.scaled(Monomial(mon.q + as_fraction(q), mon.x1, mon.x2), tw + as_fraction(twist), coeff)

    def phi(self, m, s, comp, tau=_TAU, z1=_Z1, z2=_Z2, *, pre=None, q=0, coeff=1, twist=0):
        phi_formal_terms(self._sub(pre, q, coeff, twist), PhiSpec.of(m, s, comp), tau, z1, z2)

    def theta(self, k, m, tau, z, *, alt=False, pre=None, q=0, coeff=1, twist=0):
        theta_km_terms(self._sub(pre, q, coeff, twist), ThetaIndex(k, m, alt), tau, z)

    def corr(self, m, s, ks, comp, *, sign=1, pre=None, tau=_TAU, z1=_Z1, z2=_Z2):
        for k in ks:
            a = s + k
            p = (z1 - z2) * (a / 2) + (pre if pre is not None else Affine())
            qq = -a * a / (4 * m)
            if comp in ("one", "diff"):
                self.theta(a, m, tau, z1 + z2, pre=p, q=qq, coeff=sign)
            if comp in ("two", "diff"):
                self.theta(-a, m, tau, z1 + z2, pre=p, q=qq, coeff=-sign if comp == "diff" else sign)

    def series(self) -> PuiseuxSeries:
        return self.sink.series()


def _box2(q_order) -> TruncationBox:
    return TruncationBox(q_order, (-8, 8), (-8, 8))


def _box1(q_order) -> TruncationBox:
    return TruncationBox.single(q_order, (-8, 8))


# --------------------------------------------------------------------------
# registry types
# --------------------------------------------------------------------------

Numeric = Callable[[dict, Sample], tuple]
Formal = Callable[[dict, int], tuple]


@dataclass(frozen=True)
class IdentityDef:
    r"""
    One registered identity.

    ``numeric(params, sample)`` returns ``(lhs, rhs)`` or
    ``(lhs, rhs, extras)`` where ``extras`` maps names of auxiliary
    comparisons to ``(a, b)`` pairs; ``formal(params, q_order)`` returns
    two :class:`~mocktheta.series.PuiseuxSeries`.
    """

    id: str
    group: str
    anchor: str
    scope: str
    params: tuple
    family: str
    grid: Callable[[GridSpec], list]
    check_scope: Callable[[dict], Optional[str]]
    numeric: Numeric
    formal: Optional[Formal] = None
    note: str = ""

    def catalogue_entry(self) -> dict:
        return {"id": self.id, "group": self.group, "anchor": self.anchor, "scope": self.scope,
                "params": list(self.params), "formal": self.formal is not None, "note": self.note}


@dataclass
class IdentityReport:
    r"""Outcome of one check; :meth:`to_json` is deterministic given the seed."""

    id: str
    params: dict
    mode: str
    seed: int
    tolerance: float
    passed: bool
    max_residual: Optional[float] = None
    points: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    resampled: int = 0
    extras: dict = field(default_factory=dict)
    q_order: Optional[int] = None
    terms: Optional[int] = None
    mismatch: Optional[str] = None
    error: Optional[str] = None

    def to_json(self) -> dict:
        out = {"id": self.id, "params": _pjson(self.params), "mode": self.mode, "seed": self.seed,
               "pass": self.passed}
        if self.mode == "numeric":
            out.update(tolerance=self.tolerance, max_residual=self.max_residual, points=self.points,
                       residuals=self.residuals, resampled=self.resampled)
            if self.extras:
                out["extras"] = self.extras
        else:
            out.update(q_order=self.q_order, terms=self.terms, mismatch=self.mismatch)
        if self.error:
            out["error"] = self.error
        return out


REGISTRY: dict[str, IdentityDef] = {}


def _reg(**kw) -> None:
    d = IdentityDef(**kw)
    if d.id in REGISTRY:
        raise RuntimeError(f"duplicate identity {d.id}")
    REGISTRY[d.id] = d


def _scope_all(P):
    return None


# --------------------------------------------------------------------------
# index shift in s
# --------------------------------------------------------------------------

def _shift_scope(sign):
    def check(P):
        _need(P, "m", "s", "j", "case")
        if P["m"] <= 0:
            return "m must be positive"
        if P["case"] not in _CASES:
            return "case must be i, ii or iii"
        if sign > 0 and P["j"] < 0:
            return "part 1 needs j >= 0"
        if sign < 0 and P["j"] >= 0:
            return "part 2 needs j < 0"
        return None
    return check


def _shift_grid(sign):
    def grid(g: GridSpec):
        js = [j for j in g.p if (j >= 0 if sign > 0 else j < 0)]
        return [{"m": m, "s": s, "j": j, "case": c} for m in g.m for s in g.s for j in js for c in _CASES]
    return grid


def _shift_ks(j):
    return range(0, j) if j >= 0 else range(j, 0)


def _shift_num(P, x):
    m, s, j, comp = P["m"], P["s"], P["j"], _CASES[P["case"]]
    lhs = _phi(m, s + j, comp, x.tau, x.z1, x.z2)
    sg = -1 if j >= 0 else 1
    rhs = _phi(m, s, comp, x.tau, x.z1, x.z2) + sg * _corr(m, s, _shift_ks(j), comp, x.tau, x.z1, x.z2)
    return lhs, rhs


def _shift_formal(P, q_order):
    m, s, j, comp = P["m"], P["s"], P["j"], _CASES[P["case"]]
    box = _box2(q_order)
    L, R = _Side(box), _Side(box)
    L.phi(m, s + j, comp)
    R.phi(m, s, comp)
    R.corr(m, s, _shift_ks(j), comp, sign=-1 if j >= 0 else 1)
    return L.series(), R.series()


for _sg, _name in ((1, "SHIFT_S_POS"), (-1, "SHIFT_S_NEG")):
    _reg(id=_name, group="recurrence",
         anchor=("index shift s -> s+j of Phi_1, Phi_2 and Phi by a finite sum of "
                 "e^{pi i(s+k)(z1-z2)} q^{-(s+k)^2/4m} theta_{+-(s+k),m}(tau, z1+z2), "
                 + ("j >= 0 (subtracted, k = 0..j-1)" if _sg > 0 else "j < 0 (added, k = j..-1)")),
         scope="m in 1/2 N, s in 1/2 Z, " + ("j >= 0" if _sg > 0 else "j < 0")
               + "; case i: Phi_1, ii: Phi_2, iii: Phi",
         params=("m", "s", "j", "case"), family="phi", grid=_shift_grid(_sg), check_scope=_shift_scope(_sg),
         numeric=_shift_num, formal=_shift_formal)


# --------------------------------------------------------------------------
# s = 0 versus s = 1
# --------------------------------------------------------------------------

def _s01_scope(P):
    _need(P, "m", "form")
    if P["m"] <= 0:
        return "m must be positive"
    if P["form"] not in ("diff", "one", "two"):
        return "form must be diff, one or two"
    return None


def _s01_num(P, x):
    m, form = P["m"], P["form"]
    lhs = _phi(m, 0, form, x.tau, x.z1, x.z2)
    rhs = _phi(m, 1, form, x.tau, x.z1, x.z2)
    if form != "diff":
        rhs += _th(0, m, x.tau, x.z1 + x.z2)
    return lhs, rhs


def _s01_formal(P, q_order):
    m, form = P["m"], P["form"]
    box = _box2(q_order)
    L, R = _Side(box), _Side(box)
    L.phi(m, 0, form)
    R.phi(m, 1, form)
    if form != "diff":
        R.theta(0, m, _TAU, _Z1 + _Z2)
    return L.series(), R.series()


_reg(id="S0_EQ_S1", group="recurrence",
     anchor="Phi^{[m,0]} = Phi^{[m,1]} (for the difference; each component differs by theta_{0,m}(tau, z1+z2))",
     scope="m in 1/2 N; form diff, one or two",
     params=("m", "form"), family="phi",
     grid=lambda g: [{"m": m, "form": f} for m in g.m for f in ("diff", "one", "two")],
     check_scope=_s01_scope, numeric=_s01_num, formal=_s01_formal,
     note="the component-wise equality does not hold; the components satisfy "
          "Phi_i^{[m,0]} = Phi_i^{[m,1]} + theta_{0,m}(tau, z1+z2), which is what form one/two checks")


# --------------------------------------------------------------------------
# index shift at the character arguments (single variable)
# --------------------------------------------------------------------------

def _hs_data(part, sub):
    c = F(0) if sub == "i" else -_HALF
    if part == 1:
        fac = (-1, 0) if sub == "i" else (1, F(1, 4))
    else:
        fac = (-1, 0)
    return c, fac, sub == "ii"


def _hs_terms(part, s):
    if part == 1:
        return [k + _HALF for k in range(int(s - F(3, 2)) + 1)]
    return list(range(int(s)))


def _hs_scope(part):
    def check(P):
        _need(P, "m", "s")
        if not _is_nat(P["m"]):
            return "m must be a positive integer"
        if part == 1 and not (_is_half_odd(P["s"]) and P["s"] > 0):
            return "s must be a positive half-odd integer"
        if part == 2 and not _is_nat(P["s"]):
            return "s must be a positive integer"
        return None
    return check


def _hs_num(part, sub):
    def f(P, x):
        m, s = P["m"], P["s"]
        c, (sgn, tw), alt = _hs_data(part, sub)
        tau, z = x.tau, x.z1
        cz = mpq(c)
        args = (2 * tau, z + tau / 2 + cz, z - tau / 2 - cz)
        base = _HALF if part == 1 else F(0)
        lhs = _phi(m / 2, s, "diff", *args)
        tot = ctx.mpc(0)
        for k, a in enumerate(_hs_terms(part, s)):
            a = F(a)
            term = qpow(-a * a / m + a / 2, tau) * _thd(a, m / 2, 2 * tau, 2 * z)
            tot += -term if (alt and k % 2) else term
        rhs = _phi(m / 2, base, "diff", *args) + sgn * e(mpq(tw)) * tot
        return lhs, rhs
    return f


def _hs_formal(part, sub):
    def f(P, q_order):
        m, s = P["m"], P["s"]
        c, (sgn, tw), alt = _hs_data(part, sub)
        box = _box1(q_order)
        T = _TAU * 2
        Z1 = _Z1 + _TAU / 2 + c
        Z2 = _Z1 - _TAU / 2 - c
        L, R = _Side(box), _Side(box)
        L.phi(m / 2, s, "diff", T, Z1, Z2)
        R.phi(m / 2, _HALF if part == 1 else 0, "diff", T, Z1, Z2)
        for k, a in enumerate(_hs_terms(part, s)):
            a = F(a)
            sg = sgn * (-1 if (alt and k % 2) else 1)
            qq = -a * a / m + a / 2
            R.theta(a, m / 2, T, _Z1 * 2, q=qq, coeff=sg, twist=tw)
            R.theta(-a, m / 2, T, _Z1 * 2, q=qq, coeff=-sg, twist=tw)
        return L.series(), R.series()
    return f


for _part in (1, 2):
    for _sub in ("i", "ii"):
        _c = "0" if _sub == "i" else "-1/2"
        _reg(id=f"HALF_SPEC_SHIFT_{_part}{_sub}", group="recurrence",
             anchor=(f"Phi^{{[m/2,s]}}(2tau, z+tau/2+c, z-tau/2-c, 0) with c = {_c} reduced to "
                     + ("s = 1/2" if _part == 1 else "s = 0")
                     + " plus a finite sum of [theta_{a,m/2}-theta_{-a,m/2}](2tau, 2z)"),
             scope="m in N, " + ("s in 1/2 N_odd" if _part == 1 else "s in N"),
             params=("m", "s"), family="char",
             grid=(lambda g, _p=_part: [{"m": m, "s": s} for m in g.m if _is_nat(m) for s in g.s
                                        if (s > 0 and (_is_half_odd(s) if _p == 1 else s.denominator == 1))]),
             check_scope=_hs_scope(_part), numeric=_hs_num(_part, _sub), formal=_hs_formal(_part, _sub),
             note=("prefactor of the finite sum: " + {("1", "i"): "-1", ("1", "ii"): "+i with (-1)^k",
                                                      ("2", "i"): "-1", ("2", "ii"): "-1 with (-1)^k"}[
                 (str(_part), _sub)] + " (the signs that agree with direct summation)"))


# --------------------------------------------------------------------------
# shifts of z2 by p tau
# --------------------------------------------------------------------------

def _z2_scope(need_index=True, theta=False, part=None):
    def check(P):
        _need(P, "m", "s", "p", *(("i",) if need_index else ()))
        if P["m"] <= 0:
            return "m must be positive"
        if need_index and P["i"] not in (1, 2):
            return "i must be 1 or 2"
        if theta:
            if (P["m"] * P["p"]).denominator != 1:
                return "m p must be an integer"
            if part == 1 and P["p"] < 0:
                return "part 1 needs p >= 0"
            if part == 2 and P["p"] > 0:
                return "part 2 needs p <= 0"
        return None
    return check


def _z2_grid(need_index=True, theta=False, part=None):
    def grid(g: GridSpec):
        out = []
        for m in g.m:
            for s in g.s:
                for p in g.p:
                    if theta and ((m * p).denominator != 1 or (part == 1 and p < 0) or (part == 2 and p > 0)):
                        continue
                    if need_index:
                        out += [{"m": m, "s": s, "p": p, "i": i} for i in (1, 2)]
                    else:
                        out.append({"m": m, "s": s, "p": p})
        return out
    return grid


def _swap_num(which):
    def f(P, x):
        m, s, p, i = P["m"], P["s"], P["p"], P["i"]
        tau, z1, z2, t = x.tau, x.z1, x.z2, x.t
        ci = _COMP_OF_INDEX[i]
        lhs = _phi(m, s, ci, tau, z1, z2 + p * tau, t)
        pre = e(-mpq(m * p) * (z1 + z2))
        if which == 1:
            rhs = pre * _phi(m, s, ci, tau, z1 - p * tau, z2, t)
        else:
            rhs = pre * _phi(m, s, _COMP_OF_INDEX[3 - i], tau, -z2, -z1 + p * tau, t)
        return lhs, rhs
    return f


def _swap_formal(which):
    def f(P, q_order):
        m, s, p, i = P["m"], P["s"], P["p"], P["i"]
        box = _box2(q_order)
        L, R = _Side(box), _Side(box)
        ci = _COMP_OF_INDEX[i]
        L.phi(m, s, ci, _TAU, _Z1, _Z2 + _TAU * p)
        pre = (_Z1 + _Z2) * (-m * p)
        if which == 1:
            R.phi(m, s, ci, _TAU, _Z1 - _TAU * p, _Z2, pre=pre)
        else:
            R.phi(m, s, _COMP_OF_INDEX[3 - i], _TAU, -_Z2, -_Z1 + _TAU * p, pre=pre)
        return L.series(), R.series()
    return f


_reg(id="Z2_PTAU_SWAP_1", group="recurrence",
     anchor="Phi_i(tau, z1, z2+p tau, t) = e^{-2 pi i m p(z1+z2)} Phi_i(tau, z1-p tau, z2, t)",
     scope="m in 1/2 N, s in 1/2 Z, p in Z, i in {1,2}", params=("m", "s", "p", "i"), family="phi",
     grid=_z2_grid(), check_scope=_z2_scope(), numeric=_swap_num(1), formal=_swap_formal(1))
_reg(id="Z2_PTAU_SWAP_2", group="recurrence",
     anchor="Phi_i(tau, z1, z2+p tau, t) = e^{-2 pi i m p(z1+z2)} Phi_j(tau, -z2, -z1+p tau, t), j != i",
     scope="m in 1/2 N, s in 1/2 Z, p in Z, i in {1,2}", params=("m", "s", "p", "i"), family="phi",
     grid=_z2_grid(), check_scope=_z2_scope(), numeric=_swap_num(2), formal=_swap_formal(2))


def _sshift_num(diff):
    def f(P, x):
        m, s, p = P["m"], P["s"], P["p"]
        comp = "diff" if diff else _COMP_OF_INDEX[P["i"]]
        lhs = _phi(m, s, comp, x.tau, x.z1, x.z2 + p * x.tau, x.t)
        rhs = e(-mpq(m * p) * x.z1) * _phi(m, s + m * p, comp, x.tau, x.z1, x.z2, x.t)
        return lhs, rhs
    return f


def _sshift_formal(diff):
    def f(P, q_order):
        m, s, p = P["m"], P["s"], P["p"]
        comp = "diff" if diff else _COMP_OF_INDEX[P["i"]]
        box = _box2(q_order)
        L, R = _Side(box), _Side(box)
        L.phi(m, s, comp, _TAU, _Z1, _Z2 + _TAU * p)
        R.phi(m, s + m * p, comp, pre=_Z1 * (-m * p))
        return L.series(), R.series()
    return f


_reg(id="Z2_PTAU_S_SHIFT_1", group="recurrence",
     anchor="Phi_i^{[m,s]}(tau, z1, z2+p tau, t) = e^{-2 pi i m p z1} Phi_i^{[m,s+mp]}(tau, z1, z2, t), i = 1, 2",
     scope="m in 1/2 N, s in 1/2 Z, p in Z, i in {1,2}", params=("m", "s", "p", "i"), family="phi",
     grid=_z2_grid(), check_scope=_z2_scope(), numeric=_sshift_num(False), formal=_sshift_formal(False))
_reg(id="Z2_PTAU_S_SHIFT_2", group="recurrence",
     anchor="Phi^{[m,s]}(tau, z1, z2+p tau, t) = e^{-2 pi i m p z1} Phi^{[m,s+mp]}(tau, z1, z2, t)",
     scope="m in 1/2 N, s in 1/2 Z, p in Z", params=("m", "s", "p"), family="phi",
     grid=_z2_grid(False), check_scope=_z2_scope(False), numeric=_sshift_num(True), formal=_sshift_formal(True))


def _z2theta_num(comp):
    def f(P, x):
        m, s, p = P["m"], P["s"], P["p"]
        j = int(m * p)
        lhs = _phi(m, s, comp, x.tau, x.z1, x.z2 + p * x.tau)
        sg = -1 if p >= 0 else 1
        rhs = e(-mpq(m * p) * x.z1) * (_phi(m, s, comp, x.tau, x.z1, x.z2)
                                       + sg * _corr(m, s, _shift_ks(j), comp, x.tau, x.z1, x.z2))
        return lhs, rhs
    return f


def _z2theta_formal(comp):
    def f(P, q_order):
        m, s, p = P["m"], P["s"], P["p"]
        j = int(m * p)
        box = _box2(q_order)
        L, R = _Side(box), _Side(box)
        L.phi(m, s, comp, _TAU, _Z1, _Z2 + _TAU * p)
        pre = _Z1 * (-m * p)
        R.phi(m, s, comp, pre=pre)
        R.corr(m, s, _shift_ks(j), comp, sign=-1 if p >= 0 else 1, pre=pre)
        return L.series(), R.series()
    return f


for _part in (1, 2):
    for _case, _comp in _CASES.items():
        _reg(id=f"Z2_PTAU_THETA_{_part}{_case}", group="recurrence",
             anchor=(f"Phi{'_1' if _comp == 'one' else '_2' if _comp == 'two' else ''}(tau, z1, z2+p tau, 0) as "
                     "e^{-2 pi i m p z1} times the unshifted function "
                     + ("minus the sum over k = 0..mp-1" if _part == 1 else "plus the sum over k = mp..-1")
                     + " of e^{pi i(s+k)(z1-z2)} q^{-(s+k)^2/4m} theta terms"),
             scope="m in 1/2 N, s in 1/2 Z, p in Z with mp in Z, " + ("p >= 0" if _part == 1 else "p <= 0"),
             params=("m", "s", "p"), family="phi",
             grid=_z2_grid(False, True, _part), check_scope=_z2_scope(False, True, _part),
             numeric=_z2theta_num(_comp), formal=_z2theta_formal(_comp),
             note="the printed exponential factor e^{-2pi impz_1} is read as e^{-2 pi i m p z1}")


# --------------------------------------------------------------------------
# D(2,1;a) lattice sum and its reductions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class D21APoint:
    r"""
    Coordinates `(\tau, z_1, z_2, z_3)` for the `D(2,1;a)` denominator
    sum with `a = -m/(m+1)`.

    EXAMPLES::

        >>> D21APoint.of(1, "0.9i", "0.1", "0.2", "0.3").a
        Fraction(-1, 2)
    """

    m: HalfInt
    tau: object
    z1: object
    z2: object
    z3: object

    @classmethod
    def of(cls, m, tau, z1, z2, z3) -> D21APoint:
        from .numeric import require_upper_half, to_mpc

        mh = HalfInt.of(m)
        if not mh.is_half_nat():
            raise UsageError(f"m must be a positive half-integer, got {mh}")
        t = to_mpc(tau)
        require_upper_half(t)
        return cls(mh, t, to_mpc(z1), to_mpc(z2), to_mpc(z3))

    @property
    def a(self) -> Fraction:
        m = self.m.value
        return -m / (m + 1)


def _d21a_zs(pt: D21APoint):
    return (pt.z1, pt.z2, pt.z3, -pt.z1 + pt.z2 + pt.z3)


def _denominator_bound(pt: D21APoint) -> float:
    # sup over d in Z of 1/|1 - e(z) q^d| over the four denominators
    y = float(ctx.im(pt.tau))
    best = 2.0
    for z in _d21a_zs(pt):
        base = -2 * math.pi * float(ctx.im(z))
        lo = math.floor((base - math.log(2)) / (2 * math.pi * y)) - 1
        hi = math.ceil((base + math.log(2)) / (2 * math.pi * y)) + 1
        for d in range(lo, hi + 1):
            den = abs(1 - e(z + d * pt.tau))
            if den < POLE_GUARD:
                raise PoleError("lattice-sum denominator close to zero")
            best = max(best, float(1 / den))
    return best


def d21a_lattice_tail(pt: D21APoint, J: int) -> float:
    r"""
    Upper bound for the part of the lattice sum with `\max(|j|,|k|) > J`.

    EXAMPLES::

        >>> pt = D21APoint.of(1, "0.9i", "0.11+0.02i", "-0.2", "0.31-0.05i")
        >>> d21a_lattice_tail(pt, 6) < 1e-15
        True
    """
    m = float(pt.m.value)
    r = math.exp(-2 * math.pi * float(ctx.im(pt.tau)))

    def full(c):
        return 1 + 2 * sum(r ** (c * n * n) for n in range(1, 200))

    def tail(c):
        return 2 * sum(r ** (c * n * n) for n in range(J + 1, J + 200))

    return 4 * _denominator_bound(pt) * (tail(1) * full(m) + tail(m) * full(1))


def d21a_lattice_sum(pt: D21APoint, J: Optional[int] = None):
    r"""
    The four double sums over `j, k \in \ZZ` (weights `q^{j^2+mk^2}`,
    denominators `1 - e^{2\pi i z}q^{j+k}` for `z = z_1, z_2, z_3,
    -z_1+z_2+z_3`), summed over `|j|, |k| \le J`.

    Without ``J`` the cutoff is the least one whose certified tail
    (:func:`d21a_lattice_tail`) is below `10^{-15}`.

    EXAMPLES::

        >>> pt = D21APoint.of(1, "0.05+0.9i", "0.11+0.02i", "-0.2+0.03i", "0.31-0.05i")
        >>> a = d21a_lattice_sum(pt)
        >>> abs(a - d21a_reduce_b(pt)) < 1e-20
        True
    """
    if J is None:
        J = 1
        while d21a_lattice_tail(pt, J) >= 1e-15:
            J += 1
            if J > 200:
                raise UsageError("lattice cutoff did not converge")
    else:
        _denominator_bound(pt)
    m = mpq(pt.m.value)
    tau, z1, z2, z3 = pt.tau, pt.z1, pt.z2, pt.z3
    a, b = z1 - z2, m * (z1 - z3)
    zs = _d21a_zs(pt)
    total = ctx.mpc(0)
    for j in range(-J, J + 1):
        for k in range(-J, J + 1):
            w = qpow(j * j + m * k * k, tau)
            d = j + k
            den = [1 - e(z + d * tau) for z in zs]
            total += w * (e(j * a + k * b) / den[0] - e(-j * a + k * b) / den[1]
                          - e(j * a - k * b) / den[2] + e(-j * a - k * b) / den[3])
    return total


def d21a_reduce_b(pt: D21APoint):
    r"""The lattice sum reduced to a `j`-sum of `\Phi^{[m,0]}` at `z_2`-shifts by `-2j\tau`."""
    m = pt.m.value
    tau, z1, z2, z3 = pt.tau, pt.z1, pt.z2, pt.z3
    M = mpq(m)

    def f(j):
        w = qpow((m + 1) * j * j, tau)
        return (w * e(j * (z1 - z2) - j * M * (z1 - z3)) * _phi(m, 0, "diff", tau, z1, -z3 - 2 * j * tau)
                - w * e(-j * (z1 - z2) - j * M * (z1 - z3)) * _phi(m, 0, "diff", tau, z2, z1 - z2 - z3 - 2 * j * tau))

    return _zsum(f)


def d21a_reduce_c(pt: D21APoint):
    r"""The lattice sum reduced to a `k`-sum of `\Phi^{[1,0]}`."""
    m = pt.m.value
    tau, z1, z2, z3 = pt.tau, pt.z1, pt.z2, pt.z3
    M = mpq(m)

    def f(k):
        w = qpow((m + 1) * k * k, tau)
        return (w * e(-k * (z1 - z2) + k * M * (z1 - z3)) * _phi(1, 0, "diff", tau, z1, -z2 - 2 * k * tau)
                - w * e(-k * (z1 - z2) - k * M * (z1 - z3)) * _phi(1, 0, "diff", tau, z3, z1 - z2 - z3 - 2 * k * tau))

    return _zsum(f)


def d21a_bridge_sides(pt: D21APoint):
    r"""
    The two sides of the bridge between `\Phi^{[m,0]}` and `\Phi^{[1,0]}`
    (`j`-sums weighted by `q^{(m+1)j^2}` at `z_2`-shifts `+2j\tau`).
    """
    m = pt.m.value
    tau, z1, z2, z3 = pt.tau, pt.z1, pt.z2, pt.z3
    M = mpq(m)

    def left(j):
        w = qpow((m + 1) * j * j, tau)
        return (w * e(-j * (z1 - z2) + j * M * (z1 - z3)) * _phi(m, 0, "diff", tau, z1, -z3 + 2 * j * tau)
                - w * e(j * (z1 - z2) + j * M * (z1 - z3)) * _phi(m, 0, "diff", tau, z2, z1 - z2 - z3 + 2 * j * tau))

    def right(j):
        w = qpow((m + 1) * j * j, tau)
        return (w * e(j * (z1 - z2) - j * M * (z1 - z3)) * _phi(1, 0, "diff", tau, z1, -z2 + 2 * j * tau)
                - w * e(j * (z1 - z2) + j * M * (z1 - z3)) * _phi(1, 0, "diff", tau, z3, z1 - z2 - z3 + 2 * j * tau))

    return _zsum(left), _zsum(right)


def _d21a_pt(P, x) -> D21APoint:
    return D21APoint(HalfInt.of(P["m"]), x.tau, x.z1, x.z2, x.z3)


def _m_scope(pred, text):
    def check(P):
        _need(P, "m")
        return None if pred(P["m"]) else f"m must be in {text}"
    return check


def _half_nat(m):
    return m > 0


def _half_nat_odd(m):
    return m > 0 and m.denominator == 2


def _m_grid(pred):
    return lambda g: [{"m": m} for m in g.m if pred(m)]


_reg(id="D21A_REDUCE_B", group="d21a",
     anchor="D(2,1;a) denominator lattice sum = j-sum of q^{(m+1)j^2}-weighted Phi^{[m,0]} at z2 shifted by -2j tau",
     scope="m in 1/2 N", params=("m",), family="d21a", grid=_m_grid(_half_nat),
     check_scope=_m_scope(_half_nat, "1/2 N"),
     numeric=lambda P, x: (d21a_lattice_sum(_d21a_pt(P, x)), d21a_reduce_b(_d21a_pt(P, x))))
_reg(id="D21A_REDUCE_C", group="d21a",
     anchor="D(2,1;a) denominator lattice sum = k-sum of q^{(m+1)k^2}-weighted Phi^{[1,0]} at z2 shifted by -2k tau",
     scope="m in 1/2 N", params=("m",), family="d21a", grid=_m_grid(_half_nat),
     check_scope=_m_scope(_half_nat, "1/2 N"),
     numeric=lambda P, x: (d21a_lattice_sum(_d21a_pt(P, x)), d21a_reduce_c(_d21a_pt(P, x))))


def _bridge_num(P, x):
    pt = _d21a_pt(P, x)
    lhs, rhs = d21a_bridge_sides(pt)
    lat = d21a_lattice_sum(pt)
    b, c = d21a_reduce_b(pt), d21a_reduce_c(pt)
    return lhs, rhs, {"lattice_vs_b": (lat, b), "b_vs_c": (b, c), "c_vs_lhs": (c, lhs), "lattice_vs_rhs": (lat, rhs)}


_reg(id="D21A_BRIDGE", group="d21a",
     anchor="bridge identity: q^{(m+1)j^2}-weighted j-sums of Phi^{[m,0]} equal those of Phi^{[1,0]}",
     scope="m in 1/2 N", params=("m",), family="d21a", grid=_m_grid(_half_nat),
     check_scope=_m_scope(_half_nat, "1/2 N"), numeric=_bridge_num,
     note="also reports the oracle chain lattice = reduction b = reduction c = both sides")


# --------------------------------------------------------------------------
# closed forms
# --------------------------------------------------------------------------

def p_poly(m, j: int, k: int, z1, z2, z3):
    r"""
    The four-term exponential combination `P^{[m]}_{j,k}(z_1,z_2,z_3)`:
    with `c = 2mj-k`, `A = z_1-2z_2-z_3`, `B = z_1+z_3`,

    .. MATH::

        e^{2\pi ij(z_1-z_2)}(e^{\pi icA} - e^{\pi icB})
        + e^{-2\pi ij(z_1-z_2)}(e^{-\pi icA} - e^{-\pi icB}).

    EXAMPLES::

        >>> from mocktheta.numeric import to_mpc
        >>> z1, z3 = to_mpc("0.13+0.02i"), to_mpc("-0.21")
        >>> abs(p_poly(1, 1, 2, z1, z1 + 0.5, z3)) < 1e-25
        True
    """
    m = as_fraction(m)
    c = mpq(2 * m * j - k)
    a = z1 - 2 * z2 - z3
    b = z1 + z3
    u = e(j * (z1 - z2))
    return u * (e(c * a / 2) - e(c * b / 2)) + (e(-c * a / 2) - e(-c * b / 2)) / u


def _prop32_num(P, x):
    m = P["m"]
    M = mpq(m)
    tau, z1, z2, z3 = x.tau, x.z1, x.z2, x.z3
    N = m + 1
    NM = mpq(N)
    lhs = (_th(0, N, tau, ((z1 - z2) + M * (z1 + z3)) / NM) * _phi(m, 0, "diff", tau, z1, -z3)
           - _th(0, N, tau, ((z1 - z2) + M * (z1 - 2 * z2 - z3)) / NM) * _phi(m, 0, "diff", tau, z2, z1 - z2 - z3))
    th = {}

    def block(j):
        tot = ctx.mpc(0)
        for k in range(1, int(2 * m * j) + 1):
            if k not in th:
                th[k] = _thd(k, m, tau, z1 - z3)
            tot += qpow(N * j * j - F(k * k) / (4 * m), tau) * p_poly(m, j, k, z1, z2, z3) * th[k]
        return tot

    lhs += outer_sum(block)
    eta3 = dedekind_eta(tau) ** 3
    v12 = mumford_vartheta((1, 1), tau, z1 - z2)
    rhs = (ctx.j * _th(0, N, tau, ((z1 + z2) + M * (z1 - z3)) / NM) * eta3 * v12 / (_v11(tau, z1) * _v11(tau, z2))
           + ctx.j * _th(0, N, tau, ((z1 - z2 - 2 * z3) + M * (z1 - z3)) / NM) * eta3 * v12
           / (_v11(tau, z3) * _v11(tau, z1 - z2 - z3)))
    return lhs, rhs


_reg(id="PROP32", group="closed",
     anchor=("theta_{0,m+1}-weighted difference of Phi^{[m,0]}(tau, z1, -z3) and Phi^{[m,0]}(tau, z2, z1-z2-z3) "
             "plus the P^{[m]}_{j,k} double sum equals two eta^3 vartheta_11 quotients"),
     scope="m in 1/2 N", params=("m",), family="d21a", grid=_m_grid(_half_nat),
     check_scope=_m_scope(_half_nat, "1/2 N"), numeric=_prop32_num)


def _prop33_num(P, x):
    m = P["m"]
    M = mpq(m)
    tau, z1, z3 = x.tau, x.z1, x.z3
    N = m + 1
    NM = mpq(N)
    h = mpq(_HALF)
    lhs = _th(0, N, tau, (-h + M * (z1 + z3)) / NM) * (_phi(m, 0, "diff", tau, z1, -z3)
                                                       - _phi(m, 0, "diff", tau, z1 + h, -z3 - h))

    def v1110(z):
        v = _v11(tau, z) * mumford_vartheta((1, 0), tau, z)
        return v

    rhs = 2 * ctx.j * dedekind_eta(tau) ** 2 * dedekind_eta(2 * tau) ** 2 * (
        -_th(0, N, tau, (h + z1 + z3) / NM + z1 - z3) / v1110(z1)
        + _th(0, N, tau, (h + z1 + z3) / NM - z1 + z3) / v1110(z3))
    ks = range(1, int(m), 2)
    th = {k: _thd(k, m, tau, z1 - z3) for k in ks}
    w = z1 + z3

    def cosh(a):
        v = e(mpq(a) * w / 2)
        return v + 1 / v

    def block(j):
        tot = ctx.mpc(0)
        for k in ks:
            part = ctx.mpc(0)
            for r in range(1, j + 1):
                part += qpow(N * j * j - F((2 * m * (j - r) + k) ** 2) / (4 * m), tau) * cosh(2 * m * r - k)
            for r in range(0, j):
                part -= qpow(N * j * j - F((2 * m * (j - r) - k) ** 2) / (4 * m), tau) * cosh(2 * m * r + k)
            tot += part * th[k]
        return -tot if j % 2 else tot

    rhs += 2 * outer_sum(block)
    return lhs, rhs


_reg(id="PROP33", group="closed",
     anchor=("theta_{0,m+1}((-1/2 + m(z1+z3))/(m+1)) times Phi^{[m,0]}(tau, z1, -z3) minus its half-period shift "
             "equals 2i eta(tau)^2 eta(2tau)^2 quotients plus odd-k theta-difference triple sums"),
     scope="m in N", params=("m",), family="d21a", grid=_m_grid(_is_nat),
     check_scope=_m_scope(_is_nat, "N"), numeric=_prop33_num)


def _cor34_num(alternating):
    def f(P, x):
        m, s = P["m"], P["s"]
        M = mpq(m)
        tau, z1, z2 = x.tau, x.z1, x.z2
        N = 2 * m + 1
        NM = mpq(N)
        d, w = z1 - z2, z1 + z2
        if alternating:
            pre = _th(0, N, tau, 2 * M * d / NM, True)
            num1 = _th(0, N, tau, d / NM + w, True)
            num2 = _th(0, N, tau, d / NM - w, True)
        else:
            h = mpq(_HALF)
            pre = _th(0, N, tau, (-h + 2 * M * d) / NM)
            num1 = _th(0, N, tau, (h + d) / NM + w)
            num2 = _th(0, N, tau, (h + d) / NM - w)
        _v11(2 * tau, 2 * z1)
        _v11(2 * tau, 2 * z2)
        lhs = pre * _phi(m, s, "diff", 2 * tau, 2 * z1, 2 * z2)
        rhs = eta_vartheta_block(tau, z1, z2, num1, num2) + half_odd_triple_sum(m, tau, z1, z2)
        corr = ctx.mpc(0)
        for k in range(int(s - F(3, 2)) + 1):
            corr += (e(mpq(1 + 2 * k) * d / 2) * qpow(-F((1 + 2 * k) ** 2) / (8 * m), tau)
                     * _thd(k + _HALF, m, 2 * tau, 2 * w))
        rhs -= pre * corr
        return lhs, rhs
    return f


def _cor34_scope(only_half):
    def check(P):
        _need(P, "m", "s")
        if P["m"] <= 0:
            return "m must be positive"
        if only_half and P["s"] != _HALF:
            return "s must be 1/2"
        if not (_is_half_odd(P["s"]) and P["s"] > 0):
            return "s must be a positive half-odd integer"
        return None
    return check


def _cor34_grid(only_half):
    return lambda g: [{"m": m, "s": s} for m in g.m for s in g.s
                      if _is_half_odd(s) and s > 0 and (s == _HALF or not only_half)]


_COR34_RHS = ("-i eta(2tau)^3 times theta quotients over vartheta_11(2tau, 2z_i) plus odd-k theta-difference "
              "triple sums")
_reg(id="COR34_1", group="closed",
     anchor="theta_{0,2m+1}((-1/2+2m(z1-z2))/(2m+1)) Phi^{[m,1/2]}(2tau, 2z1, 2z2, 0) = " + _COR34_RHS,
     scope="m in 1/2 N, s = 1/2", params=("m", "s"), family="phi", grid=_cor34_grid(True),
     check_scope=_cor34_scope(True), numeric=_cor34_num(False))
_reg(id="COR34_2", group="closed",
     anchor=("the same for Phi^{[m,s]}, s in 1/2 N_odd, with the prefactor times the finite "
             "[theta_{k+1/2,m}-theta_{-(k+1/2),m}](2tau, 2z1+2z2) sum subtracted"),
     scope="m in 1/2 N, s in 1/2 N_odd", params=("m", "s"), family="phi", grid=_cor34_grid(False),
     check_scope=_cor34_scope(False), numeric=_cor34_num(False))
_reg(id="COR34_MINUS", group="closed",
     anchor=("variant with theta^(-)_{0,2m+1}(2m(z1-z2)/(2m+1)) as prefactor and theta^(-) numerators "
             "without the 1/2 shifts"),
     scope="m in 1/2 N, s in 1/2 N_odd", params=("m", "s"), family="phi", grid=_cor34_grid(False),
     check_scope=_cor34_scope(False), numeric=_cor34_num(True),
     note="stated for s = 1/2; checked also for larger s with the same finite correction sum")


def _lem35_num(P, x):
    m = P["m"]
    tau, z1, z2 = x.tau, x.z1, x.z2
    lhs = _phi(m, 0, "diff", tau, z1, z2)
    rhs = e(mpq(m) * z1) * _phi(m, _HALF, "diff", tau, z1, z2 + tau)
    for k in range(1, int(m - _HALF) + 1):
        rhs += e(k * (z1 - z2) / 2) * qpow(-F(k * k) / (4 * m), tau) * _thd(k, m, tau, z1 + z2)
    return lhs, rhs


def _lem35_formal(P, q_order):
    m = P["m"]
    box = _box2(q_order)
    L, R = _Side(box), _Side(box)
    L.phi(m, 0, "diff")
    R.phi(m, _HALF, "diff", _TAU, _Z1, _Z2 + _TAU, pre=_Z1 * m)
    for k in range(1, int(m - _HALF) + 1):
        pre = (_Z1 - _Z2) * F(k, 2)
        qq = -F(k * k) / (4 * m)
        R.theta(k, m, _TAU, _Z1 + _Z2, pre=pre, q=qq)
        R.theta(-k, m, _TAU, _Z1 + _Z2, pre=pre, q=qq, coeff=-1)
    return L.series(), R.series()


_reg(id="LEM35", group="closed",
     anchor=("Phi^{[m,0]} = e^{2 pi i m z1} Phi^{[m,1/2]}(tau, z1, z2+tau, 0) plus "
             "sum_{k=1}^{m-1/2} e^{pi i k(z1-z2)} q^{-k^2/4m} theta differences"),
     scope="m in 1/2 N_odd", params=("m",), family="phi", grid=_m_grid(_half_nat_odd),
     check_scope=_m_scope(_half_nat_odd, "1/2 N_odd"), numeric=_lem35_num, formal=_lem35_formal)


def _prop36_num(P, x):
    m = P["m"]
    M = mpq(m)
    tau, z1, z2 = x.tau, x.z1, x.z2
    N = 2 * m + 1
    NM = mpq(N)
    d, w = z1 - z2, z1 + z2
    pre = _th(-2 * m, N, tau, 2 * M * d / NM, True)
    _v11(2 * tau, 2 * z1)
    _v11(2 * tau, 2 * z2)
    lhs = pre * _phi(m, 0, "diff", 2 * tau, 2 * z1, 2 * z2)
    num1 = _th(2 * m, N, tau, d / NM + w, True)
    num2 = _th(2 * m, N, tau, d / NM - w, True)
    rhs = eta_vartheta_block(tau, z1, z2, num1, num2) + odd_zero_triple_sum(m, tau, z1, z2)
    tot = ctx.mpc(0)
    for k in range(1, int(m - _HALF) + 1):
        tot += e(k * d) * qpow(-F(k * k) / (2 * m), tau) * _thd(k, m, 2 * tau, 2 * w)
    rhs += pre * tot
    return lhs, rhs


_reg(id="PROP36", group="closed",
     anchor=("theta^(-)_{-2m,2m+1}(2m(z1-z2)/(2m+1)) Phi^{[m,0]}(2tau, 2z1, 2z2, 0) as theta^(-) quotients, "
             "even-k triple sums and a finite theta-difference sum"),
     scope="m in 1/2 N_odd", params=("m",), family="phi", grid=_m_grid(_half_nat_odd),
     check_scope=_m_scope(_half_nat_odd, "1/2 N_odd"), numeric=_prop36_num)


def _dbl_num(P, x):
    m = P["m"]
    tau, z1, z2, t = x.tau, x.z1, x.z2, x.t
    lhs = _phi(2 * m, 0, "diff", tau, z1, z2, t)
    rhs = (_phi(m, 0, "diff", 2 * tau, 2 * z1, 2 * z2, 2 * t)
           + _phi(m, _HALF, "diff", 2 * tau, 2 * z1, 2 * z2, 2 * t))
    return lhs, rhs


def _dbl_formal(P, q_order):
    m = P["m"]
    box = _box2(q_order)
    L, R = _Side(box), _Side(box)
    L.phi(2 * m, 0, "diff")
    R.phi(m, 0, "diff", _TAU * 2, _Z1 * 2, _Z2 * 2)
    R.phi(m, _HALF, "diff", _TAU * 2, _Z1 * 2, _Z2 * 2)
    return L.series(), R.series()


_reg(id="DOUBLING", group="closed",
     anchor="Phi^{[2m,0]}(tau, z1, z2, t) = Phi^{[m,0]}(2tau, 2z1, 2z2, 2t) + Phi^{[m,1/2]}(2tau, 2z1, 2z2, 2t)",
     scope="m in 1/2 N", params=("m",), family="phi", grid=_m_grid(_half_nat),
     check_scope=_m_scope(_half_nat, "1/2 N"), numeric=_dbl_num, formal=_dbl_formal,
     note="covers both doubling steps of the resolution (odd and even m)")


def _plan_num(P, x):
    m, s = P["m"], P["s"]
    pt = (x.tau, x.z1, x.z2, x.t)
    lhs = phi_direct(PhiSpec.of(m, s), pt)
    rhs = phi_eval_plan(phi_resolve(m, s), pt)
    return lhs, rhs


def _plan_scope(P):
    _need(P, "m", "s")
    return None if P["m"] > 0 else "m must be positive"


_reg(id="PLAN", group="plan",
     anchor="the resolution plan (s-shift, closed forms, index doubling) reproduces Phi^{[m,s]}",
     scope="m in 1/2 N, s in 1/2 Z", params=("m", "s"), family="phi",
     grid=lambda g: [{"m": m, "s": s} for m in g.plan_m for s in g.plan_s],
     check_scope=_plan_scope, numeric=_plan_num)


def _swapw_scope(P):
    _need(P, "m", "s")
    return None if P["m"] > 0 else "m must be positive"


def _swapw_formal(P, q_order):
    m, s = P["m"], P["s"]
    box = _box2(q_order)
    L, R = _Side(box), _Side(box)
    L.phi(m, s, "one")
    R.phi(m, s, "two", _TAU, -_Z2, -_Z1)
    return L.series(), R.series()


_reg(id="SWAP_W2022", group="closed",
     anchor="Phi_1(tau, z1, z2, t) = Phi_2(tau, -z2, -z1, t)",
     scope="m in 1/2 N, s in 1/2 Z", params=("m", "s"), family="phi",
     grid=lambda g: [{"m": m, "s": s} for m in g.m for s in g.s], check_scope=_swapw_scope,
     numeric=lambda P, x: (_phi(P["m"], P["s"], "one", x.tau, x.z1, x.z2, x.t),
                           _phi(P["m"], P["s"], "two", x.tau, -x.z2, -x.z1, x.t)),
     formal=_swapw_formal)


def _phi10_num(P, x):
    tau, z1, z2 = x.tau, x.z1, x.z2
    lhs = _phi(1, 0, "diff", tau, z1, z2)
    rhs = -ctx.j * dedekind_eta(tau) ** 3 * mumford_vartheta((1, 1), tau, z1 + z2) / (_v11(tau, z1) * _v11(tau, z2))
    return lhs, rhs


_reg(id="PHI10_CLOSED", group="closed",
     anchor="Phi^{[1,0]}(tau, z1, z2, 0) = -i eta^3 vartheta_11(z1+z2)/(vartheta_11(z1) vartheta_11(z2))",
     scope="no parameters", params=(), family="phi", grid=lambda g: [{}], check_scope=_scope_all,
     numeric=_phi10_num)


# --------------------------------------------------------------------------
# theta building blocks
# --------------------------------------------------------------------------

def _form_scope(fid):
    form = SPECIAL_FORMS[fid]

    def check(P):
        if form.scope != "none":
            _need(P, "m")
        if form.signed:
            _need(P, "sign")
            if P["sign"] not in (1, -1):
                return "sign must be +1 or -1"
        try:
            check_form_scope(fid, P.get("m"))
        except ScopeError as err:
            return str(err)
        return None
    return check


def _form_grid(fid):
    form = SPECIAL_FORMS[fid]

    def grid(g: GridSpec):
        signs = (1, -1) if form.signed else (None,)
        if form.scope == "none":
            ms = [None]
        else:
            ms = []
            for m in g.m:
                try:
                    check_form_scope(fid, m)
                    ms.append(m)
                except ScopeError:
                    pass
        out = []
        for m in ms:
            for sg in signs:
                P = {}
                if m is not None:
                    P["m"] = m
                if sg is not None:
                    P["sign"] = sg
                out.append(P)
        return out
    return grid


def _form_num(fid):
    form = SPECIAL_FORMS[fid]

    def f(P, x):
        m = P.get("m")
        return form.sides(m if m is not None else F(1), x.tau, x.z1, x.z2, P.get("sign", 1))
    return f


for _fid, _form in SPECIAL_FORMS.items():
    _reg(id=_fid, group="building", anchor=_form.description,
         scope=_form.scope + (", sign +-1" if _form.signed else ""),
         params=(("m",) if _form.scope != "none" else ()) + (("sign",) if _form.signed else ()),
         family="theta", grid=_form_grid(_fid), check_scope=_form_scope(_fid), numeric=_form_num(_fid))


def _vq_scope(P):
    _need(P, "a", "b", "n")
    if P["a"] not in (0, 1) or P["b"] not in (0, 1):
        return "a and b must be 0 or 1"
    return None


def _vq_num(P, x):
    a, b, n = P["a"], P["b"], P["n"]
    tau, z = x.tau, x.z1
    lhs = mumford_vartheta((a, b), tau, z + n * tau)
    rhs = (-1) ** (n * b) * qpow(-F(n * n, 2), tau) * e(-n * z) * mumford_vartheta((a, b), tau, z)
    return lhs, rhs


_reg(id="VARTHETA_QUASI_PERIOD", group="building",
     anchor="vartheta_ab(tau, z+n tau) = (-1)^{nb} q^{-n^2/2} e^{-2 pi i n z} vartheta_ab(tau, z)",
     scope="a, b in {0,1}, n in Z", params=("a", "b", "n"), family="theta",
     grid=lambda g: [{"a": a, "b": b, "n": n} for a in (0, 1) for b in (0, 1) for n in g.p],
     check_scope=_vq_scope, numeric=_vq_num,
     note="the printed factor e^{-2pi inz} is read as e^{-2 pi i n z}")
_reg(id="VARTHETA11_AT_HALF", group="building",
     anchor="vartheta_11(tau, -1/2) = 2 eta(2tau)^2/eta(tau)",
     scope="no parameters", params=(), family="theta", grid=lambda g: [{}], check_scope=_scope_all,
     numeric=lambda P, x: (mumford_vartheta((1, 1), x.tau, -mpq(_HALF)),
                           2 * dedekind_eta(2 * x.tau) ** 2 / dedekind_eta(x.tau)))
_reg(id="VARTHETA_DUPLICATION", group="building",
     anchor="vartheta_11(tau, z) vartheta_10(tau, z) = eta(tau)^2/eta(2tau) vartheta_11(2tau, 2z)",
     scope="no parameters", params=(), family="theta", grid=lambda g: [{}], check_scope=_scope_all,
     numeric=lambda P, x: (mumford_vartheta((1, 1), x.tau, x.z1) * mumford_vartheta((1, 0), x.tau, x.z1),
                           dedekind_eta(x.tau) ** 2 / dedekind_eta(2 * x.tau)
                           * mumford_vartheta((1, 1), 2 * x.tau, 2 * x.z1)))


# --------------------------------------------------------------------------
# characters
# --------------------------------------------------------------------------

def _label(P) -> ModuleLabel:
    return ModuleLabel(int(P["m"]), int(P.get("m2", 0)))


def _char_scope(m2_rule):
    def check(P):
        _need(P, "m", *(("m2",) if m2_rule != "zero" and m2_rule != "one" else ()))
        if not _is_nat(P["m"]):
            return "m must be a positive integer"
        m = int(P["m"])
        if m2_rule == "one" and m % 2 == 0:
            return "the m2 = 1 closed form needs odd m"
        if m2_rule in ("even", "odd", "any"):
            m2 = P["m2"]
            if not 0 <= m2 <= m:
                return "need 0 <= m2 <= m"
            if m2_rule == "even" and (m2 % 2 or m2 < 2):
                return "m2 must be even and at least 2"
            if m2_rule == "odd" and (m2 % 2 == 0 or m2 < 2):
                return "m2 must be odd and at least 3"
        return None
    return check


def _char_grid(m2_rule):
    def grid(g: GridSpec):
        out = []
        for m in g.char_m:
            if m2_rule == "zero":
                out.append({"m": F(m)})
            elif m2_rule == "one":
                if m % 2:
                    out.append({"m": F(m)})
            else:
                for m2 in range(m + 1):
                    if m2_rule == "even" and (m2 % 2 or m2 < 2):
                        continue
                    if m2_rule == "odd" and (m2 % 2 == 0 or m2 < 2):
                        continue
                    out.append({"m": F(m), "m2": m2})
        return out
    return grid


def _char_closed_num(kind, m2):
    def f(P, x):
        lab = ModuleLabel(int(P["m"]), m2)
        return (char_closed(lab, kind, x.tau, x.z1),
                char_via_definition(lab, kind, x.tau, x.z1, guard=POLE_GUARD))
    return f


def _char_diff_num(kind):
    def f(P, x):
        m, m2 = int(P["m"]), P["m2"]
        lab = ModuleLabel(m, m2)
        lhs = (char_via_definition(lab, kind, x.tau, x.z1, guard=POLE_GUARD)
               - char_via_definition(ModuleLabel(m, m2 % 2), kind, x.tau, x.z1, guard=POLE_GUARD))
        return lhs, char_diff_correction(lab, kind, x.tau, x.z1)
    return f


def _char_general_num(kind):
    def f(P, x):
        lab = _label(P)
        return (char_general(lab, kind, x.tau, x.z1),
                char_via_definition(lab, kind, x.tau, x.z1, guard=POLE_GUARD))
    return f


for _kind in ("plus", "minus"):
    _what = "character" if _kind == "plus" else "supercharacter"
    _reg(id=f"CHAR_M2_0_{_kind}", group="characters",
         anchor=f"closed theta/eta form of the m2 = 0 {_what} equals its Appell-Lerch definition",
         scope="m in N", params=("m",), family="char", grid=_char_grid("zero"), check_scope=_char_scope("zero"),
         numeric=_char_closed_num(_kind, 0),
         note="the outer exponent of the triple sums is j^2 (the printed (m+1)j^2 fails the cross-check)")
    _reg(id=f"CHAR_M2_1_{_kind}", group="characters",
         anchor=f"closed theta/eta form of the m2 = 1 {_what} (m odd) equals its Appell-Lerch definition",
         scope="m in N_odd", params=("m",), family="char", grid=_char_grid("one"), check_scope=_char_scope("one"),
         numeric=_char_closed_num(_kind, 1),
         note=("extra e^{-pi i m/2} on the leading term; the two (j, r) sums enter as A - B"
               if _kind == "plus" else
               "vartheta_01 (not vartheta_00) in the numerator; the two (j, r) sums enter as A - B"))
    for _par in ("even", "odd"):
        _reg(id=f"CHAR_DIFF_{_par}_{_kind}", group="characters",
             anchor=(f"difference of {_what}s for m2 and m2 mod 2 ({_par} m2) as a finite sum of "
                     "[theta_{a,m/2}-theta_{-a,m/2}](2tau, 2z)"),
             scope=f"m in N, {_par} m2 with 2 <= m2 <= m", params=("m", "m2"), family="char",
             grid=_char_grid(_par), check_scope=_char_scope(_par), numeric=_char_diff_num(_kind),
             note=("prefactor " + ("+i" if (_par, _kind) == ("even", "plus") else "-1")
                   + " (the sign that agrees with direct summation)"))
    _reg(id=f"CHAR_GENERAL_{_kind}", group="characters",
         anchor=f"{_what} from closed forms plus the difference sums equals its Appell-Lerch definition",
         scope="m in N, 0 <= m2 <= m", params=("m", "m2"), family="char", grid=_char_grid("any"),
         check_scope=_char_scope("any"), numeric=_char_general_num(_kind),
         note="for even m and odd m2 the base case m2 = 1 is evaluated through the resolution plan")


REGISTRY_SIZE = len(REGISTRY)
GROUPS = ("recurrence", "d21a", "closed", "plan", "building", "characters")


def list_identities() -> list[dict]:
    r"""
    Catalogue of all registered identities in registry order.

    EXAMPLES::

        >>> cat = list_identities()
        >>> "D21A_BRIDGE" in [c["id"] for c in cat], len(cat) == REGISTRY_SIZE
        (True, True)
    """
    return [d.catalogue_entry() for d in REGISTRY.values()]


# --------------------------------------------------------------------------
# checking
# --------------------------------------------------------------------------

def _lookup(identity_id: str) -> IdentityDef:
    d = REGISTRY.get(identity_id)
    if d is None:
        raise UsageError(f"unknown identity {identity_id!r}")
    return d


def check_identity(identity_id: str, params: Optional[dict] = None, mode: str = "numeric", samples: int = 10,
                   seed: int = 0, tol: float = 1e-8, q_order: int = 6) -> IdentityReport:
    r"""
    Check one identity at one parameter choice.

    INPUT:

    - ``identity_id`` -- a key of :data:`REGISTRY`
    - ``params`` -- dict (half-integers may be given as ``"3/2"``)
    - ``mode`` -- ``"numeric"`` (``samples`` admissible points,
      pass iff max residual < ``tol``) or ``"formal"`` (exact term maps
      for `q`-exponents below ``q_order``)

    OUTPUT: :class:`IdentityReport`

    EXAMPLES::

        >>> r = check_identity("SHIFT_S_POS", {"m": 1, "s": "1/2", "j": 0, "case": "i"}, samples=2)
        >>> r.max_residual
        0.0
        >>> check_identity("PROP33", {"m": "1/2"})
        Traceback (most recent call last):
        ...
        mocktheta.errors.ScopeError: PROP33: m must be in N
    """
    d = _lookup(identity_id)
    P = _normalize(params)
    why = d.check_scope(P)
    if why:
        raise ScopeError(f"{identity_id}: {why}")
    if mode == "formal":
        if d.formal is None:
            raise UsageError(f"{identity_id} has no formal mode (its sides involve series division)")
        lhs, rhs = d.formal(P, q_order)
        ok, bad = series_equal_up_to(lhs, rhs)
        return IdentityReport(identity_id, P, "formal", seed, tol, ok, q_order=q_order, terms=len(lhs),
                              mismatch=None if ok else str(bad))
    if mode != "numeric":
        raise UsageError(f"mode must be numeric or formal, got {mode!r}")
    if samples < 1:
        raise UsageError("samples must be positive")
    report = IdentityReport(identity_id, P, "numeric", seed, tol, False)
    worst_extra: dict[str, float] = {}
    stream = sample_points(d.family, seed)
    tries = 0
    while len(report.residuals) < samples:
        x = next(stream)
        tries += 1
        if tries > samples + _MAX_RESAMPLE:
            raise DomainError(f"{identity_id}: too many rejected sample points")
        try:
            out = d.numeric(P, x)
        except DomainError:
            report.resampled += 1
            continue
        lhs, rhs = out[0], out[1]
        report.residuals.append(residual(lhs, rhs))
        report.points.append(x.to_json(d.family))
        if len(out) > 2:
            for name, (a, b) in out[2].items():
                worst_extra[name] = max(worst_extra.get(name, 0.0), residual(a, b))
    report.max_residual = max(report.residuals)
    report.extras = worst_extra
    report.passed = report.max_residual < tol and all(v < tol for v in worst_extra.values())
    return report


def _select(selector: str) -> list[IdentityDef]:
    if selector in ("all", "", None):
        return list(REGISTRY.values())
    out = []
    for part in selector.split(","):
        part = part.strip()
        if part in GROUPS:
            out += [d for d in REGISTRY.values() if d.group == part]
        elif part.endswith("*"):
            hits = [d for d in REGISTRY.values() if d.id.startswith(part[:-1])]
            if not hits:
                raise UsageError(f"no identity matches {part!r}")
            out += hits
        else:
            out.append(_lookup(part))
    chosen = {d.id for d in out}
    return [d for d in REGISTRY.values() if d.id in chosen]


def _run_task(task):
    identity_id, params, mode, samples, seed, tol, q_order = task
    try:
        return check_identity(identity_id, params, mode, samples, seed, tol, q_order)
    except MockThetaError as err:
        return IdentityReport(identity_id, _normalize(params), mode, seed, tol, False,
                              error=f"{type(err).__name__}: {err}")


def _tasks(selector, grid, samples, seed, tol, mode, q_order):
    modes = ("numeric", "formal") if mode == "both" else (mode,)
    for d in _select(selector):
        for P in d.grid(grid):
            for md in modes:
                if md == "formal" and d.formal is None:
                    continue
                yield (d.id, P, md, samples, seed, tol, q_order)


def run_suite(selector: str = "all", grid: Optional[GridSpec] = None, samples: int = 10, seed: int = 0,
              tol: float = 1e-8, mode: str = "numeric", q_order: int = 6, workers: int = 1) -> Iterable[IdentityReport]:
    r"""
    Check every selected identity over its part of ``grid``.

    ``selector`` is ``"all"``, a group name, an id, an id prefix ending
    in ``*``, or a comma-separated list of those.  ``mode`` may also be
    ``"both"`` (formal checks run only where available).  Reports are
    yielded in catalogue order whatever ``workers`` is.

    EXAMPLES::

        >>> reps = list(run_suite("PHI10_CLOSED,VARTHETA11_AT_HALF", samples=2))
        >>> [(r.id, r.passed) for r in reps]
        [('PHI10_CLOSED', True), ('VARTHETA11_AT_HALF', True)]
    """
    if mode not in ("numeric", "formal", "both"):
        raise UsageError(f"mode must be numeric, formal or both, got {mode!r}")
    grid = grid or GridSpec()
    tasks = list(_tasks(selector, grid, samples, seed, tol, mode, q_order))
    if workers <= 1:
        for t in tasks:
            yield _run_task(t)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(_run_task, tasks, chunksize=4)


def suite_summary(reports: Iterable[IdentityReport]) -> dict:
    r"""
    Counts and the worst residual per identity (catalogue order).

    EXAMPLES::

        >>> s = suite_summary(run_suite("PHI10_CLOSED", samples=2))
        >>> s["checks"], s["failed"], list(s["identities"])
        (1, 0, ['PHI10_CLOSED'])
    """
    per: dict[str, dict] = {}
    n = failed = 0
    for r in reports:
        n += 1
        failed += not r.passed
        ent = per.setdefault(r.id, {"checks": 0, "failed": 0, "worst_residual": 0.0, "errors": 0})
        ent["checks"] += 1
        ent["failed"] += not r.passed
        ent["errors"] += r.error is not None
        if r.max_residual is not None:
            ent["worst_residual"] = max(ent["worst_residual"], r.max_residual)
        if r.mode == "formal" and not r.passed:
            ent["formal_mismatch"] = r.mismatch
    order = {k: i for i, k in enumerate(REGISTRY)}
    per = dict(sorted(per.items(), key=lambda kv: order[kv[0]]))
    return {"summary": True, "checks": n, "passed": n - failed, "failed": failed, "identities": per}
