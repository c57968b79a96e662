r"""
Command-line interface: ``eval``, ``expand``, ``verify`` and ``character``.

Every command writes line-delimited JSON to stdout (or ``--out``).
Exit codes: 0 when everything passed, 1 when some identity failed,
2 on usage or domain errors (a JSON error record is still emitted).

EXAMPLES::

    >>> from mocktheta.cli import main
    >>> main(["eval", "eta", "--tau", "0.9i"])
    {"function": "eta", "params": {}, "point": {"tau": "0.9i"}, "value": {"re": "0.78730597036282409987", "im": "0.0"}}
    0
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import contextmanager
from fractions import Fraction
from typing import Iterator, Optional, TextIO

from . import __version__
from .appell import EvalPoint, PhiSpec, phi_direct, phi_eval_plan, phi_formal, phi_resolve
from .characters import CharKind, ModuleLabel, char_expand, char_general, char_via_definition
from .coefficients import as_fraction
from .errors import DomainError, UsageError
from .identities import GridSpec, check_identity, list_identities, run_suite, suite_summary
from .numeric import ctx, residual, to_mpc
from .series import TruncationBox
from .thetas import ThetaIndex, dedekind_eta, dedekind_eta_series, mumford_vartheta, mumford_vartheta_series, \
    theta_km, theta_km_series

__all__ = ["build_parser", "main"]

WORKERS_ENV = "MOCKTHETA_WORKERS"
_FUNCTIONS = ("phi", "theta", "vartheta", "eta")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage().strip()}")


def _rational(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError, UsageError) as err:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from err


def _rational_list(text: str) -> tuple:
    return tuple(_rational(t) for t in text.split(",") if t)


def _int_list(text: str) -> tuple:
    return tuple(int(_rational(t)) for t in text.split(",") if t)


def _window(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"window must look like lo:hi, got {text!r}")
    return _rational(parts[0]), _rational(parts[1])


def _cval(z) -> dict:
    return {"re": ctx.nstr(ctx.re(z), 20), "im": ctx.nstr(ctx.im(z), 20)}


def build_parser() -> argparse.ArgumentParser:
    r"""
    The argument parser (exposed for documentation and tests).

    EXAMPLES::

        >>> ns = build_parser().parse_args(["verify", "--suite", "all", "--tol", "1e-8", "--seed", "42"])
        >>> ns.samples, ns.q_order, ns.mode, ns.seed
        (10, 6, 'numeric', 42)
    """
    p = _Parser(prog="mocktheta", description="Appell-Lerch sums, theta functions and their identities.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--out", help="write the report stream to this file instead of stdout")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def function_flags(q):
        q.add_argument("function", choices=_FUNCTIONS)
        q.add_argument("--m", type=_rational, help="index m (phi: half-integer, theta: positive)")
        q.add_argument("--s", type=_rational, help="phi shift s (half-integer)")
        q.add_argument("--k", type=_rational, help="theta index k")
        q.add_argument("--component", default="diff", choices=("one", "two", "diff"))
        q.add_argument("--alternating", action="store_true", help="theta with alternating signs")
        q.add_argument("--ab", default="11", choices=("00", "01", "10", "11"), help="vartheta characteristics")

    ev = sub.add_parser("eval", help="evaluate a function at a point")
    function_flags(ev)
    ev.add_argument("--tau", required=True)
    ev.add_argument("--z1", "--z", dest="z1", default="0")
    ev.add_argument("--z2", default="0")
    ev.add_argument("--t", default="0")
    ev.add_argument("--route", default="direct", choices=("direct", "plan"), help="phi evaluation route")
    ev.add_argument("--guard", type=float, default=1e-10, help="pole distance guard for phi")

    ex = sub.add_parser("expand", help="exact expansion inside a truncation box")
    function_flags(ex)
    ex.add_argument("--q-order", type=_rational, default=Fraction(6))
    # windows starting with "-" need the --x1-window=-2:2 spelling
    ex.add_argument("--x1-window", type=_window, default=(Fraction(-8), Fraction(8)))
    ex.add_argument("--x2-window", type=_window, default=(Fraction(-8), Fraction(8)))

    ve = sub.add_parser("verify", help="check registered identities")
    ve.add_argument("--suite", default="all", help="all, a group, an id, a prefix ending in *, or a comma list")
    ve.add_argument("--params", help="JSON object of parameters; checks one parameter choice only")
    ve.add_argument("--mode", default="numeric", choices=("numeric", "formal", "both"))
    ve.add_argument("--tol", type=float, default=1e-8)
    ve.add_argument("--samples", type=int, default=10)
    ve.add_argument("--seed", type=int, default=0)
    ve.add_argument("--q-order", type=int, default=6)
    ve.add_argument("--grid-m", type=_rational_list)
    ve.add_argument("--grid-s", type=_rational_list)
    ve.add_argument("--grid-p", type=_int_list)
    ve.add_argument("--list", action="store_true", help="print the catalogue and exit")

    ch = sub.add_parser("character", help="(super)character of a module L(m, m2)")
    ch.add_argument("--m", type=_rational, required=True)
    ch.add_argument("--m2", type=_rational, required=True)
    ch.add_argument("--sign", default="plus", choices=("plus", "minus", "+", "-"))
    ch.add_argument("--tau")
    ch.add_argument("--z", default="0.1")
    ch.add_argument("--q-order", type=_rational, help="expand instead of evaluating")
    ch.add_argument("--y-window", type=_window, default=(Fraction(-8), Fraction(8)))
    return p


def _integral(x: Fraction, name: str) -> int:
    if x.denominator != 1:
        raise UsageError(f"{name} must be an integer, got {x}")
    return int(x)


def _need(ns, *names):
    missing = [n for n in names if getattr(ns, n) is None]
    if missing:
        raise UsageError(f"{ns.function} needs --{', --'.join(missing)}")


def _do_eval(ns) -> Iterator[dict]:
    tau = to_mpc(ns.tau)
    z1, z2, t = to_mpc(ns.z1), to_mpc(ns.z2), to_mpc(ns.t)
    point = {"tau": ns.tau}
    params: dict = {}
    if ns.function == "phi":
        _need(ns, "m", "s")
        spec = PhiSpec.of(ns.m, ns.s, ns.component)
        params = {"m": str(ns.m), "s": str(ns.s), "component": ns.component, "route": ns.route}
        point.update(z1=ns.z1, z2=ns.z2, t=ns.t)
        if ns.route == "plan":
            if ns.component != "diff":
                raise UsageError("the plan route evaluates the difference only")
            value = phi_eval_plan(phi_resolve(ns.m, ns.s), (tau, z1, z2, t))
        else:
            value = phi_direct(spec, EvalPoint.of(tau, z1, z2, t, guard=ns.guard))
    elif ns.function == "theta":
        _need(ns, "k", "m")
        params = {"k": str(ns.k), "m": str(ns.m), "alternating": ns.alternating}
        point["z"] = ns.z1
        value = theta_km(ThetaIndex(ns.k, ns.m, ns.alternating), tau, z1)
    elif ns.function == "vartheta":
        params = {"ab": ns.ab}
        point["z"] = ns.z1
        value = mumford_vartheta((int(ns.ab[0]), int(ns.ab[1])), tau, z1)
    else:
        value = dedekind_eta(tau)
    yield {"function": ns.function, "params": params, "point": point, "value": _cval(value)}


def _do_expand(ns) -> Iterator[dict]:
    single = ns.function != "phi"
    if single:
        box = TruncationBox.single(ns.q_order, ns.x1_window)
    else:
        box = TruncationBox(ns.q_order, ns.x1_window, ns.x2_window)
    params: dict = {}
    if ns.function == "phi":
        _need(ns, "m", "s")
        params = {"m": str(ns.m), "s": str(ns.s), "component": ns.component}
        ser = phi_formal(PhiSpec.of(ns.m, ns.s, ns.component), box)
    elif ns.function == "theta":
        _need(ns, "k", "m")
        params = {"k": str(ns.k), "m": str(ns.m), "alternating": ns.alternating}
        ser = theta_km_series(ThetaIndex(ns.k, ns.m, ns.alternating), box)
    elif ns.function == "vartheta":
        params = {"ab": ns.ab}
        ser = mumford_vartheta_series((int(ns.ab[0]), int(ns.ab[1])), box)
    else:
        ser = dedekind_eta_series(box)
    yield {"function": ns.function, "params": params, "box": box.to_json(), "terms": len(ser.terms),
           "series": ser.to_json()}


# interior point used to compare an expansion with the evaluated character
_EMBED_TAU, _EMBED_Z = "1.2i", "0.05+0.2i"


def _do_character(ns) -> Iterator[dict]:
    label = ModuleLabel(_integral(ns.m, "m"), _integral(ns.m2, "m2"))
    kind = CharKind.of(ns.sign)
    out = {"m": label.m, "m2": label.m2, "sign": kind.value}
    if ns.q_order is not None:
        box = TruncationBox.single(ns.q_order, ns.y_window)
        ser = char_expand(label, kind, box)
        other = char_via_definition(label, kind, _EMBED_TAU, _EMBED_Z)
        out.update(mode="expand", box=box.to_json(), series=ser.to_json(), route="formal definition",
                   residual_vs_other_route=residual(ser.embed(_EMBED_TAU, _EMBED_Z), other),
                   other_route_point={"tau": _EMBED_TAU, "z": _EMBED_Z})
    else:
        if ns.tau is None:
            raise UsageError("character needs --tau (or --q-order to expand)")
        value = char_general(label, kind, ns.tau, ns.z)
        other = char_via_definition(label, kind, ns.tau, ns.z)
        out.update(mode="eval", point={"tau": ns.tau, "z": ns.z}, value=_cval(value),
                   route="closed forms and difference sums", residual_vs_other_route=residual(value, other))
    yield out


def _workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError as err:
        raise UsageError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from err
    return max(1, n)


def _do_verify(ns, status: list) -> Iterator[dict]:
    if ns.list:
        yield from list_identities()
        return
    if ns.params is not None:
        try:
            params = json.loads(ns.params)
        except json.JSONDecodeError as err:
            raise UsageError(f"--params is not valid JSON: {err}") from err
        modes = ("numeric", "formal") if ns.mode == "both" else (ns.mode,)
        reports = [check_identity(ns.suite, params, md, ns.samples, ns.seed, ns.tol, ns.q_order) for md in modes]
    else:
        grid = GridSpec.of(m=ns.grid_m, s=ns.grid_s, p=ns.grid_p)
        reports = run_suite(ns.suite, grid, ns.samples, ns.seed, ns.tol, ns.mode, ns.q_order, _workers())
    done = []
    for r in reports:
        done.append(r)
        yield r.to_json()
    summary = suite_summary(done)
    status[0] = 0 if summary["failed"] == 0 else 1
    yield summary


@contextmanager
def _sink(path: Optional[str]) -> Iterator[TextIO]:
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as fh:
            yield fh


def main(argv: Optional[list] = None) -> int:
    r"""
    Entry point; returns the exit code.

    EXAMPLES::

        >>> main(["character", "--m", "2", "--m2", "5", "--tau", "0.9i"])
        {"error": "UsageError", "message": "need 0 <= m2 <= m, got m = 2, m2 = 5"}
        2
    """
    status = [0]
    out_path = None
    try:
        ns = build_parser().parse_args(argv)
        out_path = ns.out
        handler = {"eval": _do_eval, "expand": _do_expand, "character": _do_character}.get(ns.command)
        with _sink(out_path) as fh:
            records = handler(ns) if handler else _do_verify(ns, status)
            try:
                for rec in records:
                    fh.write(json.dumps(rec) + "\n")
                    fh.flush()
            except (UsageError, DomainError) as err:
                fh.write(json.dumps({"error": type(err).__name__, "message": str(err)}) + "\n")
                return 2
    except (UsageError, DomainError) as err:
        print(json.dumps({"error": type(err).__name__, "message": str(err)}))
        return 2
    return status[0]


def run() -> None:
    """Console-script wrapper."""
    sys.exit(main())
