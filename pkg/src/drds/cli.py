"""Command-line front end.

One command per analysis family: parse-check, simulate, equilibria,
local-stability, period, conjecture-gs, prove-gs, invariant, al-conjecture.
Every report embeds the full run configuration and is emitted as JSON
(floats at 17 significant digits), human-readable text (10 digits, the
classic evalf style), or both.  Exit codes: 0 for success / proved /
evidence, 2 for fail / unknown / nothing found, 1 for errors.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .equilibria import (diagonal_equilibria, diagonal_polynomial, fixed_points_numeric,
                         local_stability, diagonal_fixed_points, positive_fixed_points)
from .errors import DrdsError, NoStableFixedPoint
from .invariants import (boundedness_certificate, factored_guess, find_invariant,
                         invariant_drift)
from .parsing import format_equation, format_map, format_polynomial, format_rational, \
    parse_equation, parse_map
from .periodic import (build_smoothed_objective, extract_limit_cycle, manifold,
                       multistart_certify, prove_conjecture1_rigorous, residual_norm)
from .report import jsonable
from .stability import conjecture_global, prove_global_stability
from .systems import companion_map, detect_period_numeric, detect_period_symbolic, orbit

SCHEMA = "drds-report/1"


class CliError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so errors map to exit code 1."""

    def error(self, message):
        raise CliError(message)


# --- JSON emission with pinned float formatting ---------------------------------


def _dump_json(value, indent=0) -> str:
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        inner = ",\n".join(
            f'{pad}  "{k}": {_dump_json(value[k], indent + 1)}'
            for k in sorted(value)
        )
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        inner = ",\n".join(f"{pad}  {_dump_json(v, indent + 1)}" for v in value)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            return f'"{value}"'
        return format(value, ".17g")
    if isinstance(value, int):
        return str(value)
    return '"' + str(value).replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _fmt10(x) -> str:
    if isinstance(x, float):
        return format(x, ".10g")
    return str(x)


# --- config / report -----------------------------------------------------------------


@dataclass
class RunConfig:
    command: str
    source: dict
    seed: int
    mode: str | None
    alpha: str | None
    budgets: dict
    tolerances: dict
    output_format: str
    threads: int

    def to_dict(self):
        return jsonable(self)


@dataclass
class Report:
    schema: str
    tool_version: str
    config: RunConfig
    result: dict
    timing: dict
    exit_code: int = 0

    def to_dict(self):
        return {
            "schema": self.schema,
            "tool_version": self.tool_version,
            "config": self.config.to_dict(),
            "result": jsonable(self.result),
            "timing": jsonable(self.timing),
        }


def _emit(report: Report, text_lines) -> None:
    fmt = report.config.output_format
    if fmt in ("text", "both"):
        for line in text_lines:
            print(line)
    if fmt in ("json", "both"):
        print(_dump_json(report.to_dict()))


# --- shared argument plumbing -----------------------------------------------------------


def _add_common(p: _ArgumentParser, system=True):
    if system:
        p.add_argument("--eq", help="difference equation, e.g. \"x[n+1] = (1+x[n])/x[n-1]\"")
        p.add_argument("--map", dest="map_text", help="comma-separated map components over x1..xk")
        p.add_argument("--file", help="read the system description from a file")
        p.add_argument("--vars", help="comma-separated state variables for --map")
        p.add_argument("--param", action="append", default=[],
                       help="instantiate a parameter, e.g. --param p=1 (repeatable)")
    p.add_argument("--seed", type=int, default=20250810)
    p.add_argument("--format", dest="output_format", choices=("json", "text", "both"),
                   default="text")


def _parse_params(pairs):
    values = {}
    for item in pairs:
        if "=" not in item:
            raise CliError(f"--param expects name=value, got {item!r}")
        name, _, raw = item.partition("=")
        raw = raw.strip()
        if "/" in raw:
            num, _, den = raw.partition("/")
            values[name.strip()] = Fraction(int(num), int(den))
        else:
            values[name.strip()] = Fraction(raw)
    return values


def _load_system(args):
    """(system, source_dict); equations instantiate --param values."""
    sources = [s for s in (args.eq, args.map_text, args.file) if s]
    if len(sources) != 1:
        raise CliError("provide exactly one of --eq, --map or --file")
    text = sources[0]
    kind = "eq" if args.eq else ("map" if args.map_text else None)
    if args.file:
        with open(args.file) as fh:
            text = fh.read().strip()
        kind = "eq" if "=" in text else "map"
    params = _parse_params(args.param)
    if kind == "eq":
        system = parse_equation(text)
        if params:
            system = system.instantiate(params)
    else:
        variables = args.vars.split(",") if args.vars else None
        system = parse_map(text, variables=variables)
        if params:
            system = system.instantiate(params)
    source = {"kind": kind, "text": text}
    if params:
        source["parameters"] = {k: str(v) for k, v in params.items()}
    return system, source


def _parse_init(text, k):
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != k:
        raise CliError(f"--init needs {k} comma-separated values")
    return [float(Fraction(p.strip())) for p in parts]


def _parse_alpha(text):
    if "/" in text:
        num, _, den = text.partition("/")
        alpha = Fraction(int(num), int(den))
    else:
        alpha = Fraction(text)
    if alpha <= 1:
        raise CliError("--alpha must be a rational literal exceeding 1")
    return alpha


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("DRDS_THREADS", "1")))
    except ValueError:
        return 1


def _mk_config(command, source, args, mode=None, alpha=None, budgets=None, tolerances=None):
    return RunConfig(
        command=command,
        source=source,
        seed=args.seed,
        mode=mode,
        alpha=str(alpha) if alpha is not None else None,
        budgets=budgets or {},
        tolerances=tolerances or {},
        output_format=args.output_format,
        threads=_threads(),
    )


# --- commands ---------------------------------------------------------------------------


def _cmd_parse_check(args):
    system, source = _load_system(args)
    config = _mk_config("parse-check", source, args)
    if hasattr(system, "order"):
        result = {
            "kind": "equation",
            "order": system.order,
            "parameters": list(system.parameters),
            "canonical": format_equation(system),
        }
        text = [f"order-{system.order} difference equation",
                f"canonical form: {result['canonical']}"]
    else:
        result = {
            "kind": "map",
            "dim": system.dim,
            "variables": list(system.variables),
            "parameters": list(system.parameters),
            "canonical": format_map(system),
        }
        text = [f"{system.dim}-dimensional transformation",
                f"canonical form: {result['canonical']}"]
    if result["parameters"]:
        text.append("free parameters: " + ", ".join(result["parameters"]))
    return config, result, text, 0


def _cmd_simulate(args):
    system, source = _load_system(args)
    k = system.order if hasattr(system, "order") else system.dim
    init = _parse_init(args.init, k)
    config = _mk_config("simulate", source, args,
                        mode=args.mode,
                        budgets={"steps": args.steps, "tail": args.tail})
    ob = orbit(system, init, args.steps, mode=args.mode)
    if ob.scalars is not None:
        seq = [float(v) for v in ob.scalars] if args.mode == "float" else [str(v) for v in ob.scalars]
        tail = seq[-args.tail:]
        result = {"length": len(seq), "tail": tail}
        if args.full:
            result["sequence"] = seq
        text = [f"orbit of length {len(seq)} (N={args.steps} extra terms)",
                "tail: " + ", ".join(_fmt10(v) for v in tail)]
    else:
        states = ob.states
        tail = [[float(v) for v in st] for st in states[-args.tail:]] \
            if args.mode == "float" else [[str(v) for v in st] for st in states[-args.tail:]]
        result = {"length": len(states), "tail_states": tail}
        if args.full:
            result["states"] = [[float(v) for v in st] for st in states] \
                if args.mode == "float" else [[str(v) for v in st] for st in states]
        text = [f"map orbit with {len(states)} states",
                "tail states: " + "; ".join("(" + ", ".join(_fmt10(v) for v in st) + ")" for st in tail)]
    return config, result, text, 0


def _cmd_equilibria(args):
    system, source = _load_system(args)
    config = _mk_config("equilibria", source, args,
                        budgets={"attempts": args.attempts},
                        tolerances={"tol": args.tol})
    if hasattr(system, "order"):
        roots = diagonal_equilibria(system)
        result = {
            "method": "diagonal substitution, exact Sturm isolation",
            "minimal_polynomial": roots[0].polynomial_text if roots
            else format_polynomial(diagonal_polynomial(system)),
            "roots": [
                {
                    "value": r.value,
                    "positive": r.positive,
                    "exact": str(r.exact_value) if r.exact_value is not None else None,
                    "isolating_interval": [str(r.isolating_interval[0]), str(r.isolating_interval[1])],
                }
                for r in roots
            ],
        }
        text = [f"equilibrium polynomial: {result['minimal_polynomial']}"]
        for r in roots:
            tag = "positive" if r.positive else "non-positive"
            text.append(f"  root {_fmt10(r.value)} ({tag})")
        found = bool(roots)
    else:
        points = fixed_points_numeric(system, attempts=args.attempts, seed=args.seed, tol=args.tol)
        result = {
            "method": "multistart damped Newton (completeness not guaranteed)",
            "fixed_points": [
                {"coords": list(f.coords), "positive": f.positive, "degenerate": f.degenerate}
                for f in points
            ],
        }
        text = [f"{len(points)} fixed point(s) found (multistart Newton; not guaranteed complete)"]
        for f in points:
            text.append("  (" + ", ".join(_fmt10(c) for c in f.coords) + ")"
                        + ("  [positive]" if f.positive else ""))
        found = bool(points)
    return config, result, text, 0 if found else 2


def _cmd_local_stability(args):
    system, source = _load_system(args)
    config = _mk_config("local-stability", source, args,
                        budgets={"attempts": args.attempts}, tolerances={"tol": args.tol})
    if hasattr(system, "order"):
        tr = companion_map(system)
        points = [f for f in diagonal_fixed_points(system) if f.positive or args.all]
    else:
        tr = system
        points = fixed_points_numeric(tr, attempts=args.attempts, seed=args.seed, tol=args.tol)
        if not args.all:
            points = [f for f in points if f.positive]
    reports = []
    text = []
    for f in points:
        rep = local_stability(tr, f)
        reports.append({
            "point": list(f.coords),
            "positive": f.positive,
            "eigenvalues": [{"re": e.real, "im": e.imag} for e in rep.eigenvalues],
            "spectral_radius": rep.spectral_radius,
            "verdict": rep.verdict,
        })
        eig_text = ", ".join(
            f"{_fmt10(e.real)}{'+' if e.imag >= 0 else '-'}{_fmt10(abs(e.imag))}i"
            for e in rep.eigenvalues
        )
        text.append(f"point (" + ", ".join(_fmt10(c) for c in f.coords) + f"): {rep.verdict}"
                    f" (spectral radius {_fmt10(rep.spectral_radius)}; eigenvalues {eig_text})")
    result = {"reports": reports}
    if not reports:
        text = ["no fixed points to analyze"]
    return config, result, text, 0 if reports else 2


def _cmd_period(args):
    system, source = _load_system(args)
    if not hasattr(system, "order"):
        raise CliError("period detection expects --eq")
    config = _mk_config("period", source, args,
                        budgets={"symbolic_max": args.symbolic_max, "steps": args.steps},
                        tolerances={"tol": args.tol})
    result = {}
    text = []
    found = False
    if args.symbolic_max:
        p = detect_period_symbolic(system, args.symbolic_max)
        result["symbolic_period"] = p
        text.append(f"symbolic period (generic positive initial conditions): "
                    f"{p if p else f'none up to {args.symbolic_max}'}")
        found = found or p is not None
    if args.init:
        init = _parse_init(args.init, system.order)
        p = detect_period_numeric(system, init, args.steps, tol=args.tol)
        result["numeric_period"] = p
        text.append(f"numeric period from {args.init} over {args.steps} steps: "
                    f"{p if p else 'none'}")
        found = found or p is not None
    if not result:
        raise CliError("nothing to do: pass --symbolic-max and/or --init")
    return config, result, text, 0 if found else 2


def _cmd_conjecture_gs(args):
    system, source = _load_system(args)
    tr = companion_map(system) if hasattr(system, "order") else system
    config = _mk_config("conjecture-gs", source, args,
                        budgets={"k1": args.k1, "k2": args.k2})
    limit = conjecture_global(tr, K1=args.k1, K2=args.k2, seed=args.seed)
    if limit is None:
        result = {"conjectured_limit": None}
        text = ["no common limit: orbits do not all settle to one point"]
        return config, result, text, 2
    result = {"conjectured_limit": [float(v) for v in limit]}
    text = ["conjectured globally stable fixed point: ("
            + ", ".join(_fmt10(v) for v in limit) + ")",
            "(purely numeric evidence; use prove-gs to certify)"]
    return config, result, text, 0


def _cmd_prove_gs(args):
    system, source = _load_system(args)
    if args.max_r < 1:
        raise CliError("--max-r must be >= 1")
    alpha = _parse_alpha(args.alpha)
    config = _mk_config("prove-gs", source, args, mode=args.mode, alpha=alpha,
                        budgets={"max_r": args.max_r, "samples": args.samples,
                                 "starts": args.starts, "boxes": args.boxes},
                        tolerances={"epsilon": args.tol})
    cert = prove_global_stability(system, maxR=args.max_r, mode=args.mode, alpha=alpha,
                                  seed=args.seed, samples=args.samples, starts=args.starts,
                                  epsilon=args.tol, box_budget=args.boxes)
    result = {"certificate": cert.to_dict(), "theorem": cert.theorem_text()}
    text = [cert.theorem_text()]
    return config, result, text, 0 if cert.verdict in ("proved", "evidence") else 2


def _cmd_invariant(args):
    system, source = _load_system(args)
    if not hasattr(system, "order"):
        raise CliError("invariant search expects --eq")
    if args.degree < 1:
        raise CliError("--degree must be >= 1")
    config = _mk_config("invariant", source, args, budgets={"degree": args.degree})
    invariants = find_invariant(system, args.degree, seed=args.seed)
    vars_txt = "*".join(f"x{i}" for i in range(1, system.order + 1))
    items = []
    text = []
    for inv in invariants:
        guess = factored_guess(inv)
        items.append({
            "numerator": format_polynomial(inv.P),
            "denominator": vars_txt,
            "factored_guess": guess,
            "positive_coefficients": all(c > 0 for c in inv.P.terms.values()),
        })
        text.append(f"invariant: ({format_polynomial(inv.P)})/({vars_txt})")
        if guess:
            text.append(f"  factored guess: ({guess})/({vars_txt})")
    result = {"count": len(invariants), "ansatz_degree": args.degree, "invariants": items}
    if not invariants:
        text = [f"no nontrivial invariant of numerator degree <= {args.degree}"]
    bounded = [i for i in items if i["positive_coefficients"]]
    if bounded:
        text.append("all-positive coefficients: every positive orbit is bounded")
    return config, result, text, 0 if invariants else 2


def _cmd_al_conjecture(args):
    if args.id not in (1, 2, 3, 4):
        raise CliError("--id must be 1..4")
    m = manifold(args.id)
    default_norm = "euclidean" if args.id == 1 else "fixed_point_residual"
    kind = args.norm or default_norm
    a = args.a if args.a is not None else 1
    b = args.b if args.b is not None else (4 if args.id == 1 and kind == "euclidean"
                                           else 1 + m.period)
    source = {"kind": "conjecture", "id": args.id, "equation": format_equation(m.equation)}
    config = _mk_config("al-conjecture", source, args, mode=args.mode,
                        budgets={"starts": args.starts, "a": a, "b": b},
                        tolerances={"tol": args.tol})
    if args.mode == "rigorous":
        if args.id != 1:
            raise CliError("the rigorous path is implemented for --id 1 only")
        proof = prove_conjecture1_rigorous()
        verdict = proof.status
        result = {
            "verdict": verdict,
            "proof": jsonable(proof),
            "theorem": proof.intersection_argument if verdict == "proved" else proof.detail,
        }
        text = [f"conjecture 1 rigorous proof: {verdict}"]
        if verdict == "proved":
            text += [
                f"  plane residual ({proof.fxy.plane_text})^2 decreases: numerator = "
                f"L^2 * (positive-coefficient polynomial), degree {proof.fxy.numerator_degree}",
                f"  plane residual ({proof.fyz.plane_text})^2 decreases likewise "
                f"(degree {proof.fyz.numerator_degree})",
                "  " + proof.intersection_argument,
            ]
        return config, result, text, 0 if verdict == "proved" else 2

    norm = residual_norm(args.id, kind)
    obj = build_smoothed_objective(m.map, norm, a, b)
    ev = multistart_certify(obj, starts=args.starts, tol=args.tol, seed=args.seed)
    verdict = "evidence" if ev.evidence else "fail"
    result = {
        "verdict": verdict,
        "norm": kind,
        "offsets": [a, b],
        "period": m.period,
        "cycle_note": m.note,
        "evidence": jsonable(ev),
        "theorem": (
            f"Semi-rigorous theorem: every positive orbit of {format_equation(m.equation)} "
            f"converges to a period-{m.period} solution; the residual norm ({kind}) applied "
            f"at iterates {a} and {b} never increased over {ev.starts} multistart "
            f"minimizations (worst local minimum {ev.worst_value:.3g})."
            if ev.evidence else
            f"FAIL: a local minimum of {ev.worst_value:.6g} below -{args.tol} was found; "
            f"this smoothing window does not certify the conjecture."
        ),
    }
    text = [f"conjecture {args.id} ({kind}, offsets ({a},{b}), {args.starts} starts): {verdict}",
            f"  worst local minimum: {_fmt10(ev.worst_value)}",
            "  " + result["theorem"]]
    return config, result, text, 0 if ev.evidence else 2


# --- driver ------------------------------------------------------------------------------


def build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(prog="drds",
                             description="rational difference equation laboratory")
    parser.add_argument("--version", action="version", version=f"drds {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse-check", help="parse and echo a system")
    _add_common(p)

    p = sub.add_parser("simulate", help="run an orbit")
    _add_common(p)
    p.add_argument("--init", required=True, help="comma-separated initial values")
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--mode", choices=("float", "exact"), default="float")
    p.add_argument("--tail", type=int, default=3)
    p.add_argument("--full", action="store_true", help="include the whole orbit in the report")

    p = sub.add_parser("equilibria", help="equilibrium points")
    _add_common(p)
    p.add_argument("--attempts", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-8)

    p = sub.add_parser("local-stability", help="Jacobian eigenvalue verdicts")
    _add_common(p)
    p.add_argument("--attempts", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--all", action="store_true", help="analyze non-positive points too")

    p = sub.add_parser("period", help="detect exact periodicity")
    _add_common(p)
    p.add_argument("--symbolic-max", type=int, default=0,
                   help="search for a symbolic period up to this bound")
    p.add_argument("--init", help="initial values for the numeric check")
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("conjecture-gs", help="numeric global-limit scan")
    _add_common(p)
    p.add_argument("--k1", type=int, default=1000, help="orbit length")
    p.add_argument("--k2", type=int, default=20, help="number of random starts")

    p = sub.add_parser("prove-gs", help="global-stability contraction certificate")
    _add_common(p)
    p.add_argument("--mode", choices=("rigorous", "semi"), default="semi")
    p.add_argument("--max-r", type=int, default=6)
    p.add_argument("--alpha", default="101/100", help="rational contraction factor > 1")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--starts", type=int, default=30)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--boxes", type=int, default=1000000)

    p = sub.add_parser("invariant", help="discover algebraic invariants")
    _add_common(p)
    p.add_argument("--degree", type=int, required=True)

    p = sub.add_parser("al-conjecture", help="periodic-convergence certificates")
    _add_common(p, system=False)
    p.add_argument("--id", type=int, required=True, help="conjecture number 1..4")
    p.add_argument("--mode", choices=("semi", "rigorous"), default="semi")
    p.add_argument("--norm", choices=("euclidean", "simple", "fixed_point_residual"))
    p.add_argument("--a", type=int, default=None, help="first smoothing offset")
    p.add_argument("--b", type=int, default=None, help="second smoothing offset")
    p.add_argument("--starts", type=int, default=36)
    p.add_argument("--tol", type=float, default=1e-6)

    return parser


_HANDLERS = {
    "parse-check": _cmd_parse_check,
    "simulate": _cmd_simulate,
    "equilibria": _cmd_equilibria,
    "local-stability": _cmd_local_stability,
    "period": _cmd_period,
    "conjecture-gs": _cmd_conjecture_gs,
    "prove-gs": _cmd_prove_gs,
    "invariant": _cmd_invariant,
    "al-conjecture": _cmd_al_conjecture,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    started = time.monotonic()
    try:
        config, result, text, code = _HANDLERS[args.command](args)
    except (CliError, DrdsError, NoStableFixedPoint, ValueError, OSError) as exc:
        err = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        fmt = getattr(args, "output_format", "text")
        if fmt in ("text", "both"):
            print(f"error: {exc}", file=sys.stderr)
        if fmt in ("json", "both"):
            print(_dump_json({"schema": SCHEMA, "tool_version": __version__, "result": err}))
        return 1
    report = Report(
        schema=SCHEMA,
        tool_version=__version__,
        config=config,
        result=result,
        timing={"seconds": time.monotonic() - started},
        exit_code=code,
    )
    _emit(report, text)
    return code


if __name__ == "__main__":
    sys.exit(main())
