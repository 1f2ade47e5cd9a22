"""Command-line interface: radius, zeros, verify and sweep."""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .families import FAMILIES, InvalidParameters, make_form, make_spec
from .oracle import OracleError, certify_disk, certified_radius, empirical_radius
from .radius import DEFAULT_TOL, KINDS, SPIRALLIKE, SolverError, SpiralOrder, solve_radius
from .series import TruncationCapExceeded
from .zeros import ScanBudgetExhausted, ZeroScanError, check_interlacing, derivative_zeros, kernel_zeros

EXIT_INVALID = 2
EXIT_FAILURE = 3
PARAM_NAMES = ("kappa", "delta", "mu", "nu", "a", "n", "u", "beta", "p", "c")
SPIRAL_NAMES = ("gamma", "alpha")
MAX_SWEEP_AXES = 2
FAILURES = (SolverError, ZeroScanError, OracleError, TruncationCapExceeded)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_common(p: argparse.ArgumentParser, *, kind: bool = True) -> None:
    p.add_argument("--family", choices=sorted(FAMILIES))
    for name in PARAM_NAMES:
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--assume-real-zeros", action="store_true", default=None,
                   help="skip the W_i check for Mittag-Leffler parameters")
    p.add_argument("--norm", choices=("f", "g", "h"))
    if kind:
        p.add_argument("--kind", choices=KINDS)
        p.add_argument("--gamma", type=float, help="radians unless --degrees")
        p.add_argument("--alpha", type=float)
        p.add_argument("--degrees", action="store_true")
        p.add_argument("--paper-literal-legendre", action="store_true", default=None,
                       help="use the bare (1-alpha) coefficients for Legendre")
    p.add_argument("--tol", type=float)
    p.add_argument("--format", choices=("json", "csv", "plain"))
    p.add_argument("--json", dest="format", action="store_const", const="json")
    p.add_argument("--params-json", help="JSON object (or file holding one) from a previous run")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="spiralrad", description="Radii of spirallikeness for normalized special functions.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("radius", help="solve for the radius")
    _add_common(p)
    p.add_argument("--no-certify", dest="certify", action="store_false",
                   help="skip the boundary check")

    p = sub.add_parser("zeros", help="list kernel and derivative-function zeros")
    _add_common(p, kind=False)
    p.add_argument("--count", type=int, default=3)

    p = sub.add_parser("verify", help="boundary check and empirical radius")
    _add_common(p)
    p.add_argument("--radius", type=float, help="radius to check (default: solve)")
    p.add_argument("--samples", type=int, default=2048)

    p = sub.add_parser("sweep", help="radii over a grid of one or two parameters")
    _add_common(p)
    p.add_argument("--grid", action="append", default=[], metavar="NAME=START:STOP:NUM",
                   help="axis as START:STOP:NUM or a comma list; repeat for a second axis")
    p.add_argument("--empirical", action="store_true", help="also measure the empirical radius")
    p.add_argument("--out", help="write the table here instead of stdout")
    return ap


# ---------------------------------------------------------------------------
# request assembly


def _load_params_json(text: str | None) -> dict:
    if not text:
        return {}
    if os.path.exists(text):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidParameters(f"--params-json: {exc}") from None
    if not isinstance(data, dict):
        raise InvalidParameters("--params-json must hold a JSON object")
    return data


def _pick(args, saved: dict, name: str, default=None):
    value = getattr(args, name, None)
    if value is not None:
        return value
    return saved.get(name, default)


def resolve(args) -> dict:
    """Merge command-line flags over saved parameters; flags win."""
    saved = _load_params_json(args.params_json)
    family = _pick(args, saved, "family")
    if family is None:
        raise InvalidParameters("--family is required")
    if family not in FAMILIES:
        raise InvalidParameters(f"unknown family {family!r}")
    saved_params = saved.get("params", {}) if saved.get("family", family) == family else {}
    needed = [k for k in FAMILIES[family].__dataclass_fields__ if k in PARAM_NAMES]
    params = {}
    for name in needed:
        value = getattr(args, name, None)
        if value is None:
            value = saved_params.get(name)
        if value is None:
            raise InvalidParameters(f"family {family} needs --{name}")
        params[name] = value
    extra = [k for k in PARAM_NAMES if getattr(args, k, None) is not None and k not in needed]
    if extra:
        raise InvalidParameters(f"family {family} takes no parameter(s) {', '.join(extra)}")
    if family == "legendre":
        if not float(params["n"]).is_integer():
            raise InvalidParameters("Legendre index n must be an integer")
        params["n"] = int(params["n"])
    if family == "mittag-leffler":
        params["assume_real_zeros"] = bool(_pick(args, saved, "assume_real_zeros", False))

    gamma = _pick(args, saved, "gamma", 0.0)
    if getattr(args, "degrees", False) and args.gamma is not None:
        gamma = math.radians(gamma)
    tol = _pick(args, saved, "tol", DEFAULT_TOL)
    if not tol > 0:
        raise InvalidParameters("--tol must be positive")
    return {
        "family": family,
        "params": params,
        "norm": _pick(args, saved, "norm", "g"),
        "kind": _pick(args, saved, "kind", SPIRALLIKE),
        "gamma": float(gamma),
        "alpha": float(_pick(args, saved, "alpha", 0.0)),
        "tol": float(tol),
        "paper_literal_legendre": bool(_pick(args, saved, "paper_literal_legendre", False)),
    }


def _public_params(req: dict) -> dict:
    return {k: v for k, v in req["params"].items() if k != "assume_real_zeros"}


def _form(req: dict):
    return make_form(make_spec(req["family"], **req["params"]), req["norm"])


def _spiral(req: dict) -> SpiralOrder:
    return SpiralOrder(req["gamma"], req["alpha"])


# ---------------------------------------------------------------------------
# subcommands


def cmd_radius(args, req: dict) -> dict:
    form, spiral = _form(req), _spiral(req)
    solve = certified_radius if args.certify else solve_radius
    res = solve(form, req["kind"], spiral, req["tol"], paper_literal_legendre=req["paper_literal_legendre"])
    out = {
        "family": req["family"],
        "params": _public_params(req),
        "norm": req["norm"],
        "kind": req["kind"],
        "gamma": req["gamma"],
        "alpha": req["alpha"],
        "tol": req["tol"],
        "radius": res.radius,
        "bracket": list(res.bracket),
        "residual": res.residual,
        "iterations": res.iterations,
        "certification": res.certification,
    }
    if req["paper_literal_legendre"]:
        out["paper_literal_legendre"] = True
    if req["params"].get("assume_real_zeros"):
        out["assume_real_zeros"] = True
    return out


def cmd_zeros(args, req: dict) -> dict:
    if args.count < 1:
        raise InvalidParameters("--count must be >= 1")
    form = _form(req)
    tol = min(req["tol"], 1e-12)
    kz = kernel_zeros(form, args.count, tol)
    try:
        # one extra derivative zero closes the interlacing chain
        dz = derivative_zeros(form, args.count + 1, tol)
    except ScanBudgetExhausted:
        dz = derivative_zeros(form, args.count, tol)
    return {
        "family": req["family"],
        "params": _public_params(req),
        "norm": req["norm"],
        "kernel_zeros": list(kz.zeros),
        "kernel_multiplicities": list(kz.multiplicities),
        "derivative_zeros": list(dz.zeros[: args.count]),
        "derivative_multiplicities": list(dz.multiplicities[: args.count]),
        "interlacing": check_interlacing(kz, dz),
    }


def cmd_verify(args, req: dict) -> dict:
    form, spiral = _form(req), _spiral(req)
    if args.radius is None:
        radius = solve_radius(form, req["kind"], spiral, req["tol"],
                              paper_literal_legendre=req["paper_literal_legendre"]).radius
    else:
        if not args.radius > 0:
            raise InvalidParameters("--radius must be positive")
        radius = args.radius
    verdict = certify_disk(form, req["kind"], spiral, radius, args.samples)
    emp = empirical_radius(form, req["kind"], spiral, req["tol"], args.samples, solver_radius=radius)
    return {
        "family": req["family"],
        "params": _public_params(req),
        "norm": req["norm"],
        "kind": req["kind"],
        "gamma": req["gamma"],
        "alpha": req["alpha"],
        "radius": radius,
        "disk": verdict.status,
        "r_checked": verdict.r_checked,
        "boundary_min": verdict.min_value,
        "argmin_angle": verdict.at_angle,
        "threshold": verdict.threshold,
        "empirical_radius": emp.radius,
        "crossing_found": emp.crossing_found,
        "gap": emp.radius - radius,
    }


def parse_axis(text: str, degrees: bool = False) -> tuple[str, list[float]]:
    """``NAME=START:STOP:NUM`` (inclusive linspace) or ``NAME=v1,v2,...``."""
    name, sep, body = text.partition("=")
    name = name.strip()
    if not sep or not body:
        raise InvalidParameters(f"--grid {text!r}: expected NAME=START:STOP:NUM or NAME=v1,v2,...")
    try:
        if ":" in body:
            start, stop, num = body.split(":")
            if int(num) < 1:
                raise ValueError("NUM must be >= 1")
            values = [float(v) for v in np.linspace(float(start), float(stop), int(num))]
        else:
            values = [float(v) for v in body.split(",")]
    except ValueError as exc:
        raise InvalidParameters(f"--grid {text!r}: {exc}") from None
    if degrees and name == "gamma":
        values = [math.radians(v) for v in values]
    return name, values


def _sweep_point(req: dict, names: list[str], combo: tuple, empirical: bool) -> dict:
    row = dict(zip(names, combo))
    point = {**req, "params": dict(req["params"])}
    for name, value in row.items():
        if name in SPIRAL_NAMES:
            point[name] = value
        else:
            point["params"][name] = value
    row.update(radius="", residual="", certified="", error="")
    if empirical:
        row["empirical_radius"] = ""
    try:
        if req["family"] == "legendre":
            if not float(point["params"]["n"]).is_integer():
                raise InvalidParameters("Legendre index n must be an integer")
            point["params"]["n"] = int(point["params"]["n"])
        form, spiral = _form(point), _spiral(point)
        res = solve_radius(form, point["kind"], spiral, point["tol"],
                           paper_literal_legendre=point["paper_literal_legendre"])
        row["radius"], row["residual"] = res.radius, res.residual
        row["certified"] = certify_disk(form, point["kind"], spiral, res.radius).valid
        if empirical:
            row["empirical_radius"] = empirical_radius(form, point["kind"], spiral, point["tol"],
                                                       solver_radius=res.radius).radius
    except (InvalidParameters, *FAILURES) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def cmd_sweep(args, req: dict) -> list[dict]:
    if not args.grid:
        raise InvalidParameters("sweep needs at least one --grid axis")
    if len(args.grid) > MAX_SWEEP_AXES:
        raise InvalidParameters(f"sweep takes at most {MAX_SWEEP_AXES} --grid axes")
    axes = [parse_axis(g, args.degrees) for g in args.grid]
    names = [n for n, _ in axes]
    allowed = set(SPIRAL_NAMES) | set(req["params"]) - {"assume_real_zeros"}
    for name in names:
        if name not in allowed:
            raise InvalidParameters(f"cannot sweep {name!r} for family {req['family']}")
    if len(set(names)) != len(names):
        raise InvalidParameters("sweep axes must be distinct")
    if sum(n not in SPIRAL_NAMES for n in names) > 1:
        raise InvalidParameters("sweep at most one family parameter")
    combos = list(itertools.product(*(v for _, v in axes)))
    threads = int(os.environ.get("SPIRALRAD_THREADS", "0") or 0) or min(8, os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        # map preserves grid order regardless of completion order
        return list(pool.map(lambda c: _sweep_point(req, names, c, args.empirical), combos))


# ---------------------------------------------------------------------------
# output


def _csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]))
    writer.writeheader()
    for row in rows:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def _flatten(out: dict) -> dict:
    flat = {}
    for key, value in out.items():
        if isinstance(value, dict):
            flat.update(value)
        elif isinstance(value, list):
            flat[key] = " ".join(repr(v) for v in value)
        else:
            flat[key] = value
    return flat


def render(out, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(out)
    rows = out if isinstance(out, list) else [_flatten(out)]
    if fmt == "csv":
        return _csv_text(rows)
    lines = []
    for row in rows:
        if len(rows) > 1:
            lines.append(" ".join(f"{k}={v}" for k, v in row.items()))
        else:
            lines.extend(f"{k}: {v}" for k, v in row.items())
    return "\n".join(lines)


def _fail(code: int, kind: str, message: str) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


COMMANDS = {"radius": cmd_radius, "zeros": cmd_zeros, "verify": cmd_verify, "sweep": cmd_sweep}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _fail(EXIT_INVALID, "usage", str(exc))
    try:
        req = resolve(args)
        out = COMMANDS[args.command](args, req)
    except ValueError as exc:
        # InvalidParameters and any other rejected input
        return _fail(EXIT_INVALID, "invalid_parameters", str(exc))
    except FAILURES as exc:
        return _fail(EXIT_FAILURE, type(exc).__name__, str(exc))
    fmt = args.format or ("csv" if args.command == "sweep" else "plain")
    text = render(out, fmt)
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
