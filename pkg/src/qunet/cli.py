"""Command-line front end: ``qunet generate|analyze|check-sep|tvalue|reproduce|scramble-search``.

Exact rationals are printed as ``"num/den"`` strings; every float that
accompanies one carries an ``_approx`` suffix.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .constructions import (
    NetSpec,
    faure_matrices,
    fibonacci_lattice_matrices,
    hammersley_matrices,
    lp_matrices,
    polylattice_matrices,
    random_lower_triangular,
    sobol2_scrambled,
    vdc_matrices,
)
from .geometry import analyze, volume_bounds
from .gf import FieldError, FieldMatrix, parse_matrices
from .poly import cf_expand, parse_poly
from .pointgen import (
    ShiftVector,
    box_counts_ok,
    digital_shift,
    generate_points,
    read_points,
    write_points,
)
from .repro import (
    SCENARIOS,
    repro_faure,
    repro_fibonacci,
    repro_hammersley,
    repro_lp,
    repro_sobol_scrambled,
    repro_vdc_mesh,
    run_scenario,
    search_scramble_pairs,
)
from .separation import (
    criterion_check,
    is_c_separated_bruteforce,
    min_kappa_bruteforce,
    min_kappa_criterion,
    t_value,
)

CONSTRUCTION_NAMES = ("vdc", "hammersley", "lp", "faure", "sobol2", "polylattice", "fiblattice", "matrix")


class UsageError(Exception):
    pass


def rational(x) -> str | None:
    if x is None:
        return None
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def with_approx(out: dict, key: str, x) -> None:
    out[key] = rational(x)
    out[key + "_approx"] = None if x is None else float(x)


# -- argument plumbing ---------------------------------------------------------------

def _output_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="emit a JSON report")
    fmt.add_argument("--csv", action="store_true", help="emit CSV rows")
    p.add_argument("--seed", type=int, default=0, help="seed for every random choice (default 0)")
    return p


def _construction_flags(positional: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    if positional:
        p.add_argument("construction", choices=CONSTRUCTION_NAMES)
    else:
        p.add_argument("--construction", choices=CONSTRUCTION_NAMES, required=True)
    p.add_argument("--b", type=int, default=2, help="prime base (default 2)")
    p.add_argument("--m", type=int, help="number of digits; the net has b^m points")
    p.add_argument("--variant", default="LP", help="sobol2 scramble placement: LP or ILP")
    p.add_argument("--scramble-seed", type=int, help="random lower-triangular scramble for sobol2")
    p.add_argument("--p", dest="poly_p", help="polylattice modulus, e.g. '2: 1 1 0 1'")
    p.add_argument("--q", dest="poly_q", action="append", help="polylattice numerator (repeat per axis)")
    p.add_argument("--matrix", help="file of generating matrices for the 'matrix' construction")
    p.add_argument("--shift-seed", type=int, help="apply a random digital shift drawn from this seed")
    return p


def build_spec(args) -> NetSpec:
    name, b, m = args.construction, args.b, args.m
    needs_m = name not in ("polylattice", "matrix")
    if needs_m and m is None:
        raise UsageError(f"--m is required for the {name} construction")
    if name == "vdc":
        return vdc_matrices(b, m)
    if name == "hammersley":
        return hammersley_matrices(b, m)
    if name == "lp":
        return lp_matrices(b, m)
    if name == "faure":
        return faure_matrices(b, m)
    if name == "sobol2":
        if b != 2:
            raise UsageError("sobol2 is defined over F_2 only; drop --b or use --b 2")
        L = None
        if args.scramble_seed is not None:
            L = random_lower_triangular(m, np.random.default_rng(args.scramble_seed))
        return sobol2_scrambled(m, L, args.variant)
    if name == "fiblattice":
        if b != 2:
            raise UsageError("fiblattice is defined over F_2 only")
        return fibonacci_lattice_matrices(m)
    if name == "polylattice":
        if not args.poly_p or not args.poly_q:
            raise UsageError("polylattice needs --p 'b: c0 c1 ...' and at least one --q")
        p = parse_poly(args.poly_p)
        qs = [parse_poly(q) for q in args.poly_q]
        if any(q.b != p.b for q in qs):
            raise UsageError("all polynomials must share one base")
        return polylattice_matrices(p, qs)
    if name == "matrix":
        if not args.matrix:
            raise UsageError("the matrix construction needs --matrix FILE")
        mats = parse_matrices(Path(args.matrix).read_text())
        if not mats:
            raise UsageError(f"no matrices found in {args.matrix}")
        return NetSpec(mats[0].b, mats[0].rows, tuple(mats), label="matrix")
    raise UsageError(f"unknown construction {name!r}")


def build_shift(args, spec: NetSpec) -> ShiftVector:
    if args.shift_seed is None:
        return ShiftVector.zero(spec.b, spec.m, spec.d)
    return ShiftVector.random(spec.b, spec.m, spec.d, np.random.default_rng(args.shift_seed))


def _parse_c(text: str, d: int) -> tuple[int, ...]:
    try:
        c = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--c must be comma-separated integers, got {text!r}") from None
    if len(c) != d:
        raise UsageError(f"--c has {len(c)} entries but the net has dimension {d}")
    if any(v < 0 for v in c):
        raise UsageError("--c entries must be non-negative")
    return c


def _norm_arg(text: str):
    if text in ("inf", "Inf", "INF"):
        return "inf"
    if text in ("1", "2"):
        return int(text)
    raise argparse.ArgumentTypeError("norm must be 1, 2 or inf")


# -- subcommands ---------------------------------------------------------------------

def cmd_generate(args) -> tuple[dict, list[dict]]:
    spec = build_spec(args)
    pts = generate_points(spec, args.count)
    if args.shift_seed is not None:
        if pts.n != spec.size:
            raise UsageError("--shift-seed applies to the full net; drop --count")
        pts = digital_shift(pts, build_shift(args, spec))
    if args.out:
        write_points(pts, args.out)
    report = {"command": "generate", "construction": spec.label, "b": spec.b, "m": spec.m,
              "d": spec.d, "N": pts.n, "shift_seed": args.shift_seed, "out": args.out}
    if not args.out and not (args.json or args.csv):
        buf = io.StringIO()
        buf.write(f"{pts.b} {pts.m} {pts.d} {pts.n}\n")
        for row in pts.coords.tolist():
            buf.write(" ".join(map(str, row)) + "\n")
        report["_text"] = buf.getvalue().rstrip("\n")
    return report, [report]


def cmd_analyze(args) -> tuple[dict, list[dict]]:
    pts = read_points(args.points)
    if pts.n < 2:
        raise UsageError("analysis needs at least two points")
    rep = analyze(pts, args.p, args.toroidal, args.grid_res, args.method)
    out = {"command": "analyze", "file": str(args.points), "b": pts.b, "m": pts.m, "d": pts.d, "N": pts.n,
           "norm": str(args.p), "toroidal": args.toroidal, "squared": rep.squared, "resolution": rep.resolution}
    with_approx(out, "q", rep.q)
    out["q_witness"] = list(rep.q_witness)
    with_approx(out, "h_lower", rep.h_lower)
    with_approx(out, "h_upper", rep.h_upper)
    with_approx(out, "rho_lower", rep.rho_lower)
    with_approx(out, "rho_upper", rep.rho_upper)
    vb = volume_bounds(pts.n, pts.d, args.p)
    out["h_volume_lower_approx"] = vb.h_volume_lower
    out["q_volume_upper_approx"] = vb.q_volume_upper
    if pts.n == pts.b**pts.m and pts.m <= 16 and pts.d <= 5:
        out["t_boxcount"] = next(t for t in range(pts.m + 1) if box_counts_ok(pts, t))
    row = {k: v for k, v in out.items() if k != "q_witness"}
    row["q_witness"] = f"{rep.q_witness[0]}-{rep.q_witness[1]}"
    return out, [row]


def cmd_check_sep(args) -> tuple[dict, list[dict]]:
    spec = build_spec(args)
    delta = build_shift(args, spec)
    toroidal = args.method == "criterion" if args.toroidal is None else args.toroidal
    out = {"command": "check-sep", "construction": spec.label, "b": spec.b, "m": spec.m, "d": spec.d,
           "method": args.method, "toroidal": toroidal, "shift_seed": args.shift_seed}
    if args.c:
        c = _parse_c(args.c, spec.d)
        if args.method == "criterion":
            r = criterion_check(spec, delta, c, toroidal)
            status, viol, reason = r.status, r.violation, r.reason
        else:
            pts = digital_shift(generate_points(spec), delta)
            ok, viol = is_c_separated_bruteforce(pts, c, toroidal)
            status, reason = ("separated" if ok else "violated"), ""
        out.update(c=list(c), status=status, reason=reason,
                   violation=viol.as_dict() if viol else None)
        row = {k: out[k] for k in ("construction", "b", "m", "method", "toroidal", "status")}
        row["c"] = args.c
        return out, [row]
    if args.method == "criterion":
        rep = min_kappa_criterion(spec, delta, args.kappa_budget, toroidal)
    else:
        pts = digital_shift(generate_points(spec), delta)
        rep = min_kappa_bruteforce(pts, toroidal)
    d = rep.as_dict()
    d.pop("method")
    d.pop("toroidal")
    d["q_lower_approx"] = None if rep.q_lower is None else float(rep.q_lower)
    out.update(d)
    row = {k: out[k] for k in ("construction", "b", "m", "method", "toroidal", "kappa", "q_lower")}
    return out, [row]


def cmd_tvalue(args) -> tuple[dict, list[dict]]:
    spec = build_spec(args)
    out = {"command": "tvalue", "construction": spec.label, "b": spec.b, "m": spec.m, "d": spec.d,
           "t": t_value(spec)}
    if args.construction == "polylattice" and spec.d == 2:
        p, qs = parse_poly(args.poly_p), [parse_poly(q) for q in args.poly_q]
        if qs[0].coeffs == (1,):
            A = cf_expand(qs[1] % p, p).max_partial_degree
            out["t_from_continued_fraction"] = A - 1
    return out, [{k: out[k] for k in ("construction", "b", "m", "d", "t")}]


def _explicit_repro(args):
    name = args.scenario
    given = {k: getattr(args, k) for k in ("b", "m", "w", "k", "i_max", "variant", "trials", "shifts")
             if getattr(args, k) is not None}
    if not given:
        return None
    b = given.get("b")
    if name == "vdc":
        return [repro_vdc_mesh(b or 2, given.get("i_max", 4096))]
    if name == "hammersley":
        return [repro_hammersley(b or 2, given.get("m", 4))]
    if name == "sobol":
        variants = [given["variant"]] if "variant" in given else ["LP", "ILP"]
        return [repro_sobol_scrambled(given.get("w", 2), v, given.get("trials", 50), args.seed) for v in variants]
    if name == "faure":
        return [repro_faure(b or 3, given.get("w", 1))]
    if name == "fibonacci":
        return [repro_fibonacci(given.get("k", 4))]
    if name == "lp":
        return [repro_lp(b or 2, given.get("m", 6), given.get("shifts", 20), args.seed)]
    raise UsageError("explicit parameters need a single scenario, not 'all'")


def cmd_reproduce(args) -> tuple[dict, list[dict]]:
    results = _explicit_repro(args)
    if results is None:
        results = run_scenario(args.scenario, args.sweep, args.seed)
    results.sort(key=lambda r: (r.scenario, json.dumps(r.params, sort_keys=True)))
    reports = [r.as_dict() for r in results]
    verdict = "pass" if all(r.verdict == "pass" for r in results) else "fail"
    out = {"command": "reproduce", "scenario": args.scenario, "sweep": args.sweep, "seed": args.seed,
           "verdict": verdict, "results": reports}
    rows = []
    for r in reports:
        for c in r["checks"]:
            rows.append({"scenario": r["scenario"], "params": json.dumps(r["params"], sort_keys=True),
                         "check": c["name"], "claimed": c["claimed"], "measured": c["measured"],
                         "passed": c["passed"]})
    return out, rows


def cmd_scramble_search(args) -> tuple[dict, list[dict]]:
    found = search_scramble_pairs(args.m, args.trials, args.seed)
    out = {"command": "scramble-search", "m": found["m"], "trials": found["trials"], "seed": found["seed"]}
    with_approx(out, "best_q", found["best_q"])
    out.update(best_trial=found["best_trial"], best_L1=found["best_L1"], best_L2=found["best_L2"],
               scaled_q_histogram=found["scaled_q_histogram"],
               note="randomized search; a poor result does not rule out a good scramble pair")
    rows = [{"m": found["m"], "scaled_q": k, "count": v} for k, v in found["scaled_q_histogram"].items()]
    return out, rows


# -- rendering -----------------------------------------------------------------------

def _text(out: dict) -> str:
    if "_text" in out:
        return out["_text"]
    if out["command"] == "reproduce":
        lines = []
        for r in out["results"]:
            lines.append(f"[{r['verdict'].upper()}] {r['scenario']} {json.dumps(r['params'], sort_keys=True)}"
                         f" ({r['runtime_seconds']:.2f}s)")
            for c in r["checks"]:
                mark = "ok " if c["passed"] else "BAD"
                lines.append(f"    {mark} {c['name']}: measured {c['measured']} (claimed {c['claimed']})")
        lines.append(f"overall: {out['verdict']}")
        return "\n".join(lines)
    return "\n".join(f"{k}: {v}" for k, v in out.items() if not k.startswith("_"))


def _csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if v is None else v) for k, v in r.items()})
    return buf.getvalue().rstrip("\n")


def make_parser() -> argparse.ArgumentParser:
    outf = _output_flags()
    parser = argparse.ArgumentParser(prog="qunet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qunet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[outf, _construction_flags(True)], help="write the points of a net")
    g.add_argument("--count", type=int, help="only the first COUNT points")
    g.add_argument("--out", help="point file to write (default: print to stdout)")
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("analyze", parents=[outf], help="separation radius, covering bracket and mesh ratio")
    a.add_argument("points", help="point file ('b m d N' header, then scaled integer rows)")
    a.add_argument("--p", type=_norm_arg, default="inf", help="norm: 1, 2 or inf (default inf)")
    a.add_argument("--toroidal", action="store_true", help="use the toroidal distance")
    a.add_argument("--grid-res", type=int, help="covering grid spacing b^-R (default ceil(m/d)+2)")
    a.add_argument("--method", choices=("auto", "bruteforce", "kdtree", "sorted"), default="auto")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("check-sep", parents=[outf, _construction_flags(False)], help="kappa-separation")
    c.add_argument("--method", choices=("criterion", "bruteforce"), default="criterion")
    tor = c.add_mutually_exclusive_group()
    tor.add_argument("--toroidal", dest="toroidal", action="store_const", const=True, default=None,
                     help="wrapped intervals (default for the criterion)")
    tor.add_argument("--plain", dest="toroidal", action="store_const", const=False,
                     help="intervals inside the unit cube only (default for bruteforce)")
    c.add_argument("--kappa-budget", type=int, help="largest kappa the criterion search tries (default m+1)")
    c.add_argument("--c", help="check one resolution vector, e.g. '4,4', instead of searching")
    c.set_defaults(func=cmd_check_sep)

    t = sub.add_parser("tvalue", parents=[outf, _construction_flags(False)], help="t-value of a digital net")
    t.set_defaults(func=cmd_tvalue)

    r = sub.add_parser("reproduce", parents=[outf], help="run named reproductions")
    r.add_argument("scenario", choices=("all",) + SCENARIOS)
    r.add_argument("--sweep", action="store_true", help="extend every scenario to its full parameter range")
    for flag, kind in (("--b", int), ("--m", int), ("--w", int), ("--k", int), ("--i-max", int),
                       ("--trials", int), ("--shifts", int), ("--variant", str)):
        r.add_argument(flag, type=kind, default=None)
    r.set_defaults(func=cmd_reproduce)

    s = sub.add_parser("scramble-search", parents=[outf],
                       help="random search for base-2 scramble pairs with a large separation radius")
    s.add_argument("--m", type=int, required=True, help="number of digits; 2^m points per trial")
    s.add_argument("--trials", type=int, default=100, help="scramble pairs to draw (default 100)")
    s.set_defaults(func=cmd_scramble_search)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        out, rows = args.func(args)
    except (UsageError, FieldError, ValueError, ZeroDivisionError, OSError) as exc:
        print(f"qunet {args.command}: error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps({k: v for k, v in out.items() if not k.startswith("_")}, indent=2))
    elif args.csv:
        print(_csv(rows))
    else:
        print(_text(out))
    if out.get("command") == "reproduce" and out["verdict"] != "pass":
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
