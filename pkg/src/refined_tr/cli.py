"""Command-line interface: ``refined-tr <command> CURVE-FILE [options]``.

Commands
    classify       ramification points and the Ptilde split
    compute        omega_{g,n} (``--g``, ``--n`` = number of arguments)
    validate       structural, loop-equation, cross-path, oracle, linear-loop,
                   Q-top and dilaton checks for every entry up to ``--depth``
    qtop           varpi_{g,n}, or the (g,1) tower up to ``--kmax`` = 2g
    quantum-curve  WKB checks and the Q-top quantum curve up to ``--kmax``
    free-energy    F_g (with ``--shift`` also F_g for phi + alpha log x)
    dilaton-check  dilaton equation for every (g,n) with 2g-2+n <= ``--depth``

Symbolic parameters are pinned by ``--params a=1/3,l0=3/2`` or by ``--seed``;
otherwise the file's ``seeds`` option is used (every seed for validate and
dilaton-check, the first seed elsewhere).  The exit status is 0 exactly when
every requested check passed.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .algebra import ParseError, partial_fractions
from .algebra.poly import REFINEMENT, format_ratfunc
from .cache import DiffCache
from .config import load_curve_file, parse_assignments, sample_parameters
from .curve import CurveConfig, CurveError, SpectralCurve, point_text, validate_curve
from .free_energy import (
    FreeEnergyUndefined, PairingError, PrimitiveSpec, check_dilaton, format_table, free_energy,
)
from .qtop import DescentFailure, Descent, QuantumCurve, check_qtop_consistency, wkb_coefficients
from .recursion import (
    FULL, QTOP, MultiDiff, RecursionError, RecursionStore, compute_omega_alt, euler_level,
    genus_text,
)
from .validate import (
    CheckReport, UnrefinedOracle, check_linear_loop, check_loop_equation, check_structural,
    compare_q0, negative_controls,
)

FORMATS = ("canonical", "partial-fractions", "coefficient-table")


# serialization ----------------------------------------------------------------------

def serialize_diff(d: MultiDiff, fmt: str = "canonical") -> str:
    if fmt == "canonical":
        return d.canonical()
    marks = tuple("d" + v for v in d.variables)
    if fmt == "coefficient-table":
        rows = []
        for k, c in enumerate(d.expr.coefficients(REFINEMENT)):
            if not c.is_zero():
                rows.append(f"Q^{k}: {format_ratfunc(c, marks)}")
        return "\n".join(rows) if rows else "0"
    if fmt == "partial-fractions":
        blocks = []
        for v in d.variables:
            pf = partial_fractions(d.expr, v)
            lines = [f"in {v}:"]
            for pole, order, c in pf.terms:
                lines.append(f"  pole {point_text(pole)}, order {order}: {format_ratfunc(c)}")
            if not pf.polynomial.is_zero():
                lines.append(f"  polynomial part: {format_ratfunc(pf.polynomial)}")
            blocks.append("\n".join(lines))
        return "\n".join(blocks)
    raise ValueError(f"unknown format {fmt!r}")


# the validation suite ------------------------------------------------------------------

def stable_entries(depth: int) -> list:
    """(2g, arity) of every stable entry with 2g-2+n <= depth."""
    out = []
    for level in range(depth + 1):
        for two_g in range(level + 3):
            arity = level + 3 - two_g
            if arity >= 1:
                out.append((two_g, arity))
    return out


def dilaton_cases(depth: int) -> list:
    """(2g, n) with 2g-2+n <= depth, unstable instances included."""
    return [(two_g, n) for two_g in range(depth + 3) for n in range(depth + 3)
            if euler_level(two_g, n + 2) >= -1 and two_g - 2 + n <= depth]


def _cross_path(store: RecursionStore, two_g: int, arity: int) -> CheckReport:
    try:
        compute_omega_alt(store, store.curve, Fraction(two_g, 2), arity)
    except RecursionError as e:
        return CheckReport("cross-path", (two_g, arity), False, None, f"({e})")
    return CheckReport("cross-path", (two_g, arity), True, detail="(recursion 1 = recursion 2)")


def validation_suite(store: RecursionStore, depth: int) -> list[CheckReport]:
    oracle = UnrefinedOracle(store.curve)
    reports = []
    for two_g, arity in stable_entries(depth):
        reports.append(check_structural(store, two_g, arity))
        reports.append(check_loop_equation(store, two_g, arity))
        reports.append(_cross_path(store, two_g, arity))
        reports.append(compare_q0(store, two_g, arity, oracle))
        reports.append(check_linear_loop(store, two_g, arity))
        reports.append(check_structural(store, two_g, arity, QTOP))
        reports.append(check_qtop_consistency(store, two_g, arity))
        reports.append(check_linear_loop(store, two_g, arity, QTOP))
    for two_g, n in dilaton_cases(depth - 1):
        reports.append(check_dilaton(store, two_g, n))
    if depth >= 1:
        reports.extend(negative_controls(store))
    return reports


# command plumbing -------------------------------------------------------------------------

def _parse_genus(text: str) -> int:
    two_g = Fraction(text) * 2
    if two_g.denominator != 1 or two_g < 0:
        raise argparse.ArgumentTypeError(f"g must be a non-negative half-integer, got {text!r}")
    return int(two_g)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="refined-tr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("curve", help="curve file")
        p.add_argument("--params", help="pin parameters, e.g. a=1/3,l0=3/2")
        p.add_argument("--seed", type=int, help="pin symbolic parameters to a random sample")
        p.add_argument("--no-cache", action="store_true", help="do not read or write the disk cache")
        return p

    command("classify", "print ramification data")
    p = command("compute", "print omega_{g,n}")
    p.add_argument("--g", type=_parse_genus, required=True, help="genus, a half-integer")
    p.add_argument("--n", type=int, required=True, help="number of arguments")
    p.add_argument("--format", choices=FORMATS, default="canonical")
    p = command("validate", "run the validation suite")
    p.add_argument("--depth", type=int, help="max 2g-2+n (default: file option or 2)")
    p = command("qtop", "print varpi_{g,n} or the (g,1) tower")
    p.add_argument("--g", type=_parse_genus, help="genus, a half-integer")
    p.add_argument("--n", type=int, default=1, help="number of arguments")
    p.add_argument("--kmax", type=int, help="print varpi_{k/2,1} for k <= kmax")
    p.add_argument("--format", choices=FORMATS, default="canonical")
    p = command("quantum-curve", "WKB checks and the quantum curve")
    p.add_argument("--kmax", type=int, help="highest Q_k (default: file option or 4)")
    p = command("free-energy", "print F_g")
    p.add_argument("--g", type=_parse_genus, required=True, help="genus, at least 3/2")
    p.add_argument("--shift", action="store_true", help="also pair with phi + alpha log x")
    p = command("dilaton-check", "check the dilaton equation")
    p.add_argument("--depth", type=int, help="max 2g-2+n (default: file option or 2)")
    p.add_argument("--shift", action="store_true", help="use phi + alpha log x")
    return parser


def _samples(cfg: CurveConfig, args, all_seeds: bool):
    """(config, note) pairs to run; note describes pinned parameters."""
    if args.params:
        cfg = cfg.with_parameters(parse_assignments(args.params))
    if args.seed is not None:
        seeds = [args.seed]
    elif cfg.symbolic() and cfg.option("seeds"):
        seeds = list(cfg.option("seeds"))
        seeds = seeds if all_seeds else seeds[:1]
    else:
        return [(cfg, None)]
    out = []
    for seed in seeds:
        values = sample_parameters(cfg, seed)
        note = f"seed={seed}" + "".join(f", {k}={v}" for k, v in sorted(values.items()))
        out.append((cfg.with_parameters(values), note))
    return out


def _store(curve: SpectralCurve, args) -> RecursionStore:
    return RecursionStore(curve, cache=None if args.no_cache else DiffCache())


def _emit_reports(reports, note, out) -> bool:
    ok = True
    for r in reports:
        if note and r.sampled is None:
            r.sampled = note
        print(r, file=out)
        ok = ok and r.passed
    return ok


def _run(args, out) -> bool:
    cfg = load_curve_file(args.curve)
    multi = args.command in ("validate", "dilaton-check")
    ok = True
    for sample_cfg, note in _samples(cfg, args, multi):
        curve = validate_curve(sample_cfg)
        if note and not multi:
            print(f"# {note}", file=out)
        if args.command == "classify":
            print(curve.ramification.summary(), file=out)
            continue
        store = _store(curve, args)
        if args.command == "compute":
            print(serialize_diff(store.get(args.g, args.n, FULL), args.format), file=out)
        elif args.command == "qtop":
            if args.kmax is not None:
                for k in range(args.kmax + 1):
                    d = store.get(k, 1, QTOP)
                    print(f"varpi_({genus_text(k)},1) = {serialize_diff(d, args.format)}", file=out)
            elif args.g is not None:
                print(serialize_diff(store.get(args.g, args.n, QTOP), args.format), file=out)
            else:
                raise ValueError("qtop needs --g or --kmax")
        elif args.command == "quantum-curve":
            kmax = args.kmax if args.kmax is not None else cfg.option("kmax", 4)
            wkb = wkb_coefficients(store, curve, kmax)
            reports = list(wkb.reports)
            if all(r.passed for r in reports):
                descend = Descent(curve)
                coefficients = []
                for k, q in enumerate(wkb.Q):
                    coefficients.append(descend(q))
                    reports.append(CheckReport("descent", (k, 1), True,
                                               detail="(lift of Qbar_k equals Q_k)", label=f"k={k}"))
                print(QuantumCurve(coefficients).listing(), file=out)
            ok = _emit_reports(reports, note, out) and ok
        elif args.command == "free-energy":
            value = free_energy(store, curve, Fraction(args.g, 2))
            print(f"F_{genus_text(args.g)} = {format_ratfunc(value)}", file=out)
            print(format_table(value), file=out)
            if args.shift:
                shifted = free_energy(store, curve, Fraction(args.g, 2), PrimitiveSpec.shifted())
                print(f"F_{genus_text(args.g)}^U = {format_ratfunc(shifted)}", file=out)
                print(f"F^U - F = {format_ratfunc((shifted - value).compact())}", file=out)
        elif args.command == "dilaton-check":
            depth = args.depth if args.depth is not None else cfg.option("depth", 2)
            spec = PrimitiveSpec.shifted() if args.shift else PrimitiveSpec()
            reports = [check_dilaton(store, tg, n, spec) for tg, n in dilaton_cases(depth)]
            ok = _emit_reports(reports, note, out) and ok
        elif args.command == "validate":
            depth = args.depth if args.depth is not None else cfg.option("depth", 2)
            ok = _emit_reports(validation_suite(store, depth), note, out) and ok
    return ok


def run_command(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        ok = _run(args, out)
    except (OSError, ParseError, CurveError, RecursionError, DescentFailure, PairingError,
            FreeEnergyUndefined, ArithmeticError, ValueError) as e:
        print(f"refined-tr: error: {e}", file=sys.stderr)
        return 2
    if args.command in ("validate", "dilaton-check", "quantum-curve"):
        print("ALL PASS" if ok else "SOME CHECKS FAILED", file=out)
    return 0 if ok else 1


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
