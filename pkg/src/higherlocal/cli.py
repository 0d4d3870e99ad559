"""Command-line front end.

Reads a connection description file, runs the requested computation and
emits a deterministic key-value report (or a json-like rendering of the
same data).  All numeric output is exact rational text.  Exit codes: 0 on
success, 2 when window dimensions fail to stabilize, 3 on validation
failures; diagnostics go to the error stream.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import List, Optional, Tuple

from . import series
from .derham import (
    FormTuple,
    build_multicomplex,
    check_multicomplex,
    cohomology_dims,
    standard_forms,
)
from .dmodule import find_cyclic_vector, newton_polygon, to_scalar_operator
from .epsilon import SignConvention, epsilon_degree, verify_duality
from .errors import (
    HigherLocalError,
    NotClosed,
    NotFlat,
    NotIndependent,
    SpecFileError,
    Unstabilized,
)
from .specfile import SpecFile, parse_specfile

Report = List[Tuple[str, str]]

EXIT_OK = 0
EXIT_UNSTABILIZED = 2
EXIT_INVALID = 3


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, Fraction):
        return str(value)
    return str(value)


def _forms_or_standard(spec: SpecFile) -> FormTuple:
    if spec.raw_forms:
        return FormTuple(spec.forms)
    return standard_forms(spec.field)


def _flatness_gate(spec: SpecFile):
    rep = spec.connection.check_flatness()
    if not rep.flat:
        i, j, r, c = rep.witness
        raise NotFlat(
            f"curvature component ({i},{j}) entry ({r},{c}) is certified nonzero"
        )


def _capped_schedule(max_window: Optional[int]):
    from .tate import DEFAULT_SCHEDULE

    if max_window is None:
        return DEFAULT_SCHEDULE
    capped = tuple(w for w in DEFAULT_SCHEDULE if w <= max_window)
    return capped if capped else (max_window,)


def run(command: str, spec: SpecFile, max_window: Optional[int] = None) -> Report:
    """Execute one command against a parsed input file."""
    report: Report = [("command", command), ("n", str(spec.level)), ("rank", str(spec.rank))]
    C = spec.connection
    schedule = _capped_schedule(max_window)
    if command == "cohomology":
        _flatness_gate(spec)
        rep = cohomology_dims(C, index_schedule=schedule)
        for i, d in enumerate(rep.dims):
            report.append((f"h{i}", str(d)))
        report.append(("euler", str(rep.euler)))
        report.append(("stabilized", _fmt(rep.stabilized)))
        if rep.level == 1:
            from .dmodule import connection_irregularity

            irr = connection_irregularity(C, seed=spec.seed)
            report.append(("irregularity", str(irr)))
            report.append(("euler_matches_irregularity", _fmt(rep.euler == -irr)))
            if rep.window_dims is not None:
                for i, d in enumerate(rep.window_dims):
                    report.append((f"window_h{i}", str(d)))
                report.append(("window_agrees", _fmt(rep.window_agrees)))
        if rep.e2 is not None:
            for (p, q), d in sorted(rep.e2.items()):
                report.append((f"e2_p{p}_q{q}", str(d)))
        if rep.total_dims is not None:
            for i, d in enumerate(rep.total_dims):
                report.append((f"total_h{i}", str(d)))
            report.append(("filtrations_agree", _fmt(rep.total_dims == rep.dims)))
        if not rep.stabilized:
            raise Unstabilized(report)
        return report
    if command == "irregularity":
        if spec.level != 1:
            raise SpecFileError("irregularity runs over one variable")
        s, cert, det = find_cyclic_vector(C, seed=spec.seed)
        L = to_scalar_operator(C, s, cert)
        np_ = newton_polygon(L)
        report.append(("operator", L.render(spec.field)))
        report.append(
            ("newton_points", " ".join(f"({j},{v})" for j, v in np_.points))
        )
        report.append(
            (
                "slopes",
                " ".join(f"{s}x{l}" for s, l in np_.slopes) if np_.slopes else "none",
            )
        )
        report.append(("irregularity", str(np_.irregularity)))
        return report
    if command == "cyclic":
        if spec.level != 1:
            raise SpecFileError("cyclic vector search runs over one variable")
        s, cert, det = find_cyclic_vector(C, seed=spec.seed)
        report.append(
            ("vector", "(" + ", ".join(spec.field.render(x) for x in s) + ")")
        )
        report.append(("certificate_determinant", spec.field.render(det)))
        report.append(("determinant_valuation", str(det.valuation())))
        L = to_scalar_operator(C, s, cert)
        report.append(("operator", L.render(spec.field)))
        return report
    if command == "epsilon":
        _flatness_gate(spec)
        nu = _forms_or_standard(spec)
        rep = epsilon_degree(C, nu, schedule=schedule, seed=spec.seed)
        report.append(("degree", str(rep.degree)))
        ran_windows = bool(rep.window_reports)
        if rep.window_degree is not None:
            report.append(("window_degree", str(rep.window_degree)))
        else:
            report.append(
                ("window_degree", "unstabilized" if ran_windows else "skipped")
            )
        report.append(
            (
                "routes_agree",
                _fmt(rep.routes_agree) if rep.routes_agree is not None else "unknown",
            )
        )
        for k, wrep in enumerate(rep.window_reports):
            report.append((f"window{k}_ker", str(wrep.ker_dim)))
            report.append((f"window{k}_coker", str(wrep.coker_dim)))
            report.append(
                (
                    f"window{k}_stabilized_at",
                    str(wrep.stabilized_at) if wrep.stabilized else "unstabilized",
                )
            )
        if rep.level_degrees:
            for q, d in enumerate(rep.level_degrees):
                report.append((f"level{q}_degree", str(d)))
        if ran_windows and any(not r.stabilized for r in rep.window_reports):
            raise Unstabilized(report)
        return report
    if command == "verify":
        _flatness_gate(spec)
        report.append(("check_flatness", "pass"))
        nu = _forms_or_standard(spec)  # NotClosed / NotIndependent surface here
        report.append(("check_forms", "pass"))
        B = build_multicomplex(C, nu)
        mrep = check_multicomplex(B)
        report.append(("check_squares", "pass" if mrep.squares_ok else "fail"))
        report.append(("check_acyclicity", "pass" if mrep.acyclic else "fail"))
        sigma = SignConvention(spec.sigma)
        ok, lhs, rhs = verify_duality(C, nu, sigma, seed=spec.seed)
        report.append(("check_duality", "pass" if ok else "fail"))
        report.append(("sigma", str(spec.sigma)))
        report.append(("degree", str(epsilon_degree(C, nu, seed=spec.seed).degree)))
        overall = mrep.squares_ok and mrep.acyclic and ok
        report.append(("result", "pass" if overall else "fail"))
        return report
    raise SpecFileError(f"unknown command {command!r}")


def format_report(report: Report, fmt: str) -> str:
    if fmt == "kv":
        return "\n".join(f"{k} = {v}" for k, v in report) + "\n"
    if fmt == "json-like":
        body = ",\n".join(f'  "{k}": "{v}"' for k, v in report)
        return "{\n" + body + "\n}\n"
    raise ValueError(f"unknown format {fmt!r}")


def main(argv: Optional[List[str]] = None) -> int:
    ap = argparse.ArgumentParser(
        prog="higherlocal",
        description="Exact computations for flat connections on Laurent series towers",
    )
    ap.add_argument("path", help="input description file")
    ap.add_argument("--precision", type=int, default=None, help="terms kept per level")
    ap.add_argument("--max-window", type=int, default=32, help="largest window size")
    ap.add_argument("--seed", type=int, default=None, help="cyclic vector search seed")
    ap.add_argument(
        "--format", choices=("kv", "json-like"), default="kv", help="report format"
    )
    args = ap.parse_args(argv)
    try:
        with open(args.path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    old_prec = None
    try:
        spec = parse_specfile(text)
        if args.precision is not None:
            spec = SpecFile(
                spec.level,
                spec.names,
                args.precision,
                spec.rank,
                spec.raw_matrices,
                spec.raw_forms,
                spec.command,
                spec.seed,
                spec.sigma,
            )
        if args.seed is not None:
            spec = SpecFile(
                spec.level,
                spec.names,
                spec.precision,
                spec.rank,
                spec.raw_matrices,
                spec.raw_forms,
                spec.command,
                args.seed,
                spec.sigma,
            )
        old_prec = series.set_working_precision(spec.precision)
        report = run(spec.command, spec, max_window=args.max_window)
    except Unstabilized as exc:
        if isinstance(exc.report, list):
            sys.stdout.write(format_report(exc.report, args.format))
        print("error: Unstabilized: window dimensions did not settle", file=sys.stderr)
        return EXIT_UNSTABILIZED
    except (SpecFileError, NotFlat, NotClosed, NotIndependent) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except HigherLocalError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    finally:
        if old_prec is not None:
            series.set_working_precision(old_prec)
    sys.stdout.write(format_report(report, args.format))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
