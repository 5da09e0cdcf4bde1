"""``vdw`` command-line tool.

Exit codes: 0 success / valid, 1 invalid certificate or UNSAT, 2 usage or
input error, 3 a resource limit left the answer UNKNOWN.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .certificates import (
    MAX_COLORS,
    db_entries,
    detect_period,
    format_certificate,
    get_entry,
    parse_certificate,
)
from .cnf import (
    EncodingMeta,
    decode_model,
    encode,
    format_solver_output,
    parse_dimacs,
    parse_solver_output,
    to_dimacs,
)
from .core import VdwInstance, verify
from .errors import VdwError
from .search import SearchStatus, compare_bounds_report, find_max_sat
from .solver import SolveLimits, Verdict, solve, solve_external

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_UNKNOWN = 3

DEFAULT_WITNESSES = 10


def output_schema(command: str) -> dict:
    """JSON Schema for ``--json`` output; ``command`` like ``"verify"`` or ``"db verify-all"``."""
    name = command.replace(" ", "-")
    return json.loads(resources.files("vdw.schemas").joinpath(f"{name}.json").read_text())


class _Output:
    """Collects text lines or a single JSON document for one invocation."""

    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.lines: list[str] = []
        self.doc: dict = {}

    def line(self, text: str = "") -> None:
        self.lines.append(text)

    def flush(self, stream) -> None:
        if self.as_json:
            stream.write(json.dumps(self.doc, sort_keys=True) + "\n")
        elif self.lines:
            stream.write("\n".join(self.lines) + "\n")


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _write_text(path: str, text: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _limits(args) -> SolveLimits:
    return SolveLimits(max_conflicts=args.max_conflicts, max_time=args.timeout)


def _witness_lines(report, limit: Optional[int]) -> list[str]:
    shown = report.witnesses if limit is None else report.witnesses[:limit]
    lines = [
        f"  a={w.a} d={w.d} color={format_certificate([w.color])} "
        f"positions {','.join(map(str, w.positions(report.k)))}"
        for w in shown
    ]
    rest = len(report.witnesses) - len(shown)
    if rest > 0:
        lines.append(f"  ... {rest} more (use --all-witnesses)")
    return lines


# -- subcommands -----------------------------------------------------------


def cmd_verify(args, out: _Output) -> int:
    coloring = parse_certificate(_read_text(args.file), args.colors)
    report = verify(coloring, args.ap_length, args.colors)
    out.doc = report.to_dict()
    if report.valid:
        out.line(
            f"VALID: N={report.N}, r={report.r_declared}, k={report.k}, "
            f"colors used {report.colors_used}, {report.ap_count_checked} APs checked; "
            f"{report.bound_text()}"
        )
        return EXIT_OK
    out.line(
        f"INVALID: N={report.N}, r={report.r_declared}, k={report.k}, "
        f"{len(report.witnesses)} monochromatic {report.k}-APs"
    )
    limit = None if args.all_witnesses else DEFAULT_WITNESSES
    out.lines.extend(_witness_lines(report, limit))
    return EXIT_INVALID


def cmd_encode(args, out: _Output) -> int:
    cnf, meta = encode(
        VdwInstance(args.colors, args.ap_length, args.length),
        symmetry=args.symmetry,
        periodic_p=args.periodic,
    )
    text = to_dimacs(cnf, meta)
    out.doc = {
        "r": meta.r, "k": meta.k, "N": meta.N,
        "symmetry": meta.symmetry_broken, "periodic": meta.periodic_p,
        "num_vars": cnf.num_vars, "num_clauses": cnf.num_clauses,
        "out": args.out,
    }
    if args.out:
        _write_text(args.out, text)
        out.line(f"wrote {args.out}: {cnf.num_vars} vars, {cnf.num_clauses} clauses")
    elif args.json:
        out.doc["dimacs"] = text
    else:
        out.lines.append(text.rstrip("\n"))
    return EXIT_OK


def _formula_from_args(args):
    if args.file:
        return parse_dimacs(_read_text(args.file))
    if args.colors is None or args.ap_length is None or args.length is None:
        raise argparse.ArgumentTypeError("give --file DIMACS or all of -r, -k, -n")
    return encode(
        VdwInstance(args.colors, args.ap_length, args.length),
        symmetry=args.symmetry,
        periodic_p=args.periodic,
    )


def cmd_solve(args, out: _Output) -> int:
    cnf, meta = _formula_from_args(args)
    limits = _limits(args)
    if args.solver_cmd:
        outcome = solve_external(cnf, meta, args.solver_cmd, limits)
    else:
        outcome = solve(cnf, limits)
    st = outcome.stats
    out.doc = {
        "verdict": outcome.verdict.value,
        "num_vars": cnf.num_vars,
        "num_clauses": cnf.num_clauses,
        "stats": {
            "decisions": st.decisions, "propagations": st.propagations,
            "conflicts": st.conflicts, "seconds": round(st.seconds, 6),
        },
        "certificate": None,
        "valid": None,
    }
    text = format_solver_output(outcome)
    if args.out:
        _write_text(args.out, text)
    if outcome.is_sat and meta is not None:
        coloring = decode_model(outcome.assignment, meta)
        report = verify(coloring, meta.k, meta.r)
        out.doc["certificate"] = format_certificate(coloring, 10**9)
        out.doc["valid"] = report.valid
        out.line(f"c certificate {out.doc['certificate']}")
        out.line(f"c {'VALID' if report.valid else 'INVALID'}: {report.bound_text()}")
    out.lines.append(text.rstrip("\n"))
    return {Verdict.SAT: EXIT_OK, Verdict.UNSAT: EXIT_INVALID}.get(
        outcome.verdict, EXIT_UNKNOWN
    )


def cmd_decode(args, out: _Output) -> int:
    if args.cnf:
        _, meta = parse_dimacs(_read_text(args.cnf))
        if meta is None:
            raise argparse.ArgumentTypeError(f"{args.cnf} has no 'c vdw' header line")
    elif None in (args.colors, args.ap_length, args.length):
        raise argparse.ArgumentTypeError("give --cnf DIMACS or all of -r, -k, -n")
    else:
        meta = EncodingMeta(
            args.colors, args.ap_length, args.length, False, args.periodic
        )
    outcome = parse_solver_output(_read_text(args.file), num_vars=meta.num_vars)
    out.doc = {"verdict": outcome.verdict.value, "certificate": None, "valid": None}
    if not outcome.is_sat:
        out.line(f"solver verdict {outcome.verdict.value}; nothing to decode")
        return EXIT_INVALID if outcome.verdict is Verdict.UNSAT else EXIT_UNKNOWN
    coloring = decode_model(outcome.assignment, meta)
    report = verify(coloring, meta.k, meta.r)
    text = format_certificate(coloring, args.width)
    out.doc.update(
        certificate=format_certificate(coloring, 10**9),
        valid=report.valid,
        N=report.N,
        witnesses=len(report.witnesses),
    )
    if args.out:
        _write_text(args.out, text + "\n")
    else:
        out.lines.append(text)
    out.line(f"{'VALID' if report.valid else 'INVALID'}: {report.bound_text()}")
    return EXIT_OK if report.valid else EXIT_INVALID


def _search_output(result, out: _Output) -> int:
    out.doc = result.to_dict()
    limited = bool(result.steps) and result.steps[-1].verdict is Verdict.UNKNOWN
    out.doc["limited"] = limited
    if result.status is SearchStatus.EXACT:
        out.line(result.summary())
    elif limited:
        out.line(f"{result.summary()} (lower bound only; solver hit a limit at "
                 f"N={result.steps[-1].N})")
    else:
        out.line(f"{result.summary()} (lower bound only; cap reached)")
    if result.certificate is not None:
        out.line(f"certificate N={result.best_N}: "
                 f"{format_certificate(result.certificate, 10**9)}")
    return EXIT_UNKNOWN if limited else EXIT_OK


def cmd_search(args, out: _Output) -> int:
    result = find_max_sat(
        args.colors, args.ap_length, args.start, args.cap, _limits(args),
        solver_cmd=args.solver_cmd, jobs=args.jobs,
    )
    return _search_output(result, out)


def cmd_exact(args, out: _Output) -> int:
    result = find_max_sat(
        args.colors, args.ap_length, 1, args.cap, _limits(args),
        solver_cmd=args.solver_cmd, jobs=args.jobs,
    )
    return _search_output(result, out)


def cmd_period(args, out: _Output) -> int:
    coloring = parse_certificate(_read_text(args.file), args.colors)
    p = detect_period(coloring)
    out.doc = {"N": len(coloring), "period": p, "periodic": p < len(coloring)}
    out.line(f"period {p} (N={len(coloring)})")
    return EXIT_OK


def cmd_db_list(args, out: _Output) -> int:
    rows = []
    for rec in db_entries():
        rows.append({"name": rec.name, "r": rec.r, "k": rec.k,
                     "old_bound": rec.old_bound, "claimed_bound": rec.claimed_bound})
        out.line(f"{rec.name}: r={rec.r} k={rec.k} old > {rec.old_bound}, "
                 f"new > {rec.claimed_bound}")
    out.doc = {"entries": rows}
    return EXIT_OK


def cmd_db_verify_all(args, out: _Output) -> int:
    rows = compare_bounds_report()
    out.doc = {"rows": [row.to_dict() for row in rows],
               "all_verified": all(row.verified for row in rows)}
    for row in rows:
        if row.verified:
            out.line(f"{row.name}: VALID, N={row.actual_length}, bound > {row.actual_length}")
            continue
        problems = []
        if row.witness_count:
            problems.append(f"{row.witness_count} monochromatic {row.k}-APs")
        if row.actual_length != row.claimed_bound:
            problems.append(f"length {row.actual_length} != claimed {row.claimed_bound}")
        agree = "naive check agrees" if row.oracle_agrees else "NAIVE CHECK DISAGREES"
        out.line(f"{row.name}: INVALID, N={row.actual_length}, {', '.join(problems)} "
                 f"({agree})")
        if args.all_witnesses:
            report = get_entry(row.name).audit().report
            out.lines.extend(_witness_lines(report, None))
    return EXIT_OK if out.doc["all_verified"] else EXIT_INVALID


def cmd_db_export(args, out: _Output) -> int:
    try:
        rec = get_entry(args.name)
    except KeyError as exc:
        raise argparse.ArgumentTypeError(exc.args[0])
    text = format_certificate(rec.coloring, args.width)
    out.doc = {"name": rec.name, "r": rec.r, "k": rec.k,
               "claimed_bound": rec.claimed_bound, "old_bound": rec.old_bound,
               "certificate": format_certificate(rec.coloring, 10**9)}
    if args.out:
        _write_text(args.out, f"# {rec.name} > {rec.claimed_bound}\n{text}\n")
        out.line(f"wrote {args.out}")
    else:
        out.lines.append(text)
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return n


def _nonneg_float(value: str) -> float:
    x = float(value)
    if x <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {value}")
    return x


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit one JSON document")

    instance = argparse.ArgumentParser(add_help=False)
    instance.add_argument("-r", "--colors", type=_positive)
    instance.add_argument("-k", "--ap-length", type=int)
    instance.add_argument("-n", "--length", type=_positive)

    solving = argparse.ArgumentParser(add_help=False)
    solving.add_argument("--max-conflicts", type=_positive)
    solving.add_argument("--timeout", type=_nonneg_float, help="seconds per solve")
    solving.add_argument("--solver-cmd", help='external solver, e.g. "kissat {in}"')

    encoding = argparse.ArgumentParser(add_help=False)
    encoding.add_argument("--symmetry", action="store_true")
    encoding.add_argument("--periodic", type=_positive, metavar="P")

    parser = argparse.ArgumentParser(
        prog="vdw", description="van der Waerden certificate toolkit"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="verify a certificate file")
    p.add_argument("--file", required=True, help="certificate file ('-' for stdin)")
    p.add_argument("-r", "--colors", type=_positive, required=True)
    p.add_argument("-k", "--ap-length", type=int, default=3)
    p.add_argument("--all-witnesses", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("encode", parents=[common, encoding], help="write DIMACS CNF")
    p.add_argument("-r", "--colors", type=_positive, required=True)
    p.add_argument("-k", "--ap-length", type=int, required=True)
    p.add_argument("-n", "--length", type=_positive, required=True)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("solve", parents=[common, instance, encoding, solving],
                       help="solve an instance or a DIMACS file")
    p.add_argument("--file", help="DIMACS CNF file")
    p.add_argument("-o", "--out", help="write solver output here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("decode", parents=[common, instance],
                       help="turn solver output into a certificate")
    p.add_argument("--file", required=True, help="solver output ('-' for stdin)")
    p.add_argument("--cnf", help="DIMACS file whose 'c vdw' header gives r, k, N")
    p.add_argument("--periodic", type=_positive, metavar="P")
    p.add_argument("--width", type=_positive, default=80)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_decode)

    for name, func, help_ in (
        ("search", cmd_search, "sweep N upward from --start"),
        ("exact", cmd_exact, "compute W(r,k) exactly"),
    ):
        p = sub.add_parser(name, parents=[common, solving], help=help_)
        p.add_argument("-r", "--colors", type=_positive, required=True)
        p.add_argument("-k", "--ap-length", type=int, required=True)
        if name == "search":
            p.add_argument("--start", type=_positive, default=1)
        p.add_argument("--cap", "-n", "--length", dest="cap", type=_positive, default=256)
        p.add_argument("--jobs", type=_positive, default=1)
        p.set_defaults(func=func)

    p = sub.add_parser("period", parents=[common], help="smallest period of a certificate")
    p.add_argument("--file", required=True)
    p.add_argument("-r", "--colors", type=_positive, default=MAX_COLORS)
    p.set_defaults(func=cmd_period)

    db = sub.add_parser("db", help="embedded certificate database")
    dbsub = db.add_subparsers(dest="db_command", required=True)
    p = dbsub.add_parser("list", parents=[common])
    p.set_defaults(func=cmd_db_list)
    p = dbsub.add_parser("verify-all", parents=[common])
    p.add_argument("--all-witnesses", action="store_true")
    p.set_defaults(func=cmd_db_verify_all)
    p = dbsub.add_parser("export", parents=[common])
    p.add_argument("name", help='e.g. "W(7,3)"')
    p.add_argument("--width", type=_positive, default=80)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_db_export)
    return parser


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = _Output(getattr(args, "json", False))
    try:
        code = args.func(args, out)
    except (VdwError, argparse.ArgumentTypeError, OSError) as exc:
        if out.as_json:
            stdout.write(json.dumps({"error": str(exc), "exit_code": EXIT_USAGE}) + "\n")
        else:
            stderr.write(f"vdw: error: {exc}\n")
        return EXIT_USAGE
    out.flush(stdout)
    return code


def main() -> None:
    sys.exit(run())
