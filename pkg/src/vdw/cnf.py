"""Direct (one-hot) CNF encoding of the coloring problem and DIMACS I/O.

Variable x(i, c) is true when position i carries color c.  Clauses:

* at least one color per position,
* pairwise at most one color per position,
* for every k-term AP and every color, not all k positions share it,
* optionally the unit x(1, 0) to break color symmetry.

With a period p, positions fold onto 1..p and the variable count drops to
p*r; clauses are canonicalized and deduplicated after folding.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .core import Coloring, VdwInstance, enumerate_aps
from .errors import InconsistentModelError, InvalidParameterError, MalformedOutputError
from .solver import SolveOutcome, SolveStats, Verdict

__all__ = [
    "CnfFormula",
    "EncodingMeta",
    "encode",
    "expected_clause_count",
    "to_dimacs",
    "parse_dimacs",
    "parse_solver_output",
    "format_solver_output",
    "decode_model",
]


@dataclass
class CnfFormula:
    num_vars: int
    clauses: list[list[int]] = field(default_factory=list)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)


@dataclass(frozen=True)
class EncodingMeta:
    r: int
    k: int
    N: int
    symmetry_broken: bool = False
    periodic_p: Optional[int] = None

    @property
    def num_vars(self) -> int:
        return (self.periodic_p or self.N) * self.r

    def var(self, i: int, c: int) -> int:
        """Variable for position i (1-based) having color c (0-based)."""
        if self.periodic_p is not None:
            i = (i - 1) % self.periodic_p + 1
        return (i - 1) * self.r + c + 1

    def header(self) -> str:
        return (
            f"c vdw r={self.r} k={self.k} n={self.N} "
            f"sym={int(self.symmetry_broken)} p={self.periodic_p or 0}"
        )


def expected_clause_count(r: int, k: int, N: int, symmetry: bool = False) -> int:
    """Closed-form clause count of the non-periodic encoding."""
    aps = sum(N - (k - 1) * d for d in range(1, (N - 1) // (k - 1) + 1))
    return N + N * r * (r - 1) // 2 + r * aps + int(symmetry)


def encode(
    instance: VdwInstance,
    symmetry: bool = False,
    periodic_p: Optional[int] = None,
) -> tuple[CnfFormula, EncodingMeta]:
    r, k, N = instance.r, instance.k, instance.N
    if periodic_p is not None and not 1 <= periodic_p <= N:
        raise InvalidParameterError(f"period must be in 1..{N}, got {periodic_p}")
    meta = EncodingMeta(r, k, N, symmetry, periodic_p)
    var = meta.var

    clauses: list[list[int]] = []
    for i in range(1, N + 1):
        clauses.append([var(i, c) for c in range(r)])
    for i in range(1, N + 1):
        for c in range(r):
            for c2 in range(c + 1, r):
                clauses.append([-var(i, c), -var(i, c2)])
    for a, d in enumerate_aps(N, k):
        for c in range(r):
            clauses.append([-var(a + j * d, c) for j in range(k)])
    if symmetry:
        clauses.append([var(1, 0)])

    if periodic_p is not None:
        seen: set[tuple[int, ...]] = set()
        folded = []
        for clause in clauses:
            key = tuple(sorted(set(clause), key=lambda x: (abs(x), x)))
            if key not in seen:
                seen.add(key)
                folded.append(list(key))
        clauses = folded

    return CnfFormula(meta.num_vars, clauses), meta


def to_dimacs(cnf: CnfFormula, meta: Optional[EncodingMeta] = None) -> str:
    lines = []
    if meta is not None:
        lines.append(meta.header())
    lines.append(f"p cnf {cnf.num_vars} {len(cnf.clauses)}")
    lines.extend(" ".join(map(str, clause)) + " 0" for clause in cnf.clauses)
    return "\n".join(lines) + "\n"


_META_RE = re.compile(
    r"^c vdw r=(\d+) k=(\d+) n=(\d+) sym=([01]) p=(\d+)\s*$", re.MULTILINE
)


def parse_dimacs(text: str) -> tuple[CnfFormula, Optional[EncodingMeta]]:
    """Read DIMACS CNF; also recovers the ``c vdw`` header when present."""
    meta = None
    m = _META_RE.search(text)
    if m:
        r, k, n, sym, p = map(int, m.groups())
        meta = EncodingMeta(r, k, n, bool(sym), p or None)

    num_vars = None
    declared = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("c") or s.startswith("%"):
            continue
        if s.startswith("p"):
            parts = s.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise MalformedOutputError(f"line {lineno}: bad problem line {s!r}")
            num_vars, declared = int(parts[2]), int(parts[3])
            continue
        if num_vars is None:
            raise MalformedOutputError(f"line {lineno}: clause before problem line")
        for tok in s.split():
            x = int(tok)
            if x == 0:
                clauses.append(current)
                current = []
            else:
                current.append(x)
    if num_vars is None:
        raise MalformedOutputError("missing 'p cnf' problem line")
    if current:
        clauses.append(current)
    if declared != len(clauses):
        raise MalformedOutputError(
            f"header declares {declared} clauses, found {len(clauses)}"
        )
    return CnfFormula(num_vars, clauses), meta


def parse_solver_output(text: str, num_vars: Optional[int] = None) -> SolveOutcome:
    """Parse competition-style solver output (``s`` and ``v`` lines).

    A SAT answer needs ``v`` lines closed by a 0 literal; when ``num_vars``
    is given every variable 1..num_vars must also be assigned.
    """
    status = None
    values: list[int] = []
    terminated = False
    for line in text.splitlines():
        s = line.strip()
        if s.startswith("s "):
            status = s[2:].strip()
        elif s.startswith("v ") or s == "v":
            for tok in s[1:].split():
                try:
                    x = int(tok)
                except ValueError:
                    raise MalformedOutputError(f"bad literal {tok!r} in model line")
                if x == 0:
                    terminated = True
                else:
                    values.append(x)

    if status == "UNSATISFIABLE":
        return SolveOutcome(Verdict.UNSAT, stats=SolveStats())
    if status == "UNKNOWN":
        return SolveOutcome(Verdict.UNKNOWN, stats=SolveStats())
    if status != "SATISFIABLE":
        raise MalformedOutputError(
            "missing status line" if status is None else f"unknown status {status!r}"
        )
    if not terminated:
        raise MalformedOutputError("SAT answer without a 0-terminated model")
    assignment = {abs(x): x > 0 for x in values}
    if num_vars is not None:
        missing = [v for v in range(1, num_vars + 1) if v not in assignment]
        if missing:
            raise MalformedOutputError(
                f"model leaves {len(missing)} variables unassigned (first: {missing[0]})"
            )
    return SolveOutcome(Verdict.SAT, assignment, SolveStats())


def format_solver_output(outcome: SolveOutcome, per_line: int = 20) -> str:
    """Inverse of :func:`parse_solver_output`."""
    status = {
        Verdict.SAT: "SATISFIABLE",
        Verdict.UNSAT: "UNSATISFIABLE",
        Verdict.UNKNOWN: "UNKNOWN",
    }[outcome.verdict]
    lines = [f"s {status}"]
    if outcome.is_sat:
        lits = [v if val else -v for v, val in sorted(outcome.assignment.items())]
        lits.append(0)
        for i in range(0, len(lits), per_line):
            lines.append("v " + " ".join(map(str, lits[i : i + per_line])))
    return "\n".join(lines) + "\n"


def decode_model(assignment: Mapping[int, bool], meta: EncodingMeta) -> Coloring:
    colors = []
    for i in range(1, meta.N + 1):
        true_colors = [c for c in range(meta.r) if assignment.get(meta.var(i, c), False)]
        if len(true_colors) != 1:
            raise InconsistentModelError(i, true_colors)
        colors.append(true_colors[0])
    return Coloring(tuple(colors))
