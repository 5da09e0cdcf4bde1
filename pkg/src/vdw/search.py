"""Sweeps over N that pin down small van der Waerden numbers.

For each N the instance is encoded with symmetry breaking and solved
independently.  The first UNSAT length is W(r, k) provided the length just
below it was shown SAT; a solver UNKNOWN only ever downgrades the result to
a lower bound.
"""

from __future__ import annotations

import enum
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .certificates import db_entries
from .cnf import decode_model, encode
from .core import Coloring, VdwInstance, naive_witnesses, verify
from .errors import EnumerationGuardError, InvalidParameterError
from .solver import NO_LIMITS, SolveLimits, Verdict, solve, solve_external

log = logging.getLogger(__name__)

BRUTE_FORCE_GUARD = 10**8
DEFAULT_CAP = 256

__all__ = [
    "SearchStatus",
    "StepRecord",
    "SearchResult",
    "find_max_sat",
    "exact_w",
    "brute_force_w",
    "brute_force_coloring",
    "BoundRow",
    "compare_bounds_report",
]


class SearchStatus(str, enum.Enum):
    EXACT = "Exact"
    LOWER_BOUND_ONLY = "LowerBoundOnly"


@dataclass(frozen=True)
class StepRecord:
    N: int
    verdict: Verdict
    conflicts: int = 0
    seconds: float = 0.0


@dataclass
class SearchResult:
    r: int
    k: int
    status: SearchStatus
    best_N: int
    certificate: Optional[Coloring]
    W: Optional[int] = None
    steps: list[StepRecord] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return self.status is SearchStatus.EXACT

    def summary(self) -> str:
        if self.exact:
            return f"W({self.r},{self.k}) = {self.W}"
        return f"W({self.r},{self.k}) > {self.best_N}"

    def to_dict(self) -> dict:
        from .certificates import format_certificate

        return {
            "r": self.r,
            "k": self.k,
            "status": self.status.value,
            "W": self.W,
            "best_N": self.best_N,
            "certificate": (
                format_certificate(self.certificate, 10**9) if self.certificate else None
            ),
            "steps": [
                {"N": s.N, "verdict": s.verdict.value, "conflicts": s.conflicts,
                 "seconds": round(s.seconds, 6)}
                for s in self.steps
            ],
        }


def _solve_length(
    r: int, k: int, N: int, limits: SolveLimits, solver_cmd: Optional[str]
) -> tuple[StepRecord, Optional[Coloring]]:
    cnf, meta = encode(VdwInstance(r, k, N), symmetry=True)
    if solver_cmd:
        outcome = solve_external(cnf, meta, solver_cmd, limits)
    else:
        outcome = solve(cnf, limits)
    step = StepRecord(N, outcome.verdict, outcome.stats.conflicts, outcome.stats.seconds)
    if not outcome.is_sat:
        return step, None
    coloring = decode_model(outcome.assignment, meta)
    if not verify(coloring, k, r, fail_fast=True).valid:
        raise AssertionError(f"decoded coloring for N={N} is not a certificate")
    return step, coloring


def _results(
    r: int, k: int, lengths: list[int], limits: SolveLimits,
    solver_cmd: Optional[str], jobs: int,
) -> Iterator[tuple[StepRecord, Optional[Coloring]]]:
    """Solve ``lengths`` in order; with jobs > 1, in windows of ``jobs``."""
    if jobs <= 1:
        for N in lengths:
            yield _solve_length(r, k, N, limits, solver_cmd)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for start in range(0, len(lengths), jobs):
            window = lengths[start : start + jobs]
            futures = [
                pool.submit(_solve_length, r, k, N, limits, solver_cmd) for N in window
            ]
            for fut in futures:
                yield fut.result()


def find_max_sat(
    r: int,
    k: int,
    start_N: int = 1,
    cap_N: int = DEFAULT_CAP,
    limits: SolveLimits = NO_LIMITS,
    *,
    solver_cmd: Optional[str] = None,
    jobs: int = 1,
) -> SearchResult:
    """Sweep N = start_N, start_N+1, ... up to cap_N until the first UNSAT.

    If start_N itself is UNSAT the sweep walks downward until it meets a
    satisfiable length, so an Exact status always rests on a SAT/UNSAT pair
    at W-1 and W.
    """
    VdwInstance(r, k, 1)
    if not 1 <= start_N <= cap_N:
        raise InvalidParameterError(f"need 1 <= start_N <= cap_N, got {start_N}, {cap_N}")

    steps: list[StepRecord] = []
    best_N, best = 0, None

    def done(status: SearchStatus, W: Optional[int] = None) -> SearchResult:
        return SearchResult(r, k, status, best_N, best, W, steps)

    for step, coloring in _results(
        r, k, list(range(start_N, cap_N + 1)), limits, solver_cmd, jobs
    ):
        steps.append(step)
        log.debug("N=%d %s (%d conflicts)", step.N, step.verdict.value, step.conflicts)
        if step.verdict is Verdict.SAT:
            best_N, best = step.N, coloring
            continue
        if step.verdict is Verdict.UNKNOWN:
            return done(SearchStatus.LOWER_BOUND_ONLY)
        if step.N == best_N + 1 or step.N == 1:
            return done(SearchStatus.EXACT, step.N)
        # start_N was already UNSAT: walk down to the frontier.
        W = step.N
        for N in range(step.N - 1, 0, -1):
            down, coloring = _solve_length(r, k, N, limits, solver_cmd)
            steps.append(down)
            if down.verdict is Verdict.UNKNOWN:
                return done(SearchStatus.LOWER_BOUND_ONLY)
            if down.verdict is Verdict.SAT:
                best_N, best = N, coloring
                return done(SearchStatus.EXACT, W)
            W = N
        return done(SearchStatus.EXACT, W)
    return done(SearchStatus.LOWER_BOUND_ONLY)


def exact_w(
    r: int,
    k: int,
    cap_N: int = DEFAULT_CAP,
    limits: SolveLimits = NO_LIMITS,
    **kwargs,
) -> SearchResult:
    return find_max_sat(r, k, 1, cap_N, limits, **kwargs)


def _ap_closes(colors: list[int], c: int, k: int) -> bool:
    """Would appending color c create a monochromatic k-AP ending there?"""
    i = len(colors)  # 0-based index of the new position
    for d in range(1, i // (k - 1) + 1):
        if all(colors[i - j * d] == c for j in range(1, k)):
            return True
    return False


def _check_guard(r: int, cap_N: int) -> None:
    if r**cap_N > BRUTE_FORCE_GUARD:
        raise EnumerationGuardError(
            f"r^cap_N = {r}^{cap_N} exceeds the enumeration guard {BRUTE_FORCE_GUARD:.0e}"
        )


def brute_force_w(r: int, k: int, cap_N: int) -> SearchResult:
    """Exhaustive backtracking over colorings, pruned at the first monochromatic AP.

    The deepest valid prefix reached is the longest valid coloring, because
    every prefix of a valid coloring is valid.
    """
    VdwInstance(r, k, cap_N)
    _check_guard(r, cap_N)
    colors: list[int] = []
    best: list[int] = []
    choice: list[int] = []
    while True:
        if len(colors) == cap_N:
            best = list(colors)
            break
        c = choice.pop() + 1 if len(choice) > len(colors) else 0
        while c < r and _ap_closes(colors, c, k):
            c += 1
        if c < r:
            choice.append(c)
            colors.append(c)
            if len(colors) > len(best):
                best = list(colors)
            continue
        if not colors:
            break
        colors.pop()

    certificate = Coloring(tuple(best)) if best else None
    if len(best) < cap_N:
        return SearchResult(r, k, SearchStatus.EXACT, len(best), certificate, len(best) + 1)
    return SearchResult(r, k, SearchStatus.LOWER_BOUND_ONLY, len(best), certificate)


def brute_force_coloring(r: int, k: int, N: int) -> Optional[Coloring]:
    """A valid r-coloring of 1..N found by exhaustive search, or None."""
    result = brute_force_w(r, k, N)
    return result.certificate if result.best_N == N else None


@dataclass(frozen=True)
class BoundRow:
    name: str
    r: int
    k: int
    old_bound: int
    claimed_bound: int
    verified: bool
    actual_length: int
    witness_count: int
    oracle_agrees: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def compare_bounds_report() -> list[BoundRow]:
    """Re-verify every embedded certificate against its published bound.

    Each body is also run through the naive triple-loop check, and
    ``oracle_agrees`` records whether both report the same witness set.
    """
    rows = []
    for rec in db_entries():
        audit = rec.audit()
        fast = [(w.a, w.d, w.color) for w in audit.report.witnesses]
        rows.append(
            BoundRow(
                name=rec.name,
                r=rec.r,
                k=rec.k,
                old_bound=rec.old_bound,
                claimed_bound=rec.claimed_bound,
                verified=audit.verified,
                actual_length=audit.actual_length,
                witness_count=len(fast),
                oracle_agrees=fast == naive_witnesses(rec.coloring, rec.k),
            )
        )
    return rows
