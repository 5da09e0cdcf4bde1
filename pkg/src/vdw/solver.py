"""A compact CDCL SAT solver and the external-solver delegation contract.

The internal solver does two-watched-literal propagation (binary clauses
go through separate implication lists), first-UIP clause learning with
local minimization, VSIDS branching with phase saving, geometric
restarts and LBD-based learnt-clause reduction.  It is sized for small
van der Waerden instances, not for general competition use.
"""

from __future__ import annotations

import enum
import heapq
import os
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional, Sequence

from .errors import InvalidFormulaError

if TYPE_CHECKING:
    from .cnf import CnfFormula, EncodingMeta

__all__ = [
    "Verdict",
    "SolveStats",
    "SolveOutcome",
    "SolveLimits",
    "CdclSolver",
    "solve",
    "solve_external",
    "check_model",
]


class Verdict(str, enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


@dataclass
class SolveStats:
    decisions: int = 0
    propagations: int = 0
    conflicts: int = 0
    restarts: int = 0
    learnt_clauses: int = 0
    seconds: float = 0.0


@dataclass
class SolveOutcome:
    verdict: Verdict
    assignment: Optional[dict[int, bool]] = None
    stats: SolveStats = field(default_factory=SolveStats)

    @property
    def is_sat(self) -> bool:
        return self.verdict is Verdict.SAT


@dataclass(frozen=True)
class SolveLimits:
    max_conflicts: Optional[int] = None
    max_time: Optional[float] = None  # seconds


NO_LIMITS = SolveLimits()


def check_model(clauses: Sequence[Sequence[int]], assignment: dict[int, bool]) -> bool:
    for clause in clauses:
        if not any(assignment.get(abs(x), False) == (x > 0) for x in clause):
            return False
    return True


def _validate(num_vars: int, clauses: Sequence[Sequence[int]]) -> None:
    if num_vars < 0:
        raise InvalidFormulaError(f"negative variable count {num_vars}")
    for i, clause in enumerate(clauses):
        for x in clause:
            if x == 0 or abs(x) > num_vars:
                raise InvalidFormulaError(
                    f"literal {x} in clause {i + 1} out of range 1..{num_vars}"
                )


class CdclSolver:
    """Single-use solver over a DIMACS-style clause list.

    Internally literal codes are ``2*v`` for v and ``2*v + 1`` for -v, so
    negation is ``lit ^ 1``.
    """

    var_decay = 0.95
    restart_first = 100
    restart_factor = 1.5
    reduce_first = 2000
    reduce_step = 300

    def __init__(self, num_vars: int, clauses: Sequence[Sequence[int]]):
        _validate(num_vars, clauses)
        self.num_vars = n = num_vars
        self.original = [list(c) for c in clauses]
        self.value = [0] * (2 * n + 2)  # per literal: 1 true, -1 false, 0 free
        self.level = [0] * (n + 1)
        self.reason: list = [None] * (n + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.watches: list[list[list[int]]] = [[] for _ in range(2 * n + 2)]
        self.bins: list[list[tuple[int, tuple[int, int]]]] = [[] for _ in range(2 * n + 2)]
        self.learnts: list[list[int]] = []
        self.lbd: dict[int, int] = {}
        self.activity = [0.0] * (n + 1)
        self.var_inc = 1.0
        self.phase = [1] * (n + 1)  # 1 = negative literal first
        self.heap = [(0.0, v) for v in range(1, n + 1)]
        self.stats = SolveStats()
        self.unsat = False
        self._used = False
        self._load(clauses)

    # -- setup -------------------------------------------------------------

    def _load(self, clauses: Sequence[Sequence[int]]) -> None:
        units = []
        for raw in clauses:
            lits = sorted({(abs(x) << 1) | (x < 0) for x in raw})
            if any(lits[i] ^ 1 == lits[i + 1] for i in range(len(lits) - 1)):
                continue  # tautology
            if not lits:
                self.unsat = True
            elif len(lits) == 1:
                units.append(lits[0])
            elif len(lits) == 2:
                self._add_binary(lits[0], lits[1])
            else:
                self.watches[lits[0]].append(lits)
                self.watches[lits[1]].append(lits)
        for lit in units:
            v = self.value[lit]
            if v == -1:
                self.unsat = True
            elif v == 0:
                self._assign(lit, None)

    def _add_binary(self, a: int, b: int) -> None:
        self.bins[a].append((b, (b, a)))
        self.bins[b].append((a, (a, b)))

    # -- trail -------------------------------------------------------------

    def _assign(self, lit: int, reason) -> None:
        self.value[lit] = 1
        self.value[lit ^ 1] = -1
        v = lit >> 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _backtrack(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        stop = self.trail_lim[lvl]
        value, phase, reason, act, heap = (
            self.value, self.phase, self.reason, self.activity, self.heap
        )
        trail = self.trail
        for i in range(len(trail) - 1, stop - 1, -1):
            lit = trail[i]
            v = lit >> 1
            value[lit] = 0
            value[lit ^ 1] = 0
            reason[v] = None
            phase[v] = lit & 1
            heapq.heappush(heap, (-act[v], v))
        del trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = stop
        if len(heap) > 8 * self.num_vars + 1024:
            self._rebuild_heap()

    def _rebuild_heap(self) -> None:
        value, act = self.value, self.activity
        self.heap = [(-act[v], v) for v in range(1, self.num_vars + 1) if value[2 * v] == 0]
        heapq.heapify(self.heap)

    # -- propagation -------------------------------------------------------

    def _propagate(self):
        """Propagate the trail; returns a conflicting clause or None."""
        value, watches, bins, trail = self.value, self.watches, self.bins, self.trail
        level, reason = self.level, self.reason
        cur = len(self.trail_lim)
        qhead = self.qhead
        conflict = None
        while qhead < len(trail):
            false_lit = trail[qhead] ^ 1
            qhead += 1
            for other, cl in bins[false_lit]:
                vo = value[other]
                if vo == 0:
                    value[other] = 1
                    value[other ^ 1] = -1
                    w = other >> 1
                    level[w] = cur
                    reason[w] = cl
                    trail.append(other)
                elif vo == -1:
                    conflict = cl
                    break
            if conflict is not None:
                break
            ws = watches[false_lit]
            if not ws:
                continue
            keep = []
            n_ws = len(ws)
            i = 0
            while i < n_ws:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if value[first] == 1:
                    keep.append(c)
                    continue
                for j in range(2, len(c)):
                    lj = c[j]
                    if value[lj] != -1:
                        c[1] = lj
                        c[j] = false_lit
                        watches[lj].append(c)
                        break
                else:
                    keep.append(c)
                    if value[first] == -1:
                        conflict = c
                        keep.extend(ws[i:])
                        break
                    value[first] = 1
                    value[first ^ 1] = -1
                    w = first >> 1
                    level[w] = cur
                    reason[w] = c
                    trail.append(first)
            watches[false_lit] = keep
            if conflict is not None:
                break
        self.stats.propagations += qhead - self.qhead
        self.qhead = qhead
        return conflict

    # -- learning ----------------------------------------------------------

    def _bump(self, v: int) -> None:
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for u in range(1, self.num_vars + 1):
                act[u] *= 1e-100
            self.var_inc *= 1e-100
            self._rebuild_heap()
        elif self.value[2 * v] == 0:
            heapq.heappush(self.heap, (-act[v], v))

    def _analyze(self, conflict) -> tuple[list[int], int]:
        level, reason, trail = self.level, self.reason, self.trail
        seen = self._seen
        cur = len(self.trail_lim)
        learnt = [0]
        path = 0
        idx = len(trail) - 1
        clause = conflict
        start = 0
        touched = []
        while True:
            for j in range(start, len(clause)):
                q = clause[j]
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    touched.append(v)
                    self._bump(v)
                    if level[v] >= cur:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            path -= 1
            if path == 0:
                break
            clause = reason[p >> 1]
            seen[p >> 1] = False
            start = 1
        learnt[0] = p ^ 1

        # Local minimization: drop literals implied by other learnt literals.
        if len(learnt) > 2:
            kept = [learnt[0]]
            for q in learnt[1:]:
                r = reason[q >> 1]
                if r is None or not all(
                    seen[x >> 1] or level[x >> 1] == 0 for x in r[1:]
                ):
                    kept.append(q)
            learnt = kept
        for v in touched:
            seen[v] = False

        if len(learnt) == 1:
            back = 0
        else:
            best = 1
            for j in range(2, len(learnt)):
                if level[learnt[j] >> 1] > level[learnt[best] >> 1]:
                    best = j
            learnt[1], learnt[best] = learnt[best], learnt[1]
            back = level[learnt[1] >> 1]
        return learnt, back

    def _add_learnt(self, learnt: list[int]) -> None:
        self.stats.learnt_clauses += 1
        if len(learnt) == 1:
            self._assign(learnt[0], None)
            return
        if len(learnt) == 2:
            self._add_binary(learnt[0], learnt[1])
            self._assign(learnt[0], (learnt[0], learnt[1]))
            return
        self.watches[learnt[0]].append(learnt)
        self.watches[learnt[1]].append(learnt)
        self.learnts.append(learnt)
        level = self.level
        self.lbd[id(learnt)] = len({level[x >> 1] for x in learnt})
        self._assign(learnt[0], learnt)

    def _reduce_db(self) -> None:
        value, reason, lbd = self.value, self.reason, self.lbd
        locked = {
            id(c) for c in self.learnts
            if value[c[0]] == 1 and reason[c[0] >> 1] is c
        }
        ranked = sorted(self.learnts, key=lambda c: (lbd[id(c)], len(c)))
        half = len(ranked) // 2
        keep, dead = [], set()
        for i, c in enumerate(ranked):
            if i < half or lbd[id(c)] <= 2 or id(c) in locked:
                keep.append(c)
            else:
                dead.add(id(c))
                del lbd[id(c)]
        if not dead:
            return
        self.learnts = keep
        for lit, ws in enumerate(self.watches):
            if ws:
                self.watches[lit] = [c for c in ws if id(c) not in dead]

    # -- search ------------------------------------------------------------

    def _decide(self) -> int:
        heap, value, act = self.heap, self.value, self.activity
        while heap:
            key, v = heapq.heappop(heap)
            if value[2 * v] == 0 and -key == act[v]:
                return 2 * v + self.phase[v]
        # Stale keys only: fall back to a linear scan.
        for v in range(1, self.num_vars + 1):
            if value[2 * v] == 0:
                return 2 * v + self.phase[v]
        return 0

    def solve(self, limits: SolveLimits = NO_LIMITS) -> SolveOutcome:
        if self._used:
            raise RuntimeError("CdclSolver instances are single-use")
        self._used = True
        t0 = time.perf_counter()
        outcome = self._search(limits, t0)
        self.stats.seconds = time.perf_counter() - t0
        outcome.stats = self.stats
        return outcome

    def _search(self, limits: SolveLimits, t0: float) -> SolveOutcome:
        stats = self.stats
        if self.unsat or self._propagate() is not None:
            return SolveOutcome(Verdict.UNSAT)
        self._seen = [False] * (self.num_vars + 1)
        max_conflicts = limits.max_conflicts
        deadline = None if limits.max_time is None else t0 + limits.max_time
        restart_at = self.restart_first
        since_restart = 0
        next_reduce = self.reduce_first
        n_reduce = 0
        inv_decay = 1.0 / self.var_decay

        while True:
            conflict = self._propagate()
            if conflict is not None:
                stats.conflicts += 1
                since_restart += 1
                if not self.trail_lim:
                    return SolveOutcome(Verdict.UNSAT)
                learnt, back = self._analyze(conflict)
                self._backtrack(back)
                self._add_learnt(learnt)
                self.var_inc *= inv_decay
                if max_conflicts is not None and stats.conflicts >= max_conflicts:
                    return SolveOutcome(Verdict.UNKNOWN)
                if deadline is not None and stats.conflicts % 64 == 0:
                    if time.perf_counter() > deadline:
                        return SolveOutcome(Verdict.UNKNOWN)
                continue

            if since_restart >= restart_at:
                stats.restarts += 1
                since_restart = 0
                restart_at = int(restart_at * self.restart_factor)
                self._backtrack(0)
            if stats.conflicts >= next_reduce:
                n_reduce += 1
                next_reduce = stats.conflicts + self.reduce_first + self.reduce_step * n_reduce
                self._reduce_db()

            lit = self._decide()
            if lit == 0:
                assignment = {
                    v: self.value[2 * v] == 1 for v in range(1, self.num_vars + 1)
                }
                if not check_model(self.original, assignment):
                    raise AssertionError("internal error: model violates a clause")
                return SolveOutcome(Verdict.SAT, assignment)
            stats.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._assign(lit, None)
            if deadline is not None and stats.decisions % 1024 == 0:
                if time.perf_counter() > deadline:
                    return SolveOutcome(Verdict.UNKNOWN)


def solve(cnf: "CnfFormula", limits: SolveLimits = NO_LIMITS) -> SolveOutcome:
    """Solve ``cnf`` with the internal CDCL solver."""
    return CdclSolver(cnf.num_vars, cnf.clauses).solve(limits)


def solve_external(
    cnf: "CnfFormula",
    meta: "Optional[EncodingMeta]",
    command: str,
    limits: SolveLimits = NO_LIMITS,
    workdir: Optional[str] = None,
) -> SolveOutcome:
    """Delegate to an external solver through a DIMACS file.

    ``command`` is split shell-style and every ``{in}`` is replaced by the
    path of the written DIMACS file.  The solver's stdout must follow the
    competition convention (``s`` / ``v`` lines).  A timeout from
    ``limits.max_time`` yields UNKNOWN.
    """
    from .cnf import parse_solver_output, to_dimacs

    fd, path = tempfile.mkstemp(suffix=".cnf", dir=workdir)
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(to_dimacs(cnf, meta))
        argv = [part.replace("{in}", path) for part in shlex.split(command)]
        if not any(path in part for part in argv):
            argv.append(path)
        t0 = time.perf_counter()
        try:
            proc = subprocess.run(
                argv, capture_output=True, text=True, timeout=limits.max_time
            )
        except subprocess.TimeoutExpired:
            return SolveOutcome(
                Verdict.UNKNOWN, stats=SolveStats(seconds=time.perf_counter() - t0)
            )
        outcome = parse_solver_output(proc.stdout, num_vars=cnf.num_vars)
        outcome.stats.seconds = time.perf_counter() - t0
        if outcome.is_sat and not check_model(cnf.clauses, outcome.assignment):
            raise InvalidFormulaError("external solver returned a non-model")
        return outcome
    finally:
        os.unlink(path)
