import random
import sys
import textwrap

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import truth_table_sat
from vdw.cnf import CnfFormula, decode_model, encode
from vdw.core import VdwInstance, verify
from vdw.errors import InvalidFormulaError
from vdw.solver import (
    CdclSolver,
    SolveLimits,
    Verdict,
    check_model,
    solve,
    solve_external,
)


def cnf(clauses, n=None):
    n = n if n is not None else max((abs(x) for c in clauses for x in c), default=0)
    return CnfFormula(n, [list(c) for c in clauses])


class TestBasics:
    def test_unit(self):
        out = solve(cnf([[1]]))
        assert out.verdict is Verdict.SAT and out.assignment == {1: True}

    def test_contradiction(self):
        assert solve(cnf([[1], [-1]])).verdict is Verdict.UNSAT

    def test_empty_formula(self):
        out = solve(cnf([], n=0))
        assert out.verdict is Verdict.SAT and out.assignment == {}

    def test_empty_clause(self):
        assert solve(cnf([[1, 2], []], n=2)).verdict is Verdict.UNSAT

    def test_tautology_and_duplicates(self):
        out = solve(cnf([[1, -1], [2, 2], [-2, 3, 3]]))
        assert out.is_sat and out.assignment[2] and out.assignment[3]

    @pytest.mark.parametrize("bad", [[[0]], [[3]], [[1, -4]]])
    def test_out_of_range_literal(self, bad):
        with pytest.raises(InvalidFormulaError):
            solve(CnfFormula(2, bad))

    def test_single_use(self):
        s = CdclSolver(1, [[1]])
        s.solve()
        with pytest.raises(RuntimeError):
            s.solve()

    def test_pigeonhole_5_into_4_unsat(self):
        holes, pigeons = 4, 5
        v = lambda p, h: p * holes + h + 1
        clauses = [[v(p, h) for h in range(holes)] for p in range(pigeons)]
        clauses += [
            [-v(p, h), -v(q, h)]
            for h in range(holes) for p in range(pigeons) for q in range(p + 1, pigeons)
        ]
        out = solve(cnf(clauses))
        assert out.verdict is Verdict.UNSAT
        assert out.stats.conflicts > 0


@pytest.mark.parametrize("r,k,n,verdict", [(2, 3, 9, Verdict.UNSAT), (2, 3, 8, Verdict.SAT)])
def test_vdw_frontier_2_3(r, k, n, verdict):
    formula, meta = encode(VdwInstance(r, k, n))
    out = solve(formula)
    assert out.verdict is verdict


def three_cnf(num_vars, num_clauses, seed):
    rng = random.Random(seed)
    clauses = []
    for _ in range(num_clauses):
        vs = rng.sample(range(1, num_vars + 1), 3)
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    return clauses


@settings(max_examples=150, deadline=None)
@given(st.integers(3, 14), st.floats(2.0, 6.5), st.integers(0, 10**6))
def test_agrees_with_truth_table(n, ratio, seed):
    clauses = three_cnf(n, int(n * ratio), seed)
    out = solve(cnf(clauses, n))
    assert out.is_sat == truth_table_sat(n, clauses)
    if out.is_sat:
        assert check_model(clauses, out.assignment)


@pytest.mark.parametrize("seed", range(12))
def test_agrees_with_truth_table_20_vars(seed):
    n = 20
    clauses = three_cnf(n, 86, seed)  # near the 4.26 threshold
    out = solve(cnf(clauses, n))
    assert out.is_sat == truth_table_sat(n, clauses)


def test_deterministic():
    formula, _ = encode(VdwInstance(3, 3, 24), symmetry=True)
    a, b = solve(formula), solve(formula)
    assert a.verdict == b.verdict == Verdict.SAT
    assert a.assignment == b.assignment
    assert a.stats.conflicts == b.stats.conflicts


def test_conflict_limit_gives_unknown():
    formula, _ = encode(VdwInstance(3, 3, 27), symmetry=True)
    out = solve(formula, SolveLimits(max_conflicts=5))
    assert out.verdict is Verdict.UNKNOWN
    assert out.assignment is None and out.stats.conflicts == 5


def test_time_limit_gives_unknown():
    formula, _ = encode(VdwInstance(3, 3, 27), symmetry=True)
    out = solve(formula, SolveLimits(max_time=1e-9))
    assert out.verdict is Verdict.UNKNOWN


def test_stats_counted():
    formula, _ = encode(VdwInstance(3, 3, 26), symmetry=True)
    st_ = solve(formula).stats
    assert st_.decisions > 0 and st_.propagations > 0 and st_.conflicts > 0


FAKE_SOLVER = textwrap.dedent(
    """
    import sys
    from vdw.cnf import parse_dimacs, format_solver_output
    from vdw.solver import solve
    formula, _ = parse_dimacs(open(sys.argv[1]).read())
    sys.stdout.write(format_solver_output(solve(formula)))
    """
)


@pytest.fixture
def fake_solver(tmp_path):
    script = tmp_path / "fake_solver.py"
    script.write_text(FAKE_SOLVER)
    return f"{sys.executable} {script} {{in}}"


class TestExternal:
    def test_sat_round_trip(self, fake_solver):
        formula, meta = encode(VdwInstance(2, 3, 8), symmetry=True)
        out = solve_external(formula, meta, fake_solver)
        assert out.is_sat
        assert verify(decode_model(out.assignment, meta), 3, 2).valid

    def test_unsat(self, fake_solver):
        formula, meta = encode(VdwInstance(2, 3, 9))
        assert solve_external(formula, meta, fake_solver).verdict is Verdict.UNSAT

    def test_writes_dimacs_with_header(self, tmp_path):
        script = tmp_path / "cat_solver.py"
        script.write_text(
            "import sys\nsys.stdout.write(open(sys.argv[1]).read().replace('c vdw', 'c seen')"
            " + 's UNKNOWN\\n')\n"
        )
        formula, meta = encode(VdwInstance(2, 3, 3))
        out = solve_external(formula, meta, f"{sys.executable} {script} {{in}}")
        assert out.verdict is Verdict.UNKNOWN

    def test_timeout(self, tmp_path):
        script = tmp_path / "slow.py"
        script.write_text("import time\ntime.sleep(5)\n")
        formula, meta = encode(VdwInstance(2, 3, 3))
        out = solve_external(
            formula, meta, f"{sys.executable} {script} {{in}}", SolveLimits(max_time=0.3)
        )
        assert out.verdict is Verdict.UNKNOWN

    def test_rejects_bogus_model(self, tmp_path):
        script = tmp_path / "liar.py"
        script.write_text("print('s SATISFIABLE'); print('v -1 -2 -3 -4 -5 -6 0')\n")
        formula, meta = encode(VdwInstance(2, 3, 3))
        with pytest.raises(InvalidFormulaError):
            solve_external(formula, meta, f"{sys.executable} {script} {{in}}")
