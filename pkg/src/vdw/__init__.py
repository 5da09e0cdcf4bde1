"""Van der Waerden lower-bound certificates: verification, CNF encoding,
a small CDCL solver and exact search for small W(r, k)."""

__version__ = "0.1.0"

from .certificates import (
    CertificateRecord,
    db_entries,
    detect_period,
    format_certificate,
    get_entry,
    parse_certificate,
    unroll,
)
from .cnf import (
    CnfFormula,
    EncodingMeta,
    decode_model,
    encode,
    parse_dimacs,
    parse_solver_output,
    to_dimacs,
)
from .core import (
    ApWitness,
    Coloring,
    VdwInstance,
    VerificationReport,
    count_aps,
    enumerate_aps,
    verify,
)
from .errors import VdwError
from .search import (
    SearchResult,
    SearchStatus,
    brute_force_w,
    compare_bounds_report,
    exact_w,
    find_max_sat,
)
from .solver import SolveLimits, SolveOutcome, Verdict, solve, solve_external
