import itertools

import pytest


def mono_aps(colors, k):
    """Independent triple loop: every (a, d, color) with a monochromatic k-AP."""
    n = len(colors)
    found = []
    for d in range(1, n):
        for a in range(1, n + 1):
            last = a + (k - 1) * d
            if last > n:
                continue
            terms = [colors[a - 1 + j * d] for j in range(k)]
            if len(set(terms)) == 1:
                found.append((a, d, terms[0]))
    return found


def valid_coloring_exists(r, k, n):
    """Plain enumeration over all r**n colorings."""
    return any(not mono_aps(c, k) for c in itertools.product(range(r), repeat=n))


def truth_table_sat(num_vars, clauses):
    for bits in itertools.product((False, True), repeat=num_vars):
        if all(any(bits[abs(x) - 1] == (x > 0) for x in c) for c in clauses):
            return True
    return False


@pytest.fixture(scope="session")
def oracle():
    class _Oracle:
        pass

    o = _Oracle()
    o.mono_aps = staticmethod(mono_aps)
    o.valid_coloring_exists = staticmethod(valid_coloring_exists)
    o.truth_table_sat = staticmethod(truth_table_sat)
    return o


_CRITERIA: list[tuple[str, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        note = getattr(item, "criterion_note", "")
        _CRITERIA.append(("PASS" if rep.passed else "FAIL", marker.args[0], note))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for status, name, note in _CRITERIA:
        terminalreporter.write_line(f"[{status}] {name}" + (f"  ({note})" if note else ""))
