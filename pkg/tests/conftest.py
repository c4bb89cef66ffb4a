from __future__ import annotations

import csv
import time
from pathlib import Path

import pytest

from qshell.spectrum import Level

FIXTURES = Path(__file__).parent / "fixtures"

# per-criterion outcome, filled while test_acceptance.py runs
_criteria: dict[int, dict] = {}
_t0 = [0.0]


def read_table1():
    with open(FIXTURES / "table1_levels.csv", newline="") as f:
        return [
            {"n": int(r["n"]), "l": int(r["l"]), "energy": float(r["energy"]),
             "degeneracy": int(r["degeneracy"]), "cumulative": int(r["cumulative"])}
            for r in csv.DictReader(f)
        ]


def read_table1_gaps():
    with open(FIXTURES / "table1_gaps.csv", newline="") as f:
        return [(int(r["after_cumulative"]), float(r["gap"])) for r in csv.DictReader(f)]


@pytest.fixture(scope="session")
def table1():
    return read_table1()


@pytest.fixture(scope="session")
def table1_gaps():
    return read_table1_gaps()


@pytest.fixture(scope="session")
def table1_levels(table1):
    """Published energies as Level objects (3-decimal values)."""
    return [Level(r["n"], r["l"], r["energy"]) for r in table1]


def pytest_sessionstart(session):
    _t0[0] = time.perf_counter()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not rep.failed:
        return
    num, title = mark.args
    entry = _criteria.setdefault(num, {"title": title, "ok": True, "failed": []})
    if rep.failed:
        entry["ok"] = False
        entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_criteria):
        e = _criteria[num]
        status = "PASS" if e["ok"] else "FAIL"
        extra = "" if e["ok"] else f"  ({', '.join(e['failed'])})"
        tr.write_line(f"AC{num} {status}  {e['title']}{extra}")
    elapsed = time.perf_counter() - _t0[0]
    status = "PASS" if elapsed < 30 else "FAIL"
    tr.write_line(f"AC9 runtime {status}  session wall time {elapsed:.1f} s (limit 30 s)")
