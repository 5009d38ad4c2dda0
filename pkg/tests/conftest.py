from __future__ import annotations

from pathlib import Path

import pytest

from ucs_entropy.textio import fixture_path, load_cover, load_system

BAD = Path(__file__).parent / "fixtures" / "bad"

SYSTEMS = ("ex1", "ex2", "ex3", "ex4")
COVERS = ("ex1_a", "ex2_a", "ex3_a1", "ex3_a2", "ex3_a3", "ex4_a1", "ex4_a2", "ex4_a3")
TARGETS = {
    "ex1": ["0", "1"],
    "ex2": ["0", "2"],
    "ex3": ["0", "1", "2"],
    "ex4": ["0", "1", "2", "3", "4"],
}


def _load():
    systems = {k: load_system(fixture_path(f"{k}.sys")) for k in SYSTEMS}
    covers = {k: load_cover(fixture_path(f"{k}.cov"), systems[k.split("_")[0]]).build() for k in COVERS}
    return systems, covers


_SYSTEMS, _COVERS = _load()


@pytest.fixture(scope="session")
def systems():
    return _SYSTEMS


@pytest.fixture(scope="session")
def covers():
    return _COVERS


# -- acceptance summary: one line per criterion --------------------------------------

_criteria: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or report.outcome != "passed":
        prev = _criteria.get(name)
        if prev != "FAIL":
            _criteria[name] = "PASS" if report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria):
        num, _, rest = name.removeprefix("test_criterion_").partition("_")
        terminalreporter.write_line(f"criterion {num} ({rest.replace('_', ' ')}): {_criteria[name]}")
