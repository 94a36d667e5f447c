import re

import pytest
from hypothesis import settings

from k3mds.lattice import Lattice, parse_spec

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# Small lattices that appear throughout the computations, all even.
SMALL_CORPUS = {
    "U": parse_spec("U"),
    "U(2)": parse_spec("U(2)"),
    "A1": parse_spec("A1"),
    "A2": parse_spec("A2"),
    "A3": parse_spec("A3"),
    "D4": parse_spec("D4"),
    "<2>": parse_spec("<2>"),
    "<4>+<-2>": parse_spec("<4>+<-2>"),
    "<2>+<-8>": parse_spec("<2>+<-8>"),
    "<2>+<-14>": parse_spec("<2>+<-14>"),
    "<4>+<-2>+<-2>": parse_spec("<4>+<-2>+<-2>"),
    "U+<-4>": parse_spec("U+<-4>"),
    "U+A1": parse_spec("U+A1"),
    "U+A1^2": parse_spec("U+A1^2"),
    "U(2)+A1^2": parse_spec("U(2)+A1^2"),
    "S_3": Lattice([[0, 1, 1], [1, -2, 1], [1, 1, -2]]),
    "S_4": Lattice([[0, 1, 1], [1, -2, 2], [1, 2, -2]]),
    "S_5": Lattice([[0, 1, 1], [1, -2, 3], [1, 3, -2]]),
    "<2>+<-8>+<-2>": parse_spec("<2>+<-8>+<-2>"),
}


@pytest.fixture(scope="session")
def k3_lattice():
    return parse_spec("U^3+E8^2")


_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    title = m.group(2).replace("_", " ")
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = "PASS" if report.outcome == "passed" else "FAIL"
        if _ACCEPTANCE.get(n, ("PASS",))[0] == "FAIL":
            status = "FAIL"
        _ACCEPTANCE[n] = (status, title)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        status, title = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {title}")
