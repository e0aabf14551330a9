import itertools
import math

import pytest

from threespin.model import ModelParams

EPSILONS = (0.05, 0.1, 0.5, 1.0)
MUS = (-1.0, -0.5, 0.0, 0.7, 1.0)
THETAS = (0.0, math.pi / 10, math.pi / 2, math.pi)

GRID = [ModelParams(th, e, mu) for e, mu, th in itertools.product(EPSILONS, MUS, THETAS)]

FIG3 = ModelParams(math.pi / 2, 0.1, 0.0)
FIG4 = ModelParams(math.pi / 2, 0.1, -1.0)
FIG5 = ModelParams(math.pi / 10, 1.0, -1.0)

ACCEPTANCE_LINES = {}


def record_criterion(number, passed, detail=""):
    """Collect one summary line per acceptance criterion (printed at session end)."""
    key = str(number)
    prev = ACCEPTANCE_LINES.get(key)
    ok = passed and (prev is None or prev[0])
    details = [d for d in ((prev[1] if prev else ""), detail) if d]
    ACCEPTANCE_LINES[key] = (ok, "; ".join(details))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: [int(x) if x.isdigit() else x for x in k.split(".")]):
        ok, detail = ACCEPTANCE_LINES[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def fig4():
    return FIG4
