import pytest

from covertwalk.params import SystemParams


@pytest.fixture
def fig2_params():
    """s=50, r=10, k=3, n=5, m=10, lambda=1, W=50."""
    return SystemParams(s=50, r=10, m=10, k=3, n=5, lam=1.0, w=50.0)


ACCEPTANCE_LINES = []


def record_acceptance(number, title, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}" + (f" -- {detail}" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
