import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from desiredstate.csp import warm_up  # noqa: E402
from desiredstate.lang import load_dsd  # noqa: E402

EXPERIMENTS = Path(__file__).resolve().parents[1] / "experiments"

_VERDICTS = pytest.StashKey[list]()


def experiment(name: str):
    return load_dsd(EXPERIMENTS / f"{name}.deladas")


@pytest.fixture(scope="session", autouse=True)
def _kernel_ready():
    warm_up()


@pytest.fixture(scope="session")
def maths_dsd():
    return experiment("maths")


@pytest.fixture
def criterion(request):
    """Report one acceptance verdict: prints it, keeps it for the summary, asserts it."""
    lines = request.config.stash.setdefault(_VERDICTS, [])

    def report(label: str, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'} criterion {label}: {detail}"
        print(line)
        lines.append(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
