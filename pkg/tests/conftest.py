import pytest

from veriscale.backend import BuiltinEvaluator
from veriscale.toy import bundled_task, bundled_tasks, make_executor


@pytest.fixture(scope="session")
def tasks():
    return bundled_tasks()


@pytest.fixture(scope="session")
def sort_task():
    return bundled_task("insertionSort")


@pytest.fixture(scope="session")
def binary_task():
    return bundled_task("binaryToDecimal")


@pytest.fixture
def executor():
    return make_executor()


@pytest.fixture
def backend():
    return BuiltinEvaluator()


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one criterion result; lines are printed in the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def record(number: int, title: str, ok: bool, detail: str = "") -> bool:
        status = "PASS" if ok else "FAIL"
        lines.append((number, f"[{status}] criterion {number:>2}: {title}" + (f" ({detail})" if detail else "")))
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
