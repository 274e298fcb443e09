import pytest

from peakload import synth


@pytest.fixture(scope="session")
def small_data():
    """A short synthetic dataset: ((train series, frame), (test series, frame))."""
    return synth.reference_dataset(7, n_days=300)


FAST = {
    "mlp": {"epochs": 20, "hidden_sizes": (6,)},
    "lstm": {"epochs": 3, "hidden_size": 4},
    "svr": {"C": 1.0, "epsilon": 0.1, "kernel": "rbf:0.1"},
}


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict():
    """Record one pass/fail line per acceptance criterion and print it."""
    def record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
