import random
import time
from contextlib import contextmanager
from pathlib import Path

import pytest

DEFAULT_SEED = 20240601
ROOT = Path(__file__).resolve().parent.parent

# (criterion number, title, passed, seconds) collected by the acceptance suite
ACCEPTANCE_LINES = []


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=DEFAULT_SEED, help="seed for randomized property tests")


@pytest.fixture
def seed(request) -> int:
    return request.config.getoption("--seed")


@pytest.fixture
def rng(seed) -> random.Random:
    return random.Random(seed)


@pytest.fixture
def root() -> Path:
    return ROOT


@pytest.fixture
def criterion():
    """Context manager timing one acceptance criterion and recording its outcome."""

    @contextmanager
    def run(n: int, title: str):
        t0 = time.perf_counter()
        ok = False
        try:
            yield
            ok = True
        finally:
            secs = time.perf_counter() - t0
            ACCEPTANCE_LINES.append((n, title, ok, secs))
            print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {title} ({secs:.2f} s)")

    return run


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, ok, secs in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {title} ({secs:.2f} s)")
