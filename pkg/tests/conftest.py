from pathlib import Path

import pytest

from zgl.arith import sieve_von_mangoldt
from zgl.zeros import ensure_zeros

CACHE = Path(__file__).resolve().parent.parent / ".cache" / "zeros"
# covers the widest smoothed window used in the suite: 2 pi (1/3) 2e4 * 2
ZERO_HEIGHT = 84000.0


@pytest.fixture(scope="session")
def zeros_full():
    return ensure_zeros(ZERO_HEIGHT, CACHE)


@pytest.fixture(scope="session")
def zeros_1e4(zeros_full):
    return zeros_full.truncate(1e4)


@pytest.fixture(scope="session")
def lam_1e6():
    return sieve_von_mangoldt(10**6)


ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    return request.config.stash.setdefault(ACCEPTANCE, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
