import re

import numpy as np
import pytest

from frullani import RandomStream

N_CRITERIA = 14
_ACCEPTANCE: dict[int, str] = {}
_ACCEPTANCE_RAN = []


@pytest.fixture
def stream():
    return RandomStream(20240611)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def criterion(request):
    """Record a criterion outcome; the line is printed in the terminal summary."""
    m = re.match(r"test_c(\d+)", request.node.name)
    _ACCEPTANCE_RAN.append(int(m.group(1)) if m else 0)

    def record(num: int, title: str, ok: bool | None, detail: str = ""):
        status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
        _ACCEPTANCE[num] = f"criterion {num:>2} {status}  {title}" + (f": {detail}" if detail else "")
        print(_ACCEPTANCE[num])
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RAN:
        return
    terminalreporter.section("acceptance criteria")
    for num in range(1, N_CRITERIA + 1):
        if num in _ACCEPTANCE:
            line = _ACCEPTANCE[num]
        elif num in _ACCEPTANCE_RAN:
            line = f"criterion {num:>2} FAIL  (errored before reporting)"
        else:
            line = f"criterion {num:>2} NOT RUN  (deselected)"
        terminalreporter.write_line(line)
