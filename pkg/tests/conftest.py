from __future__ import annotations

import numpy as np
import pytest

from diskgeo.weight import build_weight


@pytest.fixture(scope="session")
def exp11():
    return build_weight("exp:a=1,b=1")


@pytest.fixture(scope="session")
def logproxy():
    return build_weight("logproxy:alpha=0")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, msg = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {msg}")
