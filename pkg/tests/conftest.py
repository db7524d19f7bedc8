from __future__ import annotations

import mpmath as mp
import pytest
from hypothesis import settings

from hpk.numerics import PrecisionContext

settings.register_profile("hpk", deadline=None, max_examples=25)
settings.load_profile("hpk")


@pytest.fixture
def ctx() -> PrecisionContext:
    return PrecisionContext(256)


@pytest.fixture(autouse=True)
def _restore_mp_precision():
    prec = mp.mp.prec
    yield
    mp.mp.prec = prec


def pytest_terminal_summary(terminalreporter):
    from importlib import import_module

    try:
        results = import_module("test_acceptance").RESULTS
    except ImportError:
        return
    if results:
        terminalreporter.section("acceptance criteria")
        order = sorted(results, key=lambda k: (int(k.rstrip("b")), k))
        for key in order:
            terminalreporter.write_line(results[key])
