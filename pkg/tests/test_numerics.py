from __future__ import annotations

import math

import mpmath as mp
import pytest
from hypothesis import given, strategies as st

from hpk.numerics import (
    PrecisionContext,
    PrecisionError,
    erfc_mp,
    fd_derivative,
    relative_residual,
    squared_relative_residual,
    to_mpf,
)


def test_context_validation():
    with pytest.raises(ValueError):
        PrecisionContext(127)
    with pytest.raises(ValueError):
        PrecisionContext(256, guard_digits=0)
    with pytest.raises(ValueError):
        PrecisionContext(128, guard_digits=40)


def test_tolerance_classes():
    ctx = PrecisionContext(256)
    assert ctx.digits == math.floor(0.3010 * 256) - 12
    with mp.workprec(64):
        assert mp.almosteq(mp.log10(ctx.tol), -(mp.mpf("0.3010") * 256 - 12), 1e-12)
        assert mp.almosteq(ctx.tol_for(1), mp.sqrt(ctx.tol), 1e-12)
        assert mp.almosteq(ctx.tol_for(2), mp.root(ctx.tol, 4), 1e-12)
    assert ctx.tol_for(0) == ctx.tol


@given(st.integers(128, 4000))
def test_tolerance_positive_and_decreasing(bits):
    a, b = PrecisionContext(bits), PrecisionContext(bits + 1)
    assert 0 < b.tol < a.tol


def test_policy_bits():
    assert PrecisionContext.for_nmax(10).bits == 256
    assert PrecisionContext.for_nmax(100).bits == 1000


def test_to_mpf_reads_decimal_strings_at_working_precision():
    with mp.workprec(300):
        x = to_mpf("0.1")
        assert abs(x * 10 - 1) < mp.mpf(2) ** -290


@pytest.mark.parametrize("x", ["0", "0.5", "-1.25", "2", "3.5", "-7", "12", "30"])
def test_erfc_matches_mpmath(x):
    ctx = PrecisionContext(512)
    with mp.workprec(600):
        ref = mp.erfc(mp.mpf(x))
        got = erfc_mp(x, ctx)
        assert abs(got - ref) <= abs(ref) * mp.mpf(2) ** -500


def test_erfc_rejects_nonfinite(ctx):
    with pytest.raises(ValueError):
        erfc_mp(mp.inf, ctx)


@given(st.floats(min_value=-6, max_value=6, allow_nan=False))
def test_erfc_reflection(x):
    ctx = PrecisionContext(256)
    with mp.workprec(256):
        s = erfc_mp(x, ctx) + erfc_mp(-x, ctx)
        assert abs(s - 2) < mp.mpf(10) ** -70


def test_fd_derivative_orders(ctx):
    with mp.workprec(ctx.bits):
        d1 = fd_derivative(mp.sin, "0.3", 1, ctx)
        d2 = fd_derivative(mp.exp, "0.7", 2, ctx)
        assert abs(d1 - mp.cos(mp.mpf("0.3"))) < ctx.tol_for(1)
        assert abs(d2 - mp.exp(mp.mpf("0.7"))) < ctx.tol_for(2)


def test_fd_derivative_rejects_bad_order(ctx):
    with pytest.raises(ValueError):
        fd_derivative(mp.sin, 0, 3, ctx)


def test_fd_derivative_flags_noisy_functions(ctx):
    # a function accurate to only 20 digits cannot give a first derivative at tol^(1/2)
    def noisy(x):
        return mp.sin(x) + mp.mpf(10) ** -20 * mp.sin(mp.mpf(10) ** 40 * x)

    with pytest.raises(PrecisionError):
        fd_derivative(noisy, "0.3", 1, ctx)


def test_relative_residuals():
    assert relative_residual([1, 2], [3]) == 0
    assert relative_residual([0], [0]) == 0
    assert relative_residual([0], [0, 0]) == 0
    assert relative_residual([1e-30], [0]) == 1
    assert relative_residual([4, 0], [2]) == mp.mpf(1) / 2
    assert squared_relative_residual([1, 2], [9]) == 0
    assert squared_relative_residual([0], [0]) == 0
    assert squared_relative_residual([1], [3], factor=2) == mp.mpf(1) / 3
