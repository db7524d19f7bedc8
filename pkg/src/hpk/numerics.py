"""Arbitrary-precision plumbing shared by every other module.

All arithmetic is done with :mod:`mpmath`.  A :class:`PrecisionContext` fixes
the number of trusted binary digits of a computation; functions accept one and
run under ``mp.workprec`` internally, so callers never touch the global
precision themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import mpmath as mp

__all__ = [
    "PrecisionContext",
    "PrecisionError",
    "erfc_mp",
    "fd_derivative",
    "relative_residual",
    "squared_relative_residual",
    "to_mpf",
]

LOG10_2 = 0.3010


class PrecisionError(ArithmeticError):
    """A computation could not reach the accuracy its context promises."""


@dataclass(frozen=True)
class PrecisionContext:
    """Binary working precision plus the decimal digits reserved for roundoff.

    ``tol`` is the residual bound for algebraic identities,
    ``tol ** (1/2)`` for identities that need one finite difference and
    ``tol ** (1/4)`` for nested or mixed finite differences.
    """

    bits: int
    guard_digits: int = 12

    def __post_init__(self) -> None:
        if self.bits < 128:
            raise ValueError(f"bits must be >= 128, got {self.bits}")
        if self.guard_digits < 1:
            raise ValueError(f"guard_digits must be positive, got {self.guard_digits}")
        if LOG10_2 * self.bits - self.guard_digits <= 0:
            raise ValueError("guard_digits consume the whole precision")

    @property
    def digits(self) -> int:
        """Trusted decimal digits, used when rendering numbers."""
        return int(math.floor(LOG10_2 * self.bits)) - self.guard_digits

    @property
    def tol(self) -> mp.mpf:
        with mp.workprec(64):
            return mp.mpf(10) ** (-(mp.mpf(LOG10_2) * self.bits - self.guard_digits))

    def tol_for(self, fd_depth: int) -> mp.mpf:
        """Tolerance for an identity evaluated through ``fd_depth`` nested differences."""
        if fd_depth == 0:
            return self.tol
        with mp.workprec(64):
            return self.tol ** (mp.mpf(1) / 2**fd_depth)

    def with_bits(self, bits: int) -> "PrecisionContext":
        return PrecisionContext(bits, self.guard_digits)

    @classmethod
    def for_nmax(cls, n_max: int, guard_digits: int = 12) -> "PrecisionContext":
        """Default policy: ``max(256, 10 * n_max)`` bits."""
        return cls(max(256, 10 * n_max), guard_digits)


def to_mpf(x) -> mp.mpf:
    """Convert ints, floats, Fractions, decimal strings or mpf at the current precision."""
    if isinstance(x, mp.mpf):
        return +x
    if hasattr(x, "numerator") and hasattr(x, "denominator") and not isinstance(x, float):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


# ---------------------------------------------------------------------------
# erfc

_ERFC_ITER_CAP = 2_000_000


def _erfc_taylor(x: mp.mpf, bits: int) -> mp.mpf:
    # erf(x) = 2/sqrt(pi) * sum (-1)^k x^(2k+1) / (k! (2k+1)); terms peak near
    # exp(x^2), so cancellation eats about 1.45 * x^2 bits.
    guard = int(1.45 * float(x) ** 2) + 2 * int(math.log2(float(abs(x)) + 2)) + 20
    with mp.workprec(bits + guard):
        x = +x
        x2 = x * x
        term = x
        total = x
        eps = mp.mpf(2) ** (-(bits + guard))
        k = 0
        while True:
            k += 1
            if k > _ERFC_ITER_CAP:
                raise PrecisionError("erfc Taylor series did not converge")
            term = -term * x2 / k
            contrib = term / (2 * k + 1)
            total += contrib
            if abs(contrib) < eps * abs(total) and k > x2:
                break
        erf = 2 * total / mp.sqrt(mp.pi)
        return 1 - erf


def _erfc_cf(x: mp.mpf, bits: int) -> mp.mpf:
    # Laplace continued fraction, x > 0:
    # erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    with mp.workprec(bits + 24):
        x = +x
        tiny = mp.mpf(2) ** (-(2 * bits + 64))
        eps = mp.mpf(2) ** (-(bits + 8))
        f = x
        c = x
        d = mp.mpf(0)
        k = 1
        while True:
            a = mp.mpf(k) / 2
            d = x + a * d
            d = 1 / (d if d != 0 else tiny)
            c = x + a / c
            if c == 0:
                c = tiny
            delta = c * d
            f *= delta
            if abs(delta - 1) < eps:
                break
            k += 1
            if k > _ERFC_ITER_CAP:
                raise PrecisionError("erfc continued fraction did not converge")
        return mp.exp(-x * x) / (mp.sqrt(mp.pi) * f)


def _prefer_cf(ax: float, bits: int) -> bool:
    taylor_cost = (math.e * ax * ax + 50) * (bits + 1.45 * ax * ax)
    cf_cost = (bits * bits / (64 * ax * ax) + 20) * bits
    return cf_cost < taylor_cost


def erfc_mp(x, ctx: PrecisionContext) -> mp.mpf:
    """Complementary error function correct to ``ctx.bits``.

    Taylor series of erf for ``|x| <= 2``.  Beyond that the cheaper of the
    Taylor series (with cancellation guard bits) and the Laplace continued
    fraction is used, and negative arguments go through
    ``erfc(x) = 2 - erfc(-x)``.
    """
    with mp.workprec(ctx.bits + 16):
        x = to_mpf(x)
        if not mp.isfinite(x):
            raise ValueError("erfc_mp needs a finite argument")
        if x == 0:
            return mp.mpf(1)
        ax = abs(x)
        if ax <= 2 or not _prefer_cf(float(ax), ctx.bits):
            val = _erfc_taylor(ax, ctx.bits + 16)
        else:
            val = _erfc_cf(ax, ctx.bits + 16)
        if x < 0:
            val = 2 - val
    with mp.workprec(ctx.bits):
        return +val


# ---------------------------------------------------------------------------
# finite differences

RICHARDSON_LEVELS = 4


def _step(t: mp.mpf, order: int, bits: int) -> mp.mpf:
    # Powers of two keep t +- h cheap to round.
    scale = max(1, int(math.ceil(math.log2(max(1.0, abs(float(t)))))))
    exponent = bits // 3 if order == 1 else bits // 6
    return mp.ldexp(mp.mpf(1), scale - exponent)


def fd_derivative(
    f: Callable[[mp.mpf], mp.mpf],
    t,
    order: int,
    ctx: PrecisionContext,
    *,
    return_error: bool = False,
):
    """Central difference of ``f`` at ``t`` refined by a 4-level Richardson table.

    ``f`` must return values accurate to ``ctx``.  The base step is
    ``2**(-bits/3)`` for first derivatives and ``2**(-bits/6)`` for second
    derivatives (both scaled by ``max(1, |t|)``), then halved three times.
    Raises :class:`PrecisionError` when the table's last two diagonal entries
    differ by more than ``tol ** (1/2)`` relative to the result.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    with mp.workprec(ctx.bits):
        t = to_mpf(t)
        h = _step(t, order, ctx.bits)
        f0 = f(t) if order == 2 else None
        table: list[list[mp.mpf]] = []
        for level in range(RICHARDSON_LEVELS):
            hk = h / 2**level
            xp, xm = t + hk, t - hk
            fp, fm = f(xp), f(xm)
            if order == 1:
                est = (fp - fm) / (xp - xm)
            else:
                half = (xp - xm) / 2
                est = (fp - 2 * f0 + fm) / (half * half)
            row = [est]
            for m in range(1, level + 1):
                factor = mp.mpf(4) ** m
                row.append(row[m - 1] + (row[m - 1] - table[level - 1][m - 1]) / (factor - 1))
            table.append(row)
        value = table[-1][-1]
        err = abs(table[-1][-1] - table[-1][-2])
        bound = ctx.tol_for(1) * max(1, abs(value))
        if err > bound:
            raise PrecisionError(
                f"Richardson table did not settle: error estimate {mp.nstr(err, 5)} "
                f"exceeds {mp.nstr(bound, 5)}"
            )
    if return_error:
        return value, err
    return value


# ---------------------------------------------------------------------------
# residual helpers


def relative_residual(lhs: Iterable, rhs: Iterable) -> mp.mpf:
    """``|sum(lhs) - sum(rhs)|`` over the largest absolute summand (0 when all vanish)."""
    lhs = list(lhs)
    rhs = list(rhs)
    scale = max((abs(v) for v in lhs + rhs), default=mp.mpf(0))
    diff = abs(mp.fsum(lhs) - mp.fsum(rhs))
    if scale == 0:
        return mp.mpf(0) if diff == 0 else mp.inf
    return diff / scale


def squared_relative_residual(inner: Iterable, rhs: Iterable, factor=1) -> mp.mpf:
    """Residual of ``factor * (sum(inner))**2 = sum(rhs)``.

    Scaled by the larger of ``|factor| * (sum |inner|)**2`` and ``sum |rhs|``.
    """
    inner = list(inner)
    rhs = list(rhs)
    lhs_val = factor * mp.fsum(inner) ** 2
    scale = max(abs(factor) * mp.fsum(abs(v) for v in inner) ** 2, mp.fsum(abs(v) for v in rhs))
    diff = abs(lhs_val - mp.fsum(rhs))
    if scale == 0:
        return mp.mpf(0) if diff == 0 else mp.inf
    return diff / scale
