"""Truncated Laurent series with exact coefficients and the order-by-order solver.

Two expansion variables are used:

* ``inv_sqrt_n``: ``x = n^{-1/2}``, coefficients are polynomials in ``t``
  (the large-``n`` expansion of ``R_n(t)`` at fixed ``t``);
* ``inv_s``: ``y = 1/s``, constant coefficients (the large-``s`` expansions
  of ``v1, v2, v3``).

A series stores the coefficients of ``var^e`` for ``e <= truncation_order``;
everything beyond is unknown.  Arithmetic keeps that bookkeeping exact, so a
residual series is only ever inspected where it is fully determined.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import mpmath as mp

from .field import ONE, SQRT2, SQRT6, AlgebraicNumber, TPoly

__all__ = [
    "AlgebraicSeries",
    "ScalingSeries",
    "SeriesODE",
    "SingularSolveError",
    "TruncationError",
    "Variable",
    "compare_printed",
    "derive_large_n_series",
    "derive_scaling_series",
    "printed_large_n_series",
    "printed_scaling_series",
    "series_ode_residual",
    "solve_order_by_order",
]

INF = math.inf


class SingularSolveError(ArithmeticError):
    """The linearized equation at some order has no unique solution."""


class TruncationError(ValueError):
    """A coefficient was requested beyond what the inputs determine."""


class Variable(enum.Enum):
    INV_SQRT_N = "inv_sqrt_n"
    INV_S = "inv_s"


@dataclass(frozen=True)
class AlgebraicSeries:
    """``sum_e coeffs[e] * var^e`` known through ``var^truncation_order``.

    ``truncation_order`` may be ``math.inf`` for an exact finite sum.
    """

    variable: Variable
    coeffs: Mapping[int, TPoly] = field(default_factory=dict)
    truncation_order: float = INF

    def __post_init__(self) -> None:
        clean = {}
        for e, c in dict(self.coeffs).items():
            c = TPoly.coerce(c)
            if e <= self.truncation_order and not c.is_zero():
                clean[int(e)] = c
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    # -- construction ---------------------------------------------------------

    @classmethod
    def monomial(cls, variable: Variable, e: int, c=ONE) -> "AlgebraicSeries":
        return cls(variable, {e: TPoly.coerce(c)})

    @classmethod
    def constant(cls, variable: Variable, c) -> "AlgebraicSeries":
        return cls(variable, {0: TPoly.coerce(c)})

    # -- inspection -----------------------------------------------------------

    @property
    def lead_exponent(self) -> float:
        """Lowest exponent with a nonzero coefficient (``truncation_order + 1`` if none is known)."""
        if self.coeffs:
            return next(iter(self.coeffs))
        return self.truncation_order + 1

    def __getitem__(self, e: int) -> TPoly:
        if e > self.truncation_order:
            raise TruncationError(f"coefficient of var^{e} is beyond truncation order {self.truncation_order}")
        return self.coeffs.get(e, TPoly())

    def known_zero_through(self) -> float:
        """Largest ``m`` with every coefficient up to ``var^m`` known and zero."""
        return self.lead_exponent - 1

    def truncate(self, order) -> "AlgebraicSeries":
        return AlgebraicSeries(self.variable, self.coeffs, min(order, self.truncation_order))

    def with_truncation(self, order) -> "AlgebraicSeries":
        """Declare the stored terms complete through ``order`` (used by solvers)."""
        return AlgebraicSeries(self.variable, self.coeffs, order)

    # -- arithmetic -----------------------------------------------------------

    def _check(self, other: "AlgebraicSeries") -> None:
        if other.variable is not self.variable:
            raise ValueError("series in different variables")

    def _lift(self, other) -> "AlgebraicSeries":
        if isinstance(other, AlgebraicSeries):
            self._check(other)
            return other
        return AlgebraicSeries.constant(self.variable, other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, TPoly()) + c
        return AlgebraicSeries(self.variable, out, min(self.truncation_order, other.truncation_order))

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicSeries(self.variable, {e: -c for e, c in self.coeffs.items()}, self.truncation_order)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, AlgebraicSeries):
            c = TPoly.coerce(other)
            return AlgebraicSeries(self.variable, {e: v * c for e, v in self.coeffs.items()}, self.truncation_order)
        self._check(other)
        trunc = min(self.truncation_order + other.lead_exponent, other.truncation_order + self.lead_exponent)
        out: dict[int, TPoly] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                if e <= trunc:
                    out[e] = out.get(e, TPoly()) + c1 * c2
        return AlgebraicSeries(self.variable, out, trunc)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = AlgebraicSeries.constant(self.variable, ONE)
        for _ in range(k):
            out = out * self
        return out

    def shift(self, k: int) -> "AlgebraicSeries":
        """Multiply by ``var^k``."""
        return AlgebraicSeries(self.variable, {e + k: c for e, c in self.coeffs.items()}, self.truncation_order + k)

    def inverse(self) -> "AlgebraicSeries":
        """``1/self`` for a series whose leading coefficient is a nonzero constant."""
        if not self.coeffs:
            raise ZeroDivisionError("no known nonzero coefficient to invert")
        lead = self.lead_exponent
        c0 = self.coeffs[lead]
        if not c0.is_constant():
            raise ZeroDivisionError("leading coefficient must be constant to invert")
        inv0 = c0.constant().inverse()
        rel = self.truncation_order - lead
        if rel == INF:
            raise TruncationError("inverse of an exact series needs an explicit truncation; call truncate() first")
        b = [TPoly.const(inv0)]
        for k in range(1, int(rel) + 1):
            acc = TPoly()
            for j in range(1, k + 1):
                acc = acc + self[lead + j] * b[k - j]
            b.append(-acc * inv0)
        return AlgebraicSeries(self.variable, {k - lead: v for k, v in enumerate(b)}, self.truncation_order - 2 * lead)

    def __truediv__(self, other):
        if isinstance(other, AlgebraicSeries):
            return self * other.inverse()
        return self * TPoly.const(AlgebraicNumber.coerce(other).inverse())

    # -- calculus ---------------------------------------------------------------

    def d_ds(self) -> "AlgebraicSeries":
        """``d/ds`` of a series in ``y = 1/s``: ``y^e -> -e y^{e+1}``."""
        if self.variable is not Variable.INV_S:
            raise ValueError("d/ds applies to series in 1/s")
        return AlgebraicSeries(
            self.variable, {e + 1: c * (-e) for e, c in self.coeffs.items() if e}, self.truncation_order + 1
        )

    def d_dt(self) -> "AlgebraicSeries":
        """``d/dt`` of a series in ``n^{-1/2}`` with coefficients depending on ``t``."""
        if self.variable is not Variable.INV_SQRT_N:
            raise ValueError("d/dt applies to series in n^(-1/2)")
        return AlgebraicSeries(self.variable, {e: c.derivative() for e, c in self.coeffs.items()}, self.truncation_order)

    def derivative(self) -> "AlgebraicSeries":
        return self.d_ds() if self.variable is Variable.INV_S else self.d_dt()

    # -- evaluation and text ----------------------------------------------------

    def evaluate(self, at, t=None) -> mp.mpf:
        """Sum of the known terms at ``s`` (``inv_s``) or at ``n`` and ``t`` (``inv_sqrt_n``)."""
        at = mp.mpf(at)
        var = 1 / at if self.variable is Variable.INV_S else 1 / mp.sqrt(at)
        tt = mp.mpf(0) if t is None else mp.mpf(t)
        return mp.fsum(c(tt) * var**e for e, c in self.coeffs.items())

    def terms(self) -> list[tuple[int, TPoly]]:
        return list(self.coeffs.items())

    def __str__(self) -> str:
        sym = "s" if self.variable is Variable.INV_S else "n"
        parts = []
        for e, c in self.coeffs.items():
            cs = str(c)
            if " " in cs:
                cs = f"({cs})"
            if self.variable is Variable.INV_S:
                k = -e
                mono = "" if k == 0 else (f"{sym}" if k == 1 else f"{sym}^{k}")
            else:
                k = mp.mpf(-e) / 2
                if e == 0:
                    mono = ""
                elif e % 2:
                    mono = f"{sym}^({-e}/2)"
                else:
                    mono = f"{sym}" if -e // 2 == 1 else f"{sym}^{-e // 2}"
            parts.append(f"{cs} · {mono}" if mono else cs)
        order = self.truncation_order
        tail = "" if order == INF else f" + O({'s' if self.variable is Variable.INV_S else 'n'}^{_tail_exp(self.variable, order)})"
        return (" + ".join(parts) if parts else "0") + tail

    def canonical_lines(self) -> list[str]:
        """One ``c · var^k`` line per term, for golden files."""
        lines = []
        for e, c in self.coeffs.items():
            if self.variable is Variable.INV_S:
                lines.append(f"{c} · s^{-e}")
            else:
                k = -e
                lines.append(f"{c} · n^{k}/2" if k % 2 else f"{c} · n^{k // 2}")
        lines.append(f"truncation: {self.variable.value}^{self.truncation_order}")
        return lines


def _tail_exp(variable: Variable, order) -> str:
    nxt = order + 1
    if variable is Variable.INV_S:
        return str(-nxt)
    return f"({-nxt}/2)" if nxt % 2 else str(-nxt // 2)


# ---------------------------------------------------------------------------
# solver


def solve_order_by_order(
    F: Callable[[AlgebraicSeries], AlgebraicSeries],
    seed: AlgebraicSeries,
    first_unknown: int,
    last_unknown: int,
) -> AlgebraicSeries:
    """Extend ``seed`` by the coefficients of ``var^e``, ``first_unknown <= e <= last_unknown``.

    The correction ``c var^e`` changes ``F`` first at ``var^(e + d)`` by
    ``L c``; ``L`` and ``d`` are read off ``F(v + var^e) - F(v)`` and ``L``
    must be a nonzero constant.  Each coefficient is then
    ``c = -[F(v)]_(e+d) / L`` and the solved order is checked to vanish.
    """
    var = seed.variable
    v = seed.with_truncation(INF)
    for e in range(first_unknown, last_unknown + 1):
        base = F(v)
        probe = F(v + AlgebraicSeries.monomial(var, e)) - base
        if not probe.coeffs:
            raise SingularSolveError(f"coefficient of var^{e} does not enter the equation")
        d_exp = probe.lead_exponent
        L = probe.coeffs[d_exp]
        if not L.is_constant():
            raise SingularSolveError(f"linearization at var^{e} has a non-constant coefficient {L}")
        m = d_exp
        if m > base.truncation_order:
            raise TruncationError(f"residual at var^{m} is not determined by the inputs")
        c = -base[m] / L
        v = v + AlgebraicSeries.monomial(var, e, c)
        check = F(v)
        if m <= check.truncation_order and not check[m].is_zero():
            raise SingularSolveError(f"order var^{m} did not vanish after solving for var^{e}")
    return v.with_truncation(last_unknown)


# ---------------------------------------------------------------------------
# the equations


def _large_n_residual(R: AlgebraicSeries) -> AlgebraicSeries:
    """``2 R R'' - R'^2 - 3R^4 + 8t R^3 - 4(t^2 - 1) R^2 + 8 n R^2`` with ``n = x^-2``."""
    t = TPoly.t()
    dR = R.d_dt()
    d2R = dR.d_dt()
    R2 = R * R
    return 2 * R * d2R - dR * dR - 3 * R2 * R2 + R2 * R * (8 * t) - R2 * (4 * (t * t - 1)) + 8 * R2.shift(-2)


def _s(var: Variable = Variable.INV_S) -> AlgebraicSeries:
    return AlgebraicSeries.monomial(var, -1)


def _us(v1: AlgebraicSeries) -> AlgebraicSeries:
    """``2 v1 x`` the v1 equation: ``2 v1 v1'' - v1'^2 + 4 sqrt2 v1^3 - 4 s v1^2``."""
    s = _s()
    d1 = v1.d_ds()
    d2 = d1.d_ds()
    sq = v1 * v1
    return 2 * v1 * d2 - d1 * d1 + 4 * SQRT2 * sq * v1 - 4 * s * sq


def _vs(v1: AlgebraicSeries, v2: AlgebraicSeries) -> AlgebraicSeries:
    """``2 v1^2 x`` the v2 equation."""
    s = _s()
    p1 = v1.d_ds()
    p2 = v2.d_ds()
    sq = v1 * v1
    coef = p1 * p1 + 8 * SQRT2 * sq * v1 - 4 * s * sq
    return 2 * sq * p2.d_ds() - 2 * v1 * p1 * p2 + coef * v2 + 2 * sq * v1


def _ws(v1: AlgebraicSeries, v2: AlgebraicSeries, v3: AlgebraicSeries, printed: bool = False) -> AlgebraicSeries:
    """``2 v1^3 x`` the v3 equation; ``printed`` keeps ``1/(2 v1^2)`` in place of ``v1'^2/(2 v1^2)``."""
    s = _s()
    p1 = v1.d_ds()
    p2 = v2.d_ds()
    p3 = v3.d_ds()
    sq = v1 * v1
    cube = sq * v1
    first = v1 if printed else v1 * p1 * p1
    coef = first + 8 * SQRT2 * sq * sq - 4 * s * cube
    return (
        2 * cube * p3.d_ds()
        - 2 * sq * p1 * p3
        + coef * v3
        - sq * p2 * p2
        + 2 * v1 * p1 * v2 * p2
        - p1 * p1 * v2 * v2
        - s * s * sq * sq
        + 2 * SQRT2 * s * sq * cube
        - AlgebraicNumber(3, 0) / 2 * cube * cube
        + 2 * cube * v2
        + 4 * SQRT2 * cube * v2 * v2
    )


def _p34(vhat: AlgebraicSeries) -> AlgebraicSeries:
    """``2 vhat x`` Painleve XXXIV: ``2 vhat vhat'' - 8 vhat^3 - 4 s vhat^2 - vhat'^2``."""
    s = _s()
    d1 = vhat.d_ds()
    sq = vhat * vhat
    return 2 * vhat * d1.d_ds() - 8 * sq * vhat - 4 * s * sq - d1 * d1


class SeriesODE(enum.Enum):
    US = "us"
    VS = "vs"
    WS = "ws"
    WS_AS_PRINTED = "ws_as_printed"
    P34 = "p34"
    SOD_LARGE_N = "sod_large_n"


def series_ode_residual(series, ode: SeriesODE) -> AlgebraicSeries:
    """Residual of ``ode`` (multiplied through to polynomial form) at the given series.

    ``series`` is ``R`` for ``SOD_LARGE_N``, ``v1`` for ``US`` and ``P34``
    (the latter substitutes ``vhat = -v1/sqrt2``), ``(v1, v2)`` for ``VS`` and
    ``(v1, v2, v3)`` for ``WS`` / ``WS_AS_PRINTED``.  All coefficients through
    the returned truncation order vanish when the series solve the equation.
    """
    ode = SeriesODE(ode)
    if ode is SeriesODE.SOD_LARGE_N:
        return _large_n_residual(_single(series))
    if ode is SeriesODE.US:
        return _us(_single(series))
    if ode is SeriesODE.P34:
        return _p34(_single(series) * (-SQRT2 / 2))
    if ode is SeriesODE.VS:
        v1, v2 = series[:2]
        return _vs(v1, v2)
    v1, v2, v3 = series[:3]
    return _ws(v1, v2, v3, printed=ode is SeriesODE.WS_AS_PRINTED)


def _single(series) -> AlgebraicSeries:
    if isinstance(series, AlgebraicSeries):
        return series
    return series[0]


# ---------------------------------------------------------------------------
# derivations


def derive_large_n_series(sign: int, order: int = 7) -> AlgebraicSeries:
    """``R_n(t) = sum_{j < order} a_j(t) n^{(1-j)/2}`` solved from the second-order ODE for ``R_n``.

    ``sign`` is the sign of ``B1``; it selects ``a_0 = sign * 2 sqrt6 / 3``.
    The result is a series in ``x = n^{-1/2}`` truncated at ``x^(order-2)``.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if order < 1:
        raise ValueError("order must be at least 1")
    var = Variable.INV_SQRT_N
    a0 = SQRT6 * AlgebraicNumber(2 * sign, 0) / 3
    seed = AlgebraicSeries.monomial(var, -1, a0)
    lead = _large_n_residual(seed)
    if not lead[-4].is_zero():
        raise SingularSolveError("leading balance -3 a0^4 + 8 a0^2 = 0 fails")
    if order == 1:
        return seed.with_truncation(-1)
    return solve_order_by_order(_large_n_residual, seed, 0, order - 2)


@dataclass(frozen=True)
class ScalingSeries:
    v1: AlgebraicSeries
    v2: AlgebraicSeries
    v3: AlgebraicSeries

    def __iter__(self):
        return iter((self.v1, self.v2, self.v3))

    def __getitem__(self, k):
        return (self.v1, self.v2, self.v3)[k]


def derive_scaling_series(order: int = 13) -> ScalingSeries:
    """Large-``s`` series of ``v1, v2, v3`` through ``s^-order``.

    ``v1`` starts at ``s/sqrt2``; ``v2`` and ``v3`` solve the linear
    equations obtained at the next two orders of the double scaling.  ``v1``
    and ``v2`` are solved internally to higher order so that every returned
    coefficient is fully determined.
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    var = Variable.INV_S
    half_sqrt2 = SQRT2 / 2
    o1, o2 = order + 3, order + 2
    v1 = solve_order_by_order(_us, AlgebraicSeries.monomial(var, -1, half_sqrt2), 0, o1)
    v2 = solve_order_by_order(lambda v: _vs(v1, v), AlgebraicSeries(var, {}), 0, o2)
    v3 = solve_order_by_order(lambda v: _ws(v1, v2, v), AlgebraicSeries(var, {}), -2, order)
    return ScalingSeries(v1.truncate(order), v2.truncate(order), v3.truncate(order))


# ---------------------------------------------------------------------------
# the coefficients as printed


def _over_sqrt2(p: int, q: int) -> AlgebraicNumber:
    """``p / (q sqrt2)``."""
    return SQRT2 * AlgebraicNumber(p, 0) / (2 * q)


def printed_large_n_series(sign: int) -> AlgebraicSeries:
    """Six printed terms of the fixed-``t`` expansion (through ``n^{-5/2}``)."""
    t = TPoly.t()
    sg = AlgebraicNumber(sign, 0)
    terms = {
        -1: TPoly.const(sg * 2 * SQRT6 / 3),
        0: t * AlgebraicNumber(4, 0) / 3,
        1: (t * t + 3) * (sg * SQRT6 / 18),
        3: (t * t * t * t + 6 * t * t + 15) * (-sg * SQRT6 / 432),
        4: t / 18,
        5: t * t * t * t * t * t * (sg * SQRT6 / 5184)
        + (9 * t * t * t * t - 117 * t * t + 81) * (sg * SQRT6 / 5184),
    }
    return AlgebraicSeries(Variable.INV_SQRT_N, terms, 5)


def printed_scaling_series() -> ScalingSeries:
    var = Variable.INV_S
    v1 = {-1: SQRT2 / 2, 2: _over_sqrt2(1, 4), 5: _over_sqrt2(-9, 8), 8: _over_sqrt2(1323, 64),
          11: _over_sqrt2(-108315, 128)}
    v2 = {0: _over_sqrt2(-1, 2), 3: _over_sqrt2(1, 4), 6: _over_sqrt2(-45, 16), 9: _over_sqrt2(1323, 16),
          12: _over_sqrt2(-1191465, 256)}
    v3 = {-2: _over_sqrt2(-1, 16), 4: _over_sqrt2(73, 256), 7: _over_sqrt2(-1791, 256),
          10: _over_sqrt2(686745, 2048), 13: _over_sqrt2(-383291217, 16384)}
    return ScalingSeries(AlgebraicSeries(var, v1, 11), AlgebraicSeries(var, v2, 12), AlgebraicSeries(var, v3, 13))


@dataclass(frozen=True)
class CoefficientMatch:
    name: str
    exponent: int
    derived: TPoly
    printed: TPoly

    @property
    def match(self) -> bool:
        return self.derived == self.printed


def compare_printed(name: str, derived: AlgebraicSeries, printed: AlgebraicSeries) -> list[CoefficientMatch]:
    """Compare every printed term (and every omitted exponent in range) exactly."""
    lo = min(printed.lead_exponent, derived.lead_exponent)
    hi = printed.truncation_order
    if derived.truncation_order < hi:
        raise TruncationError(f"{name}: derived series stops at {derived.truncation_order}, printed at {hi}")
    return [CoefficientMatch(name, e, derived[e], printed[e]) for e in range(int(lo), int(hi) + 1)
            if not (derived[e].is_zero() and printed[e].is_zero())]
