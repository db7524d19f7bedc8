"""Gaussian weight with up to two Heaviside jumps and its closed-form moments."""

from __future__ import annotations

from dataclasses import dataclass, replace

import mpmath as mp

from .numerics import PrecisionContext, erfc_mp, to_mpf

__all__ = [
    "DegenerateWeightError",
    "WeightSpec",
    "gaussian_moment",
    "half_line_moment",
    "half_line_moments",
    "moment",
    "moments",
    "weight_at",
]


class DegenerateWeightError(ValueError):
    """The weight vanishes identically."""


@dataclass(frozen=True)
class WeightSpec:
    """``exp(-x^2) * (A + B1*theta(x - t1) + B2*theta(x - t2))``.

    Fields accept anything :func:`hpk.numerics.to_mpf` understands.  Decimal
    strings are re-read at each working precision; floats are taken as their
    exact binary values.  ``t2`` is ignored when ``B2 == 0``.
    """

    A: object = 1
    B1: object = 0
    B2: object = 0
    t1: object = 0
    t2: object = 0

    def __post_init__(self) -> None:
        with mp.workprec(256):
            A, B1, B2, t1, t2 = self.values()
            if A < 0:
                raise ValueError("weight constraint violated: A >= 0")
            if A + B1 < 0:
                raise ValueError("weight constraint violated: A + B1 >= 0")
            if A + B1 + B2 < 0:
                raise ValueError("weight constraint violated: A + B1 + B2 >= 0")
            if B2 != 0 and not t1 < t2:
                raise ValueError("weight constraint violated: t1 < t2 when B2 != 0")

    def values(self) -> tuple[mp.mpf, mp.mpf, mp.mpf, mp.mpf, mp.mpf]:
        """``(A, B1, B2, t1, t2)`` as mpf at the current precision."""
        return tuple(to_mpf(v) for v in (self.A, self.B1, self.B2, self.t1, self.t2))

    @property
    def single_jump(self) -> bool:
        return to_mpf(self.B2) == 0

    @property
    def pure_gaussian(self) -> bool:
        return to_mpf(self.B1) == 0 and to_mpf(self.B2) == 0

    @property
    def is_zero(self) -> bool:
        return to_mpf(self.A) == 0 and self.pure_gaussian

    def jumps(self) -> list[tuple[object, object]]:
        """``[(B1, t1)]`` or ``[(B1, t1), (B2, t2)]`` in raw field form."""
        if self.single_jump:
            return [(self.B1, self.t1)]
        return [(self.B1, self.t1), (self.B2, self.t2)]

    def at(self, t1=None, t2=None) -> "WeightSpec":
        """Copy with the jump locations moved (used by finite differences)."""
        changes = {}
        if t1 is not None:
            changes["t1"] = t1
        if t2 is not None:
            changes["t2"] = t2
        return replace(self, **changes)

    @classmethod
    def three_level(cls, mu, t1, t2, bits: int = 4096) -> "WeightSpec":
        """Weight equal to ``e^mu``, ``1``, ``e^-mu`` on the three intervals cut by ``t1 < t2``."""
        with mp.workprec(bits):
            mu = to_mpf(mu)
            a = mp.exp(mu)
            return cls(A=a, B1=1 - a, B2=mp.exp(-mu) - 1, t1=t1, t2=t2)

    def to_dict(self) -> dict:
        return {k: _render(getattr(self, k)) for k in ("A", "B1", "B2", "t1", "t2")}


def _render(v):
    if isinstance(v, mp.mpf):
        return mp.nstr(v, int(mp.mp.dps) + 5, strip_zeros=True)
    if isinstance(v, (int, str)):
        return v
    return repr(v) if not isinstance(v, float) else v


def gaussian_moment(j: int, ctx: PrecisionContext) -> mp.mpf:
    """Full-line moment of ``exp(-x^2)``: 0 for odd ``j``, ``(j-1)!! sqrt(pi) / 2^(j/2)`` otherwise."""
    if j < 0:
        raise ValueError("moment index must be non-negative")
    with mp.workprec(ctx.bits):
        if j % 2:
            return mp.mpf(0)
        return mp.fac2(j - 1) * mp.sqrt(mp.pi) / mp.mpf(2) ** (j // 2)


def half_line_moments(j_max: int, t, ctx: PrecisionContext) -> list[mp.mpf]:
    """``I_j(t) = int_t^inf x^j exp(-x^2) dx`` for ``j = 0..j_max`` by upward recurrence."""
    with mp.workprec(ctx.bits + 16):
        t = to_mpf(t)
        e = mp.exp(-t * t)
        out = [mp.sqrt(mp.pi) / 2 * erfc_mp(t, ctx.with_bits(ctx.bits + 16))]
        if j_max >= 1:
            out.append(e / 2)
        tp = mp.mpf(1)  # t^(j-1)
        for j in range(2, j_max + 1):
            tp *= t
            out.append(tp * e / 2 + mp.mpf(j - 1) / 2 * out[j - 2])
    with mp.workprec(ctx.bits):
        return [+v for v in out[: j_max + 1]]


def half_line_moment(j: int, t, ctx: PrecisionContext) -> mp.mpf:
    if j < 0:
        raise ValueError("moment index must be non-negative")
    return half_line_moments(j, t, ctx)[j]


def moments(j_max: int, spec: WeightSpec, ctx: PrecisionContext) -> list[mp.mpf]:
    """``mu_j = A G_j + B1 I_j(t1) + B2 I_j(t2)`` for ``j = 0..j_max``."""
    if spec.is_zero:
        raise DegenerateWeightError("A = B1 = B2 = 0 gives the zero weight")
    with mp.workprec(ctx.bits):
        A, B1, B2, t1, t2 = spec.values()
        mu = [A * gaussian_moment(j, ctx) for j in range(j_max + 1)]
        for B, t in ((B1, t1), (B2, t2)):
            if B == 0:
                continue
            for j, v in enumerate(half_line_moments(j_max, t, ctx)):
                mu[j] += B * v
        return mu


def moment(j: int, spec: WeightSpec, ctx: PrecisionContext) -> mp.mpf:
    return moments(j, spec, ctx)[j]


def weight_at(x, spec: WeightSpec) -> mp.mpf:
    """Pointwise weight, with ``theta(0) = 0``."""
    x = to_mpf(x)
    A, B1, B2, t1, t2 = spec.values()
    level = A
    if x > t1:
        level += B1
    if B2 != 0 and x > t2:
        level += B2
    return mp.exp(-x * x) * level
