"""Residues of the ladder operators at the jump points and their t-derivatives.

For a single jump at ``t``

    R_n = B1 P_n(t)^2 e^{-t^2} / h_n,      r_n = B1 P_n(t) P_{n-1}(t) e^{-t^2} / h_{n-1},
    sigma_n = -sum_{j<n} R_j = 2 p(n),

and with two jumps each jump contributes its own pair ``(R_{n,i}, r_{n,i})``.
``aux_from_definitions`` evaluates these formulas directly;
``aux_from_recurrence`` reads the same numbers off the recurrence
coefficients (``R_n = 2 alpha_n``, ``r_n = 2 beta_n - n``).  Agreement of the
two is the first thing every identity check relies on.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp

from .moments import WeightSpec
from .numerics import PrecisionContext
from .ortho import OrthoSystem, build_system

__all__ = [
    "AuxDouble",
    "AuxSingle",
    "ConsistencyError",
    "DerivativeBundle",
    "Source",
    "aux_from_definitions",
    "aux_from_recurrence",
    "cached_aux",
    "cached_system",
    "exact_t_derivatives",
]


class ConsistencyError(ArithmeticError):
    """Two routes to the same quantity disagree beyond the working tolerance."""


class Source(enum.Enum):
    FROM_DEFINITIONS = "FromDefinitions"
    FROM_RECURRENCE = "FromRecurrence"


@dataclass(frozen=True)
class AuxSingle:
    """``R_n``, ``r_n`` for ``n <= n_max`` and ``sigma_n`` for ``n <= n_max + 1``."""

    t1: mp.mpf
    n_max: int
    R: tuple
    r: tuple
    sigma: tuple
    source: Source
    work_bits: int


@dataclass(frozen=True)
class AuxDouble:
    """Two-jump residues; ``sigma`` is the sum of both partial logarithmic derivatives."""

    t1: mp.mpf
    t2: mp.mpf
    n_max: int
    R1: tuple
    R2: tuple
    r1: tuple
    r2: tuple
    sigma: tuple
    source: Source
    work_bits: int

    @property
    def R(self) -> tuple:
        return tuple(a + b for a, b in zip(self.R1, self.R2))

    @property
    def r(self) -> tuple:
        return tuple(a + b for a, b in zip(self.r1, self.r2))


def _residues(sys: OrthoSystem, B, t):
    """``(R_n, r_n)`` of one jump for ``n = 0..n_max`` from ``P_n`` evaluated at the jump."""
    c = B * mp.exp(-t * t)
    R, r = [], []
    prev, cur = mp.mpf(0), mp.mpf(1)
    for n in range(sys.n_max + 1):
        if n:
            prev, cur = cur, (t - sys.alpha[n - 1]) * cur - sys.beta[n - 1] * prev
        R.append(c * cur * cur / sys.h[n])
        r.append(c * cur * prev / sys.h[n - 1] if n else mp.mpf(0))
    return R, r


def _sigma_checked(sys: OrthoSystem, R_total: list, R_size: list | None = None) -> list:
    """``sigma_n = 2 p(n)``, reconciled with ``-sum_{j<n} R_j``.

    ``R_size`` gives the magnitude of each summand before the two jumps are
    combined; with an even weight ``R_{j,1} + R_{j,2}`` cancels to roundoff
    and the totals alone would be no scale at all.
    """
    R_size = R_size or [abs(v) for v in R_total]
    sigma = [2 * p for p in sys.p1]
    tol = sys.ctx.tol
    partial, biggest = mp.mpf(0), mp.mpf(0)
    for n in range(1, sys.n_max + 2):
        # same normalization as relative_residual, with running sum and max
        partial += R_total[n - 1]
        biggest = max(biggest, R_size[n - 1])
        scale = max(biggest, abs(sigma[n]))
        diff = abs(sigma[n] + partial)
        res = diff / scale if scale else (mp.mpf(0) if diff == 0 else mp.inf)
        if res > tol:
            raise ConsistencyError(
                f"sigma_{n}: 2p(n) and -sum R_j differ by {mp.nstr(res, 5)} (tolerance {mp.nstr(tol, 5)})"
            )
    return sigma


def aux_from_definitions(sys: OrthoSystem, *, force_double: bool = False) -> AuxSingle | AuxDouble:
    """Residues evaluated from their defining formulas.

    Returns :class:`AuxSingle` for a single-jump weight unless
    ``force_double`` asks for the two-jump layout (with ``R2 = r2 = 0``).
    ``sigma`` comes from ``2 p(n)`` and is cross-checked against the partial
    sums of ``R``; a mismatch raises :class:`ConsistencyError`.
    """
    spec = sys.spec
    with mp.workprec(sys.work_bits):
        A, B1, B2, t1, t2 = spec.values()
        R1, r1 = _residues(sys, B1, t1)
        if B2 != 0:
            R2, r2 = _residues(sys, B2, t2)
        else:
            R2 = [mp.mpf(0)] * len(R1)
            r2 = [mp.mpf(0)] * len(r1)
        total = [a + b for a, b in zip(R1, R2)] if B2 != 0 else R1
        size = [abs(a) + abs(b) for a, b in zip(R1, R2)]
        sigma = _sigma_checked(sys, total, size)
        if B2 == 0 and not force_double:
            return AuxSingle(t1, sys.n_max, tuple(R1), tuple(r1), tuple(sigma), Source.FROM_DEFINITIONS, sys.work_bits)
        return AuxDouble(
            t1, t2, sys.n_max, tuple(R1), tuple(R2), tuple(r1), tuple(r2), tuple(sigma),
            Source.FROM_DEFINITIONS, sys.work_bits,
        )


def aux_from_recurrence(sys: OrthoSystem) -> AuxSingle:
    """``R_n = 2 alpha_n``, ``r_n = 2 beta_n - n``, ``sigma_n = 2 p(n)`` (single jump only)."""
    if not sys.spec.single_jump:
        raise ValueError("the recurrence route separates R_n only for a single jump; use aux_from_definitions")
    with mp.workprec(sys.work_bits):
        t1 = sys.spec.values()[3]
        R = tuple(2 * a for a in sys.alpha)
        r = tuple(2 * b - n for n, b in enumerate(sys.beta))
        sigma = tuple(2 * p for p in sys.p1)
    return AuxSingle(t1, sys.n_max, R, r, sigma, Source.FROM_RECURRENCE, sys.work_bits)


@dataclass(frozen=True)
class DerivativeBundle:
    """Exact derivatives along one jump location (``axis`` 1 or 2).

    ``dh``, ``dlogh``, ``dp``, ``dsigma`` are indexed by ``n = 0..n_max``;
    ``dbeta[0]`` is 0; ``dalpha`` and ``dR`` stop at ``n_max - 1`` because
    they need ``r_{n+1}``.
    """

    axis: int
    dh: tuple
    dlogh: tuple
    dp: tuple
    dsigma: tuple
    dbeta: tuple
    dalpha: tuple
    dR: tuple


def _bundle(sys: OrthoSystem, axis: int, R: tuple, r: tuple) -> DerivativeBundle:
    n_max = sys.n_max
    dh = tuple(-R[n] * sys.h[n] for n in range(n_max + 1))
    dlogh = tuple(-R[n] for n in range(n_max + 1))
    dp = tuple(r[: n_max + 1])
    dsigma = tuple(2 * v for v in dp)
    dbeta = (mp.mpf(0),) + tuple(sys.beta[n] * (R[n - 1] - R[n]) for n in range(1, n_max + 1))
    dalpha = tuple(r[n] - r[n + 1] for n in range(n_max))
    dR = tuple(2 * v for v in dalpha)
    return DerivativeBundle(axis, dh, dlogh, dp, dsigma, dbeta, dalpha, dR)


def exact_t_derivatives(sys: OrthoSystem, aux: AuxSingle | AuxDouble):
    """Closed-form first derivatives in the jump location(s).

    ``h_n' = -R_n h_n``, ``p(n)' = r_n``, ``sigma_n' = 2 r_n``,
    ``beta_n' = beta_n (R_{n-1} - R_n)``, ``alpha_n' = r_n - r_{n+1}``.
    For two jumps a pair of bundles (one per axis) is returned; each uses the
    residues of its own jump, and ``dalpha``, ``dR`` are partial derivatives
    of ``alpha_n`` and of ``2 alpha_n = R_{n,1} + R_{n,2}``.
    """
    with mp.workprec(sys.work_bits):
        if isinstance(aux, AuxSingle):
            return _bundle(sys, 1, aux.R, aux.r)
        return _bundle(sys, 1, aux.R1, aux.r1), _bundle(sys, 2, aux.R2, aux.r2)


# ---------------------------------------------------------------------------
# cached rebuilds for finite differences


@lru_cache(maxsize=512)
def cached_system(spec: WeightSpec, n_max: int, ctx: PrecisionContext, method: str = "cholesky") -> OrthoSystem:
    return build_system(spec, n_max, ctx, method)


@lru_cache(maxsize=512)
def cached_aux(spec: WeightSpec, n_max: int, ctx: PrecisionContext, method: str = "cholesky", force_double: bool = False):
    sys = cached_system(spec, n_max, ctx, method)
    return sys, aux_from_definitions(sys, force_double=force_double)
