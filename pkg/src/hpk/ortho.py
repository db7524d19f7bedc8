"""Monic orthogonal polynomials of a jump weight: recurrence data, Hankel determinants, oracles.

Two engines fill an :class:`OrthoSystem`:

``cholesky``
    factor the moment matrix ``(mu_{i+j})``.  This is the reference path and
    the only one used by the identity checks.  Hankel matrices lose roughly
    ``n`` binary digits, so the factorization runs with adaptive guard bits
    and repeats itself when the measured cancellation exceeds the guard.
``ladder``
    O(n) forward recursion driven by the residues of the jump(s):
    ``beta_n = (n + r_n)/2`` and ``alpha_n = R_n/2`` with ``R_n, r_n`` taken
    from ``P_n`` evaluated at the jump.  Only this scales to ``n`` in the
    thousands; its precision is certified by running it twice at different
    guard sizes.  It reproduces the Cholesky data wherever both can run.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .moments import WeightSpec, moments
from .numerics import PrecisionContext, PrecisionError, to_mpf

__all__ = [
    "CholeskyBreakdown",
    "OrthoSystem",
    "build_system",
    "eval_poly",
    "poly_derivatives",
    "hankel_oracle",
    "oracle_recurrence",
    "expectation_oracle",
]

CHOLESKY_LIMIT = 300
_MAX_RETRIES = 6


class CholeskyBreakdown(PrecisionError):
    """A non-positive pivot appeared: not enough precision for the requested size."""


@dataclass(frozen=True)
class OrthoSystem:
    """Recurrence data of one weight up to degree ``n_max``.

    ``h``, ``alpha``, ``beta`` have ``n_max + 1`` entries (``beta[0] = 0``);
    ``p1`` (the ``x^{n-1}`` coefficient of ``P_n``) and ``logD`` (``log D_n``)
    have ``n_max + 2``.  Values carry ``work_bits`` of precision, of which
    ``ctx.bits`` are trusted.
    """

    spec: WeightSpec
    n_max: int
    h: tuple
    alpha: tuple
    beta: tuple
    p1: tuple
    logD: tuple
    ctx: PrecisionContext
    work_bits: int
    method: str

    def D(self, n: int) -> mp.mpf:
        with mp.workprec(self.work_bits):
            return mp.exp(self.logD[n])


# ---------------------------------------------------------------------------
# Cholesky engine


def _cholesky(mu: list, m: int, bits: int):
    """Lower factor rows of the ``m x m`` Hankel matrix and the worst pivot cancellation in bits."""
    with mp.workprec(bits):
        L = [[mp.mpf(0)] * (i + 1) for i in range(m)]
        loss = 0.0
        for j in range(m):
            rowj = L[j][:j]
            s = mu[2 * j] - (mp.fdot(rowj, rowj) if j else 0)
            if s <= 0:
                raise CholeskyBreakdown(f"non-positive pivot at row {j} with {bits} bits")
            loss = max(loss, float(mp.log(abs(mu[2 * j]) / s, 2)))
            d = mp.sqrt(s)
            L[j][j] = d
            for i in range(j + 1, m):
                acc = mu[i + j] - (mp.fdot(L[i][:j], rowj) if j else 0)
                L[i][j] = acc / d
        return L, loss


def _build_cholesky(spec: WeightSpec, n_max: int, ctx: PrecisionContext):
    m = n_max + 2
    guard = 64 + 4 * m
    for _ in range(_MAX_RETRIES):
        bits = ctx.bits + guard
        try:
            mu = moments(2 * m - 2, spec, ctx.with_bits(bits))
            L, loss = _cholesky(mu, m, bits)
        except CholeskyBreakdown:
            guard *= 2
            continue
        needed = int(2 * loss) + 64
        if needed <= guard:
            break
        guard = max(needed, 2 * guard)
    else:
        raise CholeskyBreakdown(f"Cholesky still unreliable after {_MAX_RETRIES} precision increases")

    with mp.workprec(bits):
        diag = [L[k][k] for k in range(m)]
        h = [d * d for d in diag[: n_max + 1]]
        sub = [mp.mpf(0)] + [L[k][k - 1] / diag[k - 1] for k in range(1, m)]
        p1 = [-v for v in sub]
        alpha = [L[k + 1][k] / diag[k] - sub[k] for k in range(n_max + 1)]
        beta = [mp.mpf(0)] + [h[k] / h[k - 1] for k in range(1, n_max + 1)]
    return h, alpha, beta, p1, bits


# ---------------------------------------------------------------------------
# forward ladder engine


def _ladder_forward(spec: WeightSpec, n_max: int, bits: int):
    with mp.workprec(bits):
        A, B1, B2, t1, t2 = spec.values()
        mu = moments(1, spec, PrecisionContext(bits))
        jumps = [(B1, t1)] + ([] if B2 == 0 else [(B2, t2)])
        coeff = [B * mp.exp(-t * t) for B, t in jumps]
        h = [mu[0]]
        alpha = [mu[1] / mu[0]]
        beta = [mp.mpf(0)]
        prev = [mp.mpf(0)] * len(jumps)  # P_{n-1}(t_i)
        cur = [mp.mpf(1)] * len(jumps)  # P_n(t_i)
        for n in range(1, n_max + 2):
            nxt = [(t - alpha[n - 1]) * p - beta[n - 1] * q for (B, t), p, q in zip(jumps, cur, prev)]
            prev, cur = cur, nxt
            r = mp.fsum(c * p * q for c, p, q in zip(coeff, cur, prev)) / h[n - 1]
            b = (n + r) / 2
            if b <= 0:
                raise PrecisionError(f"forward recursion produced beta_{n} <= 0 at {bits} bits")
            if n == n_max + 1:
                h_next = b * h[n - 1]
                break
            beta.append(b)
            h.append(b * h[n - 1])
            R = mp.fsum(c * p * p for c, p in zip(coeff, cur)) / h[n]
            alpha.append(R / 2)
        p1 = [mp.mpf(0)]
        for k in range(n_max + 1):
            p1.append(p1[-1] - alpha[k])
    return h, alpha, beta, p1, h_next


_LADDER_RETRIES = 16


def _max_rel_diff(a, b) -> mp.mpf:
    return max(abs(x - y) / max(1, abs(y)) for x, y in zip(a, b))


def _build_ladder(spec: WeightSpec, n_max: int, ctx: PrecisionContext):
    guard = 64
    target = mp.mpf(2) ** (-ctx.bits)
    for _ in range(_LADDER_RETRIES):
        hi_bits = ctx.bits + 2 * guard + 64
        try:
            lo = _ladder_forward(spec, n_max, ctx.bits + guard)
            hi = _ladder_forward(spec, n_max, hi_bits)
        except PrecisionError:
            # cancellation already destroyed positivity of beta_n
            guard *= 2
            continue
        with mp.workprec(hi_bits):
            d = max(_max_rel_diff(lo[1], hi[1]), _max_rel_diff(lo[2], hi[2]))
            d = max(d, max(abs(x / y - 1) for x, y in zip(lo[0], hi[0])))
        if d <= target:
            h, alpha, beta, p1, _ = hi
            return h, alpha, beta, p1, hi_bits
        guard *= 2
    raise PrecisionError("forward recursion did not stabilise; the weight is too extreme")


# ---------------------------------------------------------------------------


def build_system(spec: WeightSpec, n_max: int, ctx: PrecisionContext, method: str = "auto") -> OrthoSystem:
    """Recurrence coefficients, norms and ``log D_n`` for ``n <= n_max``.

    ``method`` is ``"cholesky"``, ``"ladder"`` or ``"auto"`` (Cholesky up to
    ``n_max = 300``).
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if method == "auto":
        method = "cholesky" if n_max <= CHOLESKY_LIMIT else "ladder"
    if method == "cholesky":
        h, alpha, beta, p1, bits = _build_cholesky(spec, n_max, ctx)
    elif method == "ladder":
        h, alpha, beta, p1, bits = _build_ladder(spec, n_max, ctx)
    else:
        raise ValueError(f"unknown method {method!r}")
    with mp.workprec(bits):
        logD = [mp.mpf(0)]
        for v in h:
            logD.append(logD[-1] + mp.log(v))
    return OrthoSystem(
        spec=spec,
        n_max=n_max,
        h=tuple(h),
        alpha=tuple(alpha),
        beta=tuple(beta),
        p1=tuple(p1),
        logD=tuple(logD),
        ctx=ctx,
        work_bits=bits,
        method=method,
    )


def eval_poly(sys: OrthoSystem, n: int, x) -> tuple[mp.mpf, mp.mpf]:
    """``(P_n(x), P_{n-1}(x))`` by the three-term recurrence; ``P_{-1} = 0``."""
    if not 0 <= n <= sys.n_max + 1:
        raise IndexError(f"degree {n} outside 0..{sys.n_max + 1}")
    with mp.workprec(sys.work_bits):
        x = to_mpf(x)
        prev, cur = mp.mpf(0), mp.mpf(1)
        for k in range(n):
            prev, cur = cur, (x - sys.alpha[k]) * cur - sys.beta[k] * prev
        return cur, prev


def poly_derivatives(sys: OrthoSystem, n: int, x) -> tuple[mp.mpf, mp.mpf, mp.mpf]:
    """``(P_n, P_n', P_n'')`` at ``x`` from the differentiated recurrence."""
    if not 0 <= n <= sys.n_max + 1:
        raise IndexError(f"degree {n} outside 0..{sys.n_max + 1}")
    with mp.workprec(sys.work_bits):
        x = to_mpf(x)
        p0, p1 = mp.mpf(0), mp.mpf(1)
        d0, d1 = mp.mpf(0), mp.mpf(0)
        s0, s1 = mp.mpf(0), mp.mpf(0)
        for k in range(n):
            a, b = sys.alpha[k], sys.beta[k]
            p2 = (x - a) * p1 - b * p0
            d2 = p1 + (x - a) * d1 - b * d0
            s2 = 2 * d1 + (x - a) * s1 - b * s0
            p0, p1, d0, d1, s0, s1 = p1, p2, d1, d2, s1, s2
        return p1, d1, s1


# ---------------------------------------------------------------------------
# oracles


def _det_pivoted(rows: list[list[mp.mpf]]) -> mp.mpf:
    """Determinant by Gaussian elimination with complete pivoting."""
    a = [list(r) for r in rows]
    n = len(a)
    det = mp.mpf(1)
    for k in range(n):
        pi, pj = max(
            ((i, j) for i in range(k, n) for j in range(k, n)),
            key=lambda ij: abs(a[ij[0]][ij[1]]),
        )
        piv = a[pi][pj]
        if piv == 0:
            raise ZeroDivisionError("singular moment matrix: the weight is invalid")
        if pi != k:
            a[k], a[pi] = a[pi], a[k]
            det = -det
        if pj != k:
            for r in a:
                r[k], r[pj] = r[pj], r[k]
            det = -det
        det *= piv
        for i in range(k + 1, n):
            f = a[i][k] / piv
            if f:
                ri, rk = a[i], a[k]
                for j in range(k + 1, n):
                    ri[j] -= f * rk[j]
    return det


def _oracle_bits(n: int, ctx: PrecisionContext) -> int:
    # determinant error scales with the Hankel condition number, about 3 bits per degree
    return ctx.bits + 64 + 8 * (n + 2)


def hankel_oracle(spec: WeightSpec, n: int, ctx: PrecisionContext, work_bits: int | None = None) -> mp.mpf:
    """``D_n = det(mu_{i+j})_{i,j<n}`` by pivoted elimination (``n <= 30``)."""
    if not 0 <= n <= 30:
        raise ValueError("hankel_oracle is meant for n <= 30")
    bits = work_bits or _oracle_bits(n, ctx)
    with mp.workprec(bits):
        if n == 0:
            return mp.mpf(1)
        mu = moments(2 * n - 2, spec, ctx.with_bits(bits))
        return _det_pivoted([[mu[i + j] for j in range(n)] for i in range(n)])


def oracle_recurrence(spec: WeightSpec, n_max: int, ctx: PrecisionContext, work_bits: int | None = None) -> dict:
    """``h_n``, ``alpha_n``, ``beta_n`` for ``n <= n_max`` from ratios of determinants.

    ``h_n = D_{n+1}/D_n`` and ``p(n) = -det(H_n with last column shifted)/D_n``,
    so no Cholesky factor is involved.
    """
    if n_max + 2 > 31:
        raise ValueError("oracle_recurrence is meant for n_max <= 29")
    bits = work_bits or _oracle_bits(n_max + 2, ctx)
    with mp.workprec(bits):
        mu = moments(2 * n_max + 2, spec, ctx.with_bits(bits))
        D = [mp.mpf(1)]
        p = [mp.mpf(0)]
        for k in range(1, n_max + 3):
            D.append(_det_pivoted([[mu[i + j] for j in range(k)] for i in range(k)]))
            if k <= n_max + 1:
                shifted = [[mu[i + j] for j in range(k - 1)] + [mu[i + k]] for i in range(k)]
                p.append(-_det_pivoted(shifted) / D[k])
        h = [D[k + 1] / D[k] for k in range(n_max + 1)]
        alpha = [p[k] - p[k + 1] for k in range(n_max + 1)]
        beta = [mp.mpf(0)] + [h[k] / h[k - 1] for k in range(1, n_max + 1)]
    return {"h": h, "alpha": alpha, "beta": beta, "D": D[: n_max + 2], "p1": p}


def _breakpoints(spec: WeightSpec, cutoff: float) -> list[float]:
    with mp.workprec(64):
        _, _, B2, t1, t2 = spec.values()
        pts = [float(t1)] + ([] if B2 == 0 else [float(t2)])
    inner = sorted(p for p in pts if -cutoff < p < cutoff)
    return [-cutoff] + inner + [cutoff]


def expectation_oracle(spec: WeightSpec, n: int, ctx: PrecisionContext | None = None, nodes: int = 80) -> float:
    """``E(prod f(x_j))`` under the GUE density by tensor-product Gauss-Legendre quadrature.

    Each axis is cut at the jumps and truncated to ``[-12, 12]``; the result
    is the ratio of the two Vandermonde-squared integrals, in double precision.
    """
    if not 1 <= n <= 3:
        raise ValueError("expectation_oracle supports n = 1, 2, 3")
    cut = 12.0
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    xs, ws = [], []
    bp = _breakpoints(spec, cut)
    for a, b in zip(bp[:-1], bp[1:]):
        xs.append(0.5 * (b - a) * xg + 0.5 * (b + a))
        ws.append(0.5 * (b - a) * wg)
    x = np.concatenate(xs)
    w = np.concatenate(ws)
    with mp.workprec(64):
        A, B1, B2, t1, t2 = (float(v) for v in spec.values())
    # theta(0) = 0: a node sitting exactly on a jump takes the lower level
    level = A + B1 * (x > t1) + (B2 * (x > t2) if B2 != 0 else 0.0)
    base = w * np.exp(-x * x)
    grids = np.meshgrid(*([x] * n), indexing="ij")
    vdm = np.ones_like(grids[0])
    for i, j in itertools.combinations(range(n), 2):
        vdm = vdm * (grids[j] - grids[i]) ** 2
    wgrid = np.ones_like(grids[0])
    fgrid = np.ones_like(grids[0])
    for axis in range(n):
        shape = [1] * n
        shape[axis] = -1
        wgrid = wgrid * base.reshape(shape)
        fgrid = fgrid * level.reshape(shape)
    den = float(np.sum(vdm * wgrid))
    num = float(np.sum(vdm * wgrid * fgrid))
    return num / den
