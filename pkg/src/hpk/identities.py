"""Every difference and differential identity of the jump-weight theory as a numerical residual.

Each check returns :class:`IdentityReport` records.  Residuals are relative:
a linear identity ``sum(lhs) = sum(rhs)`` is measured against its largest
summand, a squared identity ``c * (sum(inner))^2 = sum(rhs)`` against
``max(|c| (sum |inner|)^2, sum |rhs|)``.  The tolerance follows from how many
finite differences the identity needs:

=============  ==================  ==============
class          derivatives         tolerance
=============  ==================  ==============
algebraic      none or exact       ``tol``
fd1            one FD level        ``tol ** 1/2``
fd2            second partials     ``tol ** 1/4``
limit          ratio across ``n``  ratio < 1
=============  ==================  ==============

Derivatives in ``t`` rebuild the whole :class:`~hpk.ortho.OrthoSystem` at the
stencil points (always by Cholesky, so that the recurrence-based identities
are not satisfied by construction).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import mpmath as mp

from .ladder import AuxDouble, AuxSingle, cached_aux, exact_t_derivatives
from .moments import WeightSpec
from .numerics import PrecisionContext, fd_derivative, relative_residual, squared_relative_residual
from .ortho import OrthoSystem, build_system, poly_derivatives

__all__ = [
    "IdentityId",
    "IdentityReport",
    "IdentitySpec",
    "check_bhe_limit",
    "check_conclusion_relations",
    "check_difference",
    "check_exact_ode",
    "check_hermite_limit",
    "hard_edge",
    "check_limits",
    "check_ode",
    "check_riccati_toda",
    "check_scaled_pde",
    "check_string_single",
    "check_two_jump",
    "run_suite",
    "summarize",
]


class IdentityId(enum.Enum):
    S11 = "S11"
    S12 = "S12"
    S23 = "S23"
    S21 = "S21"
    S22 = "S22"
    S121 = "S121"
    S211 = "S211"
    DIFF_R = "DIFF_R"
    DIFF_RCAP = "DIFF_RCAP"
    DISCRETE_SIGMA = "DISCRETE_SIGMA"
    TODA1 = "TODA1"
    TODA2 = "TODA2"
    RICCATI_R = "RICCATI_R"
    RICCATI_RCAP = "RICCATI_RCAP"
    PIV_ODE = "PIV_ODE"
    CHAZY = "CHAZY"
    SIGMA_FORM = "SIGMA_FORM"
    BHE_LIMIT = "BHE_LIMIT"
    HERMITE_LIMIT = "HERMITE_LIMIT"
    TJ_STRING = "TJ_STRING"
    TJ_TODA = "TJ_TODA"
    TJ_PDE = "TJ_PDE"
    TJ_PDE_SCALED = "TJ_PDE_SCALED"
    CONCLUSION_RELATIONS = "CONCLUSION_RELATIONS"


PASS = "PASS"
FAIL = "FAIL"
SKIPPED = "SKIPPED-DEGENERATE"

_FD_DEPTH = {"algebraic": 0, "fd1": 1, "fd2": 2}


@dataclass(frozen=True)
class IdentitySpec:
    """Parameters of the named equations at degree ``n`` (and jump ``t1``, sign of ``B1``)."""

    n: int
    t1: mp.mpf
    sign: int

    @property
    def piv_params(self) -> tuple:
        return (2 * self.n + 1, 0)

    @property
    def chazy_params(self) -> tuple:
        n = mp.mpf(self.n)
        return (-8 * n**2 / 3, -64 * n**3 / 27)

    @property
    def sigma_params(self) -> tuple:
        return (0, 0, 2 * self.n)

    @property
    def bhe_params(self) -> tuple:
        """``(gamma, delta, alpha, q)``; ``q`` is negative for ``B1 > 0``."""
        n = mp.mpf(self.n)
        q = 4 * mp.sqrt(3) * n ** mp.mpf(1.5) / 9
        return (-1, mp.sqrt(2) * self.t1, 0, -q if self.sign > 0 else q)


@dataclass(frozen=True)
class IdentityReport:
    """One residual against its tolerance.

    For ``tol_class == "limit"`` the ``residual`` is the ratio of the last to
    the first residual along ``n`` (tolerance 1) and ``reason`` lists the raw
    residuals.
    """

    id: IdentityId
    n: int | tuple
    t: tuple
    residual: mp.mpf | None
    tolerance: mp.mpf
    tol_class: str
    status: str
    label: str = ""
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_record(self, digits: int = 20) -> dict:
        def fmt(v):
            if v is None:
                return None
            return mp.nstr(v, digits, strip_zeros=False, min_fixed=0, max_fixed=0)

        return {
            "id": self.id.value,
            "label": self.label,
            "n": list(self.n) if isinstance(self.n, tuple) else self.n,
            "t": [fmt(v) for v in self.t],
            "residual": fmt(self.residual),
            "tolerance": fmt(self.tolerance),
            "class": self.tol_class,
            "pass": self.passed,
            "status": self.status,
            "reason": self.reason,
        }


def _report(ident, n, t, residual, ctx: PrecisionContext, tol_class: str, label: str) -> IdentityReport:
    tol = ctx.tol_for(_FD_DEPTH[tol_class])
    status = PASS if residual <= tol else FAIL
    return IdentityReport(ident, n, tuple(t), residual, tol, tol_class, status, label)


def _skipped(ident, n, t, ctx: PrecisionContext, tol_class: str, label: str, reason: str) -> IdentityReport:
    tol = ctx.tol_for(_FD_DEPTH[tol_class])
    return IdentityReport(ident, n, tuple(t), None, tol, tol_class, SKIPPED, label, reason)


class _Degenerate(Exception):
    pass


def _ratio_sq(num, den):
    """``num**2 / den`` with the limit 0 when both vanish exactly (no jump)."""
    if den == 0:
        if num == 0:
            return mp.mpf(0)
        raise _Degenerate("division by an exactly vanishing residue")
    return num * num / den


def _guarded(ident, n, t, ctx, tol_class, label, compute: Callable[[], mp.mpf]) -> IdentityReport:
    try:
        res = compute()
    except _Degenerate as exc:
        return _skipped(ident, n, t, ctx, tol_class, label, str(exc))
    return _report(ident, n, t, res, ctx, tol_class, label)


def _need_range(aux, n: int) -> None:
    if not 1 <= n <= aux.n_max - 1:
        raise ValueError(f"n = {n} needs 1 <= n <= n_max - 1 = {aux.n_max - 1}")


# ---------------------------------------------------------------------------
# finite differences through rebuilt systems


def _fd(sys: OrthoSystem, axis: int, t0, getter, order: int = 1, force_double: bool = False):
    spec, n_max, ctx = sys.spec, sys.n_max, sys.ctx

    def f(tau):
        moved = spec.at(t1=tau) if axis == 1 else spec.at(t2=tau)
        s, aux = cached_aux(moved, n_max, ctx, "cholesky", force_double)
        with mp.workprec(s.work_bits):
            return getter(s, aux)

    return fd_derivative(f, t0, order, ctx)


# ---------------------------------------------------------------------------
# algebraic identities, one jump


def check_string_single(aux: AuxSingle, sys: OrthoSystem, n: int) -> list[IdentityReport]:
    """Large-z and residue identities linking ``R_n, r_n`` with ``alpha_n, beta_n``."""
    _need_range(aux, n)
    ctx = sys.ctx
    out = []
    with mp.workprec(sys.work_bits):
        t = aux.t1
        R, r = aux.R, aux.r
        a, b = sys.alpha[n], sys.beta[n]
        T = (t,)
        sumR = mp.fsum(R[:n])
        out.append(_report(IdentityId.S11, n, T, relative_residual([R[n]], [2 * a]), ctx, "algebraic", "R_n = 2 alpha_n"))
        out.append(_report(IdentityId.S23, n, T, relative_residual([r[n]], [2 * b, -n]), ctx, "algebraic", "r_n = 2 beta_n - n"))
        out.append(_report(
            IdentityId.S12, n, T, relative_residual([r[n + 1], r[n]], [t * R[n], -a * R[n]]), ctx, "algebraic",
            "r_{n+1} + r_n = (t - alpha_n) R_n",
        ))
        out.append(_report(
            IdentityId.S21, n, T, relative_residual([r[n] ** 2], [b * R[n] * R[n - 1]]), ctx, "algebraic",
            "r_n^2 = beta_n R_n R_{n-1}",
        ))
        out.append(_report(
            IdentityId.S22, n, T,
            relative_residual([2 * t * r[n], -2 * b * R[n], -2 * b * R[n - 1], sumR], [0]),
            ctx, "algebraic", "residue form with beta_n and R_{n-1}",
        ))
        out.append(_guarded(
            IdentityId.S22, n, T, ctx, "algebraic", "sum rule 2t r_n - (n + r_n) R_n - 2 r_n^2/R_n + sum R_j = 0",
            lambda: relative_residual(
                [2 * t * r[n], -n * R[n], -r[n] * R[n], -2 * _ratio_sq(r[n], R[n]), sumR], [0]
            ),
        ))
        out.append(_report(
            IdentityId.S121, n, T, relative_residual([r[n + 1], r[n]], [t * R[n], -R[n] ** 2 / 2]), ctx, "algebraic",
            "r_{n+1} + r_n = (t - R_n/2) R_n",
        ))
        out.append(_report(
            IdentityId.S211, n, T,
            relative_residual([r[n] ** 2], [n * R[n] * R[n - 1] / 2, r[n] * R[n] * R[n - 1] / 2]),
            ctx, "algebraic", "r_n^2 = (n + r_n) R_n R_{n-1} / 2",
        ))
    return out


def check_difference(aux: AuxSingle, n: int, ctx: PrecisionContext | None = None) -> list[IdentityReport]:
    """Second-order difference equations for ``r_n``, ``R_n`` and the discrete sigma form."""
    _need_range(aux, n)
    ctx = ctx or PrecisionContext.for_nmax(aux.n_max)
    out = []
    with mp.workprec(aux.work_bits):
        t = aux.t1
        t2 = t * t
        T = (t,)
        rm, r, rp = aux.r[n - 1], aux.r[n], aux.r[n + 1]
        N = n + r
        N2 = N * N
        inner = [
            N2 * rm * rp, N2 * r * rp, -N2 * t2 * rp, N2 * r * rm,
            2 * n * r**3, -n * t2 * r**2, n * n * r**2, -n * n * t2 * r,
        ]
        W2 = (n * r + N * rp) ** 2
        rhs = [t2 * N2 * t2 * W2, -2 * t2 * N2 * rm * W2, -2 * t2 * N2 * r * W2]
        out.append(_report(IdentityId.DIFF_R, n, T, squared_relative_residual(inner, rhs), ctx, "algebraic",
                           "second-order difference equation for r_n"))

        Rm, R, Rp = aux.R[n - 1], aux.R[n], aux.R[n + 1]
        inner = [
            2 * R * R * Rp, -4 * t * R * Rp, Rm * R * Rp, -4 * (n + 1) * Rp,
            2 * R * R * Rm, -4 * t * R * Rm, -4 * n * Rm, 2 * R * (R - 2 * t) ** 2,
        ]
        rhs = [Rm * Rp * (Rm * R + 8 * n) * (R * Rp + 8 * n + 8)]
        out.append(_report(IdentityId.DIFF_RCAP, n, T, squared_relative_residual(inner, rhs), ctx, "algebraic",
                           "second-order difference equation for R_n"))

        sm, s, sp = aux.sigma[n - 1], aux.sigma[n], aux.sigma[n + 1]
        inner = [s, n * sm, -n * sp]
        rhs = [(s - sp) * (sm - s) * (s + 2 * n * t) * (sp - sm + 2 * t)]
        out.append(_report(IdentityId.DISCRETE_SIGMA, n, T, squared_relative_residual(inner, rhs, factor=2), ctx,
                           "algebraic", "discrete sigma form"))
    return out


# ---------------------------------------------------------------------------
# differential identities, one jump


def _single_derivs(sys: OrthoSystem, aux: AuxSingle, n: int) -> dict:
    """Finite-difference derivatives of the degree-``n`` quantities (shared stencil)."""
    t = aux.t1
    d = {
        "dR": _fd(sys, 1, t, lambda s, a: a.R[n]),
        "d2R": _fd(sys, 1, t, lambda s, a: a.R[n], order=2),
        "dr": _fd(sys, 1, t, lambda s, a: a.r[n]),
        "d2r": _fd(sys, 1, t, lambda s, a: a.r[n], order=2),
        "dalpha": _fd(sys, 1, t, lambda s, a: s.alpha[n]),
        "dbeta": _fd(sys, 1, t, lambda s, a: s.beta[n]),
        "dlogh": _fd(sys, 1, t, lambda s, a: mp.log(s.h[n])),
        "dsigma_fd": _fd(sys, 1, t, lambda s, a: a.sigma[n]),
        # sigma'' as the derivative of the exact sigma' = 2 r_n
        "d2sigma": _fd(sys, 1, t, lambda s, a: 2 * a.r[n]),
    }
    return d


def check_riccati_toda(aux: AuxSingle, sys: OrthoSystem, n: int, ctx: PrecisionContext | None = None,
                       derivs: dict | None = None) -> list[IdentityReport]:
    """Coupled Riccati equations, Toda equations, and FD-versus-exact derivative reconciliation."""
    _need_range(aux, n)
    ctx = ctx or sys.ctx
    d = derivs or _single_derivs(sys, aux, n)
    ex = exact_t_derivatives(sys, aux)
    out = []
    with mp.workprec(sys.work_bits):
        t = aux.t1
        T = (t,)
        R, r = aux.R[n], aux.r[n]
        a, am, b, bp = sys.alpha[n], sys.alpha[n - 1], sys.beta[n], sys.beta[n + 1]
        out.append(_guarded(
            IdentityId.RICCATI_R, n, T, ctx, "fd1", "r_n' = 2 r_n^2/R_n - (n + r_n) R_n",
            lambda: relative_residual([d["dr"]], [2 * _ratio_sq(r, R), -n * R, -r * R]),
        ))
        out.append(_report(IdentityId.RICCATI_RCAP, n, T, relative_residual([d["dR"]], [R * R, -2 * t * R, 4 * r]),
                           ctx, "fd1", "R_n' = R_n^2 - 2t R_n + 4 r_n"))
        out.append(_report(IdentityId.TODA1, n, T, relative_residual([d["dbeta"]], [2 * b * am, -2 * b * a]),
                           ctx, "fd1", "beta_n' = 2 beta_n (alpha_{n-1} - alpha_n)"))
        out.append(_report(IdentityId.TODA2, n, T, relative_residual([d["dalpha"]], [2 * b, -2 * bp, 1]),
                           ctx, "fd1", "alpha_n' = 2 (beta_n - beta_{n+1}) + 1"))
        # finite differences against the closed-form derivatives
        out.append(_report(IdentityId.TODA1, n, T, relative_residual([d["dbeta"]], [ex.dbeta[n]]),
                           ctx, "fd1", "beta_n' FD vs beta_n (R_{n-1} - R_n)"))
        out.append(_report(IdentityId.TODA1, n, T, relative_residual([d["dlogh"]], [ex.dlogh[n]]),
                           ctx, "fd1", "(ln h_n)' FD vs -R_n"))
        out.append(_report(IdentityId.TODA2, n, T, relative_residual([d["dalpha"]], [ex.dalpha[n]]),
                           ctx, "fd1", "alpha_n' FD vs r_n - r_{n+1}"))
        out.append(_report(IdentityId.RICCATI_RCAP, n, T, relative_residual([d["dR"]], [ex.dR[n]]),
                           ctx, "fd1", "R_n' FD vs 2 (r_n - r_{n+1})"))
        out.append(_report(IdentityId.RICCATI_R, n, T, relative_residual([d["dr"]], [2 * ex.dbeta[n]]),
                           ctx, "fd1", "r_n' FD vs 2 beta_n'"))
    return out


def _jmo_residual(t, sigma, ds, d2s, nus) -> mp.mpf:
    nu0, nu1, nu2 = nus
    return squared_relative_residual(
        [d2s], [4 * (t * ds - sigma) ** 2, -4 * (ds + nu0) * (ds + nu1) * (ds + nu2)]
    )


def check_ode(aux: AuxSingle, sys: OrthoSystem, n: int, ctx: PrecisionContext | None = None,
              derivs: dict | None = None) -> list[IdentityReport]:
    """Second-order ODEs for ``R_n``, ``r_n``, ``sigma_n`` and their Painleve/Chazy forms."""
    _need_range(aux, n)
    ctx = ctx or sys.ctx
    d = derivs or _single_derivs(sys, aux, n)
    with mp.workprec(sys.work_bits):
        B1 = sys.spec.values()[1]
    ids = IdentitySpec(n, aux.t1, 1 if B1 >= 0 else -1)
    out = []
    with mp.workprec(sys.work_bits):
        t = aux.t1
        T = (t,)
        R, r, sigma = aux.R[n], aux.r[n], aux.sigma[n]
        dR, d2R, dr, d2r = d["dR"], d["d2R"], d["dr"], d["d2r"]
        out.append(_guarded(
            IdentityId.PIV_ODE, n, T, ctx, "fd1", "second-order ODE for R_n",
            lambda: relative_residual(
                [d2R], [_ratio_sq(dR, 2 * R), 3 * R**3 / 2, -4 * t * R**2, 2 * t * t * R, -(4 * n + 2) * R]
            ),
        ))
        # y(tau) = R_n(-tau) evaluated at tau = -t
        tau = -t
        y, dy, d2y = R, -dR, d2R
        a1, b1 = ids.piv_params

        def piv():
            terms = [_ratio_sq(dy, 2 * y), 3 * y**3 / 2, 4 * tau * y**2, 2 * tau * tau * y, -2 * a1 * y]
            if b1:
                if y == 0:
                    raise _Degenerate("y = 0 with beta_1 != 0")
                terms.append(b1 / y)
            return relative_residual([d2y], terms)

        out.append(_guarded(IdentityId.PIV_ODE, n, (tau,), ctx, "fd1", "Painleve IV for y(t) = R_n(-t)", piv))

        inner = [d2r, 12 * r * r, 8 * n * r]
        rhs = [4 * t * t * dr * dr, 32 * t * t * r**3, 32 * n * t * t * r * r]
        out.append(_report(IdentityId.CHAZY, n, T, squared_relative_residual(inner, rhs), ctx, "fd1",
                           "second-order ODE for r_n (squared form)"))
        a2, b2 = ids.chazy_params
        v = -2 * r - mp.mpf(2 * n) / 3
        dv, d2v = -2 * dr, -2 * d2r
        inner = [d2v, -6 * v * v, -a2]
        rhs = [4 * t * t * dv * dv, -16 * t * t * v**3, -8 * t * t * a2 * v, -4 * t * t * b2]
        out.append(_report(IdentityId.CHAZY, n, T, squared_relative_residual(inner, rhs), ctx, "fd1",
                           "Chazy II for v = -2 r_n - 2n/3"))

        ds = 2 * r
        out.append(_report(IdentityId.SIGMA_FORM, n, T, _jmo_residual(t, sigma, ds, d["d2sigma"], ids.sigma_params),
                           ctx, "fd1", "sigma form P_IV(0, 0, 2n)"))
    return out


def check_conclusion_relations(aux: AuxSingle, sys: OrthoSystem, n: int, ctx: PrecisionContext | None = None,
                               derivs: dict | None = None) -> list[IdentityReport]:
    """``sigma_n = (ln D_n)'``, ``r_n = sigma_n'/2`` and ``R_n`` recovered from ``sigma_n, sigma_n', sigma_n''``.

    All derivatives here are finite differences of rebuilt systems.
    """
    if not 1 <= n <= aux.n_max:
        raise ValueError(f"n = {n} outside 1..{aux.n_max}")
    ctx = ctx or sys.ctx
    t = aux.t1
    dlogD = _fd(sys, 1, t, lambda s, a: s.logD[n])
    ds = derivs["dsigma_fd"] if derivs else _fd(sys, 1, t, lambda s, a: a.sigma[n])
    d2s = _fd(sys, 1, t, lambda s, a: a.sigma[n], order=2)
    out = []
    with mp.workprec(sys.work_bits):
        T = (t,)
        sigma, r, R = aux.sigma[n], aux.r[n], aux.R[n]
        out.append(_report(IdentityId.CONCLUSION_RELATIONS, n, T, relative_residual([dlogD], [sigma]), ctx, "fd1",
                           "sigma_n = d/dt ln D_n"))
        out.append(_report(IdentityId.CONCLUSION_RELATIONS, n, T, relative_residual([r], [ds / 2]), ctx, "fd1",
                           "r_n = sigma_n'/2"))
        den = 4 * n + 2 * ds
        label = "R_n = (2t sigma' - 2 sigma - sigma'')/(4n + 2 sigma')"
        if abs(den) <= ctx.tol_for(1) * 4 * n:
            out.append(_skipped(IdentityId.CONCLUSION_RELATIONS, n, T, ctx, "fd1", label, "4n + 2 sigma_n' vanishes"))
        else:
            out.append(_report(IdentityId.CONCLUSION_RELATIONS, n, T,
                               relative_residual([4 * n * R, 2 * ds * R], [2 * t * ds, -2 * sigma, -d2s]),
                               ctx, "fd1", label))
    return out


# ---------------------------------------------------------------------------
# exact ODE for P_n and its large-n limits


def _ode_terms(z, P, dP, d2P, n, t, R, dR):
    """Summands of the exact second-order ODE for ``P_n`` written with ``R_n, R_n'``."""
    zt = z - t
    E = 2 * zt + R
    K = dR - R * R + 2 * t * R
    return [
        d2P,
        dP * R / (zt * E),
        -2 * z * dP,
        2 * n * P,
        -P * K / (4 * zt * zt),
        P * R * K / (4 * zt * zt * E),
        P * (dR * dR - R**4 + 4 * t * R**3 + (8 * n - 4 * t * t) * R * R) / (8 * zt * R),
    ]


def _ode_terms_r(z, P, dP, d2P, n, t, R, r):
    zt = z - t
    E = 2 * zt + R
    return [
        d2P,
        dP * R / (zt * E),
        -2 * z * dP,
        2 * n * P,
        -P * r / (zt * zt),
        P * r * R / (zt * zt * E),
        P * (2 * r * r + (n + r) * R * R - 2 * t * r * R) / (zt * R),
    ]


def check_exact_ode(aux: AuxSingle, sys: OrthoSystem, n: int, z) -> list[IdentityReport]:
    """Exact finite-``n`` ODE for ``P_n(z)`` (both the ``r_n`` and the ``R_n, R_n'`` forms).

    ``P_n, P_n', P_n''`` come from the differentiated recurrence and
    ``R_n' = 2 (r_n - r_{n+1})`` is exact, so the residual is algebraic.
    """
    _need_range(aux, n)
    ctx = sys.ctx
    out = []
    with mp.workprec(sys.work_bits):
        z = mp.mpf(z) if not isinstance(z, mp.mpf) else +z
        t = aux.t1
        R, r = aux.R[n], aux.r[n]
        dR = exact_t_derivatives(sys, aux).dR[n]
        P, dP, d2P = poly_derivatives(sys, n, z)
        T = (t, z)
        if R == 0 or z == t:
            reason = "R_n = 0" if R == 0 else "z coincides with the jump"
            out.append(_skipped(IdentityId.BHE_LIMIT, n, T, ctx, "algebraic", "exact ODE for P_n (R_n form)", reason))
            out.append(_skipped(IdentityId.BHE_LIMIT, n, T, ctx, "algebraic", "exact ODE for P_n (r_n form)", reason))
            return out
        out.append(_report(IdentityId.BHE_LIMIT, n, T, relative_residual(_ode_terms(z, P, dP, d2P, n, t, R, dR), [0]),
                           ctx, "algebraic", "exact ODE for P_n (R_n form)"))
        out.append(_report(IdentityId.BHE_LIMIT, n, T, relative_residual(_ode_terms_r(z, P, dP, d2P, n, t, R, r), [0]),
                           ctx, "algebraic", "exact ODE for P_n (r_n form)"))
    return out


def _limit_report(ident, ns, t, residuals, ctx, label) -> IdentityReport:
    ratio = residuals[-1] / residuals[0] if residuals[0] else mp.mpf(0)
    decreasing = all(b < a for a, b in zip(residuals, residuals[1:]))
    # an equation that already holds at every n (no jump) passes trivially
    exact = all(v <= ctx.tol for v in residuals)
    status = PASS if exact or (decreasing and ratio < 1) else FAIL
    return IdentityReport(ident, tuple(ns), tuple(t), ratio, mp.mpf(1), "limit", status, label,
                          "residuals " + ", ".join(mp.nstr(v, 4) for v in residuals))


def bhe_residual(spec: WeightSpec, n: int, u, ctx: PrecisionContext, sys: OrthoSystem | None = None) -> mp.mpf:
    """Relative residual of the biconfluent Heun equation for ``P_n(u/sqrt2 + t1)``."""
    sys = sys or build_system(spec, n + 1, ctx, "ladder")
    with mp.workprec(sys.work_bits):
        _, B1, _, t1, _ = spec.values()
        u = mp.mpf(u)
        gamma, delta, alpha, q = IdentitySpec(n, t1, 1 if B1 > 0 else -1).bhe_params
        z = u / mp.sqrt(2) + t1
        P, dP, d2P = poly_derivatives(sys, n, z)
        Ph, dPh, d2Ph = P, dP / mp.sqrt(2), d2P / 2
        terms = [d2Ph, -gamma * dPh / u, -delta * dPh, -u * dPh, alpha * Ph, -q * Ph / u]
        return relative_residual(terms, [0])


def check_bhe_limit(spec: WeightSpec, ns: Sequence[int], u, ctx: PrecisionContext | None = None) -> IdentityReport:
    """The BHE residual at fixed ``u`` must decrease along ``ns``."""
    ctx = ctx or PrecisionContext(256)
    res = [bhe_residual(spec, n, u, ctx) for n in ns]
    with mp.workprec(64):
        t1 = spec.values()[3]
    return _limit_report(IdentityId.BHE_LIMIT, ns, (t1, mp.mpf(u)), res, ctx, "biconfluent Heun limit")


def edge_point(n: int, s) -> mp.mpf:
    """``sqrt(2n) + s / (sqrt2 n^(1/6))``."""
    n = mp.mpf(n)
    return mp.sqrt(2 * n) + mp.mpf(s) / (mp.sqrt(2) * mp.cbrt(mp.sqrt(n)))


def hermite_residual(spec: WeightSpec, n: int, s, z, ctx: PrecisionContext) -> mp.mpf:
    """Relative residual of Hermite's equation for ``P_n`` with the jump at the scaled edge point."""
    with mp.workprec(ctx.bits + 64):
        moved = spec.at(t1=edge_point(n, s))
    sys = build_system(moved, n + 1, ctx, "ladder")
    with mp.workprec(sys.work_bits):
        z = mp.mpf(z)
        P, dP, d2P = poly_derivatives(sys, n, z)
        return relative_residual([d2P, -2 * z * dP, 2 * n * P], [0])


def check_hermite_limit(spec: WeightSpec, ns: Sequence[int], s, z, ctx: PrecisionContext | None = None) -> IdentityReport:
    ctx = ctx or PrecisionContext(256)
    res = [hermite_residual(spec, n, s, z, ctx) for n in ns]
    return _limit_report(IdentityId.HERMITE_LIMIT, ns, (mp.mpf(s), mp.mpf(z)), res, ctx,
                         "Hermite equation under double scaling")


def hard_edge(spec: WeightSpec) -> WeightSpec:
    """Weight vanishing on one side of ``t1`` with the sign of ``B1`` kept.

    The biconfluent Heun limit needs ``R_n ~ sqrt(n)``, which only happens
    when the weight has a hard edge at the jump.
    """
    with mp.workprec(64):
        B1 = spec.values()[1]
    return WeightSpec(0, 1, 0, spec.t1) if B1 >= 0 else WeightSpec(1, -1, 0, spec.t1)


def check_limits(spec: WeightSpec, ns: Sequence[int] = (64, 256, 1024), *, u="0.7", z="0.7",
                 s=-2, exact_n: int = 10, exact_z: Iterable = ("0.3", "0.7", "1.5"),
                 ctx: PrecisionContext | None = None) -> list[IdentityReport]:
    """Exact ODE at finite ``n`` plus the BHE and Hermite limit properties.

    The exact ODE and the Hermite limit use ``spec`` (a single-jump weight);
    the BHE limit uses :func:`hard_edge` of it.
    """
    ctx = ctx or PrecisionContext(256)
    sys, aux = cached_aux(spec, exact_n + 2, PrecisionContext.for_nmax(exact_n + 2))
    out = []
    for zz in exact_z:
        out.extend(check_exact_ode(aux, sys, exact_n, mp.mpf(zz)))
    if spec.pure_gaussian:
        out.append(IdentityReport(IdentityId.BHE_LIMIT, tuple(ns), (mp.mpf(u),), None, mp.mpf(1), "limit", SKIPPED,
                                  "biconfluent Heun limit", "no jump: the Heun parameters are undefined"))
    else:
        out.append(check_bhe_limit(hard_edge(spec), ns, u, ctx))
    out.append(check_hermite_limit(spec, ns, s, z, ctx))
    return out


# ---------------------------------------------------------------------------
# two jumps


def _two_jump_derivs(sys: OrthoSystem, aux: AuxDouble, n: int) -> dict:
    t1, t2 = aux.t1, aux.t2
    d = {}
    for axis, t in ((1, t1), (2, t2)):
        d[f"dbeta{axis}"] = _fd(sys, axis, t, lambda s, a: s.beta[n], force_double=True)
        d[f"dalpha{axis}"] = _fd(sys, axis, t, lambda s, a: s.alpha[n], force_double=True)
        d[f"dlogh{axis}"] = _fd(sys, axis, t, lambda s, a: mp.log(s.h[n]), force_double=True)
        # second partials of sigma as derivatives of the exact first partials 2 r_{n,i}
        d[f"s1{axis}"] = _fd(sys, axis, t, lambda s, a: 2 * a.r1[n], force_double=True)
        d[f"s2{axis}"] = _fd(sys, axis, t, lambda s, a: 2 * a.r2[n], force_double=True)
    return d


def _is_symmetric(spec: WeightSpec) -> bool:
    with mp.workprec(256):
        A, B1, B2, t1, t2 = spec.values()
        return B2 != 0 and B1 == -B2 and t1 == -t2


def check_two_jump(aux2: AuxDouble, sys: OrthoSystem, n: int, ctx: PrecisionContext | None = None) -> list[IdentityReport]:
    """Two-jump string identities, two-variable Toda equations and the quartic PDE for ``sigma_n``.

    With ``B2 = 0`` every formula degenerates to its one-jump counterpart
    with the same summands (plus exact zeros), so the residuals coincide bit
    for bit with :func:`check_string_single`, :func:`check_riccati_toda` and
    the sigma-form check of :func:`check_ode`.
    """
    if not isinstance(aux2, AuxDouble):
        raise TypeError("check_two_jump needs the two-jump layout (aux_from_definitions(..., force_double=True))")
    _need_range(aux2, n)
    ctx = ctx or sys.ctx
    d = _two_jump_derivs(sys, aux2, n)
    single = sys.spec.single_jump
    out = []
    S, TD, PDE = IdentityId.TJ_STRING, IdentityId.TJ_TODA, IdentityId.TJ_PDE
    with mp.workprec(sys.work_bits):
        t1, t2 = aux2.t1, aux2.t2
        T = (t1, t2)
        R1, R2, r1, r2 = aux2.R1, aux2.R2, aux2.r1, aux2.r2
        a, am, b, bp = sys.alpha[n], sys.alpha[n - 1], sys.beta[n], sys.beta[n + 1]
        sigma = aux2.sigma[n]
        sum1, sum2 = mp.fsum(R1[:n]), mp.fsum(R2[:n])

        out.append(_report(S, n, T, relative_residual([R1[n], R2[n]], [2 * a]), ctx, "algebraic",
                           "R_{n,1} + R_{n,2} = 2 alpha_n"))
        out.append(_report(S, n, T, relative_residual([r1[n], r2[n]], [2 * b, -n]), ctx, "algebraic",
                           "beta_n = (n + r_{n,1} + r_{n,2})/2"))
        out.append(_report(S, n, T, relative_residual([r1[n] ** 2], [b * R1[n] * R1[n - 1]]), ctx, "algebraic",
                           "r_{n,1}^2 = beta_n R_{n,1} R_{n-1,1}"))
        out.append(_report(S, n, T, relative_residual([r2[n] ** 2], [b * R2[n] * R2[n - 1]]), ctx, "algebraic",
                           "r_{n,2}^2 = beta_n R_{n,2} R_{n-1,2}"))
        out.append(_report(S, n, T, relative_residual([r1[n + 1], r1[n]], [t1 * R1[n], -a * R1[n]]), ctx,
                           "algebraic", "r_{n+1,1} + r_{n,1} = (t1 - alpha_n) R_{n,1}"))
        out.append(_report(S, n, T, relative_residual([r2[n + 1], r2[n]], [t2 * R2[n], -a * R2[n]]), ctx,
                           "algebraic", "r_{n+1,2} + r_{n,2} = (t2 - alpha_n) R_{n,2}"))
        if not single:
            d12 = t1 - t2
            cross = b * (R1[n] * R2[n - 1] + R2[n] * R1[n - 1])
            out.append(_report(
                S, n, T,
                relative_residual([2 * r1[n] * r2[n] / d12, 2 * t1 * r1[n], sum1],
                                  [cross / d12, 2 * b * R1[n], 2 * b * R1[n - 1]]),
                ctx, "algebraic", "residue at t1",
            ))
            out.append(_report(
                S, n, T,
                relative_residual([2 * r1[n] * r2[n] / -d12, 2 * t2 * r2[n], sum2],
                                  [cross / -d12, 2 * b * R2[n], 2 * b * R2[n - 1]]),
                ctx, "algebraic", "residue at t2",
            ))
        out.append(_report(
            S, n, T,
            relative_residual([2 * t1 * r1[n], 2 * t2 * r2[n], sum1, sum2],
                              [2 * b * R1[n], 2 * b * R2[n], 2 * b * R1[n - 1], 2 * b * R2[n - 1]]),
            ctx, "algebraic", "sum of the two residue relations",
        ))
        if _is_symmetric(sys.spec):
            scale = max([abs(v) for v in R1[:n] + R2[:n]] + [mp.mpf(0)])
            res = abs(sigma) / scale if scale else abs(sigma)
            out.append(_report(S, n, T, res, ctx, "algebraic", "even weight: sigma_n = 0"))
            out.append(_report(S, n, T, relative_residual([R1[n], R2[n]], [0]) if (R1[n] or R2[n]) else mp.mpf(0),
                               ctx, "algebraic", "even weight: R_{n,1} + R_{n,2} = 0"))

        db1, db2, da1, da2 = d["dbeta1"], d["dbeta2"], d["dalpha1"], d["dalpha2"]
        out.append(_report(TD, n, T, relative_residual([db1, db2], [2 * b * am, -2 * b * a]), ctx, "fd1",
                           "d1 beta_n + d2 beta_n = 2 beta_n (alpha_{n-1} - alpha_n)"))
        out.append(_report(TD, n, T, relative_residual([da1, da2], [2 * b, -2 * bp, 1]), ctx, "fd1",
                           "d1 alpha_n + d2 alpha_n = 2 (beta_n - beta_{n+1}) + 1"))
        out.append(_guarded(TD, n, T, ctx, "fd1", "d1 beta_n = r_{n,1}^2/R_{n,1} - beta_n R_{n,1}",
                            lambda: relative_residual([db1], [_ratio_sq(r1[n], R1[n]), -b * R1[n]])))
        out.append(_report(TD, n, T, relative_residual([d["dlogh1"]], [-R1[n]]), ctx, "fd1",
                           "d1 ln h_n = -R_{n,1}"))
        if not single:
            out.append(_guarded(TD, n, T, ctx, "fd1", "d2 beta_n = r_{n,2}^2/R_{n,2} - beta_n R_{n,2}",
                                lambda: relative_residual([db2], [_ratio_sq(r2[n], R2[n]), -b * R2[n]])))
            out.append(_report(TD, n, T, relative_residual([d["dlogh2"]], [-R2[n]]), ctx, "fd1",
                               "d2 ln h_n = -R_{n,2}"))
        out.append(_report(
            TD, n, T,
            relative_residual([2 * t1 * r1[n], 2 * t2 * r2[n], -sigma],
                              [4 * b * R1[n], 4 * b * R2[n], 2 * db1, 2 * db2]),
            ctx, "fd1", "sum rule with d1 beta_n + d2 beta_n",
        ))

        s1, s2 = 2 * r1[n], 2 * r2[n]
        s11, s12, s21, s22 = d["s11"], d["s12"], d["s21"], d["s22"]
        if single:
            ids = IdentitySpec(n, t1, 1)
            out.append(_report(PDE, n, T, _jmo_residual(t1, sigma, s1, s11, ids.sigma_params), ctx, "fd1",
                               "B2 = 0 reduction to the sigma form"))
            return out
        Ssum = 2 * n + s1 + s2
        out.append(_guarded(PDE, n, T, ctx, "fd1", "d1^2 sigma + d1 d2 sigma from R_{n,1}",
                            lambda: relative_residual([s11, s12], [_ratio_sq(s1, R1[n]), -Ssum * R1[n]])))
        out.append(_guarded(PDE, n, T, ctx, "fd1", "d2^2 sigma + d2 d1 sigma from R_{n,2}",
                            lambda: relative_residual([s22, s21], [_ratio_sq(s2, R2[n]), -Ssum * R2[n]])))
        out.append(_report(PDE, n, T, relative_residual([s12], [s21]), ctx, "fd1", "mixed partials commute"))
        A1, A2 = s11 + s12, s22 + s21
        D1 = A1 * A1 + 4 * s1 * s1 * Ssum
        D2 = A2 * A2 + 4 * s2 * s2 * Ssum
        inner = [(2 * t1 * s1 + 2 * t2 * s2 - 2 * sigma) ** 2, -A1 * A1, -A2 * A2, -4 * s1 * s1 * Ssum,
                 -4 * s2 * s2 * Ssum]
        out.append(_report(PDE, n, T, squared_relative_residual(inner, [4 * D1 * D2]), ctx, "fd2",
                           "quartic second-order PDE for sigma_n(t1, t2)"))
    return out


def scaled_pde_residual(spec: WeightSpec, n: int, s1, s2, ctx: PrecisionContext, corrected: bool = False) -> mp.mpf:
    """Relative residual of the limiting PDE in ``(s1, s2)`` for one ``n`` (ladder engine).

    With ``corrected`` the equation is multiplied by ``d1 sigma + d2 sigma``
    and the ``n^(-1/6)`` term ``2 sqrt2 n^(-1/6) d1 sigma d2 sigma (d1 sigma + d2 sigma)^3``
    is kept, leaving an ``O(n^(-2/3))`` remainder.
    """
    with mp.workprec(ctx.bits + 64):
        t1, t2 = edge_point(n, s1), edge_point(n, s2)
        moved = spec.at(t1=t1, t2=t2)
    n_max = n + 1

    def getter_factory(which):
        def g(tau, axis):
            sp = moved.at(t1=tau) if axis == 1 else moved.at(t2=tau)
            sys, aux = cached_aux(sp, n_max, ctx, "ladder", True)
            with mp.workprec(sys.work_bits):
                return 2 * (aux.r1 if which == 1 else aux.r2)[n]
        return g

    g1, g2 = getter_factory(1), getter_factory(2)
    s11 = fd_derivative(lambda x: g1(x, 1), t1, 1, ctx)
    s12 = fd_derivative(lambda x: g1(x, 2), t2, 1, ctx)
    s22 = fd_derivative(lambda x: g2(x, 2), t2, 1, ctx)
    s21 = fd_derivative(lambda x: g2(x, 1), t1, 1, ctx)
    sys, aux = cached_aux(moved, n_max, ctx, "ladder", True)
    with mp.workprec(sys.work_bits):
        c = 1 / (mp.sqrt(2) * mp.cbrt(mp.sqrt(mp.mpf(n))))  # dt/ds
        sg = aux.sigma[n]
        p1, p2 = 2 * aux.r1[n] * c, 2 * aux.r2[n] * c
        q11, q12, q21, q22 = (v * c * c for v in (s11, s12, s21, s22))
        s1, s2 = mp.mpf(s1), mp.mpf(s2)
        lhs = [p1 * (q22 + q21) ** 2, p2 * (q11 + q12) ** 2]
        rhs = [4 * p1 * p2 * s1 * p1, 4 * p1 * p2 * s2 * p2, -4 * p1 * p2 * sg]
        if not corrected:
            return relative_residual(lhs, rhs)
        ps = p1 + p2
        extra = 2 * mp.sqrt(2) / mp.root(mp.mpf(n), 6) * p1 * p2 * ps**3
        return relative_residual([ps * v for v in lhs] + [extra], [ps * v for v in rhs])


def check_scaled_pde(spec: WeightSpec, ns: Sequence[int], s1, s2, ctx: PrecisionContext | None = None) -> IdentityReport:
    """The double-scaled two-jump PDE holds only as ``n -> infinity``: its residual must decrease."""
    ctx = ctx or PrecisionContext(256)
    res = [scaled_pde_residual(spec, n, s1, s2, ctx) for n in ns]
    return _limit_report(IdentityId.TJ_PDE_SCALED, ns, (mp.mpf(s1), mp.mpf(s2)), res, ctx,
                         "double-scaled two-jump PDE")


# ---------------------------------------------------------------------------
# suites


def single_jump_reports(spec: WeightSpec, n: int, ctx: PrecisionContext | None = None) -> list[IdentityReport]:
    """All one-jump identities at degree ``n`` for the jump location stored in ``spec``."""
    ctx = ctx or PrecisionContext.for_nmax(n + 2)
    sys, aux = cached_aux(spec, n + 2, ctx)
    d = _single_derivs(sys, aux, n)
    out = check_string_single(aux, sys, n)
    out += check_difference(aux, n, ctx)
    out += check_riccati_toda(aux, sys, n, ctx, d)
    out += check_ode(aux, sys, n, ctx, d)
    out += check_conclusion_relations(aux, sys, n, ctx, d)
    return out


def two_jump_reports(spec: WeightSpec, n: int, ctx: PrecisionContext | None = None) -> list[IdentityReport]:
    ctx = ctx or PrecisionContext.for_nmax(n + 2)
    sys, aux2 = cached_aux(spec, n + 2, ctx, "cholesky", True)
    return check_two_jump(aux2, sys, n, ctx)


def run_suite(spec: WeightSpec, n_values: Iterable[int], t_values: Iterable | None = None,
              ctx: PrecisionContext | None = None, *, include_limits: bool = True,
              limit_ns: Sequence[int] = (64, 256, 1024),
              scaled_ns: Sequence[int] = (16, 64, 256)) -> list[IdentityReport]:
    """Every identity tag for ``spec`` over the given degrees and jump locations.

    ``t_values`` are locations of the first jump (single-jump weights) or
    ``(t1, t2)`` pairs; by default the locations stored in ``spec``.  For a
    two-jump weight the one-jump identities are evaluated on the weight with
    the second jump removed, and for a one-jump weight the two-jump checks
    run in their ``B2 = 0`` reduced form.
    """
    n_values = list(n_values)
    if t_values is None:
        t_values = [(spec.t1, spec.t2)]
    points = [tv if isinstance(tv, tuple) else (tv, spec.t2) for tv in t_values]
    out: list[IdentityReport] = []
    for t1, t2 in points:
        here = spec.at(t1=t1, t2=t2)
        one = here if here.single_jump else WeightSpec(here.A, here.B1, 0, here.t1)
        for n in n_values:
            c = ctx or PrecisionContext.for_nmax(n + 2)
            out += single_jump_reports(one, n, c)
            out += two_jump_reports(here, n, c)
    if include_limits:
        first = spec.at(t1=points[0][0], t2=points[0][1])
        one = first if first.single_jump else WeightSpec(first.A, first.B1, 0, first.t1)
        out += check_limits(one, limit_ns)
        # with B2 = 0 both sides of the scaled PDE vanish identically
        out.append(check_scaled_pde(first, scaled_ns, -1, 1))
    return out


def summarize(reports: Sequence[IdentityReport]) -> dict:
    evaluated = [r for r in reports if r.status != SKIPPED]
    failed = [r for r in evaluated if not r.passed]
    tags = sorted({r.id.value for r in reports})
    missing = sorted(t.value for t in IdentityId if t.value not in tags)
    line = f"PASS {len(evaluated)}/{len(evaluated)}" if not failed else f"FAIL {len(failed)}/{len(evaluated)}"
    return {
        "line": line,
        "evaluated": len(evaluated),
        "failed": len(failed),
        "skipped": len(reports) - len(evaluated),
        "tags_covered": tags,
        "tags_missing": missing,
        "failures": [f"{r.id.value} n={r.n} {r.label}" for r in failed],
    }
