"""Numerical comparison of ``R_n, r_n, sigma_n`` with the large-``n`` expansions."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import mpmath as mp
import numpy as np

from ..ladder import aux_from_definitions
from ..moments import WeightSpec
from ..numerics import PrecisionContext
from ..ortho import build_system
from .series import derive_large_n_series, derive_scaling_series

__all__ = [
    "ComparisonRecord",
    "NumericComparison",
    "ScalingValues",
    "double_scaling_checks",
    "edge_location",
    "fit_exponent",
    "numeric_double_scaling",
    "numeric_large_n_fixed_t",
    "r_expansion",
    "sigma_expansion",
    "scaling_values",
]

MIN_ABS_S = 5


@dataclass(frozen=True)
class ComparisonRecord:
    """Exact value of ``quantity`` at degree ``n`` against successive truncations."""

    n: int
    quantity: str
    exact: mp.mpf
    approx: tuple
    errors: tuple

    def to_record(self, digits: int = 20) -> dict:
        f = lambda v: mp.nstr(v, digits, strip_zeros=False, min_fixed=0, max_fixed=0)
        return {
            "n": self.n,
            "quantity": self.quantity,
            "exact": f(self.exact),
            "approx": [f(v) for v in self.approx],
            "errors": [f(v) for v in self.errors],
        }


@dataclass(frozen=True)
class NumericComparison:
    """Records per ``(n, quantity)`` and the fitted decay exponent of each error column."""

    point: mp.mpf
    records: tuple
    exponents: dict = field(default_factory=dict)

    def series(self, quantity: str, level: int = -1) -> list:
        return [r.errors[level] for r in self.records if r.quantity == quantity]

    def approximations(self, quantity: str, level: int = -1) -> list:
        return [r.approx[level] for r in self.records if r.quantity == quantity]

    def exact(self, quantity: str) -> list:
        return [r.exact for r in self.records if r.quantity == quantity]


def fit_exponent(ns: Sequence[int], errs: Sequence) -> float:
    """Least-squares slope of ``log err`` against ``log n``."""
    if len(ns) < 2:
        return float("nan")
    x = np.log(np.asarray(ns, dtype=float))
    y = np.array([float(mp.log(abs(e))) if e else -np.inf for e in errs])
    if not np.all(np.isfinite(y)):
        return float("nan")
    return float(np.polyfit(x, y, 1)[0])


def _sign(spec: WeightSpec) -> int:
    with mp.workprec(64):
        B1 = spec.values()[1]
    if B1 == 0:
        raise ValueError("the expansions need a jump (B1 != 0)")
    return 1 if B1 > 0 else -1


def _residues(spec: WeightSpec, n: int, ctx: PrecisionContext, method: str):
    sys = build_system(spec, n + 1, ctx, method)
    aux = aux_from_definitions(sys)
    return sys, aux


def numeric_large_n_fixed_t(spec: WeightSpec, ns: Sequence[int], t, ctx: PrecisionContext | None = None,
                            order: int = 7, method: str = "ladder") -> NumericComparison:
    """``R_n(t)`` against the fixed-``t`` expansion with ``1..order`` terms.

    The branch of the expansion follows the sign of ``B1``.  The last error
    column belongs to the full truncation; its fitted exponent should be the
    first omitted power.  The systems are built by the forward ladder
    recursion (``method``), whose cost is linear in ``n``.
    """
    ctx = ctx or PrecisionContext(256)
    series = derive_large_n_series(_sign(spec), order)
    terms = list(series.coeffs.items())
    records = []
    for n in ns:
        with mp.workprec(ctx.bits + 64):
            moved = spec.at(t1=mp.mpf(t))
        sys, aux = _residues(moved, n, ctx, method)
        with mp.workprec(sys.work_bits):
            tt = aux.t1
            x = 1 / mp.sqrt(n)
            exact = aux.R[n]
            partial, acc = [], mp.mpf(0)
            for e, c in terms:
                acc += c(tt) * x**e
                partial.append(+acc)
            records.append(ComparisonRecord(n, "R", exact, tuple(partial), tuple(abs(exact - p) for p in partial)))
    comp = NumericComparison(mp.mpf(t), tuple(records))
    comp.exponents["R"] = fit_exponent(ns, comp.series("R"))
    return comp


# ---------------------------------------------------------------------------
# double scaling


def edge_location(n: int, s) -> mp.mpf:
    """``sqrt(2n) + s / (sqrt2 n^(1/6))``."""
    n = mp.mpf(n)
    return mp.sqrt(2 * n) + mp.mpf(s) / (mp.sqrt(2) * mp.root(n, 6))


@dataclass(frozen=True)
class ScalingValues:
    """``v_i(s)`` and their first derivatives from the truncated large-``s`` series."""

    s: mp.mpf
    v1: mp.mpf
    v2: mp.mpf
    v3: mp.mpf
    dv1: mp.mpf
    dv2: mp.mpf
    dv3: mp.mpf


@lru_cache(maxsize=4)
def _scaling_series(order: int):
    S = derive_scaling_series(order)
    return tuple(S) + tuple(v.d_ds() for v in S)


def scaling_values(s, order: int = 13) -> ScalingValues:
    v1, v2, v3, d1, d2, d3 = _scaling_series(order)
    s = mp.mpf(s)
    return ScalingValues(s, *(ser.evaluate(s) for ser in (v1, v2, v3, d1, d2, d3)))


def r_expansion(n: int, v: ScalingValues) -> tuple:
    """Partial sums of the three-term expansion of ``r_n`` at ``t1 = edge_location(n, s)``."""
    c = mp.cbrt(mp.mpf(n))
    rt2 = mp.sqrt(2)
    t0 = c * v.v1 / rt2
    t1 = rt2 / 4 * (v.dv1 + 2 * v.v2)
    t2 = (rt2 * v.s * v.v1 - v.v1**2 + rt2 * v.dv2 + 2 * rt2 * v.v3) / (4 * c)
    return (t0, t0 + t1, t0 + t1 + t2)


def sigma_expansion(n: int, v: ScalingValues) -> tuple:
    """Partial sums of the three-bracket expansion of ``sigma_n``."""
    n = mp.mpf(n)
    s, v1, v2, v3, d1, d2, d3 = v.s, v.v1, v.v2, v.v3, v.dv1, v.dv2, v.dv3
    rt2 = mp.sqrt(2)
    b1 = s * v1 - v1**2 / rt2 - d1**2 / (4 * v1)
    b2 = s * v2 - rt2 * v1 * v2 - d1 * d2 / (2 * v1) + d1**2 * v2 / (4 * v1**2)
    b3 = (
        s**2 * v1 / 4
        - rt2 * v1 * v3
        - s * v1**2 / (2 * rt2)
        + v1**3 / 8
        - v2**2 / rt2
        + s * v3
        - (2 * d1 * d3 + d2**2) / (4 * v1)
        + d1 * (d1 * v3 + 2 * v2 * d2) / (4 * v1**2)
        - d1**2 * v2**2 / (4 * v1**3)
    )
    p = mp.root(n, 6)
    t0 = p * b1
    t1 = b2 / p
    t2 = b3 / p**3
    return (t0, t0 + t1, t0 + t1 + t2)


def numeric_double_scaling(spec: WeightSpec, ns: Sequence[int], s, ctx: PrecisionContext | None = None,
                           order: int = 13, method: str = "ladder") -> NumericComparison:
    """``R_n, r_n, sigma_n`` at ``t1 = sqrt(2n) + s/(sqrt2 n^(1/6))`` against the double-scaling expansions.

    Quantities: ``"R"`` (one, two, three terms), ``"scaled_R"`` (``n^(1/6) R_n``
    against ``v1(s)``), ``"r"`` and ``"sigma"``.  The ``v_i`` come from the
    large-``s`` series, so ``|s|`` must be at least 5.
    """
    if abs(mp.mpf(s)) < MIN_ABS_S:
        raise ValueError(f"|s| must be at least {MIN_ABS_S} for the large-s series to stand in for v1, v2, v3")
    ctx = ctx or PrecisionContext(256)
    records = []
    for n in ns:
        with mp.workprec(ctx.bits + 64):
            moved = spec.at(t1=edge_location(n, s))
        sys, aux = _residues(moved, n, ctx, method)
        with mp.workprec(sys.work_bits):
            v = scaling_values(s, order)
            p = mp.root(mp.mpf(n), 6)
            R_approx = (v.v1 / p, v.v1 / p + v.v2 / p**3, v.v1 / p + v.v2 / p**3 + v.v3 / p**5)
            rows = [
                ("R", aux.R[n], R_approx),
                ("scaled_R", p * aux.R[n], (v.v1,)),
                ("r", aux.r[n], r_expansion(n, v)),
                ("sigma", aux.sigma[n], sigma_expansion(n, v)),
            ]
            for name, exact, approx in rows:
                errs = tuple(abs(exact - a) for a in approx)
                records.append(ComparisonRecord(n, name, exact, tuple(approx), errs))
    comp = NumericComparison(mp.mpf(s), tuple(records))
    for q in ("R", "scaled_R", "r", "sigma"):
        comp.exponents[q] = fit_exponent(ns, comp.series(q))
    return comp


def double_scaling_checks(comp: NumericComparison) -> list[dict]:
    """Pass/fail verdicts on a :func:`numeric_double_scaling` comparison.

    * ``n^(1/6) R_n`` approaches ``v1(s)`` monotonically, ending within 1e-2;
    * the two- and three-term truncations of ``R_n`` improve at the largest ``n``;
    * successive three-term errors shrink like ``n^(-7/6)`` within 25%;
    * the leading ``sigma_n`` bracket is within 1e-2 at the largest ``n``;
    * the three-bracket ``sigma_n`` error decays at least like ``n^(-5/6)``
      (fitted exponent at most ``-5/8``, i.e. 25% slack).
    """
    ns = sorted({r.n for r in comp.records})
    v1 = comp.approximations("scaled_R")[0]
    dist = [abs(x - v1) for x in comp.exact("scaled_R")]
    rel = dist[-1] / abs(v1)
    last = [r for r in comp.records if r.quantity == "R"][-1].errors
    errs = comp.series("R")
    ratios = [errs[i + 1] / errs[i] for i in range(len(errs) - 1)]
    targets = [(mp.mpf(ns[i + 1]) / ns[i]) ** (mp.mpf(-7) / 6) for i in range(len(ns) - 1)]
    ratio_ok = all(abs(q / t - 1) <= mp.mpf("0.25") for q, t in zip(ratios, targets))
    sig = [r for r in comp.records if r.quantity == "sigma"][-1]
    sig_rel = abs(sig.exact - sig.approx[0]) / abs(sig.exact) if sig.exact else mp.inf
    slope = comp.exponents.get("sigma", float("nan"))
    fmt = lambda v: mp.nstr(v, 4)
    return [
        {"check": "n^(1/6) R_n approaches v1(s) monotonically",
         "pass": all(b < a for a, b in zip(dist, dist[1:]))},
        {"check": "final relative error of n^(1/6) R_n <= 1e-2", "value": fmt(rel), "pass": bool(rel <= mp.mpf("0.01"))},
        {"check": "adding v2, v3 terms reduces the R_n error at the largest n",
         "pass": all(b < a for a, b in zip(last, last[1:]))},
        {"check": "R_n error ratio matches n^(-7/6) within 25%", "value": ", ".join(fmt(q) for q in ratios),
         "pass": bool(ratio_ok)},
        {"check": "leading sigma_n bracket within 1e-2 at the largest n", "value": fmt(sig_rel),
         "pass": bool(sig_rel <= mp.mpf("0.01"))},
        {"check": "sigma_n error decays at least like n^(-5/6) (25% slack)", "value": round(slope, 4),
         "pass": bool(slope <= -0.625)},
    ]
