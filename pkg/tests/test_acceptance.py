"""Acceptance criteria 1 to 10, one test each.

Every test prints a single ``ACCEPTANCE k: PASS|FAIL ...`` line (also
collected in the terminal summary) and asserts the criterion at its stated
tolerance.  Run with ``pytest tests/test_acceptance.py -v -s``.
"""

from __future__ import annotations

import random
import time

import mpmath as mp
import pytest

from hpk import identities as ids
from hpk.asymptotics.numeric import double_scaling_checks, numeric_double_scaling, numeric_large_n_fixed_t
from hpk.asymptotics.series import (
    SeriesODE,
    compare_printed,
    derive_large_n_series,
    derive_scaling_series,
    printed_large_n_series,
    printed_scaling_series,
    series_ode_residual,
)
from hpk.identities import IdentityId as I
from hpk.ladder import aux_from_definitions, aux_from_recurrence
from hpk.moments import WeightSpec
from hpk.numerics import PrecisionContext, relative_residual
from hpk.ortho import build_system, expectation_oracle, hankel_oracle, oracle_recurrence

RESULTS: dict[str, str] = {}


def record(key: str, ok: bool, detail: str) -> None:
    line = f"ACCEPTANCE {key}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[key] = line
    print(line)


def _nstr(x, k=3) -> str:
    return mp.nstr(x, k)


# 1 ---------------------------------------------------------------------------


def _barnes_g(m: int) -> mp.mpf:
    g = mp.mpf(1)  # G(1)
    for z in range(1, m):
        g *= mp.gamma(z)  # G(z + 1) = Gamma(z) G(z)
    return g


def test_criterion_1_gaussian_closed_form():
    t0 = time.perf_counter()
    ctx = PrecisionContext(256)
    sys = build_system(WeightSpec(), 20, ctx)
    worst = mp.mpf(0)
    with mp.workprec(sys.work_bits + 64):
        for n in range(21):
            ref = (2 * mp.pi) ** (mp.mpf(n) / 2) * mp.mpf(2) ** (-mp.mpf(n * n) / 2) * _barnes_g(n + 1)
            worst = max(worst, abs(mp.exp(sys.logD[n]) / ref - 1))
    dt = time.perf_counter() - t0
    ok = worst <= mp.mpf(10) ** -60 and dt < 5
    record("1", ok, f"max rel err {_nstr(worst)} (<= 1e-60), {dt:.2f} s (< 5 s)")
    assert ok


# 2, 3 ------------------------------------------------------------------------

T_GRID = ("-1", "0", "0.5", "2")
N_MAX = 100


@pytest.fixture(scope="module")
def grid_systems():
    t0 = time.perf_counter()
    ctx = PrecisionContext.for_nmax(N_MAX)
    out = {}
    for t in T_GRID:
        sys = build_system(WeightSpec(1, 1, 0, t), N_MAX + 2, ctx)
        out[t] = (sys, aux_from_definitions(sys))
    return ctx, out, time.perf_counter() - t0


def test_criterion_2_route_agreement(grid_systems):
    t0 = time.perf_counter()
    ctx, systems, build_time = grid_systems
    worst = mp.mpf(0)
    for t, (sys, aux) in systems.items():
        rec = aux_from_recurrence(sys)
        with mp.workprec(sys.work_bits):
            for n in range(N_MAX + 1):
                worst = max(worst, relative_residual([aux.R[n]], [rec.R[n]]),
                            relative_residual([aux.r[n]], [rec.r[n]]))
    dt = time.perf_counter() - t0 + build_time
    ok = worst <= ctx.tol and dt < 120
    record("2", ok, f"max residual {_nstr(worst)} (tol {_nstr(ctx.tol)}), {ctx.bits} bits, {dt:.1f} s")
    assert ok


STRING_TAGS = {I.S12, I.S21, I.S22, I.S121, I.S211, I.DIFF_R, I.DIFF_RCAP, I.DISCRETE_SIGMA}


def test_criterion_3_string_and_difference_suite(grid_systems):
    ctx, systems, _ = grid_systems
    reports = []
    for sys, aux in systems.values():
        for n in range(1, N_MAX + 1):
            reports += ids.check_string_single(aux, sys, n) + ids.check_difference(aux, n, ctx)
    reports = [r for r in reports if r.id in STRING_TAGS]
    evaluated = [r for r in reports if r.status != ids.SKIPPED]
    worst = max(r.residual for r in evaluated)
    covered = {r.id for r in reports}
    ok = all(r.residual <= ctx.tol for r in evaluated) and covered == STRING_TAGS
    record("3", ok, f"{len(evaluated)} residuals, max {_nstr(worst)} (tol {_nstr(ctx.tol)}), "
                    f"{len(covered)}/{len(STRING_TAGS)} identities")
    assert ok


# 4, 5 ------------------------------------------------------------------------

DIFF_TAGS = {I.RICCATI_R, I.RICCATI_RCAP, I.TODA1, I.TODA2, I.PIV_ODE, I.CHAZY, I.SIGMA_FORM}


def test_criterion_4_differential_suite():
    t0 = time.perf_counter()
    reports = []
    for t in ("0", "0.5"):
        for n in (3, 8, 20):
            ctx = PrecisionContext.for_nmax(n + 2)
            reports += [r for r in ids.single_jump_reports(WeightSpec(1, 1, 0, t), n, ctx) if r.id in DIFF_TAGS]
    dt = time.perf_counter() - t0
    bad = [r for r in reports if r.residual is None or r.residual > r.tolerance or r.status != ids.PASS]
    ratio = max(r.residual / r.tolerance for r in reports)
    covered = {r.id for r in reports}
    ok = not bad and covered == DIFF_TAGS and dt < 300
    record("4", ok, f"{len(reports)} residuals, worst residual/tol {_nstr(ratio)}, "
                    f"{len(covered)}/{len(DIFF_TAGS)} identities, {dt:.1f} s (< 300 s)")
    assert ok


def test_criterion_5_exact_polynomial_ode():
    ctx = PrecisionContext(256)
    worst, count = mp.mpf(0), 0
    for t in ("0", "0.5"):
        sys = build_system(WeightSpec(1, 1, 0, t), 12, ctx)
        aux = aux_from_definitions(sys)
        for z in ("0.3", "0.7", "1.5"):
            for r in ids.check_exact_ode(aux, sys, 10, z):
                worst = max(worst, r.residual)
                count += 1
    ok = count > 0 and worst <= ctx.tol
    record("5", ok, f"{count} residuals at n = 10, max {_nstr(worst)} (tol {_nstr(ctx.tol)})")
    assert ok


# 6 ---------------------------------------------------------------------------


def test_criterion_6_series_coefficients():
    t0 = time.perf_counter()
    S = derive_scaling_series(13)
    P = printed_scaling_series()
    matches = []
    for sign in (1, -1):
        matches += compare_printed("R_n", derive_large_n_series(sign, 7), printed_large_n_series(sign))
    for name in ("v1", "v2", "v3"):
        matches += compare_printed(name, getattr(S, name), getattr(P, name))
    residuals = {
        "v1 eq": series_ode_residual(S.v1, SeriesODE.US),
        "v2 eq": series_ode_residual((S.v1, S.v2), SeriesODE.VS),
        "v3 eq": series_ode_residual(tuple(S), SeriesODE.WS),
        "P34": series_ode_residual(S.v1, SeriesODE.P34),
    }
    dt = time.perf_counter() - t0
    wrong = [f"{m.name} s^-{m.exponent}: derived {m.derived}, printed {m.printed}" for m in matches if not m.match]
    nonzero = [k for k, v in residuals.items() if v.coeffs]
    ok = not wrong and not nonzero and dt < 10
    detail = f"{len(matches) - len(wrong)}/{len(matches)} coefficients exact, ODE residuals zero: " \
             f"{len(residuals) - len(nonzero)}/{len(residuals)}, {dt:.1f} s (< 10 s)"
    if wrong:
        detail += "; mismatch " + "; ".join(wrong)
    record("6", ok, detail)
    assert ok


# 7 ---------------------------------------------------------------------------

NS = (256, 1024, 4096)


@pytest.mark.slow
def test_criterion_7_fixed_t_decay_exponent():
    t0 = time.perf_counter()
    comp = numeric_large_n_fixed_t(WeightSpec(0, 1, 0, 0), NS, "0.5")
    dt = time.perf_counter() - t0
    slope = comp.exponents["R"]
    errs = ", ".join(_nstr(e) for e in comp.series("R"))
    ok = abs(slope + 3) <= 0.5 and dt < 600
    record("7", ok, f"A=0, B1=1, t=0.5: exponent {slope:.3f} (-3 +- 0.5), errors {errs}, {dt:.0f} s")
    assert ok


@pytest.mark.xfail(strict=True, reason="the fixed-t expansion describes the one-sided weight (A = 0) only")
def test_fixed_t_expansion_does_not_describe_two_sided_weight():
    comp = numeric_large_n_fixed_t(WeightSpec(1, 1, 0, 0), (256, 1024), "0.5")
    assert abs(comp.exponents["R"] + 3) <= 0.5


# 8 ---------------------------------------------------------------------------


def _double_scaling_verdict(spec, s):
    comp = numeric_double_scaling(spec, NS, s)
    checks = double_scaling_checks(comp)
    # the criterion itself: monotone approach, final error, truncations improving
    ok = all(c["pass"] for c in checks[:3])
    v1 = comp.approximations("scaled_R")[0]
    last = [r for r in comp.records if r.quantity == "R"][-1].errors
    detail = (f"s={s}: n^(1/6) R_n = {', '.join(_nstr(x, 6) for x in comp.exact('scaled_R'))} "
              f"vs v1 = {_nstr(v1, 6)}; monotone {checks[0]['pass']}, final rel err {checks[1]['value']} "
              f"(<= 1e-2), R_n errors at n={NS[-1]} {', '.join(_nstr(e) for e in last)} "
              f"decreasing {checks[2]['pass']}")
    return ok, detail, checks


@pytest.mark.slow
def test_criterion_8_double_scaling():
    ok, detail, _ = _double_scaling_verdict(WeightSpec(1, 1, 0, 0), 6)
    record("8", ok, "A=1, B1=1, " + detail)
    assert ok


@pytest.mark.slow
def test_double_scaling_below_the_edge():
    ok, detail, checks = _double_scaling_verdict(WeightSpec(1, -1, 0, 0), -6)
    extra = [c for c in checks[3:] if not c["pass"]]
    ok = ok and not extra
    record("8b", ok, "supplement A=1, B1=-1, " + detail + f"; error-ratio and sigma checks {3 - len(extra)}/3")
    assert ok


# 9 ---------------------------------------------------------------------------


def test_criterion_9_two_jump_suite():
    mu = mp.mpf("0.3")
    spec = WeightSpec.three_level(mu, "-0.5", "0.7")
    lines, ok = [], True
    for n in (3, 6):
        ctx = PrecisionContext.for_nmax(n + 2)
        reports = ids.two_jump_reports(spec, n, ctx)
        by_class = {}
        for r in reports:
            by_class.setdefault((r.id, r.tol_class), []).append(r)
        for (ident, cls), rs in sorted(by_class.items(), key=lambda kv: (kv[0][0].value, kv[0][1])):
            good = all(r.passed for r in rs)
            ok &= good
            lines.append(f"n={n} {ident.value}/{cls} {len(rs)} ok={good}")
        ok &= any(r.id is I.TJ_PDE and r.tol_class == "fd2" and r.passed for r in reports)
    sym = ids.two_jump_reports(WeightSpec(1, 1, -1, "-0.6", "0.6"), 4, PrecisionContext(256))
    sym_ok = all(r.passed for r in sym if r.label.startswith("even weight"))
    sym_ok &= any(r.label == "even weight: sigma_n = 0" for r in sym)
    single = WeightSpec(1, "0.7", 0, "0.4")
    identical = True
    ctx = PrecisionContext(384)
    for n in (3, 6):
        one = {r.label: r.residual for r in ids.single_jump_reports(single, n, ctx)}
        two = {r.label: r.residual for r in ids.two_jump_reports(single, n, ctx)}
        identical &= two["R_{n,1} + R_{n,2} = 2 alpha_n"] == one["R_n = 2 alpha_n"]
        identical &= two["B2 = 0 reduction to the sigma form"] == one["sigma form P_IV(0, 0, 2n)"]
        identical &= two["d1 beta_n + d2 beta_n = 2 beta_n (alpha_{n-1} - alpha_n)"] == \
            one["beta_n' = 2 beta_n (alpha_{n-1} - alpha_n)"]
    ok = ok and sym_ok and identical
    record("9", ok, f"{len(lines)} report groups pass={all('ok=True' in x for x in lines)}, "
                    f"symmetric sigma_n = 0 {sym_ok}, B2 = 0 bit-identical {identical}")
    assert ok


# 10 --------------------------------------------------------------------------


def _random_spec(rng: random.Random) -> WeightSpec:
    A = round(rng.uniform(0, 2), 3)
    B1 = round(rng.uniform(-A, 2), 3)
    t1 = round(rng.uniform(-1.5, 1.5), 3)
    if rng.random() < 0.5:
        return WeightSpec(A, B1, 0, t1)
    B2 = round(rng.uniform(-(A + B1), 1.5), 3)
    return WeightSpec(A, B1, B2, t1, round(t1 + rng.uniform(0.1, 1.5), 3))


def test_criterion_10_oracle_equivalence():
    rng = random.Random(20260101)
    ctx = PrecisionContext(256)
    worst, worst_q = mp.mpf(0), 0.0
    gauss = build_system(WeightSpec(), 30, ctx)
    for _ in range(10):
        spec = _random_spec(rng)
        sys = build_system(spec, 30, ctx, "cholesky")
        ref = oracle_recurrence(spec, 29, ctx)
        with mp.workprec(sys.work_bits):
            for n in range(30):
                worst = max(worst, abs(sys.h[n] / ref["h"][n] - 1),
                            abs(sys.alpha[n] - ref["alpha"][n]) / max(1, abs(ref["alpha"][n])),
                            abs(sys.beta[n] - ref["beta"][n]) / max(1, ref["beta"][n]))
            worst = max(worst, abs(sys.D(30) / hankel_oracle(spec, 30, ctx) - 1))
            for n in (1, 2):
                ratio = float(mp.exp(sys.logD[n] - gauss.logD[n]))
                worst_q = max(worst_q, abs(expectation_oracle(spec, n) - ratio) / ratio)
    ok = worst <= ctx.tol and worst_q <= 1e-8
    record("10", ok, f"10 random specs, n <= 30: max deviation {_nstr(worst)} (tol {_nstr(ctx.tol)}); "
                     f"quadrature vs D_n ratio {worst_q:.2e} (<= 1e-8)")
    assert ok
