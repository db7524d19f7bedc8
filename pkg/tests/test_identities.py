from __future__ import annotations

import dataclasses

import mpmath as mp
import pytest

from hpk import identities as ids
from hpk.identities import FAIL, PASS, SKIPPED, IdentityId, IdentitySpec
from hpk.ladder import aux_from_definitions
from hpk.moments import WeightSpec
from hpk.numerics import PrecisionContext
from hpk.ortho import build_system

# (two-jump label in its B2 = 0 form, matching one-jump label)
REDUCTIONS = [
    ("R_{n,1} + R_{n,2} = 2 alpha_n", "R_n = 2 alpha_n"),
    ("beta_n = (n + r_{n,1} + r_{n,2})/2", "r_n = 2 beta_n - n"),
    ("r_{n,1}^2 = beta_n R_{n,1} R_{n-1,1}", "r_n^2 = beta_n R_n R_{n-1}"),
    ("r_{n+1,1} + r_{n,1} = (t1 - alpha_n) R_{n,1}", "r_{n+1} + r_n = (t - alpha_n) R_n"),
    ("d1 beta_n + d2 beta_n = 2 beta_n (alpha_{n-1} - alpha_n)", "beta_n' = 2 beta_n (alpha_{n-1} - alpha_n)"),
    ("d1 alpha_n + d2 alpha_n = 2 (beta_n - beta_{n+1}) + 1", "alpha_n' = 2 (beta_n - beta_{n+1}) + 1"),
    ("d1 ln h_n = -R_{n,1}", "(ln h_n)' FD vs -R_n"),
    ("B2 = 0 reduction to the sigma form", "sigma form P_IV(0, 0, 2n)"),
]


def _by_label(reports):
    return {r.label: r for r in reports}


@pytest.mark.parametrize("spec", [WeightSpec(1, 1, 0, "0.5"), WeightSpec(0, 1, 0, "-0.3"),
                                  WeightSpec(2, "-1.5", 0, "1.1")])
@pytest.mark.parametrize("n", [2, 5])
def test_single_jump_reports_pass(spec, n):
    reports = ids.single_jump_reports(spec, n, PrecisionContext(512))
    bad = [(r.id.value, r.label, mp.nstr(r.residual, 5)) for r in reports if r.status == FAIL]
    assert not bad


def test_two_jump_reports_pass():
    spec = WeightSpec.three_level("0.3", "-0.5", "0.7")
    for n in (3, 6):
        reports = ids.two_jump_reports(spec, n, PrecisionContext(512))
        assert all(r.status == PASS for r in reports), [r.label for r in reports if not r.passed]
        classes = {r.label: r.tol_class for r in reports}
        assert classes["quartic second-order PDE for sigma_n(t1, t2)"] == "fd2"


def test_symmetric_weight_has_zero_sigma():
    spec = WeightSpec(1, 1, -1, "-0.6", "0.6")
    reports = _by_label(ids.two_jump_reports(spec, 4, PrecisionContext(384)))
    assert reports["even weight: sigma_n = 0"].passed
    assert reports["even weight: R_{n,1} + R_{n,2} = 0"].passed


@pytest.mark.parametrize("n", [1, 4, 7])
def test_b2_zero_reduction_is_bit_identical(n):
    ctx = PrecisionContext(384)
    spec = WeightSpec(1, "0.7", 0, "0.4")
    one = _by_label(ids.single_jump_reports(spec, n, ctx))
    two = _by_label(ids.two_jump_reports(spec, n, ctx))
    for tj, sj in REDUCTIONS:
        assert two[tj].residual == one[sj].residual, tj


def test_suite_covers_every_tag():
    reports = ids.run_suite(WeightSpec(1, 1, 0, "0.5"), [2, 4], ctx=PrecisionContext(384), scaled_ns=(8, 16))
    summary = ids.summarize(reports)
    assert summary["tags_missing"] == []
    assert summary["failed"] == 0, summary["failures"]
    assert summary["line"] == f"PASS {summary['evaluated']}/{summary['evaluated']}"


def test_pure_gaussian_skips_jump_identities():
    reports = ids.run_suite(WeightSpec(), [1, 3], [0], PrecisionContext(256), limit_ns=(16, 32), scaled_ns=(8, 16))
    summary = ids.summarize(reports)
    assert summary["failed"] == 0
    skipped = [r for r in reports if r.status == SKIPPED]
    assert skipped and all(r.reason for r in skipped)


def test_corrupted_residues_are_caught():
    ctx = PrecisionContext(384)
    sys = build_system(WeightSpec(1, 1, 0, "0.5"), 6, ctx)
    aux = aux_from_definitions(sys)
    R = list(aux.R)
    R[3] *= 1 + mp.mpf(10) ** -30
    bad = dataclasses.replace(aux, R=tuple(R))
    reports = ids.check_string_single(bad, sys, 3) + ids.check_difference(bad, 3, ctx)
    assert any(r.status == FAIL for r in reports)


@pytest.mark.parametrize("z", ["0.3", "0.7", "1.5"])
def test_exact_ode_for_polynomials(z):
    ctx = PrecisionContext(512)
    sys = build_system(WeightSpec(1, 1, 0, "0.5"), 12, ctx)
    aux = aux_from_definitions(sys)
    reports = ids.check_exact_ode(aux, sys, 10, z)
    assert reports and all(r.passed for r in reports)


def test_limit_report_rule():
    ctx = PrecisionContext(256)
    ok = ids._limit_report(IdentityId.BHE_LIMIT, (1, 2, 3), (0,), [mp.mpf(3), 2, 1], ctx, "x")
    flat = ids._limit_report(IdentityId.BHE_LIMIT, (1, 2, 3), (0,), [mp.mpf(1), 1, 1], ctx, "x")
    exact = ids._limit_report(IdentityId.BHE_LIMIT, (1, 2, 3), (0,), [mp.mpf(0), 0, 0], ctx, "x")
    assert ok.passed and not flat.passed and exact.passed


def test_identity_parameters():
    p = IdentitySpec(3, mp.mpf(0), 1)
    assert p.piv_params == (7, 0)
    assert p.sigma_params == (0, 0, 6)
    assert p.chazy_params == (-24, -64)
    assert p.bhe_params[3] < 0 and IdentitySpec(3, mp.mpf(0), -1).bhe_params[3] > 0


def test_report_record_round_trip():
    r = ids.single_jump_reports(WeightSpec(1, 1, 0, "0.5"), 2, PrecisionContext(256))[0]
    rec = r.to_record(10)
    assert rec["id"] == r.id.value and rec["pass"] is True and rec["status"] == PASS


@pytest.mark.slow
def test_limits_single_jump():
    reports = ids.check_limits(WeightSpec(1, 1, 0, "0.5"))
    assert all(r.passed for r in reports), [(r.label, r.residual) for r in reports]


@pytest.mark.slow
def test_scaled_pde_residual_decreases():
    r = ids.check_scaled_pde(WeightSpec.three_level("0.3", "-0.5", "0.7"), (16, 64, 256), -1, 1)
    assert r.passed


def test_scaled_pde_with_correction_term_decays_like_n_to_minus_two_thirds():
    from hpk.asymptotics.numeric import fit_exponent

    spec = WeightSpec.three_level("0.3", "-0.5", "0.7")
    ctx = PrecisionContext(256)
    ns = (16, 64, 256)
    res = [ids.scaled_pde_residual(spec, n, -1, 1, ctx, corrected=True) for n in ns]
    assert fit_exponent(ns, res) == pytest.approx(-2 / 3, abs=0.1)
