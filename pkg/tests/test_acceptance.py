"""Acceptance criteria 1-9 at their stated tolerances.

Each test logs one PASS/FAIL line; the lines are repeated in the terminal
summary under "acceptance criteria".
"""
import math
import time

import numpy as np
import pytest

from fracinf import catalog, verify
from fracinf.operator import OperatorConfig, cs_constant, operator_family
from fracinf.quad import tail_weight
from fracinf.radial import check_reduction, profile_frac_lap

pytestmark = pytest.mark.slow

# mpmath.quad of eta^(-1-2s) on [0.1, inf) at s = 0.75
TAIL_WEIGHT_ORACLE = 21.081851067789194
# -(C_s/2s)(2 + 21^(-1.5) - 19^(-1.5)) with mpmath at 30 digits
ANNULUS_1D_ORACLE = -0.398606533729392


def _summary(records):
    return "; ".join(f"{r.description}={r.measured:.4g}" for r in records)


@pytest.fixture(scope="module")
def scheme_report():
    return verify.suite_scheme_props()


@pytest.fixture(scope="module")
def convergence_report(tmp_path_factory):
    t0 = time.perf_counter()
    rep = verify.suite_convergence(snapshot_dir=str(tmp_path_factory.mktemp("snapshots")))
    rep.meta["wall"] = time.perf_counter() - t0
    return rep


def test_criterion_1_closed_forms(criterion_log):
    t0 = time.perf_counter()
    s, R = 0.75, 10.0
    cfg = OperatorConfig.make(s, 0.1, 2)
    tw = tail_weight(0.1, s)
    f = catalog.annulus(2, R)
    fam = operator_family(f, np.array([R, 0.0]), cfg, zero_gradient=True)
    inf_part = float(fam.onesided.min())
    one_d = profile_frac_lap(f.profile, R, cfg)
    closed = -(cs_constant(s) / (2 * s)) * (2 + (2 * R + 1) ** (-2 * s) - (2 * R - 1) ** (-2 * s))
    wall = time.perf_counter() - t0
    errs = (abs(tw - TAIL_WEIGHT_ORACLE), abs(inf_part + 1 / (2 * s)), abs(one_d - closed),
            abs(closed - ANNULUS_1D_ORACLE))
    ok = max(errs) <= 1e-6 and wall < 1.0
    criterion_log("criterion 1 (closed-form quadrature)", ok,
                  f"max err {max(errs):.2e} <= 1e-6, runtime {wall:.2f}s < 1s")
    assert ok


def test_criterion_2_radial_reduction(criterion_log):
    t0 = time.perf_counter()
    cfg = OperatorConfig.make(0.75, 0.1, 2, n_dir=256)
    probes = [[0.0, 0.0], [0.5, 0.0], [0.0, 1.0], [2 / math.sqrt(2), -2 / math.sqrt(2)]]
    rep = check_reduction(catalog.gaussian(2), probes, cfg, tol=1e-4)
    wall = time.perf_counter() - t0
    ok = rep.passed and wall < 10.0
    criterion_log("criterion 2 (radial reduction)", ok,
                  f"max |ifl - 1D| {rep.max_discrepancy:.2e} <= 1e-4, runtime {wall:.2f}s < 10s")
    assert ok


def test_criterion_3_counterexample_gap(criterion_log):
    rep = verify.suite_counterexamples()
    keys = ("annulus: radial reduction check fails", "annulus: gap ifl - 1D >= lower bound",
            "even profile: ifl(x1=0) / 1D value")
    recs = [r for k in keys for r in rep.find(k)]
    ok = len(recs) == 3 and all(r.passed for r in recs) and rep.passed
    criterion_log("criterion 3 (annulus gap, half factor)", ok, _summary(recs))
    assert ok, rep.to_text()


def test_criterion_4_operator_laws(criterion_log):
    rep = verify.suite_operator_laws()
    order = rep.find("ordering")
    bound = rep.find("uniform bound")
    ok = len(order) == 15 and all(r.passed for r in order + bound)
    worst = max(r.measured for r in order)
    criterion_log("criterion 4 (ordering, uniform bound)", ok,
                  f"{len(order)} field/s combos, worst ordering violation {worst:.2e} <= 1e-8, "
                  f"uniform bound {'holds' if all(r.passed for r in bound) else 'violated'} at all probes")
    assert ok, "\n".join(r.line() for r in order + bound if not r.passed)
    assert rep.passed, rep.to_text()


def test_criterion_5_scheme_properties(scheme_report, criterion_log):
    names = ("box-doubling", "stability", "comparison", "contraction", "translation equivariance",
             "CFL violated", "CFL theta=1", "CFL respected", "monitor")
    recs = [r for n in names for r in scheme_report.find(n)]
    ok = all(r.passed for r in recs)
    budget = scheme_report.find("box-doubling")[0].measured
    criterion_log("criterion 5 (scheme properties under CFL)", ok,
                  f"{len(recs)} checks, box-doubling budget {budget:.2e} <= 1e-3, "
                  f"theta=1.5 overshoot {scheme_report.find('CFL violated')[0].measured:.3g}")
    assert ok, scheme_report.to_text()


def test_criterion_6_final_error(convergence_report, criterion_log):
    errs = convergence_report.meta["errors"]
    wall = convergence_report.meta["wall"]
    ok = errs[-1] <= 2e-2 and wall <= 600
    criterion_log("criterion 6a (final sup error, runtime)", ok,
                  f"error {errs[-1]:.4g} <= 2e-2, runtime {wall:.0f}s <= 600s")
    assert ok


def test_criterion_6_strictly_decreasing(convergence_report, criterion_log):
    errs = convergence_report.meta["errors"]
    ok = all(b < a for a, b in zip(errs, errs[1:]))
    criterion_log("criterion 6b (error strictly decreasing in k)", ok,
                  "errors " + ", ".join(f"{e:.4g}" for e in errs))
    assert ok, f"sup errors along eps = 0.2 2^-k: {errs}"


def test_criterion_6_tau_halving(convergence_report, criterion_log):
    recs = convergence_report.find("tau-halving")
    d1, d2 = convergence_report.meta["tau_halving"]["diffs"]
    ok = len(recs) == 2 and all(r.passed for r in recs)
    criterion_log("criterion 6c (tau-halving ratio)", ok, f"ratio {d1 / d2:.3f} in [1.5, 3]")
    assert ok


def test_criterion_7_harnack(criterion_log):
    rep = verify.suite_harnack()
    recs = rep.find("t=1:")
    ratio_min = rep.find("t=1: min u/P_s")[0].measured
    ratio_max = rep.find("t=1: max u/P_s")[0].measured
    ok = rep.passed and 0 < ratio_min <= ratio_max < np.inf and len(recs) >= 6
    criterion_log("criterion 7 (global Harnack principle)", ok,
                  f"t=1: u/P_s in [{ratio_min:.3g}, {ratio_max:.3g}], "
                  f"min u {rep.find('t=1: min u over')[0].measured:.3g} > 0")
    assert ok, rep.to_text()


def test_criterion_8_kernel(criterion_log):
    rep = verify.suite_kernel()
    ok = rep.passed
    criterion_log("criterion 8 (kernel oracle)", ok, _summary([r for r in rep.records if r.relation != "info"][:5]))
    assert ok, rep.to_text()


def test_criterion_9_holder(scheme_report, criterion_log):
    rec = scheme_report.find("Holder cone")[0]
    ok = rec.passed
    criterion_log("criterion 9 (Holder modulus in time)", ok,
                  f"slope {rec.measured:.3f} >= beta/(2s) - 0.1 = {rec.bound:.3f}")
    assert ok
