"""Executable verification suites.

Each suite returns a :class:`~fracinf.report.VerificationReport`; failures are
records, not exceptions.  ``quick=True`` shrinks grids and probe counts for
use in unit tests; the defaults are the acceptance settings.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from . import catalog
from .field import AnalyticField, ConstantFarField, GridSpec, SampledField, ScalarField, sample, translate
from .heat1d import (algebraic_shape, build_profile, harnack_constants, kernel_dt, kernel_eval,
                     profile_values)
from .operator import OperatorConfig, L_eps, cs_constant, frac_lap_1d, ifl, operator_family
from .radial import check_reduction, classical_solution, lift_radial, profile_frac_lap
from .report import VerificationReport, merge
from .scheme import SchemeConfig, evolve, interpolate_time, monitor_apriori, step, initial_state

logger = logging.getLogger(__name__)

DEFAULT_SEED = 20240611


@dataclass(frozen=True)
class Tolerances:
    """Per-check tolerances (the artifact's measured error budget)."""

    closed_form: float = 1e-6        # operator values with closed forms
    oracle: float = 1e-4             # reduction and 1D-oracle comparisons
    ordering: float = 1e-8           # minus <= ifl <= plus
    invariance: float = 1e-8         # constant shifts (FD gradient rounding moves zeta)
    exact: float = 1e-10             # fixed-direction monotonicity
    half_factor: float = 1e-3        # ratio at the symmetry line of the even profile
    scheme_oracle: float = 2e-2      # scheme vs classical solution, sup norm
    scheme_budget: float = 1e-3      # box-doubling calibration ceiling
    kernel_mass: float = 1e-6
    kernel_residual: float = 1e-3    # relative to sup |d_t P|
    cauchy: float = 1e-6
    holder_slack: float = 0.1
    tau_ratio: tuple = (1.5, 3.0)


TOL = Tolerances()


def uniform_bound_constant(s: float) -> float:
    """``c(s)`` from minimising ``A r^(2-2s) / (2(2-2s)) + 2 B r^(1-2s) / (2s-1)`` at ``r = 4B/A``.

    The sup part and the inf part each contribute once, and ``C_s`` multiplies.
    """
    part = 4.0 ** (2 - 2 * s) / (4 - 4 * s) + 2 * 4.0 ** (1 - 2 * s) / (2 * s - 1)
    return 2 * cs_constant(s) * part


def derivative_norms(field: ScalarField, lo: float = -6.0, hi: float = 6.0, n: int = 601) -> tuple:
    """Sampled ``(sup |grad|, sup |D^2|)`` (spectral norm) on a 2D grid."""
    x = np.linspace(lo, hi, n)
    h = x[1] - x[0]
    X = np.stack(np.meshgrid(x, x, indexing="ij"), axis=-1)
    v = field(X)
    g0, g1 = np.gradient(v, h, h)
    H00 = np.gradient(g0, h, axis=0)
    H01 = np.gradient(g0, h, axis=1)
    H11 = np.gradient(g1, h, axis=1)
    tr, det = H00 + H11, H00 * H11 - H01 ** 2
    lam = np.abs(tr) / 2 + np.sqrt(np.maximum(tr ** 2 / 4 - det, 0))
    return float(np.max(np.hypot(g0, g1))), float(np.max(lam))


def _plus_constant(f: ScalarField, c: float) -> ScalarField:
    def far(x, y):
        v = f.far_value(x, y)
        return None if v is None else v + c
    return AnalyticField(lambda x: f(x) + c, f.dim, f.bound + abs(c), far=far,
                         breaks=lambda x, y: f.breakpoints(x, y), name=f"{f!r}+{c:g}")


def _probes(rng, n, field, lo=-2.5, hi=2.5):
    pts = []
    avoid = getattr(getattr(field, "profile", None), "breaks", ())
    while len(pts) < n:
        x = rng.uniform(lo, hi, size=2)
        if any(abs(np.linalg.norm(x) - b) < 0.05 for b in avoid):
            continue
        pts.append(x)
    return np.array(pts)


def _law_fields():
    return {
        "constant": catalog.constant(2, 0.7),
        "gaussian": catalog.gaussian(2),
        "tilted": catalog.tilted_bump(2),
        "ball": catalog.ball_indicator(2, 1.0),
        "tanh": catalog.tanh_x1(2),
    }


# ------------------------------------------------------------------ suites


def suite_operator_laws(seed: int = DEFAULT_SEED, s_values=(0.6, 0.75, 0.9), n_probes: int = 100,
                        n_dir: int = 256, tol: Tolerances = TOL, quick: bool = False) -> VerificationReport:
    """Constant invariance, ordering, monotonicity, uniform bound and consistency."""
    if quick:
        n_probes, n_dir, s_values = 6, 64, (0.75,)
    rep = VerificationReport("operator_laws", seed=seed, meta={"n_probes": n_probes, "n_dir": n_dir})
    rng = np.random.default_rng(seed)
    fields = _law_fields()
    c2 = {}
    for name in ("gaussian", "tilted", "tanh"):
        c2[name] = derivative_norms(fields[name])
    c2["constant"] = (0.0, 0.0)

    for s in s_values:
        cfg = OperatorConfig.make(s, 0.1, 2, n_dir=n_dir)
        cbound = uniform_bound_constant(s)
        for name, f in fields.items():
            probes = _probes(rng, n_probes, f)
            worst, worst_ub = 0.0, -np.inf
            for x in probes:
                fam = operator_family(f, x, cfg)
                worst = max(worst, fam.minus - fam.ifl, fam.ifl - fam.plus)
                if name in c2:
                    B, A = c2[name]
                    lev = abs(L_eps(f, x, cfg))
                    worst_ub = max(worst_ub, lev - cbound * B ** (2 - 2 * s) * A ** (2 * s - 1))
            rep.le(f"ordering minus<=ifl<=plus, {name}, s={s}", worst, 0.0, tol.ordering,
                   "ordering of the two-sided operators")
            if name in c2:
                rep.le(f"uniform bound |L_eps| - c(s)|grad|^(2-2s)|D2|^(2s-1), {name}, s={s}", worst_ub, 0.0, 0.0,
                       "uniform bound for L_eps")

            # constant shift, five operators
            g = _plus_constant(f, 2.5)
            d = 0.0
            for x in probes[:3]:
                a, b = operator_family(f, x, cfg), operator_family(g, x, cfg)
                d = max(d, abs(a.ifl - b.ifl), abs(a.plus - b.plus), abs(a.minus - b.minus),
                        abs(L_eps(f, x, cfg) - L_eps(g, x, cfg)))
            rep.le(f"constant shift invariance, {name}, s={s}", d, 0.0, tol.invariance, "invariance under constants")

        prof = catalog.tanh_profile()
        shifted = type(prof)(lambda r: prof(r) + 2.5, (1.5, 3.5), (), 3.5, True)
        d = max(abs(profile_frac_lap(prof, r, cfg) - profile_frac_lap(shifted, r, cfg)) for r in (-0.7, 0.2, 1.3))
        rep.le(f"constant shift invariance, 1D fractional Laplacian, s={s}", d, 0.0, tol.invariance,
               "invariance under constants")

        _monotonicity(rep, s, tol, n_dir)
        _consistency(rep, s, fields, n_dir, quick)
    return rep


def _monotonicity(rep, s, tol, n_dir):
    """``psi1 <= psi2`` with equality at ``x`` gives ``L_eps(psi1, x) <= L_eps(psi2, x)``."""
    grid = GridSpec.cube(2, -4.0, 4.0, 33)
    X = grid.mesh()
    v1 = catalog.gaussian(2)(X)
    cfg_fixed = OperatorConfig.make(s, 0.25, 2, n_dir=n_dir, refine=False, augment=False)
    cfg_full = OperatorConfig.make(s, 0.25, 2, n_dir=n_dir)
    worst_fixed, worst_full = -np.inf, -np.inf
    for idx in ((16, 16), (12, 18), (20, 9)):
        x = X[idx]
        bump = 0.3 * (1 - np.exp(-np.sum((X - x) ** 2, axis=-1))) * np.exp(-np.sum(X ** 2, axis=-1) / 8)
        p1 = SampledField(grid, v1, ConstantFarField(0.0))
        p2 = SampledField(grid, v1 + bump, ConstantFarField(0.0))
        worst_fixed = max(worst_fixed, L_eps(p1, x, cfg_fixed) - L_eps(p2, x, cfg_fixed))
        worst_full = max(worst_full, L_eps(p1, x, cfg_full) - L_eps(p2, x, cfg_full))
    rep.le(f"monotonicity of L_eps on sampled fields, fixed directions, s={s}", worst_fixed, 0.0, tol.exact,
           "monotonicity of L_eps")
    rep.le(f"monotonicity of L_eps on sampled fields, searched directions, s={s}", worst_full, 0.0, tol.closed_form,
           "monotonicity of L_eps")


def _consistency(rep, s, fields, n_dir, quick):
    eps_list = [0.1 * 2.0 ** -k for k in range(7 if not quick else 4)]
    pts = {"gaussian": [(0.6, 0.3), (1.1, -0.4)], "tilted": [(-0.5, 0.8), (0.9, 0.1)], "tanh": [(0.4, 1.0)]}
    for name, xs in pts.items():
        f = fields[name]
        for xt in xs:
            x = np.asarray(xt, dtype=float)
            ref = ifl(f, x, OperatorConfig.make(s, 0.1, 2, n_dir=n_dir))
            errs = [abs(L_eps(f, x, OperatorConfig.make(s, e, 2, n_dir=n_dir)) - ref) for e in eps_list]
            inc = max(b - a for a, b in zip(errs[:-1], errs[1:]))
            rep.le(f"consistency |L_eps - ifl| decreasing in eps, {name} at {xt}, s={s}", inc, 0.0, 0.0,
                   "consistency of L_eps")
            rep.info(f"consistency error at eps={eps_list[-1]:g}, {name} at {xt}, s={s}", errs[-1],
                     "consistency of L_eps")


def dyadic_grid(m: int = 64, h: float = 0.1875) -> GridSpec:
    """Symmetric grid whose node coordinates are exact binary fractions."""
    half = (m - 1) * h / 2
    return GridSpec((-half, -half), (half, half), (m, m))


def suite_scheme_props(s: float = 0.75, eps: float = 0.1, T: float = 0.25, theta: float = 0.5,
                       tol: Tolerances = TOL, quick: bool = False, workers: int = 1) -> VerificationReport:
    """Stability, comparison, contraction, translation equivariance, CFL probes and moduli."""
    m, n_dir = (64, 256) if not quick else (32, 32)
    h = 0.1875 if not quick else 0.375
    grid = dyadic_grid(m, h)
    op = OperatorConfig.make(s, eps, 2, n_dir=n_dir, refine=False, augment=False)
    cfg = SchemeConfig(op, grid, theta=theta, T=T, workers=workers, monitor_flags=frozenset({"sup", "mass"}))
    rep = VerificationReport("scheme_props", meta={"grid": grid.counts, "h": h, "eps": eps, "tau": cfg.tau,
                                                   "steps": cfg.n_steps})
    u0 = catalog.gaussian(2)
    v0 = _sum_field(u0, catalog.mollifier(2, R0=2.0, amplitude=0.3))
    w0 = catalog.tilted_bump(2)
    runs = {name: evolve(f, cfg) for name, f in (("u", u0), ("v", v0), ("w", w0))}

    # box doubling: same spacing, twice the extent
    pad = m // 2
    big = GridSpec(tuple(l - pad * h for l in grid.lo), tuple(u + pad * h for u in grid.hi),
                   tuple(c + 2 * pad for c in grid.counts))
    cfg_big = SchemeConfig(op, big, theta=theta, T=T, workers=workers)
    budget = 0.0
    for name, f in (("u", u0), ("v", v0), ("w", w0)):
        big_run = evolve(f, cfg_big)
        inner = big_run.values[-1][pad:pad + m, pad:pad + m]
        budget = max(budget, float(np.max(np.abs(inner - runs[name].values[-1]))))
    rep.le("box-doubling change of the final snapshot", budget, tol.scheme_budget, 0.0, "plumbing")
    budget = max(budget, 1e-12)

    U, V, W = (np.array(runs[k].values) for k in "uvw")
    stab = max(float(np.max(np.abs(r))) - float(np.max(np.abs(r[0]))) for r in (U, V, W))
    rep.le("stability: max_j ||U^j|| - ||u0||", stab, 0.0, budget, "stability in sup norm")
    rep.le("comparison: max_j max_x (U^j - V^j) for u0 <= v0", float(np.max(U - V)), 0.0, budget,
           "comparison principle")
    contr = float(np.max(np.abs(U - W), axis=(1, 2)).max() - np.max(np.abs(U[0] - W[0])))
    rep.le("contraction: max_j ||U^j - W^j|| - ||u0 - w0||", contr, 0.0, budget, "contraction in sup norm")

    # translation by a grid vector: shifted grid, same node values
    y = np.array([3 * h, -2 * h])
    moved = evolve(sample(translate(u0, y), grid.shifted(-y)), SchemeConfig(op, grid.shifted(-y), theta=theta,
                                                                              T=T, workers=workers))
    same = all(np.array_equal(a, b) for a, b in zip(moved.values, runs["u"].values))
    rep.truth("translation equivariance bit-for-bit", same, "translation equivariance")

    # CFL: theta = 1 kills the coefficient of U^j(x); theta > 1 overshoots
    cfg1 = SchemeConfig(op, grid, theta=1.0, T=T)
    coef = 1 - cfg1.tau * op.C_s / (s * eps ** (2 * s))
    rep.le("CFL theta=1: |1 - tau C_s / (s eps^(2s))|", abs(coef), 0.0, 4 * np.finfo(float).eps, "CFL condition")
    over = cfl_overshoot(op, theta=1.5)
    rep.ge("CFL violated (theta=1.5): max|U^1| - max|U^0| on the two-value datum", over, 0.5, 1e-12, "CFL condition")
    rep.le("CFL respected (theta=1): max|U^1| - max|U^0| on the two-value datum", cfl_overshoot(op, 1.0),
           0.0, budget, "CFL condition")

    mon = monitor_apriori(runs["u"])
    for r in mon.records:
        rep.le(f"monitor: {r.name}", r.measured, r.bound, budget, "equicontinuity and stability")
    rep.info("mass drift of the gaussian run (informational)", float(mon.mass_history[-1] - mon.mass_history[0]),
             "plumbing")

    slope, target = holder_time_slope(s, eps=eps, quick=quick, workers=workers)
    rep.ge("Holder cone: log-log slope of the time modulus", slope, target - tol.holder_slack, 0.0,
           "Holder continuity in time")
    return rep


def _sum_field(a: ScalarField, b: ScalarField) -> ScalarField:
    return AnalyticField(lambda x: a(x) + b(x), a.dim, a.bound + b.bound, far=0.0, name="sum")


def cfl_overshoot(op: OperatorConfig, theta: float, m: int = 33) -> float:
    """One step from ``+1`` at the central node and ``-1`` elsewhere (far field ``-1``).

    The grid has ``h = eps / 2`` so that no stencil point with ``eta >= eps``
    interpolates from the central node; the new central value is then
    ``1 - 2 theta`` exactly.
    """
    grid = dyadic_grid(m, op.eps / 2) if op.dim == 2 else GridSpec.cube(op.dim, -(m - 1) * op.eps / 4,
                                                                         (m - 1) * op.eps / 4, m)
    vals = -np.ones(grid.shape)
    vals[tuple(c // 2 for c in grid.counts)] = 1.0
    ext = ConstantFarField(-1.0)
    cfg = SchemeConfig(op, grid, theta=theta, T=op.eps, ext=ext, allow_cfl_violation=theta > 1)
    st = step(initial_state(SampledField(grid, vals, ext), cfg), cfg)
    return float(np.max(np.abs(st.U.values)) - 1.0)


def holder_time_slope(s: float = 0.75, beta: float = 0.5, eps: float = 0.1, T: float = 0.25,
                      quick: bool = False, workers: int = 1) -> tuple:
    """Slope of ``log max_x |u(t+d) - u(t)|`` against ``log d`` for the cone datum."""
    m, n_dir, h = (64, 256, 0.1875) if not quick else (32, 32, 0.375)
    grid = dyadic_grid(m, h)
    op = OperatorConfig.make(s, eps, 2, n_dir=n_dir, refine=False, augment=False)
    cfg = SchemeConfig(op, grid, theta=0.5, T=T, workers=workers)
    mon = monitor_apriori(evolve(catalog.holder_cone(2, beta), cfg))
    return mon.time_slope(), beta / (2 * s)


# ------------------------------------------------------------- convergence


CONVERGENCE_SIGMA = 2.0


def convergence_run(eps: float, theta: float = 0.5, s: float = 0.75, T: float = 0.5, m: int = 128,
                    L: float = 6.0, sigma: float = CONVERGENCE_SIGMA, n_dir: int = 256, workers: int = 1,
                    oracle: Optional[np.ndarray] = None):
    """Evolve the radial datum and return ``(u_eps(T), oracle(T), grid, steps)``."""
    grid = GridSpec.cube(2, -L, L, m)
    p = catalog.gaussian_profile(sigma)
    if oracle is None:
        oracle = classical_solution(p, build_profile(s), T, 2, r_out=L * math.sqrt(2) + 0.5)(grid.mesh())
    op = OperatorConfig.make(s, eps, 2, n_dir=n_dir, refine=False, augment=False)
    cfg = SchemeConfig(op, grid, theta=theta, T=T, workers=workers)
    traj = evolve(lift_radial(p, 2), cfg)
    return interpolate_time(traj, T).values, oracle, grid, cfg.n_steps


def suite_convergence(tol: Tolerances = TOL, quick: bool = False, workers: int = 1,
                      snapshot_dir=None) -> VerificationReport:
    """Errors against the classical radial solution along ``eps = 0.2 2^-k``, and the O(tau) part."""
    if quick:
        m, n_dir, ks, halving_eps = 48, 64, range(2), 0.2
    else:
        m, n_dir, ks, halving_eps = 128, 256, range(4), 0.05
    eps_list = [0.2 * 2.0 ** -k for k in ks]
    rep = VerificationReport("convergence", meta={"grid": m, "sigma": CONVERGENCE_SIGMA, "eps": eps_list})
    errors, oracle = [], None
    for e in eps_list:
        t0 = time.perf_counter()
        u, oracle, grid, n = convergence_run(e, m=m, n_dir=n_dir, workers=workers, oracle=oracle)
        errors.append(float(np.max(np.abs(u - oracle))))
        rep.info(f"sup error at eps={e:g} ({n} steps, {time.perf_counter() - t0:.1f}s)", errors[-1],
                 "convergence to the classical solution")
        if snapshot_dir is not None:
            from .field import write_grid_csv
            write_grid_csv(SampledField(grid, u, ConstantFarField(0.0)), f"{snapshot_dir}/snapshot_eps{e:g}.csv",
                           {"eps": e, "T": 0.5})
    rep.meta["errors"] = errors
    for k in range(1, len(errors)):
        rep.le(f"error decreases from eps={eps_list[k - 1]:g} to eps={eps_list[k]:g}",
               errors[k] - errors[k - 1], 0.0, 0.0, "convergence to the classical solution")
    rep.le("final sup error", errors[-1], tol.scheme_oracle, 0.0, "convergence to the classical solution")

    sols = [convergence_run(halving_eps, theta=th, m=m, n_dir=n_dir, workers=workers, oracle=oracle)[0]
            for th in (0.5, 0.25, 0.125)]
    d1 = float(np.max(np.abs(sols[0] - sols[1])))
    d2 = float(np.max(np.abs(sols[1] - sols[2])))
    ratio = d1 / d2 if d2 > 0 else float("inf")
    rep.meta["tau_halving"] = {"eps": halving_eps, "diffs": [d1, d2]}
    lo, hi = tol.tau_ratio
    rep.ge(f"tau-halving ratio at eps={halving_eps:g} (lower)", ratio, lo, 0.0, "first order in tau")
    rep.le(f"tau-halving ratio at eps={halving_eps:g} (upper)", ratio, hi, 0.0, "first order in tau")
    return rep


# ---------------------------------------------------------------- harnack


def suite_harnack(s: float = 0.75, eps: float = 0.1, quick: bool = False, workers: int = 1) -> VerificationReport:
    """Positivity and two-sided bounds by the 1D kernel for the compact bump."""
    m, n_dir = (128, 256) if not quick else (32, 32)
    grid = GridSpec.cube(2, -6.0, 6.0, m)
    op = OperatorConfig.make(s, eps, 2, n_dir=n_dir, refine=False, augment=False)
    cfg = SchemeConfig(op, grid, theta=0.5, T=1.0, snapshot_times=(0.5, 1.0), workers=workers)
    rep = VerificationReport("harnack", meta={"grid": m, "eps": eps, "tau": cfg.tau})
    u0 = catalog.mollifier(2, R0=1.0)
    traj = evolve(u0, cfg)
    k = build_profile(s)
    X = grid.mesh()
    r = np.linalg.norm(X, axis=-1)
    corner = (0,) * 2
    for t in (0.5, 1.0):
        u = traj.snapshots[t].values
        ratio = u / kernel_eval(k, r, t)
        alg = u / algebraic_shape(r, t, s)
        rep.ge(f"t={t:g}: min u over the grid", float(u.min()), 0.0, 0.0, "global Harnack principle: u > 0")
        if u.min() <= 0:
            continue
        rep.ge(f"t={t:g}: min u/P_s(|x|,t)", float(ratio.min()), 0.0, 0.0, "global Harnack principle")
        rep.le(f"t={t:g}: max u/P_s(|x|,t) finite", float(ratio.max()), np.finfo(float).max, 0.0,
               "global Harnack principle")
        rep.info(f"t={t:g}: measured C1 = min u/P_s", float(ratio.min()), "global Harnack principle")
        rep.info(f"t={t:g}: measured C2 = max u/P_s", float(ratio.max()), "global Harnack principle")
        rep.ge(f"t={t:g}: min u/(t/(t^(1/s)+|x|^2)^((1+2s)/2))", float(alg.min()), 0.0, 0.0,
               "algebraic two-sided bound")
        rep.info(f"t={t:g}: max u/(t/(t^(1/s)+|x|^2)^((1+2s)/2))", float(alg.max()), "algebraic two-sided bound")
        rep.ge(f"t={t:g}: u at the grid corner", float(u[corner]), 0.0, 0.0, "infinite speed of propagation")

    if not quick:
        op3 = OperatorConfig.make(s, 0.3, 3, n_dir=128, refine=False, augment=False)
        run3 = evolve(catalog.gaussian(3), SchemeConfig(op3, GridSpec.cube(3, -4.0, 4.0, 17), T=0.5))
        m0, m1 = run3.monitors[0]["mass"], run3.monitors[-1]["mass"]
        rep.info("3D coarse grid: relative mass change of a gaussian by T=0.5 (informational)", (m1 - m0) / m0,
                 "no conservation of mass")

    prof = catalog.mollifier_profile(1.0)
    xs = np.linspace(-8, 8, 17)
    k1, k2 = harnack_constants(prof, 1.0, [0.5, 1.0], xs, k)
    rep.ge("1D oracle: k1 of the bump", k1, 0.0, 0.0, "global Harnack principle (1D)")
    rep.le("1D oracle: k1 <= k2", k1 - k2, 0.0, 0.0, "global Harnack principle (1D)")
    return rep


# --------------------------------------------------------- counterexamples


def suite_counterexamples(s: float = 0.75, R: float = 10.0, tol: Tolerances = TOL,
                          quick: bool = False) -> VerificationReport:
    """Annulus gap, half factor on the symmetry line, and the ``2 sin t`` non-solution."""
    n_dir = 256 if not quick else 64
    rep = VerificationReport("counterexamples", meta={"s": s, "R": R, "n_dir": n_dir})
    C = cs_constant(s)
    cfg = OperatorConfig.make(s, 0.1, 2, n_dir=n_dir)

    f = catalog.annulus(2, R)
    x0 = np.array([R, 0.0])
    fam = operator_family(f, x0, cfg, zero_gradient=True)
    one_d = profile_frac_lap(f.profile, R, cfg)
    inf_part = float(fam.onesided.min())
    sup_part = float(fam.onesided.max())
    rep.close("annulus: inf part of the one-sided integrals", inf_part, -1 / (2 * s), tol.closed_form,
              "non-monotone radial counterexample")
    rep.ge("annulus: sup part >= tangent-direction value", sup_part, -(2 * R + 1) ** (-s) / (2 * s),
           tol.closed_form, "non-monotone radial counterexample")
    exit_len = math.sqrt(2 * R - 1) + math.sqrt(4 * R)
    rep.close("annulus: sup part equals the chord tangent to the inner circle", sup_part,
              -exit_len ** (-2 * s) / (2 * s), tol.closed_form, "non-monotone radial counterexample")
    closed_1d = -(C / (2 * s)) * (2 + (2 * R + 1) ** (-2 * s) - (2 * R - 1) ** (-2 * s))
    rep.close("annulus: 1D fractional Laplacian of the even profile", one_d, closed_1d, tol.closed_form,
              "non-monotone radial counterexample")
    lower = -(C / (2 * s)) * ((2 * R + 1) ** (-s) + 1)
    rep.ge("annulus: ifl >= -(C_s/2s)((2R+1)^(-s)+1)", fam.ifl, lower, tol.closed_form,
           "non-monotone radial counterexample")
    gap_bound = (C / (2 * s)) * (1 + (2 * R + 1) ** (-2 * s) - (2 * R - 1) ** (-2 * s) - (2 * R + 1) ** (-s))
    red = check_reduction(f, [x0], cfg, tol=tol.oracle)
    rep.truth("annulus: radial reduction check fails", not red.passed, "non-monotone radial counterexample")
    rep.ge("annulus: gap ifl - 1D >= lower bound", float(red.discrepancy[0]), gap_bound, tol.oracle,
           "non-monotone radial counterexample")
    rep.info("annulus: measured gap", float(red.discrepancy[0]), "non-monotone radial counterexample")

    e = catalog.even_x1(2)
    v0 = ifl(e, np.array([0.0, 0.4]), cfg)
    w0 = profile_frac_lap(e.profile, 0.0, cfg)
    rep.close("even profile: ifl(x1=0) / 1D value", v0 / w0, 0.5, tol.half_factor, "pointwise discontinuity")
    x = np.array([0.7, -0.3])
    rep.close("even profile: ifl(x1=0.7) - 1D value", ifl(e, x, cfg) - profile_frac_lap(e.profile, 0.7, cfg), 0.0,
              tol.oracle, "pointwise discontinuity")

    norm2 = catalog.psi_second_derivative_sup()
    unit = C * norm2 * 2 ** (2 - 2 * s) / (2 - 2 * s)
    K = 0.5 / unit
    phi = catalog.remark_test_function(2, K)
    plus = operator_family(phi, np.zeros(2), cfg, zero_gradient=True).plus
    rep.le("2 sin t: K C_s |psi''| 2^(2-2s)/(2-2s)", K * unit, 1.0, 0.0, "2 sin t is not a subsolution")
    rep.le("2 sin t: ifl_plus(phi)(0) <= K C_s |psi''| 2^(2-2s)/(2-2s)", plus, K * unit, tol.closed_form,
           "2 sin t is not a subsolution")
    rep.ge("2 sin t: d_t phi(0, 2 pi) - ifl_plus(phi)(0) > 0", 2 * math.cos(2 * math.pi) - plus, 0.0, 0.0,
           "2 sin t is not a subsolution")
    return rep


# ------------------------------------------------------------------ kernel


def kernel_residual(k, ts=(0.5, 1.0, 2.0), xs=None, eta0: float = 1e-2) -> float:
    """``max |d_t P + (-d^2)^s P| / max |d_t P|`` on a probe lattice."""
    from .quad import QuadRule
    xs = np.linspace(-4, 4, 17) if xs is None else xs
    rule = QuadRule(eta0, 100.0, 16, 8)
    worst = 0.0
    for t in ts:
        dense = np.linspace(0, 6 * t ** (1 / (2 * k.s)), 2001)
        scale = float(np.max(np.abs(kernel_dt(k, dense, t))))
        f = AnalyticField(lambda z, t=t: kernel_eval(k, z[..., 0], t), 1, far=0.0)
        for x in xs:
            lap = frac_lap_1d(f, x, k.s, rule)
            worst = max(worst, abs(kernel_dt(k, x, t) - lap) / scale)
    return worst


def suite_kernel(s: float = 0.75, tol: Tolerances = TOL, quick: bool = False) -> VerificationReport:
    """Profile monotonicity, mass, PDE residual and the Cauchy cross-check."""
    rep = VerificationReport("kernel", meta={"s": s})
    k = build_profile(s)
    rep.truth("profile strictly decreasing on the table", bool(np.all(np.diff(k.F) < 0)), "self-similar profile")
    rep.close("F(0) = Gamma(1 + 1/(2s)) / pi", float(k.F[0]), math.gamma(1 + 1 / (2 * s)) / math.pi, 1e-12,
              "self-similar profile")
    rep.close("kernel mass", k.mass(), 1.0, tol.kernel_mass, "unit mass of the kernel")
    rep.le("PDE residual relative to sup |d_t P|", kernel_residual(k, ts=(1.0,) if quick else (0.5, 1.0, 2.0)),
           0.0, tol.kernel_residual, "the kernel solves the 1D equation")
    r = np.linspace(0, 50, 501 if quick else 5001)
    cauchy = float(np.max(np.abs(profile_values(0.5, r) - 1 / (np.pi * (1 + r * r)))))
    rep.le("s=1/2 inversion vs Cauchy profile", cauchy, 0.0, tol.cauchy, "plumbing")
    c1, c2 = k.tail_constants
    t = np.linspace(0.25, 4, 16)
    x = np.linspace(-20, 20, 161)
    T_, X_ = np.meshgrid(t, x, indexing="ij")
    P = kernel_eval(k, X_, T_)
    G = algebraic_shape(X_, T_, s)
    rep.ge("two-sided bound: min P - c1 g", float(np.min(P - c1 * G)), 0.0, 1e-15, "two-sided kernel bound")
    rep.le("two-sided bound: max P - c2 g", float(np.max(P - c2 * G)), 0.0, 1e-15, "two-sided kernel bound")
    rep.info("c1", c1, "two-sided kernel bound")
    rep.info("c2", c2, "two-sided kernel bound")
    return rep


SUITES: Dict[str, Callable[..., VerificationReport]] = {
    "operator_laws": suite_operator_laws,
    "scheme_props": suite_scheme_props,
    "convergence": suite_convergence,
    "harnack": suite_harnack,
    "counterexamples": suite_counterexamples,
    "kernel": suite_kernel,
}


def run(name: str = "all", **kw) -> VerificationReport:
    if name == "all":
        return merge([fn(**_accepted(fn, kw)) for fn in SUITES.values()])
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: all, {', '.join(SUITES)}")
    fn = SUITES[name]
    return fn(**_accepted(fn, kw))


def _accepted(fn, kw):
    import inspect
    params = inspect.signature(fn).parameters
    return {k: v for k, v in kw.items() if k in params}
