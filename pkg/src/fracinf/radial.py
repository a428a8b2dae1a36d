"""Radial and one-dimensional profiles and their lifts to ``R^n``.

A radial profile ``p`` on ``[0, inf)`` is evenly extended to ``R``; the lift is
``x -> p(|x|)``.  For radially nonincreasing profiles the operator of the lift
reduces to the 1D fractional Laplacian of the even extension, and the 1D
fractional heat flow of the even extension gives the classical solution.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .field import AnalyticField, ScalarField
from .heat1d import Kernel1D, convolve
from .operator import OperatorConfig, frac_lap_1d, ifl

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Profile ``fn`` on ``[0, inf)``, evaluated as its even extension.

    Parameters
    ----------
    fn : callable
        Vectorised function of ``r >= 0``.
    nonincreasing : bool
    far : float
        Limit at infinity.
    breaks : tuple of float
        Radii where ``fn`` jumps.
    bound : float
        Sup-norm bound.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    nonincreasing: bool = False
    far: float = 0.0
    breaks: tuple = ()
    bound: float = np.inf
    name: str = ""

    def __call__(self, r):
        return np.asarray(self.fn(np.abs(np.asarray(r, dtype=float))), dtype=float)

    def spot_check(self, r_max: float = 20.0, n: int = 2001) -> bool:
        """Sample-based check of the ``nonincreasing`` flag."""
        if not self.nonincreasing:
            return True
        v = self(np.linspace(0.0, r_max, n))
        return bool(np.all(np.diff(v) <= 1e-14 * max(1.0, np.max(np.abs(v)))))

    def even_breaks(self) -> list:
        return sorted({b for r in self.breaks for b in (r, -r)})

    def line_breaks(self, r0: float, d: float) -> np.ndarray:
        """Jump distances along ``r0 + eta d`` on the line for the even extension."""
        b = (np.asarray(self.even_breaks(), dtype=float) - r0) / d
        return b[b > 0]


def ray_sphere(x, y, radius: float) -> np.ndarray:
    """Distances ``eta > 0`` with ``|x + eta y| = radius`` (``|y| = 1``)."""
    b = float(np.dot(x, y))
    c = float(np.dot(x, x)) - radius * radius
    disc = b * b - c
    if disc <= 0:
        return np.empty(0)
    q = np.sqrt(disc)
    roots = np.array([-b - q, -b + q])
    return roots[roots > 0]


def lift_radial(p: RadialProfile, dim: int) -> ScalarField:
    """The field ``x -> p(|x|)``; the profile is kept as ``field.profile``."""
    breaks = None
    if p.breaks:
        def breaks(x, y):
            return np.concatenate([ray_sphere(x, y, r) for r in p.breaks])
    f = AnalyticField(lambda x: p(np.sqrt(np.sum(x * x, axis=-1))), dim, p.bound, far=p.far, breaks=breaks,
                      radial=True, radially_nonincreasing=p.nonincreasing, name=p.name or "radial")
    f.profile = p
    return f


@dataclass(frozen=True, eq=False)
class LineProfile:
    """Profile ``fn`` on ``R`` with limits ``(c_-, c_+)`` and jump locations."""

    fn: Callable[[np.ndarray], np.ndarray]
    limits: tuple = (0.0, 0.0)
    breaks: tuple = ()
    bound: float = np.inf
    nondecreasing: bool = False
    name: str = ""

    def __call__(self, r):
        return np.asarray(self.fn(np.asarray(r, dtype=float)), dtype=float)

    def far(self, x, y) -> float:
        """Limit along the 1D ray ``x + eta y``."""
        return self.limits[1] if float(np.ravel(y)[0]) > 0 else self.limits[0]

    def line_breaks(self, r0: float, d: float) -> np.ndarray:
        b = (np.asarray(self.breaks, dtype=float) - r0) / d
        return b[b > 0]


def lift_profile_x1(phi: LineProfile, dim: int) -> ScalarField:
    """The field ``x -> phi(x_1)``; the profile is kept as ``field.profile``."""
    cm, cp = phi.limits

    def far(x, y):
        if y[0] > 0:
            return cp
        if y[0] < 0:
            return cm
        return float(phi(np.array(x[0])))

    breaks = None
    if phi.breaks:
        def breaks(x, y):
            if y[0] == 0:
                return np.empty(0)
            return (np.asarray(phi.breaks, dtype=float) - x[0]) / y[0]

    f = AnalyticField(lambda x: phi(x[..., 0]), dim, phi.bound, far=far, breaks=breaks, profile_1d=True,
                      name=phi.name or "x1-profile")
    f.profile = phi
    return f


def profile_frac_lap(profile, r: float, cfg: OperatorConfig) -> float:
    """1D fractional Laplacian of a :class:`RadialProfile` (even extension) or :class:`LineProfile`."""
    brk = profile.line_breaks if profile.breaks else None
    return frac_lap_1d(profile, r, cfg.s, cfg.pair_quad, far=profile.far, breaks=brk)


def classical_solution(p: RadialProfile, k: Kernel1D, t: float, dim: int, *, r_out: float = 12.0,
                       dr: float = 0.01, y_max: float = 60.0, data_scale: float = 0.25) -> ScalarField:
    """Lift of ``P_s(., t) * p_even`` evaluated at ``r = |x|``.

    The radial profile is tabulated on ``[0, r_out]`` and spline-interpolated;
    larger radii fall back to direct convolution.
    """
    if t == 0:
        return lift_radial(p, dim)
    if not p.nonincreasing:
        raise ValueError("classical radial solutions need a nonincreasing profile")
    brk = p.even_breaks()
    conv = dict(limits=(p.far, p.far), breaks=brk, y_max=y_max, data_scale=data_scale)
    r = np.linspace(0.0, r_out, int(round(r_out / dr)) + 1)
    v = convolve(k, p, t, r, **conv)
    spline = CubicSpline(r, v, bc_type=((1, 0.0), "not-a-knot"))

    def fn(rr):
        rr = np.asarray(rr, dtype=float)
        out = np.empty(rr.shape)
        inside = rr <= r_out
        out[inside] = spline(rr[inside])
        if np.any(~inside):
            out[~inside] = convolve(k, p, t, rr[~inside], **conv)
        return out

    sol = RadialProfile(fn, True, p.far, (), max(abs(v).max(), abs(p.far)), f"u({p.name}, t={t:g})")
    out = lift_radial(sol, dim)
    out.table = (r, v)
    return out


@dataclass
class ReductionReport:
    probes: np.ndarray
    ifl_values: np.ndarray
    oned_values: np.ndarray
    tol: float
    discrepancy: np.ndarray = dc_field(init=False)

    def __post_init__(self):
        self.discrepancy = self.ifl_values - self.oned_values

    @property
    def max_discrepancy(self) -> float:
        return float(np.max(np.abs(self.discrepancy)))

    @property
    def passed(self) -> bool:
        return self.max_discrepancy <= self.tol


def check_reduction(field: ScalarField, probes: Sequence, cfg: OperatorConfig, tol: float = 1e-4,
                    profile: Optional[RadialProfile] = None) -> ReductionReport:
    """Compare ``ifl(field, x)`` with the 1D fractional Laplacian of the even profile at ``|x|``.

    The origin is evaluated with the zero-gradient branch directly.
    """
    profile = profile if profile is not None else getattr(field, "profile", None)
    if profile is None:
        raise ValueError("field carries no radial profile; pass profile=")
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    a, b = [], []
    for x in probes:
        r = float(np.linalg.norm(x))
        a.append(ifl(field, x, cfg, zero_gradient=True if r == 0 else None))
        b.append(profile_frac_lap(profile, r, cfg))
    rep = ReductionReport(probes, np.array(a), np.array(b), tol)
    logger.info("reduction check: max discrepancy %.3e (tol %.1e)", rep.max_discrepancy, tol)
    return rep
