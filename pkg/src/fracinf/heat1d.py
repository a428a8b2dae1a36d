"""One-dimensional fractional heat kernel and convolution solutions.

The kernel is self-similar, ``P_s(x, t) = t^(-1/(2s)) F(|x| t^(-1/(2s)))``, with
profile

    F(r) = (1/pi) int_0^inf cos(r xi) exp(-xi^(2s)) d xi.

``F`` is tabulated by Gauss-Legendre panel quadrature in ``xi``: geometric
panels near ``xi = 0`` (where ``exp(-xi^(2s))`` is not smooth) and panels of
width at most ``~2.5/r`` further out to resolve the oscillation.  Between table
nodes a clamped cubic spline is used; beyond ``r_max`` the algebraic tail
``c (1 + r^2)^(-(1+2s)/2)`` continues the table continuously.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import beta, betainc

logger = logging.getLogger(__name__)

_GL_NODES = 16
_CHUNK = 512


def _check_s_kernel(s: float, allow_cauchy: bool) -> float:
    s = float(s)
    lo_ok = s > 0.5 or (allow_cauchy and s == 0.5)
    if not (lo_ok and s < 1.0):
        raise ValueError(f"s must lie in (1/2,1), got {s}")
    return s


def _xi_cutoff(s: float) -> float:
    """Smallest ``Xi`` with ``exp(-Xi^(2s)) < 1e-16``."""
    return (-math.log(1e-16)) ** (1.0 / (2 * s)) * (1 + 1e-9)


def _gl_panels(edges: np.ndarray, n: int = _GL_NODES):
    gx, gw = np.polynomial.legendre.leggauss(n)
    a, b = edges[:-1, None], edges[1:, None]
    x = (0.5 * (b - a) * gx + 0.5 * (a + b)).ravel()
    w = (0.5 * (b - a) * gw).ravel()
    return x, w


def _xi_rule(s: float, r_hi: float):
    xi_max = _xi_cutoff(s)
    a0 = 1e-10
    geo = a0 * 2.0 ** np.arange(0, int(math.ceil(math.log2(1.0 / a0))) + 1)
    geo = geo[geo < 1.0]
    width = min(0.25, 2.5 / max(r_hi, 1e-300))
    n_uni = int(math.ceil((xi_max - 1.0) / width))
    uni = np.linspace(1.0, xi_max, n_uni + 1)
    # split geometric panels that are too wide for the oscillation
    edges = [geo[0]]
    for a, b in zip(np.append(geo, 1.0)[:-1], np.append(geo, 1.0)[1:]):
        k = max(1, int(math.ceil((b - a) / width)))
        edges.extend(np.linspace(a, b, k + 1)[1:])
    edges = np.concatenate([edges, uni[1:]])
    xi, w = _gl_panels(edges)
    return a0, xi, w * np.exp(-xi ** (2 * s))


def profile_values(s: float, r: np.ndarray) -> np.ndarray:
    """``F(r)`` by direct Fourier inversion (no table)."""
    s = _check_s_kernel(s, allow_cauchy=True)
    r = np.abs(np.asarray(r, dtype=float))
    out = np.empty(r.shape)
    flat, res = r.ravel(), out.ravel()
    order = np.argsort(flat)
    for lo in range(0, len(order), _CHUNK):
        idx = order[lo:lo + _CHUNK]
        rr = flat[idx]
        a0, xi, w = _xi_rule(s, rr.max())
        head = np.where(rr > 0, np.sin(rr * a0) / np.where(rr > 0, rr, 1.0), a0)
        res[idx] = (np.cos(np.outer(rr, xi)) @ w + head) / np.pi
    return out


@dataclass(frozen=True, eq=False)
class Kernel1D:
    """Tabulated profile of the fractional heat kernel.

    Attributes
    ----------
    s : float
    r, F : ndarray
        Table nodes on ``[0, r_max]`` and profile values.
    c_tail : float
        Constant of the algebraic tail matched at ``r_max``.
    tail_constants : (float, float)
        Measured ``(c1, c2)`` with ``c1 <= F(r) (1+r^2)^((1+2s)/2) <= c2``.
    """

    s: float
    r: np.ndarray
    F: np.ndarray
    c_tail: float
    tail_constants: tuple
    spline: CubicSpline
    antiderivative: object

    @property
    def r_max(self) -> float:
        return float(self.r[-1])

    @property
    def dr(self) -> float:
        return float(self.r[1] - self.r[0])

    @property
    def p(self) -> float:
        """Tail exponent ``(1+2s)/2``."""
        return (1 + 2 * self.s) / 2

    def profile(self, rho) -> np.ndarray:
        rho = np.abs(np.asarray(rho, dtype=float))
        inside = rho <= self.r_max
        out = np.empty(rho.shape)
        out[inside] = self.spline(rho[inside])
        out[~inside] = self.c_tail * (1 + rho[~inside] ** 2) ** (-self.p)
        return out

    def cdf(self, z) -> np.ndarray:
        """``int_{-inf}^z F(r) dr`` for the tabulated-plus-tail profile."""
        z = np.asarray(z, dtype=float)
        a = np.abs(z)
        half = 0.5 * self.mass()
        inside = a <= self.r_max
        part = np.empty(a.shape)
        part[inside] = self.antiderivative(a[inside])
        part[~inside] = half - self._tail_integral(a[~inside])
        return np.where(z >= 0, half + part, half - part)

    def _tail_integral(self, z):
        """``int_z^inf c (1+r^2)^(-p) dr``."""
        p = self.p
        u = 1.0 / (1.0 + np.asarray(z, dtype=float) ** 2)
        return self.c_tail * 0.5 * beta(p - 0.5, 0.5) * betainc(p - 0.5, 0.5, u)

    @lru_cache(maxsize=1)
    def mass(self) -> float:
        """Total mass ``int_R F``."""
        return float(2 * (self.antiderivative(self.r_max) + self._tail_integral(self.r_max)))


@lru_cache(maxsize=8)
def build_profile(s: float, r_max: float = 100.0, dr: float = 0.01, *, allow_cauchy: bool = False) -> Kernel1D:
    """Tabulate ``F`` on ``[0, r_max]`` with spacing ``dr``.

    ``allow_cauchy`` admits ``s = 1/2``, where ``F(r) = 1/(pi (1+r^2))``,
    for validating the inversion routine.

    Raises
    ------
    ValueError
        If ``F`` comes out negative beyond rounding or not strictly decreasing.
    """
    s = _check_s_kernel(s, allow_cauchy)
    n = int(round(r_max / dr))
    if n < 4 or not math.isclose(n * dr, r_max, rel_tol=1e-9):
        raise ValueError("r_max must be a multiple of dr with at least 4 intervals")
    r = np.linspace(0.0, r_max, n + 1)
    F = profile_values(s, r)
    if np.any(F <= 0):
        raise ValueError(f"profile not positive (min {F.min():.3e}); inversion unresolved")
    if np.any(np.diff(F) >= 0):
        k = int(np.argmax(np.diff(F) >= 0))
        raise ValueError(f"profile not strictly decreasing near r={r[k]:.4g}")
    spline = CubicSpline(r, F, bc_type=((1, 0.0), "not-a-knot"))
    p = (1 + 2 * s) / 2
    c_tail = float(F[-1] * (1 + r_max ** 2) ** p)
    fine = np.linspace(0.0, r_max, 8 * n + 1)
    ratio = spline(fine) * (1 + fine ** 2) ** p
    c1, c2 = float(min(ratio.min(), c_tail)), float(max(ratio.max(), c_tail))
    logger.info("built kernel profile s=%g r_max=%g dr=%g: F(0)=%.12g c_tail=%.6g", s, r_max, dr, F[0], c_tail)
    return Kernel1D(s, r, F, c_tail, (c1, c2), spline, spline.antiderivative())


def kernel_eval(k: Kernel1D, x, t) -> np.ndarray:
    """``P_s(x, t) = t^(-1/(2s)) F(|x| t^(-1/(2s)))``."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    sc = t ** (-1.0 / (2 * k.s))
    return sc * k.profile(np.asarray(x, dtype=float) * sc)


def kernel_dt(k: Kernel1D, x, t, h: Optional[float] = None) -> np.ndarray:
    """Central finite difference of ``P_s`` in ``t``."""
    t = float(t)
    h = 1e-4 * t if h is None else h
    return (kernel_eval(k, x, t + h) - kernel_eval(k, x, t - h)) / (2 * h)


def algebraic_shape(x, t, s: float) -> np.ndarray:
    """``t / (t^(1/s) + x^2)^((1+2s)/2)``."""
    x = np.asarray(x, dtype=float)
    return t / (t ** (1 / s) + x * x) ** ((1 + 2 * s) / 2)


# ------------------------------------------------------------- convolution


def _graded_edges(center: float, lo: float, hi: float, fine: float, coarse: float, breaks=()) -> np.ndarray:
    """Panel edges on ``[lo, hi]`` growing geometrically away from ``center``."""
    offs = [0.0]
    d = fine
    while offs[-1] < hi - lo:
        offs.append(offs[-1] + d)
        d = min(coarse, d * 1.5)
    offs = np.asarray(offs)
    pts = np.concatenate([center - offs, center + offs, [lo, hi], np.asarray(breaks, dtype=float)])
    pts = pts[(pts >= lo) & (pts <= hi)]
    pts = np.unique(pts)
    keep = np.concatenate([[True], np.diff(pts) > 1e-12 * max(1.0, hi - lo)])
    return pts[keep]


def convolve(k: Kernel1D, U0: Callable, t: float, out_grid, *, limits=(0.0, 0.0), breaks: Sequence[float] = (),
             y_max: float = 60.0, data_scale: float = 0.25) -> np.ndarray:
    """``(P_s(., t) * U0)(x)`` at each ``x`` of ``out_grid``.

    ``U0`` is split as ``c_- + (c_+ - c_-) H(y) + R(y)`` with ``limits = (c_-, c_+)``
    and ``H`` the unit step; the step part is the kernel's distribution function
    (normalised to unit mass) and the decaying remainder ``R`` is integrated on ``[-y_max, y_max]`` with
    panels graded towards ``y = x``.

    Parameters
    ----------
    breaks : sequence of float
        Locations where ``U0`` is not smooth.
    data_scale : float
        Largest panel width, should resolve ``U0``.
    """
    xs = np.atleast_1d(np.asarray(out_grid, dtype=float))
    t = float(t)
    if t < 0:
        raise ValueError("t must be nonnegative")
    cm, cp = map(float, limits)
    if t == 0:
        return np.asarray(U0(xs), dtype=float)
    width = t ** (1.0 / (2 * k.s))
    bks = list(breaks) + ([0.0] if cp != cm else [])

    def remainder(y):
        return np.asarray(U0(y), dtype=float) - cm - (cp - cm) * (y >= 0)

    out = np.empty(len(xs))
    for i, x in enumerate(xs):
        e = _graded_edges(x, -y_max, y_max, min(0.1 * width, data_scale), data_scale, bks)
        y, w = _gl_panels(e)
        out[i] = (kernel_eval(k, x - y, t) * remainder(y)) @ w
    # the exact kernel has unit mass; normalising keeps constants exact
    out += cm
    if cp != cm:
        out += (cp - cm) * k.cdf(xs / width) / k.mass()
    return out


def l1_norm(v0: Callable, *, breaks: Sequence[float] = (), y_max: float = 60.0, data_scale: float = 0.25) -> float:
    e = _graded_edges(0.0, -y_max, y_max, data_scale, data_scale, breaks)
    y, w = _gl_panels(e)
    return float(np.abs(np.asarray(v0(y), dtype=float)) @ w)


def harnack_constants(v0: Callable, R: float, t_probe, x_probe, k: Kernel1D, *, breaks: Sequence[float] = (),
                      y_max: float = 60.0, data_scale: float = 0.25):
    """Measured ``(k1, k2)``: min and max of ``v(x,t) / (||v0||_1 P_s(x,t))`` over the probes.

    Raises
    ------
    ValueError
        If ``v0`` violates the decay hypothesis outside ``B_R`` or is identically 0.
    ArithmeticError
        If a ratio is not finite and positive.
    """
    probe = np.linspace(R, y_max, 257)
    probe = np.concatenate([probe, -probe])
    v = np.asarray(v0(probe), dtype=float)
    if np.any(v < 0) or np.any(v > (1 + probe ** 2) ** (-k.p) * (1 + 1e-12)):
        raise ValueError("v0 must satisfy 0 <= v0 <= (1+|x|^2)^(-(1+2s)/2) for |x| >= R")
    mass = l1_norm(v0, breaks=breaks, y_max=y_max, data_scale=data_scale)
    if not mass > 0:
        raise ValueError("v0 must not vanish identically")
    xs = np.asarray(x_probe, dtype=float)
    ratios = []
    for t in t_probe:
        v_t = convolve(k, v0, t, xs, breaks=breaks, y_max=y_max, data_scale=data_scale)
        ratios.append(v_t / (mass * kernel_eval(k, xs, t)))
    ratios = np.concatenate(ratios)
    if not np.all(np.isfinite(ratios)) or np.any(ratios <= 0):
        raise ArithmeticError("nonpositive or non-finite Harnack ratio")
    return float(ratios.min()), float(ratios.max())
