"""Built-in initial data and test fields, addressable by name.

Every factory takes the dimension first and keyword parameters after it, and
returns a :class:`~fracinf.field.ScalarField`.  Radial data carry their profile
as ``field.profile`` and x1-profiles their :class:`LineProfile`.
"""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Dict

import numpy as np

from .field import AnalyticField, ScalarField
from .radial import LineProfile, RadialProfile, lift_profile_x1, lift_radial


def constant(dim: int, value: float = 1.0) -> ScalarField:
    v = float(value)
    return AnalyticField(lambda x: np.full(x.shape[:-1], v), dim, abs(v), far=v, name=f"constant({v:g})")


def gaussian_profile(sigma: float = 1.0, amplitude: float = 1.0) -> RadialProfile:
    return RadialProfile(lambda r: amplitude * np.exp(-(r / sigma) ** 2), amplitude >= 0, 0.0, (), abs(amplitude),
                         f"gaussian(sigma={sigma:g})")


def gaussian(dim: int, sigma: float = 1.0, amplitude: float = 1.0) -> ScalarField:
    """``A exp(-|x|^2 / sigma^2)``."""
    return lift_radial(gaussian_profile(sigma, amplitude), dim)


def mollifier_profile(R0: float = 1.0, amplitude: float = 1.0) -> RadialProfile:
    def fn(r):
        r = np.asarray(r, dtype=float)
        gap = np.maximum(R0 * R0 - r * r, 0.0)
        with np.errstate(divide="ignore", over="ignore"):
            expo = np.where(gap > 0, 1.0 - R0 * R0 / np.where(gap > 0, gap, 1.0), -np.inf)
        return amplitude * np.exp(expo)
    return RadialProfile(fn, True, 0.0, (), abs(amplitude), f"mollifier(R0={R0:g})")


def mollifier(dim: int, R0: float = 1.0, amplitude: float = 1.0) -> ScalarField:
    """``A exp(1 - R0^2 / (R0^2 - |x|^2)_+)``, supported in the closed ball of radius ``R0``."""
    return lift_radial(mollifier_profile(R0, amplitude), dim)


def annulus_profile(R: float = 10.0) -> RadialProfile:
    return RadialProfile(lambda r: ((r > R - 1) & (r < R + 1)).astype(float), False, 0.0, (R - 1.0, R + 1.0), 1.0,
                         f"annulus(R={R:g})")


def annulus(dim: int = 2, R: float = 10.0) -> ScalarField:
    """Indicator of ``B_{R+1} \\ B_{R-1}``."""
    return lift_radial(annulus_profile(R), dim)


def ball_indicator(dim: int, radius: float = 1.0) -> ScalarField:
    p = RadialProfile(lambda r: (r < radius).astype(float), True, 0.0, (float(radius),), 1.0, f"ball({radius:g})")
    return lift_radial(p, dim)


def holder_cone_profile(beta: float = 0.5) -> RadialProfile:
    if not 0 < beta <= 1:
        raise ValueError("beta must lie in (0,1]")
    return RadialProfile(lambda r: np.maximum(1.0 - r, 0.0) ** beta, True, 0.0, (), 1.0, f"cone(beta={beta:g})")


def holder_cone(dim: int, beta: float = 0.5) -> ScalarField:
    """``(1 - |x|)_+^beta``; its Hölder seminorm of order ``beta`` is 1."""
    f = lift_radial(holder_cone_profile(beta), dim)
    f.holder = (beta, 1.0)
    return f


def tanh_profile(scale: float = 1.0) -> LineProfile:
    return LineProfile(lambda r: np.tanh(r / scale), (-1.0, 1.0), (), 1.0, True, f"tanh(x1/{scale:g})")


def tanh_x1(dim: int, scale: float = 1.0) -> ScalarField:
    """``tanh(x_1 / scale)``, nondecreasing in ``x_1``."""
    return lift_profile_x1(tanh_profile(scale), dim)


def even_profile(width: float = 1.0) -> LineProfile:
    return LineProfile(lambda r: np.exp(-(r / width) ** 2), (0.0, 0.0), (), 1.0, False, f"even(width={width:g})")


def even_x1(dim: int = 2, width: float = 1.0) -> ScalarField:
    """``exp(-x_1^2 / width^2)``: even in ``x_1``, strictly decreasing for ``x_1 > 0``."""
    return lift_profile_x1(even_profile(width), dim)


def tilted_bump(dim: int, tilt: float = 0.4) -> ScalarField:
    """``(1 + tilt tanh(x_1)) exp(-|x - c|^2)`` with an off-centre ``c``; not radial."""
    c = np.zeros(dim)
    c[0] = 0.3
    if dim > 1:
        c[1] = -0.2

    def rule(x):
        return (1.0 + tilt * np.tanh(x[..., 0])) * np.exp(-np.sum((x - c) ** 2, axis=-1))

    return AnalyticField(rule, dim, 1.0 + abs(tilt), far=0.0, name=f"tilted_bump({tilt:g})")


# ------------------------------------------------- non-solution test function


@lru_cache(maxsize=1)
def _bridge_coefficients() -> np.ndarray:
    """Quintic ``q(u)`` on ``[0,1]`` joining ``r^2`` at ``r = 1`` to 0 at ``r = 2`` in ``C^2``."""
    # q(0)=1, q'(0)=2, q''(0)=2 fix a0..a2; the three conditions at u=1 fix a3..a5
    A = np.array([[1, 1, 1], [3, 4, 5], [6, 12, 20]], dtype=float)
    rhs = -np.array([1 + 2 + 1, 2 + 2, 2], dtype=float)
    a345 = np.linalg.solve(A, rhs)
    return np.concatenate([[1.0, 2.0, 1.0], a345])


def psi(r) -> np.ndarray:
    """``r^2`` for ``|r| < 1``, a quintic bridge on ``[1, 2]``, 0 beyond."""
    r = np.abs(np.asarray(r, dtype=float))
    a = _bridge_coefficients()
    u = r - 1.0
    bridge = np.polynomial.polynomial.polyval(u, a)
    return np.where(r < 1, r * r, np.where(r < 2, bridge, 0.0))


def psi_second_derivative_sup(n: int = 20001) -> float:
    a = _bridge_coefficients()
    d2 = np.polynomial.polynomial.polyder(a, 2)
    u = np.linspace(0.0, 1.0, n)
    return float(max(2.0, np.max(np.abs(np.polynomial.polynomial.polyval(u, d2)))))


def remark_test_function(dim: int = 2, K: float = 0.1, t0: float = 2 * math.pi) -> ScalarField:
    """Spatial slice at ``t = t0`` of ``2 sin t + K psi(|x|) + psi(t - t0)``."""
    base = 2 * math.sin(t0)
    top = float(np.max(psi(np.linspace(1.0, 2.0, 2001))))
    p = RadialProfile(lambda r: base + K * psi(r), False, base, (), abs(base) + K * top, f"remark(K={K:g})")
    return lift_radial(p, dim)


# ------------------------------------------------------------------ registry

CATALOG: Dict[str, Callable[..., ScalarField]] = {
    "constant": constant,
    "gaussian": gaussian,
    "mollifier": mollifier,
    "annulus": annulus,
    "ball": ball_indicator,
    "cone": holder_cone,
    "tanh": tanh_x1,
    "even": even_x1,
    "tilted": tilted_bump,
}


def make_datum(name: str, dim: int, **params) -> ScalarField:
    try:
        factory = CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown datum {name!r}; known: {', '.join(sorted(CATALOG))}") from None
    return factory(dim, **params)
