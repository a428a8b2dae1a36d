"""Quadrature for singular-tail integrals against ``d eta / eta^(1+2s)``.

Panels are geometric in ``eta``: their widths grow proportionally to ``eta`` so
the algebraic weight is resolved uniformly on every decade.  Each panel carries
an ``nodes_per_panel``-point Gauss-Legendre rule.

Integrals starting at 0 (second differences of C^{1,1} functions) split at a
small radius ``eta0``.  On ``[0, eta0]`` the difference quotient
``D(eta) / eta^2`` is fitted by a quadratic through three samples and the
resulting power integrals are done in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np

from .field import ScalarField

TAIL_CONSTANT = "constant"
TAIL_ZERO = "zero"


class IntegrabilityError(ArithmeticError):
    """The integrand does not vanish quadratically at eta = 0 (not C^{1,1})."""


class TailModeError(ValueError):
    pass


def check_s(s: float) -> float:
    s = float(s)
    if not 0.5 < s < 1.0:
        raise ValueError(f"s must lie in (1/2,1), got {s}")
    return s


def tail_weight(eps: float, s: float) -> float:
    """``int_eps^inf eta^(-1-2s) d eta = eps^(-2s) / (2s)``."""
    check_s(s)
    if not eps > 0:
        raise ValueError("eps must be positive")
    return eps ** (-2 * s) / (2 * s)


@dataclass(frozen=True)
class QuadRule:
    """Panel layout for ``int_eps^cut``; the part beyond ``cut`` is a tail model.

    ``max_width`` caps panel widths, useful for oscillatory or kinked integrands.
    For integrals from 0, ``eps`` plays the role of the near-zero radius.
    """

    eps: float
    cut: float = 100.0
    panels_per_decade: int = 16
    nodes_per_panel: int = 8
    tail_mode: str = TAIL_CONSTANT
    max_width: Optional[float] = None

    def __post_init__(self):
        if not (0 < self.eps < self.cut):
            raise ValueError(f"need 0 < eps < cut, got eps={self.eps}, cut={self.cut}")
        if self.panels_per_decade < 1 or self.nodes_per_panel < 1:
            raise ValueError("panel counts must be positive")
        if self.tail_mode not in (TAIL_CONSTANT, TAIL_ZERO):
            raise ValueError(f"unknown tail mode {self.tail_mode!r}")

    def refined(self, factor: int = 2) -> "QuadRule":
        return QuadRule(self.eps, self.cut, self.panels_per_decade * factor,
                        self.nodes_per_panel, self.tail_mode, self.max_width)

    def edges(self, breakpoints=()) -> np.ndarray:
        return _edges(self.eps, self.cut, self.panels_per_decade, self.max_width,
                      tuple(sorted(float(b) for b in breakpoints)))

    def nodes(self, s: float, breakpoints=()) -> tuple[np.ndarray, np.ndarray]:
        """Quadrature nodes ``eta_k`` and weights ``w_k`` including ``eta^(-1-2s)``."""
        bps = tuple(sorted(round(float(b), 15) for b in breakpoints if self.eps < b < self.cut))
        return _nodes(self.eps, self.cut, self.panels_per_decade, self.nodes_per_panel,
                      self.max_width, float(s), bps)


@lru_cache(maxsize=256)
def _edges(eps, cut, ppd, max_width, bps):
    ndec = math.log10(cut / eps)
    npan = max(1, int(math.ceil(ndec * ppd)))
    edges = eps * (cut / eps) ** (np.arange(npan + 1) / npan)
    edges[0], edges[-1] = eps, cut
    if max_width is not None:
        pieces = [edges[:1]]
        for a, b in zip(edges[:-1], edges[1:]):
            k = max(1, int(math.ceil((b - a) / max_width)))
            pieces.append(np.linspace(a, b, k + 1)[1:])
        edges = np.concatenate(pieces)
    if bps:
        inner = [b for b in bps if eps < b < cut]
        edges = np.union1d(edges, inner)
        # drop slivers created by snapping next to an existing edge
        keep = np.concatenate([[True], np.diff(edges) > 1e-12 * edges[1:]])
        edges = edges[keep]
        for b in inner:
            edges[np.argmin(np.abs(edges - b))] = b
    edges.setflags(write=False)
    return edges


@lru_cache(maxsize=16)
def _gauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


@lru_cache(maxsize=512)
def _nodes(eps, cut, ppd, npp, max_width, s, bps):
    edges = _edges(eps, cut, ppd, max_width, bps)
    gx, gw = _gauss(npp)
    a, b = edges[:-1, None], edges[1:, None]
    eta = (0.5 * (b - a) * gx + 0.5 * (b + a)).ravel()
    w = (0.5 * (b - a) * gw).ravel() * eta ** (-1.0 - 2.0 * s)
    eta.setflags(write=False)
    w.setflags(write=False)
    return eta, w


# -------------------------------------------------------------- near zero


_NEAR_FRACTIONS = np.array([0.25, 0.5, 1.0])


@lru_cache(maxsize=128)
def near_weights(eta0: float, s: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for ``int_0^eta0 D(eta) eta^(-1-2s)`` from three samples.

    ``D(eta)/eta^2`` is taken to be the quadratic through the samples, which is
    exact for Taylor expansions ``a eta^2 + b eta^3 + c eta^4``.
    """
    eta = eta0 * _NEAR_FRACTIONS
    # moments of eta^k on [0, eta0] against eta^(1-2s)
    mom = np.array([eta0 ** (2 - 2 * s + k) / (2 - 2 * s + k) for k in range(3)])
    # q(eta) = sum_k c_k eta^k with c = V^{-1} (D_i / eta_i^2)
    V = np.vander(eta, 3, increasing=True)
    w = np.linalg.solve(V.T, mom) / eta ** 2
    eta.setflags(write=False)
    w.setflags(write=False)
    return eta, w


def _divergence_flags(d_near: np.ndarray, eta0: float, s: float, scale: float) -> np.ndarray:
    """Flag rays whose near-zero samples grow like ``eta`` rather than ``eta^2``.

    Compares ``|D| eta^(-2s)`` at ``eta0/4`` and ``eta0``.  C^{1,1} integrands give
    a ratio near ``4^(2s-2)``, linear ones ``4^(2s-1)``; the threshold sits at the
    geometric mean.
    """
    lo = np.abs(d_near[..., 0]) * (0.25 * eta0) ** (-2 * s)
    hi = np.abs(d_near[..., 2]) * eta0 ** (-2 * s)
    floor = 1e-12 * max(scale, 1e-300)
    return (np.abs(d_near[..., 0]) > floor) & (lo > 4.0 ** (2 * s - 1.5) * hi)


# ------------------------------------------------------------ ray integrals


def _tail_value(field: ScalarField, x, y, rule: QuadRule, s: float, phi_x: float) -> float:
    if rule.tail_mode == TAIL_ZERO:
        return 0.0
    c = field.far_value(x, y)
    if c is None:
        raise TailModeError(
            "constant tail requires a field with a constant far field "
            f"(got {type(field).__name__}); use tail_mode='zero'")
    return (c - phi_x) * rule.cut ** (-2 * s) / (2 * s)


def ray_integrals(field: ScalarField, x, dirs: np.ndarray, rule: QuadRule, s: float) -> np.ndarray:
    """``int_eps^inf (phi(x+eta y) - phi(x)) eta^(-1-2s)`` for every row ``y`` of ``dirs``."""
    x = np.asarray(x, dtype=float)
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    phi_x = float(field(x))
    tails = np.array([_tail_value(field, x, y, rule, s, phi_x) for y in dirs])
    bps = [field.breakpoints(x, y) for y in dirs]
    if not any(len(b) for b in bps):
        eta, w = rule.nodes(s)
        vals = field(x + eta[None, :, None] * dirs[:, None, :])
        return (vals - phi_x) @ w + tails
    out = np.empty(len(dirs))
    for i, (y, b) in enumerate(zip(dirs, bps)):
        eta, w = rule.nodes(s, b)
        out[i] = (field(x + eta[:, None] * y) - phi_x) @ w
    return out + tails


def integrate_ray(field: ScalarField, x, y, rule: QuadRule, s: float) -> float:
    """``int_eps^inf (phi(x + eta y) - phi(x)) d eta / eta^(1+2s)``.

    The tail beyond ``rule.cut`` is ``(c - phi(x)) cut^(-2s) / (2s)`` under the
    constant tail mode, where ``c`` is the field's far value along the ray.
    """
    check_s(s)
    y = np.asarray(y, dtype=float)
    if abs(np.linalg.norm(y) - 1.0) > 1e-12:
        raise ValueError("direction must be a unit vector")
    return float(ray_integrals(field, x, y[None, :], rule, s)[0])


class OneSided(NamedTuple):
    values: np.ndarray
    error: np.ndarray
    diverging: np.ndarray


def onesided_integrals(field: ScalarField, x, dirs: np.ndarray, rule: QuadRule, s: float) -> OneSided:
    """``int_0^inf (phi(x+eta y) - phi(x)) eta^(-1-2s)`` per direction.

    Only finite when the field is flat to second order at ``x`` along ``y``.
    ``diverging`` flags rays where that visibly fails; ``error`` is a crude
    estimate from the quadratic near-zero model (its last coefficient).
    """
    x = np.asarray(x, dtype=float)
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    phi_x = float(field(x))
    eta0 = rule.eps
    ne, nw = near_weights(eta0, s)
    d_near = field(x + ne[None, :, None] * dirs[:, None, :]) - phi_x
    near = d_near @ nw
    far = ray_integrals(field, x, dirs, rule, s)
    flags = _divergence_flags(d_near, eta0, s, max(abs(phi_x), field.bound if np.isfinite(field.bound) else 1.0))
    q = d_near / ne ** 2
    err = np.abs(q[:, 2] - 2 * q[:, 1] + q[:, 0]) * eta0 ** (2 - 2 * s)
    return OneSided(near + far, err, flags)


def integrate_pair(field: ScalarField, x, y, s: float, rule: QuadRule, full_output: bool = False):
    """``int_0^inf (phi(x+eta y) + phi(x-eta y) - 2 phi(x)) d eta / eta^(1+2s)``.

    Raises
    ------
    IntegrabilityError
        When the near-zero samples show the second difference is not O(eta^2).
    """
    check_s(s)
    y = np.asarray(y, dtype=float)
    res = onesided_integrals(field, x, np.stack([y, -y]), rule, s)
    ne, _ = near_weights(rule.eps, s)
    # the pair cancels first-order terms, so check the symmetric difference itself
    phi_x = float(field(x))
    d2 = field(x + ne[:, None] * y) + field(x - ne[:, None] * y) - 2 * phi_x
    scale = max(abs(phi_x), field.bound if np.isfinite(field.bound) else 1.0)
    if _divergence_flags(d2[None, :], rule.eps, s, scale)[0]:
        raise IntegrabilityError(f"second difference at x={np.asarray(x).tolist()} along {y.tolist()} "
                                 "is not O(eta^2); field is not C^{1,1} there")
    value = float(res.values.sum())
    if full_output:
        return value, float(res.error.sum())
    return value
