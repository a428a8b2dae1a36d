"""Explicit time stepping ``U^{j+1} = U^j + tau L_eps[U^j]`` on grid fields.

Two evaluation paths compute the same update:

``fft``     For a node ``x`` and a direction ``y`` the quadrature points
            ``x + eta_k y`` sit at offsets ``eta_k y / h`` from ``x`` that do not
            depend on ``x``.  Their multilinear interpolation weights therefore
            form a fixed stencil per direction, and the ray sums over all nodes
            are one convolution, done with zero-padded FFTs.
``direct``  :func:`fracinf.operator.L_eps` at every node.  Slow, but works with
            every extension policy; used for cross-checks.

With ``tau = theta s eps^(2s) / C_s`` the coefficient of ``U^j(x)`` in the
update is ``1 - theta`` plus nonnegative stencil weights, so for ``theta <= 1``
the map is monotone and the discrete comparison, stability and contraction
properties hold up to rounding.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field as dc_field, replace
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy import fft as sfft
from scipy.integrate import trapezoid

from .field import ConstantFarField, GridSpec, ScalarField, SampledField, sample, _SNAP
from .operator import OperatorConfig, L_eps
from .quad import tail_weight

logger = logging.getLogger(__name__)

METHODS = ("fft", "direct")
_KERNEL_CACHE_BYTES = 1.5e9


class NumericalAbort(ArithmeticError):
    """Non-finite values produced by a step."""


def cfl_tau(s: float, eps: float, C_s: float, theta: float) -> float:
    """``tau = theta s eps^(2s) / C_s``; ``theta <= 1`` is the CFL condition."""
    if not theta > 0:
        raise ValueError("theta must be positive")
    return theta * s * eps ** (2 * s) / C_s


@dataclass(frozen=True, eq=False)
class SchemeConfig:
    """Parameters of one run.

    ``allow_cfl_violation`` admits ``theta > 1``; only meant for probing the
    CFL condition.
    """

    op: OperatorConfig
    grid: GridSpec
    theta: float = 0.5
    T: float = 0.25
    ext: object = ConstantFarField(0.0)
    monitor_flags: frozenset = frozenset({"sup", "mass"})
    snapshot_times: tuple = ()
    method: str = "fft"
    workers: int = 1
    batch: int = 32
    allow_cfl_violation: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if not self.theta > 0 or (self.theta > 1 and not self.allow_cfl_violation):
            raise ValueError(f"theta must lie in (0,1] for the CFL condition, got {self.theta}")
        if self.T < 0:
            raise ValueError("T must be nonnegative")
        if self.grid.dim != self.op.dim:
            raise ValueError("grid and direction set dimensions differ")
        if self.method == "fft" and not isinstance(self.ext, ConstantFarField):
            raise ValueError("the fft path needs a ConstantFarField extension")
        if any(t < 0 or t > self.T for t in self.snapshot_times):
            raise ValueError("snapshot times must lie in [0, T]")

    @property
    def tau(self) -> float:
        return cfl_tau(self.op.s, self.op.eps, self.op.C_s, self.theta)

    @property
    def n_steps(self) -> int:
        if self.T == 0:
            return 0
        n = math.ceil(self.T / self.tau - 1e-12)
        return max(n, 1)


@dataclass
class SchemeState:
    j: int
    t: float
    U: SampledField
    monitors: dict = dc_field(default_factory=dict)


@dataclass
class Trajectory:
    cfg: SchemeConfig
    times: list
    values: list
    monitors: list
    wall: list
    snapshots: dict = dc_field(default_factory=dict)

    @property
    def tau(self) -> float:
        return self.cfg.tau

    def state(self, j: int) -> SchemeState:
        return SchemeState(j, self.times[j], self.field(j), self.monitors[j])

    def field(self, j: int) -> SampledField:
        return SampledField(self.cfg.grid, self.values[j], self.cfg.ext)

    @property
    def final(self) -> SampledField:
        return self.field(len(self.values) - 1)

    def __len__(self):
        return len(self.values)


# ------------------------------------------------------------ stencil bank


def _stencil_offsets(eta: np.ndarray, w: np.ndarray, y: np.ndarray, h: np.ndarray, counts: np.ndarray):
    """Offsets and weights of the multilinear stencil for ray sums along ``y``."""
    q = eta[:, None] * y[None, :] / h
    near = np.rint(q)
    q = np.where(np.abs(q - near) < _SNAP, near, q)
    base = np.floor(q)
    frac = q - base
    base = base.astype(np.int64)
    dim = len(h)
    offs, wts = [], []
    for corner in range(2 ** dim):
        bits = np.array([(corner >> k) & 1 for k in range(dim)])
        wc = w * np.prod(np.where(bits, frac, 1.0 - frac), axis=1)
        oc = base + bits
        keep = (wc > 0) & np.all(np.abs(oc) <= counts - 1, axis=1)
        offs.append(oc[keep])
        wts.append(wc[keep])
    return np.concatenate(offs), np.concatenate(wts)


class StencilBank:
    """FFTs of the per-direction stencils on a zero-padded grid.

    Sums ``S_d(x) = sum_o K_d[o] V[x + o]`` over nodes become products in
    Fourier space; padding to at least ``2m - 1`` per axis removes wraparound.
    """

    def __init__(self, grid: GridSpec, op: OperatorConfig, workers: int = 1):
        self.grid = grid
        self.counts = np.asarray(grid.counts)
        self.pad = tuple(int(sfft.next_fast_len(2 * m - 1, real=True)) for m in grid.counts)
        self.workers = workers
        self.eta, self.w = op.quad.nodes(op.s)
        self.dirs = op.dirs.vectors
        self.h = grid.spacing
        self.center = np.zeros(len(self.dirs))
        nfreq = int(np.prod(self.pad[:-1])) * (self.pad[-1] // 2 + 1)
        self.cached = len(self.dirs) * nfreq * 16 <= _KERNEL_CACHE_BYTES
        self._fft = None
        if self.cached:
            self._fft = np.stack([self._kernel_fft(d) for d in range(len(self.dirs))])
        logger.debug("stencil bank: %d directions, pad %s, cached=%s", len(self.dirs), self.pad, self.cached)

    def _kernel_real(self, d: int) -> np.ndarray:
        offs, wts = _stencil_offsets(self.eta, self.w, self.dirs[d], self.h, self.counts)
        K = np.zeros(self.pad)
        # flipped so that a convolution computes sum_o K[o] V[x + o]
        idx = tuple(((-offs) % np.asarray(self.pad)).T)
        np.add.at(K, idx, wts)
        self.center[d] = K[(0,) * len(self.pad)]
        return K

    def _kernel_fft(self, d: int) -> np.ndarray:
        return sfft.rfftn(self._kernel_real(d), s=self.pad, workers=self.workers)

    def kernels(self, sl: slice) -> np.ndarray:
        if self._fft is not None:
            return self._fft[sl]
        return np.stack([self._kernel_fft(d) for d in range(*sl.indices(len(self.dirs)))])

    def ray_sums(self, V: np.ndarray, batch: int = 32):
        """Yield ``(slice, S)`` with ``S[d] = sum_o K_d[o] V[x + o]`` for a batch of directions."""
        Vf = sfft.rfftn(V, s=self.pad, workers=self.workers)
        crop = (slice(None),) + tuple(slice(0, m) for m in self.counts)
        axes = tuple(range(1, len(self.pad) + 1))
        for lo in range(0, len(self.dirs), batch):
            sl = slice(lo, min(lo + batch, len(self.dirs)))
            S = sfft.irfftn(self.kernels(sl) * Vf[None], s=self.pad, axes=axes, workers=self.workers)
            yield sl, S[crop]


@lru_cache(maxsize=4)
def _bank(grid: GridSpec, op: OperatorConfig, workers: int) -> StencilBank:
    return StencilBank(grid, op, workers)


def stencil_bank(cfg: SchemeConfig) -> StencilBank:
    return _bank(cfg.grid, cfg.op, cfg.workers)


# ------------------------------------------------------------------ steps


def l_eps_grid(U: SampledField, cfg: SchemeConfig) -> np.ndarray:
    """``L_eps[U]`` at every node of ``cfg.grid``."""
    op = cfg.op
    if cfg.method == "direct":
        nodes = cfg.grid.mesh().reshape(-1, cfg.grid.dim)
        out = np.array([L_eps(U, x, op) for x in nodes])
        return out.reshape(cfg.grid.shape)
    c = float(cfg.ext.value)
    bank = stencil_bank(cfg)
    Wd = tail_weight(op.eps, op.s)
    V = U.values - c
    hi = np.full(cfg.grid.shape, -np.inf)
    lo = np.full(cfg.grid.shape, np.inf)
    for sl, S in bank.ray_sums(V, cfg.batch):
        I = S - V[None] * Wd
        np.maximum(hi, I.max(axis=0), out=hi)
        np.minimum(lo, I.min(axis=0), out=lo)
    return op.C_s * (hi + lo)


def step(state: SchemeState, cfg: SchemeConfig) -> SchemeState:
    """One explicit step; returns a new state (the input is not modified)."""
    L = l_eps_grid(state.U, cfg)
    new = state.U.values + cfg.tau * L
    if not np.all(np.isfinite(new)):
        k = np.argwhere(~np.isfinite(new))[0]
        raise NumericalAbort(f"non-finite value at node {cfg.grid.node(k).tolist()} in step {state.j + 1}")
    U = state.U.with_values(new)
    j = state.j + 1
    return SchemeState(j, j * cfg.tau, U, _monitor_values(U, cfg))


def _monitor_values(U: SampledField, cfg: SchemeConfig) -> dict:
    out = {}
    if "sup" in cfg.monitor_flags:
        out["sup"] = float(np.max(np.abs(U.values)))
    if "mass" in cfg.monitor_flags:
        v = U.values - (cfg.ext.value if isinstance(cfg.ext, ConstantFarField) else 0.0)
        for ax, hx in enumerate(cfg.grid.spacing):
            v = trapezoid(v, dx=hx, axis=0)
        out["mass"] = float(v)
    return out


def initial_state(u0: ScalarField, cfg: SchemeConfig) -> SchemeState:
    U = u0 if isinstance(u0, SampledField) and u0.spec == cfg.grid else sample(u0, cfg.grid, cfg.ext)
    if isinstance(U, SampledField) and U.ext != cfg.ext:
        U = SampledField(cfg.grid, U.values, cfg.ext)
    return SchemeState(0, 0.0, U, _monitor_values(U, cfg))


def evolve(u0: ScalarField, cfg: SchemeConfig) -> Trajectory:
    """Run ``ceil(T / tau)`` steps from ``u0`` sampled on ``cfg.grid``."""
    st = initial_state(u0, cfg)
    traj = Trajectory(cfg, [0.0], [st.U.values], [st.monitors], [0.0])
    n = cfg.n_steps
    logger.info("evolve: %d steps, tau=%.4g, eps=%g, theta=%g, grid %s", n, cfg.tau, cfg.op.eps, cfg.theta,
                cfg.grid.counts)
    for _ in range(n):
        t0 = time.perf_counter()
        st = step(st, cfg)
        traj.times.append(st.t)
        traj.values.append(st.U.values)
        traj.monitors.append(st.monitors)
        traj.wall.append(time.perf_counter() - t0)
    for t in cfg.snapshot_times:
        traj.snapshots[float(t)] = interpolate_time(traj, t)
    return traj


def interpolate_time(traj: Trajectory, t: float) -> SampledField:
    """``((t_{j+1} - t) U^j + (t - t_j) U^{j+1}) / tau`` on ``[t_j, t_{j+1}]``."""
    tau = traj.tau
    t_end = traj.times[-1]
    if not 0 <= t <= t_end:
        raise ValueError(f"t={t} outside [0, {t_end}]")
    j = min(int(math.floor(t / tau)), len(traj) - 1)
    if j > 0 and traj.times[j] > t:
        j -= 1
    if traj.times[j] == t or j == len(traj) - 1:
        return traj.field(j)
    a = (traj.times[j + 1] - t) / tau
    b = (t - traj.times[j]) / tau
    return traj.field(j).with_values(a * traj.values[j] + b * traj.values[j + 1])


# --------------------------------------------------------------- monitors


@dataclass
class MonitorRecord:
    name: str
    measured: float
    bound: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.measured <= self.bound + self.tol)


@dataclass
class MonitorReport:
    sup_history: np.ndarray
    mass_history: np.ndarray
    records: list
    time_lags: np.ndarray = dc_field(default_factory=lambda: np.empty(0))
    time_modulus: np.ndarray = dc_field(default_factory=lambda: np.empty(0))

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def time_slope(self) -> float:
        """Least-squares slope of ``log modulus`` against ``log lag``."""
        ok = self.time_modulus > 0
        if ok.sum() < 2:
            return float("nan")
        return float(np.polyfit(np.log(self.time_lags[ok]), np.log(self.time_modulus[ok]), 1)[0])


def shift_values(values: np.ndarray, k: Sequence[int], fill: float) -> np.ndarray:
    """``V(x + k h)`` on the grid with ``fill`` outside."""
    out = np.full(values.shape, fill)
    src, dst = [], []
    for ki, m in zip(k, values.shape):
        if abs(ki) >= m:
            return out
        src.append(slice(max(ki, 0), m + min(ki, 0)))
        dst.append(slice(max(-ki, 0), m - max(ki, 0)))
    out[tuple(dst)] = values[tuple(src)]
    return out


def space_modulus(values: np.ndarray, k: Sequence[int], fill: float) -> float:
    return float(np.max(np.abs(shift_values(values, k, fill) - values)))


def monitor_apriori(traj: Trajectory, *, shifts: Optional[Sequence] = None, tol: float = 1e-10,
                    n_lags: int = 12) -> MonitorReport:
    """Check the a priori estimates along a finished trajectory.

    * sup norm never exceeds that of the datum;
    * space modulus at grid shifts ``k h`` never exceeds the datum's;
    * time modulus ``max_x |u(t + d) - u(t)|`` sampled on geometric lags
      (reported; its log-log slope is the Hölder exponent in time).
    """
    cfg = traj.cfg
    fill = cfg.ext.value if isinstance(cfg.ext, ConstantFarField) else 0.0
    dim = cfg.grid.dim
    sup = np.array([np.max(np.abs(v)) for v in traj.values])
    mass = np.array([m.get("mass", np.nan) for m in traj.monitors])
    recs = [MonitorRecord("sup-norm stability", float(sup.max()), float(sup[0]), tol)]
    if shifts is None:
        shifts = [tuple(k if i == a else 0 for i in range(dim)) for a in range(dim) for k in (1, 2, 4, 8)]
    for k in shifts:
        w0 = space_modulus(traj.values[0], k, fill)
        wj = max(space_modulus(v, k, fill) for v in traj.values)
        recs.append(MonitorRecord(f"space modulus shift {tuple(k)}", wj, w0, tol))
    lags, mod = np.empty(0), np.empty(0)
    T = traj.times[-1]
    if T > 0 and len(traj) > 1:
        lags = np.geomspace(traj.tau, T, n_lags) if T > traj.tau else np.array([T])
        mod = np.array([_time_modulus(traj, d) for d in lags])
    return MonitorReport(sup, mass, recs, lags, mod)


def _time_modulus(traj: Trajectory, lag: float, n_starts: int = 5) -> float:
    T = traj.times[-1]
    starts = np.linspace(0.0, T - lag, n_starts) if T > lag else np.array([0.0])
    best = 0.0
    for t0 in starts:
        a = interpolate_time(traj, t0).values
        b = interpolate_time(traj, min(t0 + lag, T)).values
        best = max(best, float(np.max(np.abs(b - a))))
    return best


def with_box(cfg: SchemeConfig, grid: GridSpec) -> SchemeConfig:
    """Same run on another grid (for box-doubling calibration)."""
    return replace(cfg, grid=grid)
