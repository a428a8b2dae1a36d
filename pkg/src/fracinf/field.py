"""Bounded scalar fields on R^n.

Two concrete kinds exist: :class:`AnalyticField` wraps a vectorised rule and
:class:`SampledField` holds node values on a uniform box grid together with an
extension policy that says what the field is outside the box.

All fields are callables taking an array of points of shape ``(..., n)`` and
returning values of shape ``(...)``.  They are immutable after construction.
"""
from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import numpy as np

logger = logging.getLogger(__name__)

#: Upper limit on the number of nodes a single grid may hold.
MAX_NODES = 50_000_000

#: Points closer than this (in grid units) to a node snap onto it.
_SNAP = 1e-12

DEBUG = os.environ.get("FRACINF_DEBUG", "") not in ("", "0")


class FieldError(ValueError):
    """Raised when a field rule produces a non-finite or out-of-bound value."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform tensor grid on the box ``prod_i [lo_i, hi_i]``."""

    lo: tuple
    hi: tuple
    counts: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        counts = tuple(int(v) for v in np.atleast_1d(self.counts))
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "counts", counts)
        if not (len(lo) == len(hi) == len(counts)) or len(lo) < 1:
            raise ValueError("lo, hi and counts must have the same length >= 1")
        for a, b, m in zip(lo, hi, counts):
            if not a < b:
                raise ValueError(f"empty extent [{a}, {b}]")
            if m < 2:
                raise ValueError(f"need at least 2 nodes per axis, got {m}")
        if int(np.prod(counts)) > MAX_NODES:
            raise ValueError(f"grid with {int(np.prod(counts))} nodes exceeds budget {MAX_NODES}")

    @classmethod
    def cube(cls, dim: int, lo: float, hi: float, m: int) -> "GridSpec":
        return cls((lo,) * dim, (hi,) * dim, (m,) * dim)

    @property
    def dim(self) -> int:
        return len(self.counts)

    @property
    def spacing(self) -> np.ndarray:
        lo, hi, m = map(np.asarray, (self.lo, self.hi, self.counts))
        return (hi - lo) / (m - 1)

    @property
    def shape(self) -> tuple:
        return self.counts

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(np.subtract(self.hi, self.lo)))

    def axis(self, i: int) -> np.ndarray:
        return self.lo[i] + np.arange(self.counts[i]) * self.spacing[i]

    def mesh(self) -> np.ndarray:
        """Node coordinates, shape ``counts + (dim,)``."""
        axes = [self.axis(i) for i in range(self.dim)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def node(self, index: Sequence[int]) -> np.ndarray:
        return np.asarray(self.lo) + np.asarray(index) * self.spacing

    def shifted(self, y) -> "GridSpec":
        y = np.asarray(y, dtype=float)
        return GridSpec(tuple(np.add(self.lo, y)), tuple(np.add(self.hi, y)), self.counts)


# ---------------------------------------------------------------- extension


@dataclass(frozen=True)
class ConstantFarField:
    """Outside the box the field equals ``value``.

    Interpolation treats every lattice node outside the box as carrying
    ``value``, so the extended field is continuous and interpolation stays
    monotone.
    """

    value: float = 0.0


@dataclass(frozen=True)
class ClampToNearestBoundaryValue:
    """Outside the box the field takes its value at the nearest box point."""


@dataclass(frozen=True)
class AnalyticTail:
    """Outside the box the field is given by ``rule``."""

    rule: Callable[[np.ndarray], np.ndarray]


ExtensionPolicy = Union[ConstantFarField, ClampToNearestBoundaryValue, AnalyticTail]


# ------------------------------------------------------------------- fields


class ScalarField:
    """Common interface.  Subclasses implement ``_evaluate``."""

    dim: int
    bound: float = np.inf
    radial: bool = False
    radially_nonincreasing: bool = False
    profile_1d: bool = False

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"expected points with last axis {self.dim}, got shape {x.shape}")
        out = self._evaluate(x)
        if DEBUG and np.isfinite(self.bound):
            bad = np.abs(out) > self.bound * (1 + 1e-12) + 1e-300
            if np.any(bad):
                where = x[bad][0]
                raise FieldError(f"|phi(x)| exceeds declared bound {self.bound} at x={where}")
        return out

    def _evaluate(self, x: np.ndarray) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def far_value(self, x: np.ndarray, y: np.ndarray) -> Optional[float]:
        """Limit of ``phi(x + eta*y)`` as ``eta -> inf``, or None when unknown."""
        return None

    def breakpoints(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Distances ``eta > 0`` along the ray ``x + eta*y`` where the field jumps."""
        return np.empty(0)


class AnalyticField(ScalarField):
    """Field given by a vectorised rule.

    Parameters
    ----------
    rule : callable
        Maps points of shape ``(..., dim)`` to values of shape ``(...)``.
    dim : int
    bound : float
        Declared sup-norm bound, checked on evaluation when ``FRACINF_DEBUG`` is set.
    far : float or callable, optional
        Constant limit at infinity, or ``far(x, y)`` giving the limit along a ray.
    breaks : callable, optional
        ``breaks(x, y)`` returning jump distances along a ray.
    """

    def __init__(
        self,
        rule: Callable[[np.ndarray], np.ndarray],
        dim: int,
        bound: float = np.inf,
        *,
        far=None,
        breaks: Optional[Callable] = None,
        radial: bool = False,
        radially_nonincreasing: bool = False,
        profile_1d: bool = False,
        name: str = "",
    ):
        self.rule = rule
        self.dim = int(dim)
        self.bound = float(bound)
        self._far = far
        self._breaks = breaks
        self.radial = radial
        self.radially_nonincreasing = radially_nonincreasing
        self.profile_1d = profile_1d
        self.name = name

    def __repr__(self):
        return f"AnalyticField({self.name or self.rule!r}, dim={self.dim})"

    def _evaluate(self, x):
        return np.asarray(self.rule(x), dtype=float)

    def far_value(self, x, y):
        if self._far is None:
            return None
        if callable(self._far):
            return float(self._far(np.asarray(x, float), np.asarray(y, float)))
        return float(self._far)

    def breakpoints(self, x, y):
        if self._breaks is None:
            return np.empty(0)
        b = np.asarray(self._breaks(np.asarray(x, float), np.asarray(y, float)), dtype=float)
        return b[np.isfinite(b) & (b > 0)]


class TranslatedField(ScalarField):
    """``x -> base(x + shift)``."""

    def __init__(self, base: ScalarField, shift):
        self.base = base
        self.shift = np.asarray(shift, dtype=float)
        self.dim = base.dim
        self.bound = base.bound

    def _evaluate(self, x):
        return self.base._evaluate(x + self.shift)

    def far_value(self, x, y):
        return self.base.far_value(np.asarray(x) + self.shift, y)

    def breakpoints(self, x, y):
        return self.base.breakpoints(np.asarray(x) + self.shift, y)


class SampledField(ScalarField):
    """Node values on a :class:`GridSpec` with multilinear interpolation."""

    def __init__(self, spec: GridSpec, values, ext: ExtensionPolicy = ConstantFarField(0.0)):
        values = np.asarray(values, dtype=float)
        if values.shape != spec.shape:
            values = values.reshape(spec.shape)
        if not np.all(np.isfinite(values)):
            raise FieldError("sampled field has non-finite node values")
        values.setflags(write=False)
        self.spec = spec
        self.values = values
        self.ext = ext
        self.dim = spec.dim
        far = ext.value if isinstance(ext, ConstantFarField) else 0.0
        self.bound = float(max(np.max(np.abs(values)), abs(far)))

    def __repr__(self):
        return f"SampledField(counts={self.spec.counts}, ext={self.ext})"

    def far_value(self, x, y):
        if isinstance(self.ext, ConstantFarField):
            return float(self.ext.value)
        return None

    def with_values(self, values) -> "SampledField":
        return SampledField(self.spec, values, self.ext)

    def _evaluate(self, x):
        spec = self.spec
        lo = np.asarray(spec.lo)
        h = spec.spacing
        m = np.asarray(spec.counts)
        flat = x.reshape(-1, spec.dim)
        if isinstance(self.ext, ClampToNearestBoundaryValue):
            flat = np.clip(flat, lo, np.asarray(spec.hi))
        q = (flat - lo) / h
        near = np.rint(q)
        q = np.where(np.abs(q - near) < _SNAP, near, q)
        base = np.floor(q)
        frac = q - base
        base = base.astype(np.int64)

        c = self.ext.value if isinstance(self.ext, ConstantFarField) else 0.0
        out = np.zeros(len(flat))
        for corner in range(2 ** spec.dim):
            bits = np.array([(corner >> k) & 1 for k in range(spec.dim)])
            idx = base + bits
            wgt = np.prod(np.where(bits, frac, 1.0 - frac), axis=1)
            inside = np.all((idx >= 0) & (idx < m), axis=1)
            vals = np.full(len(flat), c)
            if np.any(inside):
                ii = tuple(idx[inside].T)
                vals[inside] = self.values[ii]
            # zero weights must not pick up anything, keeps node evaluation exact
            out += np.where(wgt > 0, wgt * vals, 0.0)

        if isinstance(self.ext, AnalyticTail):
            outside = np.any((q < 0) | (q > m - 1), axis=1)
            if np.any(outside):
                out[outside] = np.asarray(self.ext.rule(flat[outside]), dtype=float)
        return out.reshape(x.shape[:-1])


# --------------------------------------------------------------- operations


def eval(field: ScalarField, x) -> float:
    """Evaluate ``field`` at a single point, rejecting non-finite results."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError(f"non-finite evaluation point {x}")
    v = float(field(x))
    if not np.isfinite(v):
        raise FieldError(f"field rule returned {v} at x={x.tolist()}")
    return v


def gradient_fd(field: ScalarField, x, h: float = 1e-5) -> np.ndarray:
    """Central-difference gradient with step ``h``."""
    if not h > 0:
        raise ValueError("h must be positive")
    x = np.asarray(x, dtype=float)
    n = field.dim
    probes = np.concatenate([x + h * np.eye(n), x - h * np.eye(n)])
    v = field(probes)
    return (v[:n] - v[n:]) / (2 * h)


def translate(field: ScalarField, y) -> ScalarField:
    """Return the field ``x -> field(x + y)``.

    Sampled fields stay sampled: the grid moves by ``-y`` and keeps its values.
    """
    y = np.asarray(y, dtype=float)
    if isinstance(field, SampledField):
        ext = field.ext
        if isinstance(ext, AnalyticTail):
            rule = ext.rule
            ext = AnalyticTail(lambda z, rule=rule, y=y: rule(z + y))
        return SampledField(field.spec.shifted(-y), field.values, ext)
    if not np.any(y):
        return field
    return TranslatedField(field, y)


def sample(field: ScalarField, spec: GridSpec, ext: Optional[ExtensionPolicy] = None) -> SampledField:
    """Sample ``field`` on the nodes of ``spec``.

    The default extension is a constant far field equal to the field's limit
    at infinity (zero when unknown).
    """
    if ext is None:
        far = field.far_value(np.zeros(spec.dim), np.eye(spec.dim)[0])
        ext = ConstantFarField(0.0 if far is None else far)
    return SampledField(spec, field(spec.mesh()), ext)


def spot_check_flags(field: ScalarField, rng: np.random.Generator, n: int = 256, radius: float = 5.0) -> dict:
    """Sample-based check of the advertised flags.  Returns ``{flag: ok}``."""
    result = {}
    x = rng.uniform(-radius, radius, size=(n, field.dim))
    if field.radial or field.radially_nonincreasing:
        r = np.linalg.norm(x, axis=1)
        e = np.zeros_like(x)
        e[:, 0] = r
        result["radial"] = bool(np.allclose(field(x), field(e), atol=1e-12, rtol=1e-10))
    if field.radially_nonincreasing:
        r = np.sort(rng.uniform(0, radius, size=n))
        pts = np.zeros((n, field.dim))
        pts[:, 0] = r
        v = field(pts)
        result["radially_nonincreasing"] = bool(np.all(np.diff(v) <= 1e-12))
    if field.profile_1d:
        y = x.copy()
        y[:, 1:] = rng.uniform(-radius, radius, size=(n, field.dim - 1))
        result["profile_1d"] = bool(np.allclose(field(x), field(y), atol=1e-12))
    if np.isfinite(field.bound):
        result["bound"] = bool(np.all(np.abs(field(x)) <= field.bound * (1 + 1e-12)))
    return result


# ---------------------------------------------------------------------- I/O


def _ext_to_json(ext: ExtensionPolicy) -> dict:
    if isinstance(ext, ConstantFarField):
        return {"kind": "constant", "value": repr(float(ext.value))}
    if isinstance(ext, ClampToNearestBoundaryValue):
        return {"kind": "clamp"}
    return {"kind": "analytic"}


def _ext_from_json(d: dict) -> ExtensionPolicy:
    kind = d.get("kind", "constant")
    if kind == "constant":
        return ConstantFarField(float(d.get("value", 0.0)))
    if kind == "clamp":
        return ClampToNearestBoundaryValue()
    raise ValueError("analytic tail extensions cannot be restored from disk")


def write_grid_csv(field: SampledField, path, meta: Optional[dict] = None) -> Path:
    """Write node values (row-major, 17 significant digits) plus a JSON sidecar.

    The first CSV row is ``dim, lo_0, hi_0, ..., m_0, m_1, ...``.
    """
    path = Path(path)
    spec = field.spec
    header = [str(spec.dim)]
    for a, b in zip(spec.lo, spec.hi):
        header += [f"{a:.17g}", f"{b:.17g}"]
    header += [str(m) for m in spec.counts]
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        np.savetxt(fh, field.values.ravel(order="C"), fmt="%.17g")
    sidecar = {
        "dim": spec.dim,
        "lo": list(spec.lo),
        "hi": list(spec.hi),
        "counts": list(spec.counts),
        "extension": _ext_to_json(field.ext),
    }
    if meta:
        sidecar["meta"] = meta
    path.with_suffix(".json").write_text(json.dumps(sidecar, indent=2))
    return path


def read_grid_csv(path) -> SampledField:
    path = Path(path)
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        dim = int(header[0])
        ext_vals = [float(v) for v in header[1 : 1 + 2 * dim]]
        counts = tuple(int(v) for v in header[1 + 2 * dim : 1 + 3 * dim])
        values = np.array([float(line) for line in fh if line.strip()])
    spec = GridSpec(tuple(ext_vals[0::2]), tuple(ext_vals[1::2]), counts)
    ext: ExtensionPolicy = ConstantFarField(0.0)
    side = path.with_suffix(".json")
    if side.exists():
        ext = _ext_from_json(json.loads(side.read_text()).get("extension", {}))
    return SampledField(spec, values.reshape(counts), ext)
