"""Trapezoid approximation of the cumulative probability function.

The table stores the running trapezoid sum ``C_k`` at each node together with
the node densities.  Between nodes the density is the straight line joining
the two node values (the top of the trapezoid), so the cumulative is a
quadratic in position; ``method="linear"`` uses straight-line interpolation of
``C`` instead.  :func:`invert_cpf` and :func:`cpf_at` always use the same
piecewise form, so they are exact inverses of each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .density import DensityFrame, Grid1D
from .errors import CoverageError, InvalidInputError, ProbabilityRangeError

FLAT_EPSILON = 1e-14
# relative density change below which a segment is treated as flat-topped
SLOPE_EPSILON = 1e-12
METHODS = ("quadratic", "linear")


@dataclass(frozen=True)
class CpfTable:
    grid: Grid1D
    t: float
    cumulative: np.ndarray
    density: np.ndarray | None = None
    method: str = "quadratic"
    renormalize: bool = True
    flat_epsilon: float = FLAT_EPSILON

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidInputError(f"method must be one of {METHODS}, got {self.method!r}")
        c = np.asarray(self.cumulative, dtype=float)
        if c.shape != (self.grid.n_nodes,):
            raise InvalidInputError(f"cumulative has shape {c.shape}, grid has {self.grid.n_nodes} nodes")
        c.setflags(write=False)
        object.__setattr__(self, "cumulative", c)
        if self.density is not None:
            d = np.asarray(self.density, dtype=float)
            d.setflags(write=False)
            object.__setattr__(self, "density", d)

    @property
    def total(self) -> float:
        return float(self.cumulative[-1])

    @property
    def _quadratic(self) -> bool:
        return self.method == "quadratic" and self.density is not None


def build_cpf(frame: DensityFrame, *, method="quadratic", renormalize=True,
              flat_epsilon=FLAT_EPSILON) -> CpfTable:
    v = frame.values
    c = np.empty_like(v)
    c[0] = 0.0
    np.cumsum(frame.grid.dx * (v[:-1] + v[1:]) / 2, out=c[1:])
    return CpfTable(frame.grid, frame.t, c, v, method=method, renormalize=renormalize,
                    flat_epsilon=flat_epsilon)


def _segment_shape(table: CpfTable, k):
    """Node density at the segment start and its slope; slope is zero on
    segments treated linearly."""
    v = table.density
    v0 = v[k]
    dv = v[k + 1] - v0
    dv = np.where(np.abs(dv) < SLOPE_EPSILON * v.max(), 0.0, dv)
    return v0, dv / table.grid.dx, dv == 0.0


def _mirror(table: CpfTable) -> CpfTable:
    g = table.grid
    v = table.density[::-1]
    c = np.empty_like(v)
    c[0] = 0.0
    np.cumsum(g.dx * (v[:-1] + v[1:]) / 2, out=c[1:])
    return CpfTable(Grid1D(-g.x_max, -g.x_min, g.n_nodes), table.t, c, v, method=table.method,
                    renormalize=table.renormalize, flat_epsilon=table.flat_epsilon)


def invert_cpf(table: CpfTable, P):
    """Position whose left mass is ``P`` (scalar or array).

    With node densities available and renormalization on, the answer is the
    mean of the left-accumulated solution for ``P`` and the right-accumulated
    one for ``1 - P``.  The two agree to rounding; averaging makes the result
    exactly mirror-covariant.
    """
    p = np.asarray(P, dtype=float)
    if not np.all((p > 0) & (p < 1)):
        raise ProbabilityRangeError(f"quantile must lie in (0, 1), got {P!r}")
    target = p * table.total if table.renormalize else p
    if np.any(target > table.total):
        raise CoverageError(f"quantile {P!r} exceeds table mass {table.total:.6g}")
    x = _solve(table, target)
    if table.renormalize and table.density is not None:
        mirror = _mirror(table)
        x = (x - _solve(mirror, (1 - p) * mirror.total)) / 2
    return float(x) if np.ndim(x) == 0 else x


def _solve(table: CpfTable, target):
    c = table.cumulative
    g = table.grid
    dx = g.dx
    k = np.clip(np.searchsorted(c, target, side="right") - 1, 0, g.n_nodes - 2)
    dc = c[k + 1] - c[k]
    r = target - c[k]
    # flat_epsilon is in units of the normalized table when renormalizing
    eps_flat = table.flat_epsilon * (c[-1] if table.renormalize else 1.0)
    flat = dc <= eps_flat
    safe_dc = np.where(flat, 1.0, dc)
    s = dx * r / safe_dc
    if table._quadratic:
        v0, slope, linear = _segment_shape(table, k)
        # the root is scale-free; dividing by the peak avoids underflow in v0**2
        scale = table.density.max()
        v0, slope, rs = v0 / scale, slope / scale, r / scale
        root = np.sqrt(np.maximum(v0**2 + 2 * slope * rs, 0.0))
        denom = v0 + root
        # denom == 0 only when v0 == 0 and r == 0
        quad = np.where(denom > 0, 2 * rs / np.where(denom > 0, denom, 1.0), 0.0)
        s = np.where(linear, s, quad)
    s = np.where(flat, dx / 2, np.clip(s, 0.0, dx))
    x = g.x_min + k * dx + s
    # Target on a level shared by several nodes (a zero-density run): take the
    # middle of the whole run.  The band absorbs summation-order rounding so
    # mirror-image densities give mirror-image answers.
    band = max(eps_flat, 64 * np.finfo(float).eps * c[-1])
    lo = np.searchsorted(c, target - band, side="left")
    hi = np.searchsorted(c, target + band, side="right") - 1
    x = np.where(hi > lo, g.x_min + (lo + hi) * dx / 2, x)
    return x


def cpf_at(table: CpfTable, x):
    """Left mass at position ``x`` (renormalized when the table is)."""
    x = np.asarray(x, dtype=float)
    g = table.grid
    span = g.x_max - g.x_min
    if not np.all((x >= g.x_min - 1e-12 * span) & (x <= g.x_max + 1e-12 * span)):
        raise ProbabilityRangeError(f"position outside grid [{g.x_min}, {g.x_max}]")
    dx = g.dx
    k = np.clip(np.floor((x - g.x_min) / dx).astype(int), 0, g.n_nodes - 2)
    s = np.clip(x - (g.x_min + k * dx), 0.0, dx)
    c = table.cumulative
    if table._quadratic:
        v0, slope, linear = _segment_shape(table, k)
        lin = c[k] + (c[k + 1] - c[k]) * s / dx
        val = np.where(linear, lin, c[k] + v0 * s + slope * s**2 / 2)
    else:
        val = c[k] + (c[k + 1] - c[k]) * s / dx
    if table.renormalize:
        val = val / table.total
    return float(val) if np.ndim(val) == 0 else val
