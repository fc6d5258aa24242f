"""Densities sampled on uniform 1D grids, one frame per time level."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (BoundaryViolationError, ConservationError, FormatError,
                     InsufficientDataError, InvalidDensityError, InvalidInputError)

BOUNDARY_TOLERANCE = 1e-8
MASS_TOLERANCE = 1e-3


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n_nodes: int

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise InvalidInputError("grid bounds must be finite")
        if not self.x_max > self.x_min:
            raise InvalidInputError(f"x_max must exceed x_min, got [{self.x_min}, {self.x_max}]")
        if int(self.n_nodes) != self.n_nodes or self.n_nodes < 3:
            raise InvalidInputError(f"need an integer n_nodes >= 3, got {self.n_nodes}")

    @classmethod
    def from_spacing(cls, x_min: float, x_max: float, dx: float) -> "Grid1D":
        """Grid whose spacing is ``dx`` rounded so it divides the range."""
        if not dx > 0:
            raise InvalidInputError(f"dx must be positive, got {dx}")
        n = int(round((x_max - x_min) / dx)) + 1
        return cls(float(x_min), float(x_max), max(n, 3))

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_nodes - 1)

    @property
    def nodes(self) -> np.ndarray:
        # weighted form: a range symmetric about 0 gives nodes that are exact negatives
        i = np.arange(self.n_nodes, dtype=float)
        m = self.n_nodes - 1
        x = (self.x_min * (m - i) + self.x_max * i) / m
        x[-1] = self.x_max
        return x


def time_levels(t_max: float, dt: float, t0: float = 0.0) -> np.ndarray:
    """Uniform times ``t0 + n*dt'`` covering ``[t0, t_max]``, with ``dt'``
    the closest step to ``dt`` that divides the span."""
    if not (dt > 0 and t_max > t0):
        raise InvalidInputError(f"need dt > 0 and t_max > t0, got dt={dt}, span=[{t0}, {t_max}]")
    n = max(int(round((t_max - t0) / dt)), 1)
    return np.linspace(t0, t_max, n + 1)


def trapezoid_mass(values, dx) -> float | np.ndarray:
    v = np.asarray(values, dtype=float)
    return dx * (v[..., 1:] + v[..., :-1]).sum(axis=-1) / 2


@dataclass(frozen=True)
class DensityFrame:
    grid: Grid1D
    t: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_nodes,):
            raise InvalidInputError(f"expected {self.grid.n_nodes} values, got shape {values.shape}")
        _check_values(values)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def mass(self) -> float:
        return float(trapezoid_mass(self.values, self.grid.dx))


def _check_values(values):
    if not np.all(np.isfinite(values)):
        raise InvalidDensityError("density contains non-finite values")
    if np.any(values < 0):
        idx = np.unravel_index(np.argmin(values), values.shape)
        raise InvalidDensityError(f"negative density {values[idx]!r} at index {tuple(int(i) for i in idx)}")


class DensitySeries:
    """Time-ordered density frames on a shared grid with uniform spacing.

    Values are held as a read-only ``(n_frames, n_nodes)`` array.  Construction
    validates sign, time spacing and mass conservation; ``check_boundary``
    additionally requires the density to be negligible at both grid ends.
    """

    def __init__(self, grid: Grid1D, times, values, *, mass_tolerance=MASS_TOLERANCE,
                 check_boundary=False, boundary_tolerance=BOUNDARY_TOLERANCE):
        times = np.array(times, dtype=float)
        values = np.array(values, dtype=float)
        if times.ndim != 1 or times.size < 1:
            raise FormatError("times must be a non-empty 1D sequence")
        if values.shape != (times.size, grid.n_nodes):
            raise FormatError(f"values shape {values.shape} does not match "
                              f"({times.size} frames, {grid.n_nodes} nodes)")
        _check_values(values)
        if times.size > 1:
            steps = np.diff(times)
            dt = (times[-1] - times[0]) / (times.size - 1)
            if not dt > 0 or np.any(np.abs(steps - dt) > 1e-9 * max(dt, 1e-300) + 1e-12):
                raise FormatError("frame times must be strictly increasing with uniform spacing")
        if check_boundary:
            peak = values.max(axis=1)
            edge = np.maximum(values[:, 0], values[:, -1])
            bad = np.flatnonzero(edge > boundary_tolerance * peak)
            if bad.size:
                k = int(bad[0])
                raise BoundaryViolationError(
                    f"density at the grid edge is {edge[k] / peak[k]:.3e} of its peak at "
                    f"t={times[k]:g}; widen [{grid.x_min}, {grid.x_max}]")
        masses = trapezoid_mass(values, grid.dx)
        drift = np.abs(masses - masses[0])
        if np.any(drift > mass_tolerance):
            k = int(np.argmax(drift))
            raise ConservationError(f"frame {k} (t={times[k]:g}) has mass {masses[k]:.6g}, "
                                    f"frame 0 has {masses[0]:.6g}")
        times.setflags(write=False)
        values.setflags(write=False)
        self.grid = grid
        self.times = times
        self.values = values

    def __len__(self):
        return self.times.size

    @property
    def dt(self) -> float:
        if len(self) < 2:
            return 0.0
        return float((self.times[-1] - self.times[0]) / (len(self) - 1))

    def frame(self, index: int) -> DensityFrame:
        return DensityFrame(self.grid, float(self.times[index]), self.values[index])

    @property
    def frames(self) -> list[DensityFrame]:
        return [self.frame(k) for k in range(len(self))]

    @property
    def masses(self) -> np.ndarray:
        return trapezoid_mass(self.values, self.grid.dx)


def sample_model(model, grid: Grid1D, times, *, boundary_tolerance=BOUNDARY_TOLERANCE,
                 mass_tolerance=MASS_TOLERANCE) -> DensitySeries:
    """Evaluate ``|psi|^2`` at every node and time.

    Raises BoundaryViolationError when the grid is too narrow for the model.
    """
    times = np.asarray(times, dtype=float)
    values = model.density(grid.nodes[None, :], times[:, None])
    return DensitySeries(grid, times, values, check_boundary=True,
                         boundary_tolerance=boundary_tolerance, mass_tolerance=mass_tolerance)


def time_derivative(series: DensitySeries, frame_index: int) -> np.ndarray:
    """Second-order finite-difference estimate of d(rho)/dt at every node."""
    n = len(series)
    if n < 3:
        raise InsufficientDataError(f"time derivative needs >= 3 frames, series has {n}")
    k = range(n)[frame_index]
    v, dt = series.values, series.dt
    if k == 0:
        return (-3 * v[0] + 4 * v[1] - v[2]) / (2 * dt)
    if k == n - 1:
        return (3 * v[-1] - 4 * v[-2] + v[-3]) / (2 * dt)
    return (v[k + 1] - v[k - 1]) / (2 * dt)


# --- file format ------------------------------------------------------------

_HEADER = re.compile(r"#\s*grid\s+x_min=(\S+)\s+x_max=(\S+)\s+n=(\S+)\s+dt=(\S+)\s*$")


def _fmt(value: float) -> str:
    return repr(float(value))


def export_series(series: DensitySeries) -> str:
    g = series.grid
    lines = [f"# grid x_min={_fmt(g.x_min)} x_max={_fmt(g.x_max)} n={g.n_nodes} dt={_fmt(series.dt)}"]
    for t, row in zip(series.times, series.values):
        lines.append(",".join([_fmt(t)] + [_fmt(v) for v in row]))
    return "\n".join(lines) + "\n"


def write_series(series: DensitySeries, path) -> None:
    Path(path).write_text(export_series(series), encoding="utf-8")


def parse_series(text: str, *, mass_tolerance=MASS_TOLERANCE, check_boundary=False,
                 boundary_tolerance=BOUNDARY_TOLERANCE) -> DensitySeries:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty density file")
    m = _HEADER.match(lines[0].strip())
    if not m:
        raise FormatError(f"bad header line {lines[0]!r}; expected "
                          "'# grid x_min=<f> x_max=<f> n=<int> dt=<f>'")
    try:
        x_min, x_max, dt = float(m[1]), float(m[2]), float(m[4])
        n = int(m[3])
    except ValueError as exc:
        raise FormatError(f"bad header value: {exc}") from None
    try:
        grid = Grid1D(x_min, x_max, n)
    except InvalidInputError as exc:
        raise FormatError(str(exc)) from None
    times, rows = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != n + 1:
            raise FormatError(f"line {lineno}: expected {n + 1} fields, got {len(fields)}")
        try:
            numbers = [float(f) for f in fields]
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
        times.append(numbers[0])
        rows.append(numbers[1:])
    if not rows:
        raise FormatError("density file has no frames")
    if len(times) > 1:
        steps = np.diff(times)
        if not dt > 0 or np.any(np.abs(steps - dt) > 1e-9 * dt + 1e-12):
            raise FormatError(f"frame times are not uniformly spaced by dt={dt!r}")
    return DensitySeries(grid, times, rows, mass_tolerance=mass_tolerance,
                         check_boundary=check_boundary, boundary_tolerance=boundary_tolerance)


def ingest_series(source, **kwargs) -> DensitySeries:
    """Read and validate a density CSV file (path or open text stream).

    Values are never renormalized.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    return parse_series(text, **kwargs)
