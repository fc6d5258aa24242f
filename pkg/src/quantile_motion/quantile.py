"""Trajectories that keep the probability to their left constant.

At every frame the trapezoid CPF is rebuilt and inverted at the same ``P``;
nothing is time-stepped, so conservation holds by construction.  The
density-only velocity ``-(1/rho) * integral_{-inf}^{x} d(rho)/dt`` is provided
separately for diagnostics.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cpf import build_cpf, cpf_at, invert_cpf
from .density import DensityFrame, DensitySeries, sample_model, time_derivative
from .errors import (ConfigurationError, DegenerateDensityError, DegenerateStartError,
                     InvalidInputError, ProbabilityRangeError, QuantileMotionError)
from .trajectory import Trajectory

VELOCITY_FLOOR = 1e-12


@dataclass(frozen=True)
class QuantileSpec:
    """Either the conserved left mass ``P`` or a starting position ``x0``."""

    P: float | None = None
    x0: float | None = None

    def __post_init__(self):
        if (self.P is None) == (self.x0 is None):
            raise InvalidInputError("give exactly one of P or x0")
        if self.P is not None and not 0 < self.P < 1:
            raise ProbabilityRangeError(f"P must lie in (0, 1), got {self.P}")

    @property
    def right_mass(self) -> float:
        if self.P is None:
            raise InvalidInputError("right mass is defined once P is known")
        return 1.0 - self.P

    def resolve(self, frame0: DensityFrame, **cpf_options) -> float:
        if self.P is not None:
            return self.P
        return p_from_x0(frame0, self.x0, **cpf_options)


def _interp_density(frame: DensityFrame, x):
    return np.interp(x, frame.grid.nodes, frame.values)


def p_from_x0(frame0: DensityFrame, x0: float, *, floor=VELOCITY_FLOOR, **cpf_options) -> float:
    """Left mass of the initial position ``x0``."""
    g = frame0.grid
    if not g.x_min < x0 < g.x_max:
        raise DegenerateStartError(f"x0={x0} is not inside the grid ({g.x_min}, {g.x_max})")
    if _interp_density(frame0, x0) <= floor * frame0.values.max():
        raise DegenerateStartError(f"density vanishes at x0={x0}")
    P = cpf_at(build_cpf(frame0, **cpf_options), x0)
    if not 0 < P < 1:
        raise DegenerateStartError(f"x0={x0} has left mass {P}, outside (0, 1)")
    return P


def _invert_frames(series, P, frame_indices, cpf_options):
    out = np.empty((len(frame_indices), P.size))
    for row, k in enumerate(frame_indices):
        try:
            out[row] = invert_cpf(build_cpf(series.frame(k), **cpf_options), P)
        except QuantileMotionError as exc:
            raise type(exc)(f"frame {k} (t={series.times[k]:g}): {exc}") from exc
    return out


def quantile_positions(series: DensitySeries, P, *, workers: int = 1, **cpf_options) -> np.ndarray:
    """Array ``(n_frames, len(P))`` of CPF inverses at each frame.

    Frames are independent; ``workers > 1`` splits them across threads with
    results identical to the serial run.
    """
    P = np.atleast_1d(np.asarray(P, dtype=float))
    n = len(series)
    if workers <= 1 or n < 2:
        return _invert_frames(series, P, range(n), cpf_options)
    chunks = [c for c in np.array_split(np.arange(n), workers) if c.size]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(lambda idx: _invert_frames(series, P, idx, cpf_options), chunks)
        return np.vstack(list(parts))


def _label(P, x0):
    return f"x0={x0:.6g}" if x0 is not None else f"P={P:.6g}"


def quantile_trajectories(series: DensitySeries, specs, *, workers: int = 1,
                          **cpf_options) -> list[Trajectory]:
    frame0 = series.frame(0)
    Ps = [s.resolve(frame0, **cpf_options) for s in specs]
    pos = quantile_positions(series, Ps, workers=workers, **cpf_options)
    out = []
    for j, (spec, P) in enumerate(zip(specs, Ps)):
        x0 = spec.x0 if spec.x0 is not None else float(pos[0, j])
        out.append(Trajectory(_label(spec.P if spec.P is not None else P, spec.x0),
                              series.times.copy(), pos[:, j], P=(P,), x0=(x0,)))
    return out


def quantile_trajectory(series: DensitySeries, spec: QuantileSpec, **cpf_options) -> Trajectory:
    return quantile_trajectories(series, [spec], **cpf_options)[0]


def p_drift(series: DensitySeries, trajectory: Trajectory, axis: int = 0, **cpf_options) -> np.ndarray:
    """``|C_t(x(t)) - P|`` per frame, with ``C_t`` the (renormalized) table."""
    P = trajectory.P[axis]
    x = trajectory.axis(axis)
    return np.array([abs(cpf_at(build_cpf(series.frame(k), **cpf_options), x[k]) - P)
                     for k in range(len(series))])


def density_velocity(series: DensitySeries, frame_index: int, x, *, floor=VELOCITY_FLOOR):
    """Velocity that conserves left mass, from density samples alone.

    ``floor`` is relative to the frame's peak density.
    """
    frame = series.frame(frame_index)
    g = frame.grid
    x = np.asarray(x, dtype=float)
    if not np.all((x >= g.x_min) & (x <= g.x_max)):
        raise ProbabilityRangeError(f"position outside grid [{g.x_min}, {g.x_max}]")
    rho = _interp_density(frame, x)
    if np.any(rho <= floor * frame.values.max()):
        raise DegenerateDensityError(f"density below floor at x={x[rho <= floor * frame.values.max()]}")
    drho = time_derivative(series, frame_index)
    dx = g.dx
    inner = np.concatenate([[0.0], np.cumsum(dx * (drho[:-1] + drho[1:]) / 2)])
    k = np.clip(np.floor((x - g.x_min) / dx).astype(int), 0, g.n_nodes - 2)
    s = x - (g.x_min + k * dx)
    partial = drho[k] * s + (drho[k + 1] - drho[k]) * s**2 / (2 * dx)
    v = -(inner[k] + partial) / rho
    return float(v) if v.ndim == 0 else v


@dataclass(frozen=True)
class SeparableSystem:
    """Independent per-axis density series sharing one time grid."""

    axes: tuple[DensitySeries, ...]

    def __post_init__(self):
        if len(self.axes) < 1:
            raise ConfigurationError("a separable system needs at least one axis")
        object.__setattr__(self, "axes", tuple(self.axes))

    @classmethod
    def from_models(cls, models, grids, times, **sample_options) -> "SeparableSystem":
        return cls(tuple(sample_model(m, g, times, **sample_options) for m, g in zip(models, grids)))

    @property
    def ndim(self) -> int:
        return len(self.axes)


def separable_trajectories(system: SeparableSystem, specs, *, workers: int = 1,
                           **cpf_options) -> list[Trajectory]:
    """N-D trajectories; ``specs`` holds one per-axis spec list per trajectory.

    Coordinate ``i`` is exactly what :func:`quantile_trajectories` returns for
    axis ``i`` alone.
    """
    times = system.axes[0].times
    for i, s in enumerate(system.axes[1:], start=1):
        if not np.array_equal(s.times, times):
            raise ConfigurationError(f"axis {i} time grid differs from axis 0")
    specs = [list(per) for per in specs]
    for per in specs:
        if len(per) != system.ndim:
            raise ConfigurationError(f"need {system.ndim} per-axis specs, got {len(per)}")
    per_axis = [quantile_trajectories(series, [per[i] for per in specs], workers=workers, **cpf_options)
                for i, series in enumerate(system.axes)]
    out = []
    for j, per in enumerate(specs):
        parts = [per_axis[i][j] for i in range(system.ndim)]
        pos = np.column_stack([p.positions for p in parts])
        P = tuple(p.P[0] for p in parts)
        x0 = tuple(p.x0[0] for p in parts)
        label = "(" + ",".join(p.label for p in parts) + ")"
        out.append(Trajectory(label, times.copy(), pos, P=P, x0=x0))
    return out


def separable_trajectory(system: SeparableSystem, specs, **cpf_options) -> Trajectory:
    return separable_trajectories(system, [specs], **cpf_options)[0]
