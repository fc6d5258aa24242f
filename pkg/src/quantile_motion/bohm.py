"""Reference Bohmian trajectories from the analytic wavefunction.

The velocity field is ``(hbar/2mi)(psi* dpsi - psi dpsi*) / |psi|^2`` and is
integrated with classic fixed-step RK4.  This path never touches density
grids or CPF tables, so it is an independent check of the quantile solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (AbortedTrajectoryError, DegenerateDensityError, InvalidInputError,
                     QuantileMotionError)
from .trajectory import Trajectory

# absolute, in the model's natural units
BOHM_DENSITY_FLOOR = 1e-14
IMAG_TOLERANCE = 1e-12


@dataclass(frozen=True)
class IntegratorConfig:
    step: float
    t_end: float
    record_times: tuple[float, ...] | None = None
    t_start: float = 0.0

    def __post_init__(self):
        if not self.step > 0:
            raise InvalidInputError(f"step must be positive, got {self.step}")
        if not self.t_end > self.t_start:
            raise InvalidInputError("t_end must exceed t_start")
        rec = self.recorded
        if rec[0] < self.t_start or rec[-1] > self.t_end or np.any(np.diff(rec) <= 0):
            raise InvalidInputError("record_times must increase within [t_start, t_end]")

    @property
    def recorded(self) -> np.ndarray:
        if self.record_times is None:
            return np.array([self.t_start, self.t_end])
        return np.asarray(self.record_times, dtype=float)


def _quotient(psi, dpsi, rho):
    num = np.conj(psi) * dpsi - psi * np.conj(dpsi)
    q = num / (2j * rho)
    resid = np.abs(q.imag)
    if np.any(resid > IMAG_TOLERANCE * np.maximum(np.abs(q.real), 1.0)):
        raise QuantileMotionError(f"velocity has imaginary residue {resid.max():.3e}")
    return q.real


def bohm_velocity(model, x, t, *, floor=BOHM_DENSITY_FLOOR):
    """Guidance-law velocity ``(1/m) dS/dx`` at ``(x, t)``."""
    x = np.asarray(x, dtype=float)
    psi = model.psi(x, t)
    rho = np.abs(psi) ** 2
    if np.any(rho <= floor):
        raise DegenerateDensityError(f"density {rho.min():.3e} at or below floor {floor:g}")
    c = model.constants
    v = c.hbar / c.mass * _quotient(psi, model.dpsi_dx(x, t), rho)
    return float(v) if v.ndim == 0 else v


def separable_bohm_velocity(models, X, t, *, floor=BOHM_DENSITY_FLOOR):
    """Velocity for the product wavefunction ``prod_i psi_i(x_i)``.

    ``X`` has shape ``(..., n_axes)``.  The gradient is taken of the full
    product, not of each factor alone.
    """
    X = np.asarray(X, dtype=float)
    factors = [m.psi(X[..., i], t) for i, m in enumerate(models)]
    derivs = [m.dpsi_dx(X[..., i], t) for i, m in enumerate(models)]
    psi = np.prod(factors, axis=0)
    rho = np.abs(psi) ** 2
    if np.any(rho <= floor):
        raise DegenerateDensityError(f"density {rho.min():.3e} at or below floor {floor:g}")
    out = np.empty(X.shape)
    for i, m in enumerate(models):
        others = [f for j, f in enumerate(factors) if j != i]
        grad = derivs[i] * (np.prod(others, axis=0) if others else 1.0)
        out[..., i] = m.constants.hbar / m.constants.mass * _quotient(psi, grad, rho)
    return out


def rk4_record(f, x0, record_times, step):
    """Integrate ``dx/dt = f(x, t)`` with fixed-step RK4, returning states at
    ``record_times`` (shape ``(n_records, *x0.shape)``).

    Each interval between record times is split into equal substeps no longer
    than ``step``.  A QuantileMotionError from ``f`` propagates with the
    attribute ``recorded`` set to the states completed so far.
    """
    x = np.array(x0, dtype=float)
    rec = np.asarray(record_times, dtype=float)
    out = [x.copy()]
    try:
        for t0, t1 in zip(rec[:-1], rec[1:]):
            n = max(1, math.ceil((t1 - t0) / step - 1e-9))
            h = (t1 - t0) / n
            for i in range(n):
                t = t0 + i * h
                k1 = f(x, t)
                k2 = f(x + h / 2 * k1, t + h / 2)
                k3 = f(x + h / 2 * k2, t + h / 2)
                k4 = f(x + h * k3, t + h)
                x = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            out.append(x.copy())
    except QuantileMotionError as exc:
        exc.recorded = np.array(out)
        raise
    return np.array(out)


def _run(f, x0, cfg, labels):
    rec = cfg.recorded
    if rec[0] != cfg.t_start:
        rec = np.concatenate([[cfg.t_start], rec])
    try:
        states = rk4_record(f, x0, rec, cfg.step)
    except QuantileMotionError as exc:
        done = exc.recorded
        partial = [Trajectory(lab, rec[:len(done)], done[:, j]) for j, lab in enumerate(labels)]
        raise AbortedTrajectoryError(
            f"Bohm trajectory aborted after t={rec[len(done) - 1]:g}: {exc}", partial) from exc
    if cfg.record_times is not None and cfg.recorded[0] != cfg.t_start:
        states = states[1:]
        rec = rec[1:]
    out = []
    for j, lab in enumerate(labels):
        pos = states[:, j]
        x0j = tuple(np.atleast_1d(np.asarray(x0)[j]).tolist())
        out.append(Trajectory(lab, rec.copy(), pos, x0=x0j))
    return out


def bohm_trajectories(model, x0s, cfg: IntegratorConfig, *, floor=BOHM_DENSITY_FLOOR):
    """Integrate an ensemble of 1D Bohm trajectories together."""
    x0s = np.atleast_1d(np.asarray(x0s, dtype=float))
    psi0 = np.abs(model.psi(x0s, cfg.t_start)) ** 2
    if np.any(psi0 <= floor):
        raise DegenerateDensityError("an initial position sits where the density vanishes")
    labels = [f"x0={x:.6g}" for x in x0s]
    return _run(lambda x, t: bohm_velocity(model, x, t, floor=floor), x0s, cfg, labels)


def bohm_trajectory(model, x0: float, cfg: IntegratorConfig, **kwargs) -> Trajectory:
    try:
        return bohm_trajectories(model, [x0], cfg, **kwargs)[0]
    except AbortedTrajectoryError as exc:
        exc.partial = exc.partial[0]
        raise


def separable_bohm_trajectories(models, x0s, cfg: IntegratorConfig, *, floor=BOHM_DENSITY_FLOOR):
    """Bohm trajectories for a product wavefunction; ``x0s`` is ``(n, n_axes)``."""
    x0s = np.atleast_2d(np.asarray(x0s, dtype=float))
    labels = ["(" + ",".join(f"x0={v:.6g}" for v in row) + ")" for row in x0s]
    return _run(lambda X, t: separable_bohm_velocity(models, X, t, floor=floor), x0s, cfg, labels)
