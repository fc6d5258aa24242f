"""Closed-form time-dependent wavefunctions used as test systems.

Each model evaluates the complex amplitude ``psi(x, t)``, its analytic spatial
derivative and the density ``|psi|^2``.  All methods broadcast over numpy
arrays.  Models also carry the grid and time-step defaults of the experiment
they belong to (see :mod:`quantile_motion.presets`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from .errors import InvalidInputError

SQRT_HALF = math.sqrt(0.5)


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and self.mass > 0):
            raise InvalidInputError(f"hbar and mass must be positive, got {self}")


def _require_positive(**params):
    for name, value in params.items():
        if not (np.isfinite(value) and value > 0):
            raise InvalidInputError(f"{name} must be positive and finite, got {value!r}")


def _check_amplitudes(coefficients):
    norm = sum(abs(c) ** 2 for c in coefficients)
    if not math.isclose(norm, 1.0, rel_tol=1e-12):
        raise InvalidInputError(f"coefficients must be normalized, |c|^2 sums to {norm}")


@dataclass(frozen=True)
class WavefunctionModel:
    """Base class; subclasses implement ``_psi`` and ``_dpsi``."""

    kind: ClassVar[str] = ""
    constants: PhysicalConstants = field(default_factory=PhysicalConstants, kw_only=True)

    # experiment defaults, overridden per subclass
    x_range: ClassVar[tuple[float, float]] = (-5.0, 5.0)

    @property
    def default_range(self) -> tuple[float, float]:
        return self.x_range

    @property
    def default_dx(self) -> float:
        raise NotImplementedError

    @property
    def default_dt(self) -> float:
        raise NotImplementedError

    @property
    def default_t_max(self) -> float:
        raise NotImplementedError

    def psi(self, x, t):
        return self._psi(np.asarray(x, dtype=float), np.asarray(t, dtype=float))

    def dpsi_dx(self, x, t):
        return self._dpsi(np.asarray(x, dtype=float), np.asarray(t, dtype=float))

    def density(self, x, t):
        return np.abs(self.psi(x, t)) ** 2

    def params(self) -> dict:
        """Numeric parameters, for reports."""
        out = {k: v for k, v in self.__dict__.items() if k != "constants"}
        out["hbar"] = self.constants.hbar
        out["mass"] = self.constants.mass
        return out

    def _psi(self, x, t):
        raise NotImplementedError

    def _dpsi(self, x, t):
        raise NotImplementedError


@dataclass(frozen=True)
class HarmonicSuperposition(WavefunctionModel):
    """Ground and first excited oscillator states with amplitudes ``c0, c1``.

    The default equal-weight superposition oscillates rigidly; ``(1, 0)`` gives
    the stationary ground state.
    """

    kind: ClassVar[str] = "harmonic"
    omega: float = 3.0
    coefficients: tuple[complex, complex] = (SQRT_HALF, SQRT_HALF)

    def __post_init__(self):
        _require_positive(omega=self.omega)
        _check_amplitudes(self.coefficients)

    @property
    def length_scale(self) -> float:
        c = self.constants
        return math.sqrt(c.hbar / (c.mass * self.omega))

    def energy(self, j: int) -> float:
        return self.constants.hbar * self.omega * (j + 0.5)

    @property
    def default_dx(self):
        return 0.2

    @property
    def default_dt(self):
        return 0.1

    @property
    def default_t_max(self):
        return 3.0

    def _phases(self, t):
        hbar = self.constants.hbar
        c0, c1 = self.coefficients
        return (c0 * np.exp(-1j * self.energy(0) * t / hbar),
                c1 * np.exp(-1j * self.energy(1) * t / hbar))

    def _psi(self, x, t):
        a = self.length_scale
        g = np.exp(-x**2 / (2 * a**2))
        phi0 = math.sqrt(1 / (a * math.sqrt(math.pi))) * g
        phi1 = math.sqrt(1 / (2 * a * math.sqrt(math.pi))) * g * (2 * x / a)
        p0, p1 = self._phases(t)
        return p0 * phi0 + p1 * phi1

    def _dpsi(self, x, t):
        a = self.length_scale
        g = np.exp(-x**2 / (2 * a**2))
        dphi0 = math.sqrt(1 / (a * math.sqrt(math.pi))) * g * (-x / a**2)
        dphi1 = math.sqrt(1 / (2 * a * math.sqrt(math.pi))) * g * (2 / a) * (1 - x**2 / a**2)
        p0, p1 = self._phases(t)
        return p0 * dphi0 + p1 * dphi1


@dataclass(frozen=True)
class FreeGaussian(WavefunctionModel):
    """Spreading free Gaussian ``(2a/pi)^(1/4) exp(-a x^2/D) / sqrt(D)``,
    ``D = 1 + 2i hbar a t / m``, optionally shifted to ``center``.

    Initial position variance is ``1/(4a)``.
    """

    kind: ClassVar[str] = "free"
    x_range: ClassVar[tuple[float, float]] = (-25.0, 25.0)
    a: float = math.pi / 2
    center: float = 0.0

    def __post_init__(self):
        _require_positive(a=self.a)

    @property
    def default_dx(self):
        return 0.2

    @property
    def default_dt(self):
        return 0.1

    @property
    def default_t_max(self):
        return 3.0

    def _spread(self, t):
        c = self.constants
        return 1 + 2j * c.hbar * self.a * t / c.mass

    def _psi(self, x, t):
        d = self._spread(t)
        u = x - self.center
        return (2 * self.a / math.pi) ** 0.25 * np.exp(-self.a * u**2 / d) / np.sqrt(d)

    def _dpsi(self, x, t):
        d = self._spread(t)
        u = x - self.center
        return self._psi(x, t) * (-2 * self.a * u / d)

    def variance(self, t):
        c = self.constants
        beta = 2 * c.hbar * self.a * np.asarray(t, dtype=float) / c.mass
        return (1 + beta**2) / (4 * self.a)


@dataclass(frozen=True)
class TwoSlit(WavefunctionModel):
    """Equal-weight superposition of two free Gaussians leaving slits at
    ``+/- slit_half_separation`` with initial standard deviation ``slit_width``.

    The transverse coordinate is the only dynamical one; motion towards the
    screen is uniform and maps ``t`` to distance.  Defaults keep the density
    negligible (below 1e-8 of its peak) outside ``+/-129.668`` for
    ``0 <= t <= t_max = 100``.
    """

    kind: ClassVar[str] = "two-slit"
    x_range: ClassVar[tuple[float, float]] = (-129.668, 129.668)
    slit_half_separation: float = 20.0
    slit_width: float = 3.0
    t_max: float = 100.0

    def __post_init__(self):
        _require_positive(slit_half_separation=self.slit_half_separation,
                          slit_width=self.slit_width, t_max=self.t_max)

    @property
    def default_dx(self):
        return 3.24169

    @property
    def default_dt(self):
        return self.t_max / 40

    @property
    def default_t_max(self):
        return self.t_max

    def _slits(self):
        a = 1 / (4 * self.slit_width**2)
        c = self.slit_half_separation
        return (FreeGaussian(a=a, center=c, constants=self.constants),
                FreeGaussian(a=a, center=-c, constants=self.constants))

    @property
    def _norm(self):
        # overlap of the two packets is real and conserved
        overlap = math.exp(-self.slit_half_separation**2 / (2 * self.slit_width**2))
        return 1 / math.sqrt(2 * (1 + overlap))

    def _psi(self, x, t):
        upper, lower = self._slits()
        return self._norm * (upper._psi(x, t) + lower._psi(x, t))

    def _dpsi(self, x, t):
        upper, lower = self._slits()
        return self._norm * (upper._dpsi(x, t) + lower._dpsi(x, t))


@dataclass(frozen=True)
class SquareWellSuperposition(WavefunctionModel):
    """First two infinite-well eigenstates on ``[0, L]``; zero outside.

    With the default equal amplitudes this is ``(1/sqrt(L))(sin(pi x/L)
    e^{-i E1 t} + sin(2 pi x/L) e^{-i 4 E1 t})``.
    """

    kind: ClassVar[str] = "well"
    L: float = 1.0
    coefficients: tuple[complex, complex] = (SQRT_HALF, SQRT_HALF)

    def __post_init__(self):
        _require_positive(L=self.L)
        _check_amplitudes(self.coefficients)

    @property
    def default_range(self):
        return (0.0, self.L)

    @property
    def default_dx(self):
        return self.L / 30

    @property
    def default_dt(self):
        return 0.05

    @property
    def default_t_max(self):
        return 1.0

    @property
    def ground_energy(self) -> float:
        c = self.constants
        return math.pi**2 * c.hbar**2 / (2 * c.mass * self.L**2)

    def _terms(self, x, t):
        hbar = self.constants.hbar
        e1 = self.ground_energy
        norm = math.sqrt(2 / self.L)
        inside = (x >= 0) & (x <= self.L)
        k = math.pi / self.L
        c1, c2 = self.coefficients
        p1 = norm * c1 * np.exp(-1j * e1 * t / hbar)
        p2 = norm * c2 * np.exp(-1j * 4 * e1 * t / hbar)
        return inside, k, p1, p2

    def _psi(self, x, t):
        inside, k, p1, p2 = self._terms(x, t)
        return np.where(inside, p1 * np.sin(k * x) + p2 * np.sin(2 * k * x), 0j)

    def _dpsi(self, x, t):
        inside, k, p1, p2 = self._terms(x, t)
        return np.where(inside, p1 * k * np.cos(k * x) + p2 * 2 * k * np.cos(2 * k * x), 0j)


MODEL_KINDS = {cls.kind: cls for cls in
               (HarmonicSuperposition, FreeGaussian, TwoSlit, SquareWellSuperposition)}


def make_model(kind: str, hbar: float = 1.0, mass: float = 1.0, **params) -> WavefunctionModel:
    try:
        cls = MODEL_KINDS[kind]
    except KeyError:
        raise InvalidInputError(f"unknown model kind {kind!r}; choose from {sorted(MODEL_KINDS)}")
    try:
        return cls(constants=PhysicalConstants(hbar=hbar, mass=mass), **params)
    except TypeError as exc:
        raise InvalidInputError(f"bad parameters for {kind!r}: {exc}") from None


def _check_point(x, t):
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(t))):
        raise InvalidInputError("position and time must be finite")
    if np.any(t < 0):
        raise InvalidInputError("time must be non-negative")
    return x, t


def eval_psi(model: WavefunctionModel, x, t):
    x, t = _check_point(x, t)
    return model.psi(x, t)


def eval_dpsi_dx(model: WavefunctionModel, x, t):
    x, t = _check_point(x, t)
    return model.dpsi_dx(x, t)


def density(model: WavefunctionModel, x, t):
    x, t = _check_point(x, t)
    return model.density(x, t)
