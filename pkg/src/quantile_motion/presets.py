"""The four reference experiments with their grid and time parameters."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .wavefunctions import (FreeGaussian, HarmonicSuperposition, SquareWellSuperposition,
                            TwoSlit, WavefunctionModel)

NINE_DECILES = tuple(round(k / 10, 1) for k in range(1, 10))


def two_slit_quantiles(n: int = 24) -> tuple[float, ...]:
    return tuple(float(p) for p in (np.arange(n) + 0.5) / n)


def well_diagonal_starts(n: int = 9, L: float = 1.0) -> tuple[tuple[float, float], ...]:
    """Points on the segment from (L/2, 0) to (0, L/2), endpoints excluded."""
    s = np.linspace(0.05, 0.45, n) * L
    return tuple((float(L / 2 - v), float(v)) for v in s)


@dataclass(frozen=True)
class Preset:
    name: str
    model: WavefunctionModel
    dx: float
    dt: float
    t_max: float
    x_range: tuple[float, float]
    quantiles: tuple[float, ...] = ()
    starts: tuple[tuple[float, ...], ...] = ()
    ndim: int = 1
    threshold: float = 5e-2
    # bound applied to samples next to near-empty cells; None means same as threshold
    nodal_threshold: float | None = None
    description: str = ""
    extra: dict = field(default_factory=dict)


def _build() -> dict[str, Preset]:
    harmonic = HarmonicSuperposition(omega=3.0)
    free = FreeGaussian(a=np.pi / 2)
    slit = TwoSlit()
    well = SquareWellSuperposition(L=1.0)
    slit_dy = 3.24169
    return {
        "harmonic": Preset(
            "harmonic", harmonic, dx=0.2, dt=0.1, t_max=3.0, x_range=(-5.0, 5.0),
            quantiles=NINE_DECILES, threshold=5e-2,
            description="oscillator ground + first excited state, omega=3"),
        "free": Preset(
            "free", free, dx=0.2, dt=0.1, t_max=3.0, x_range=free.default_range,
            quantiles=NINE_DECILES, threshold=5e-2,
            description="spreading free Gaussian, a=pi/2"),
        "two-slit": Preset(
            "two-slit", slit, dx=slit_dy, dt=2.5, t_max=slit.t_max, x_range=slit.default_range,
            quantiles=two_slit_quantiles(), threshold=0.2 * slit_dy, nodal_threshold=1.5 * slit_dy,
            description="two spreading Gaussian slits, t_max=100"),
        "well-2d": Preset(
            "well-2d", well, dx=well.L / 30, dt=0.05, t_max=1.0, x_range=well.default_range,
            starts=well_diagonal_starts(L=well.L), ndim=2, threshold=5e-2,
            description="separable 2D infinite well, L=1, starts on (0.5,0)-(0,0.5)"),
    }


PRESETS = _build()
