"""Run quantile and Bohm trajectories side by side and quantify agreement."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .bohm import IntegratorConfig, bohm_trajectories, separable_bohm_trajectories
from .density import DensitySeries, Grid1D, sample_model, time_levels, write_series
from .errors import ConfigurationError, InvalidInputError
from .presets import PRESETS, Preset
from .quantile import (QuantileSpec, SeparableSystem, p_drift, quantile_trajectories,
                       separable_trajectories)
from .trajectory import Trajectory, write_trajectories

DRIFT_TOLERANCE = 1e-6
NODAL_FRACTION = 1e-2
BOHM_STEP_DIVISOR = 50


@dataclass
class RunConfig:
    name: str
    model: object | None = None
    dx: float = 0.2
    dt: float = 0.1
    t_max: float = 1.0
    x_min: float = -5.0
    x_max: float = 5.0
    quantiles: tuple[float, ...] = ()
    starts: tuple[tuple[float, ...], ...] = ()
    ndim: int = 1
    threshold: float | None = None
    nodal_threshold: float | None = None
    nodal_fraction: float = NODAL_FRACTION
    drift_tolerance: float = DRIFT_TOLERANCE
    # "exact": Bohm starts at the quantile of the analytic initial density;
    # "grid": at the quantile trajectory's own first sample
    bohm_start: str = "exact"
    method: str = "quadratic"
    renormalize: bool = True
    workers: int = 1

    def __post_init__(self):
        self.quantiles = tuple(float(p) for p in self.quantiles)
        self.starts = tuple(tuple(float(v) for v in s) for s in self.starts)
        q = np.array(self.quantiles)
        if q.size and not np.all((q > 0) & (q < 1)):
            raise ConfigurationError("quantiles: every value must lie in (0, 1)")
        if q.size > 1 and np.any(np.diff(q) <= 0):
            raise ConfigurationError("quantiles: values must be sorted and distinct")
        if not self.quantiles and not self.starts:
            raise ConfigurationError("quantiles/x0: give at least one")
        if any(len(s) != self.ndim for s in self.starts):
            raise ConfigurationError(f"x0: each start needs {self.ndim} coordinate(s)")
        if self.bohm_start not in ("exact", "grid"):
            raise ConfigurationError("bohm_start: choose 'exact' or 'grid'")
        for name in ("dx", "dt", "t_max"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name}: must be positive")
        if not self.x_max > self.x_min:
            raise ConfigurationError("x-max: must exceed x-min")
        if self.workers < 1:
            raise ConfigurationError("workers: must be >= 1")

    @classmethod
    def from_preset(cls, preset: Preset | str, **overrides) -> "RunConfig":
        if isinstance(preset, str):
            try:
                preset = PRESETS[preset]
            except KeyError:
                raise ConfigurationError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        base = dict(name=preset.name, model=preset.model, dx=preset.dx, dt=preset.dt,
                    t_max=preset.t_max, x_min=preset.x_range[0], x_max=preset.x_range[1],
                    quantiles=preset.quantiles, starts=preset.starts, ndim=preset.ndim,
                    threshold=preset.threshold, nodal_threshold=preset.nodal_threshold)
        if overrides.get("quantiles") is not None or overrides.get("starts") is not None:
            base["quantiles"], base["starts"] = (), ()
        base.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**base)

    @property
    def cpf_options(self) -> dict:
        return {"method": self.method, "renormalize": self.renormalize}

    def parameters(self) -> dict:
        out = {"name": self.name, "dx": self.dx, "dt": self.dt, "t_max": self.t_max,
               "x_min": self.x_min, "x_max": self.x_max, "ndim": self.ndim,
               "quantiles": list(self.quantiles), "x0": [list(s) for s in self.starts],
               "method": self.method, "renormalize": self.renormalize,
               "bohm_start": self.bohm_start}
        if self.model is not None:
            out["model"] = {"kind": self.model.kind, **self.model.params()}
        return out


@dataclass
class TrajectoryComparison:
    label: str
    times: np.ndarray
    deviation: np.ndarray | None = None
    near_nodal: np.ndarray | None = None
    p_drift: np.ndarray | None = None

    @property
    def max_deviation(self) -> float:
        return float(self.deviation.max()) if self.deviation is not None else 0.0

    def _masked_max(self, mask) -> float:
        if self.deviation is None or not mask.any():
            return 0.0
        return float(self.deviation[mask].max())

    @property
    def max_deviation_off_nodal(self) -> float:
        mask = np.ones(self.times.size, bool) if self.near_nodal is None else ~self.near_nodal
        return self._masked_max(mask)

    @property
    def max_deviation_nodal(self) -> float:
        mask = np.zeros(self.times.size, bool) if self.near_nodal is None else self.near_nodal
        return self._masked_max(mask)

    @property
    def max_p_drift(self) -> float:
        return float(self.p_drift.max()) if self.p_drift is not None else 0.0

    def to_dict(self) -> dict:
        d = {"label": self.label, "t": self.times.tolist()}
        if self.deviation is not None:
            d.update(deviation=self.deviation.tolist(), max_deviation=self.max_deviation,
                     max_deviation_off_nodal=self.max_deviation_off_nodal,
                     max_deviation_nodal=self.max_deviation_nodal)
        if self.near_nodal is not None:
            d["near_nodal"] = self.near_nodal.tolist()
        if self.p_drift is not None:
            d.update(p_drift=self.p_drift.tolist(), max_p_drift=self.max_p_drift)
        return d


@dataclass
class ComparisonReport:
    entries: list[TrajectoryComparison]
    parameters: dict = field(default_factory=dict)
    threshold: float | None = None
    nodal_threshold: float | None = None
    drift_tolerance: float | None = None

    @property
    def max_deviation(self) -> float:
        return max((e.max_deviation for e in self.entries), default=0.0)

    @property
    def max_p_drift(self) -> float:
        return max((e.max_p_drift for e in self.entries), default=0.0)

    @property
    def deviation_passed(self) -> bool:
        if self.threshold is None:
            return True
        nodal = self.threshold if self.nodal_threshold is None else self.nodal_threshold
        return all(e.max_deviation_off_nodal <= self.threshold and e.max_deviation_nodal <= nodal
                   for e in self.entries)

    @property
    def drift_passed(self) -> bool:
        return self.drift_tolerance is None or self.max_p_drift <= self.drift_tolerance

    @property
    def passed(self) -> bool:
        return self.deviation_passed and self.drift_passed

    def to_dict(self) -> dict:
        return {"parameters": self.parameters, "threshold": self.threshold,
                "nodal_threshold": self.nodal_threshold, "drift_tolerance": self.drift_tolerance,
                "max_deviation": self.max_deviation, "max_p_drift": self.max_p_drift,
                "passed": self.passed, "trajectories": [e.to_dict() for e in self.entries]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def near_nodal_mask(series: DensitySeries, positions, fraction: float = NODAL_FRACTION) -> np.ndarray:
    """True where the cell holding the position, or a neighbouring cell,
    has a node below ``fraction`` of the frame's peak density."""
    g = series.grid
    k = np.clip(np.floor((np.asarray(positions) - g.x_min) / g.dx).astype(int), 0, g.n_nodes - 2)
    vals = series.values
    rows = np.arange(len(series))
    lo = np.clip(k - 1, 0, g.n_nodes - 1)
    window = np.stack([vals[rows, np.clip(lo + j, 0, g.n_nodes - 1)] for j in range(4)])
    return window.min(axis=0) < fraction * vals.max(axis=1)


def compare_many(quantile_trajs, bohm_trajs, *, series=None, nodal_fraction=NODAL_FRACTION,
                 cpf_options=None, **report_kwargs) -> ComparisonReport:
    """Deviation (max-norm over axes) per recorded time for paired trajectories.

    ``series`` (one DensitySeries per axis) enables P-drift and near-nodal flags.
    """
    quantile_trajs, bohm_trajs = list(quantile_trajs), list(bohm_trajs)
    if len(quantile_trajs) != len(bohm_trajs):
        raise ConfigurationError(f"{len(quantile_trajs)} quantile vs {len(bohm_trajs)} Bohm trajectories")
    cpf_options = cpf_options or {}
    entries = []
    for q, b in zip(quantile_trajs, bohm_trajs):
        if q.times.shape != b.times.shape or not np.allclose(q.times, b.times, rtol=1e-12, atol=1e-12):
            raise ConfigurationError(f"time grids of {q.label!r} and {b.label!r} differ")
        if q.ndim != b.ndim:
            raise ConfigurationError(f"{q.label!r} and {b.label!r} differ in dimension")
        dev = np.abs(q.positions - b.positions)
        if dev.ndim == 2:
            dev = dev.max(axis=1)
        entry = TrajectoryComparison(q.label, q.times.copy(), dev)
        if series is not None:
            entry.near_nodal = np.any([near_nodal_mask(s, q.axis(i), nodal_fraction)
                                       for i, s in enumerate(series)], axis=0)
            if q.P is not None:
                entry.p_drift = np.max([p_drift(s, q, axis=i, **cpf_options)
                                        for i, s in enumerate(series)], axis=0)
        entries.append(entry)
    if not all(np.isfinite(e.deviation).all() for e in entries):
        raise ConfigurationError("non-finite deviation")
    return ComparisonReport(entries, **report_kwargs)


def compare(qt: Trajectory, bt: Trajectory, **kwargs) -> ComparisonReport:
    return compare_many([qt], [bt], **kwargs)


def exact_quantile(model, P: float, x_min: float, x_max: float, t: float = 0.0) -> float:
    """Quantile of the analytic density by adaptive quadrature and bracketing.

    Independent of the trapezoid tables; used to start Bohm runs.
    """
    rho = lambda y: float(model.density(y, t))
    total = quad(rho, x_min, x_max, limit=400, epsabs=1e-14, epsrel=1e-13)[0]
    f = lambda x: quad(rho, x_min, x, limit=400, epsabs=1e-14, epsrel=1e-13)[0] / total - P
    return brentq(f, x_min, x_max, xtol=1e-13, rtol=1e-14)


@dataclass
class ExperimentResult:
    config: RunConfig
    series: list[DensitySeries]
    quantile: list[Trajectory]
    bohm: list[Trajectory] | None
    report: ComparisonReport


def _specs(config: RunConfig):
    if config.starts:
        return [[QuantileSpec(x0=v) for v in s] for s in config.starts]
    return [[QuantileSpec(P=p)] * config.ndim for p in config.quantiles]


def run_experiment(config: RunConfig, *, with_bohm: bool = True) -> ExperimentResult:
    if config.model is None:
        raise ConfigurationError("run_experiment needs an analytic model; use run_ingested for files")
    grid = Grid1D.from_spacing(config.x_min, config.x_max, config.dx)
    times = time_levels(config.t_max, config.dt)
    models = [config.model] * config.ndim
    series = [sample_model(m, grid, times) for m in models]
    specs = _specs(config)
    opts = config.cpf_options
    if config.ndim == 1:
        qts = quantile_trajectories(series[0], [s[0] for s in specs], workers=config.workers, **opts)
    else:
        qts = separable_trajectories(SeparableSystem(tuple(series)), specs,
                                     workers=config.workers, **opts)
    bts = None
    if with_bohm:
        cfg = IntegratorConfig(step=(times[1] - times[0]) / BOHM_STEP_DIVISOR, t_end=float(times[-1]),
                               record_times=tuple(times))
        if config.starts:
            x0 = np.array(config.starts)
        elif config.bohm_start == "exact":
            x0 = np.array([[exact_quantile(m, q.P[i], config.x_min, config.x_max, t=times[0])
                            for i, m in enumerate(models)] for q in qts])
        else:
            x0 = np.array([q.positions[0] for q in qts]).reshape(len(qts), config.ndim)
        if config.ndim == 1:
            bts = bohm_trajectories(config.model, x0[:, 0], cfg)
        else:
            bts = separable_bohm_trajectories(models, x0, cfg)
        report = compare_many(qts, bts, series=series, nodal_fraction=config.nodal_fraction,
                              cpf_options=opts, parameters=config.parameters(),
                              threshold=config.threshold, nodal_threshold=config.nodal_threshold,
                              drift_tolerance=config.drift_tolerance)
    else:
        report = drift_report(series, qts, config)
    return ExperimentResult(config, series, qts, bts, report)


def drift_report(series, qts, config: RunConfig) -> ComparisonReport:
    entries = [TrajectoryComparison(
        q.label, q.times.copy(),
        p_drift=np.max([p_drift(s, q, axis=i, **config.cpf_options) for i, s in enumerate(series)], axis=0))
        for q in qts]
    return ComparisonReport(entries, parameters=config.parameters(),
                            drift_tolerance=config.drift_tolerance)


def run_ingested(series: DensitySeries, config: RunConfig) -> ExperimentResult:
    """Quantile trajectories for a density without a wavefunction."""
    if config.ndim != 1:
        raise ConfigurationError("ingested densities are one-dimensional")
    config = replace(config, x_min=series.grid.x_min, x_max=series.grid.x_max,
                     dx=series.grid.dx, dt=series.dt or config.dt,
                     t_max=float(series.times[-1]) if len(series) > 1 else config.t_max)
    qts = quantile_trajectories(series, [s[0] for s in _specs(config)], workers=config.workers,
                                **config.cpf_options)
    return ExperimentResult(config, [series], qts, None, drift_report([series], qts, config))


def write_outputs(result: ExperimentResult, output, *, fmt: str = "long",
                  write_density: bool = False) -> list[Path]:
    """Write trajectory CSVs and ``report.json`` into directory ``output``."""
    if fmt not in ("long", "split"):
        raise InvalidInputError(f"format must be 'long' or 'split', got {fmt!r}")
    out = Path(output)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    groups = [("quantile", result.quantile)]
    if result.bohm is not None:
        groups.append(("bohm", result.bohm))
    for stem, trajs in groups:
        if fmt == "long":
            path = out / f"{stem}.csv"
            write_trajectories(trajs, path)
            written.append(path)
        else:
            for j, tr in enumerate(trajs):
                path = out / f"{stem}_{j:03d}.csv"
                write_trajectories([tr], path)
                written.append(path)
    if write_density:
        for i, s in enumerate(result.series):
            path = out / ("density.csv" if len(result.series) == 1 else f"density_axis{i}.csv")
            write_series(s, path)
            written.append(path)
    path = out / "report.json"
    path.write_text(result.report.to_json(), encoding="utf-8")
    written.append(path)
    return written
