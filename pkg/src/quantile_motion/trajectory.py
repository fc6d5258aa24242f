"""Trajectory container and its CSV form.

CSV layout (long format, one file for many trajectories)::

    label,t,x            # 1D
    label,t,x,y          # 2D; further axes are x3, x4, ...

Rows are grouped by label in file order; times increase within a label.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError, InvalidInputError

AXIS_NAMES = ("x", "y")


def axis_names(ndim: int) -> list[str]:
    return [AXIS_NAMES[i] if i < len(AXIS_NAMES) else f"x{i + 1}" for i in range(ndim)]


@dataclass
class Trajectory:
    """Positions sampled at increasing times.

    ``positions`` has shape ``(n_times,)`` in 1D and ``(n_times, ndim)``
    otherwise.  ``P`` is the conserved left mass per axis for quantile
    trajectories; ``x0`` is the starting point.
    """

    label: str
    times: np.ndarray
    positions: np.ndarray
    P: tuple[float, ...] | None = None
    x0: tuple[float, ...] | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.positions = np.asarray(self.positions, dtype=float)
        if self.positions.shape[0] != self.times.size:
            raise InvalidInputError("positions and times differ in length")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise InvalidInputError("trajectory times must be strictly increasing")

    @property
    def ndim(self) -> int:
        return 1 if self.positions.ndim == 1 else self.positions.shape[1]

    def axis(self, i: int) -> np.ndarray:
        return self.positions if self.positions.ndim == 1 else self.positions[:, i]


def _fmt(v) -> str:
    return repr(float(v))


def trajectories_to_csv(trajectories) -> str:
    trajectories = list(trajectories)
    if not trajectories:
        return "label,t,x\n"
    ndim = trajectories[0].ndim
    if any(tr.ndim != ndim for tr in trajectories):
        raise InvalidInputError("cannot mix trajectory dimensions in one file")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "t", *axis_names(ndim)])
    for tr in trajectories:
        pos = tr.positions.reshape(tr.times.size, ndim)
        for t, row in zip(tr.times, pos):
            w.writerow([tr.label, _fmt(t), *(_fmt(v) for v in row)])
    return buf.getvalue()


def write_trajectories(trajectories, path) -> None:
    Path(path).write_text(trajectories_to_csv(trajectories), encoding="utf-8")


def read_trajectories(source) -> list[Trajectory]:
    text = source.read() if hasattr(source, "read") else Path(source).read_text(encoding="utf-8")
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][:2] != ["label", "t"] or len(rows[0]) < 3:
        raise FormatError("trajectory CSV must start with a 'label,t,x[,y...]' header")
    ndim = len(rows[0]) - 2
    groups: dict[str, list[list[float]]] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != ndim + 2:
            raise FormatError(f"line {lineno}: expected {ndim + 2} fields, got {len(row)}")
        try:
            groups.setdefault(row[0], []).append([float(v) for v in row[1:]])
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
    out = []
    for label, data in groups.items():
        arr = np.array(data)
        pos = arr[:, 1] if ndim == 1 else arr[:, 1:]
        try:
            out.append(Trajectory(label, arr[:, 0], pos))
        except InvalidInputError as exc:
            raise FormatError(f"trajectory {label!r}: {exc}") from None
    return out
