"""Run every preset and write trajectory CSVs plus a JSON report per run.

    python3 scripts/reproduce_figures.py --output runs/
    python3 scripts/reproduce_figures.py --only two-slit --plot

``--plot`` draws quantile (solid) over Bohm (dashed) trajectories if
matplotlib is importable.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from quantile_motion.experiment import RunConfig, run_experiment, write_outputs
from quantile_motion.presets import PRESETS


def plot(result, path: Path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for q, b in zip(result.quantile, result.bohm or [None] * len(result.quantile)):
        if q.ndim == 1:
            ax.plot(q.times, q.positions, "k-", lw=0.8)
            if b is not None:
                ax.plot(b.times, b.positions, "r--", lw=0.8)
        else:
            ax.plot(q.axis(0), q.axis(1), "k-", lw=0.8)
            if b is not None:
                ax.plot(b.axis(0), b.axis(1), "r--", lw=0.8)
    if result.quantile[0].ndim == 1:
        ax.set_xlabel("t")
        ax.set_ylabel("x")
    else:
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_aspect("equal")
    ax.set_title(result.config.name)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--output", type=Path, default=Path("runs"))
    parser.add_argument("--only", choices=sorted(PRESETS), action="append")
    parser.add_argument("--plot", action="store_true")
    args = parser.parse_args(argv)

    failed = 0
    for name in args.only or sorted(PRESETS):
        start = time.perf_counter()
        result = run_experiment(RunConfig.from_preset(name))
        elapsed = time.perf_counter() - start
        out = args.output / name
        write_outputs(result, out, write_density=True)
        rep = result.report
        print(f"{name:10} {'PASS' if rep.passed else 'FAIL'}  max dev {rep.max_deviation:.3e}  "
              f"max P-drift {rep.max_p_drift:.1e}  {elapsed:.2f}s  -> {out}")
        failed += not rep.passed
        if args.plot:
            try:
                plot(result, out / "trajectories.png")
            except ImportError:
                print("  matplotlib not available; skipping plot", file=sys.stderr)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
