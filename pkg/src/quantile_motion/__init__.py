"""Particle trajectories that conserve the probability to their left."""

__version__ = "0.1.0"

from .bohm import IntegratorConfig, bohm_trajectory, bohm_trajectories, bohm_velocity
from .cpf import CpfTable, build_cpf, cpf_at, invert_cpf
from .density import (DensityFrame, DensitySeries, Grid1D, export_series, ingest_series,
                      sample_model, time_derivative, time_levels)
from .experiment import ComparisonReport, RunConfig, compare, run_experiment, run_ingested
from .quantile import (QuantileSpec, SeparableSystem, density_velocity, p_from_x0,
                       quantile_trajectory, separable_trajectory)
from .trajectory import Trajectory
from .wavefunctions import (FreeGaussian, HarmonicSuperposition, PhysicalConstants,
                            SquareWellSuperposition, TwoSlit, density, eval_dpsi_dx, eval_psi)
