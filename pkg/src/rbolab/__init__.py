"""Pseudospectral lab for the rotation Benjamin-Ono equation.

Periodic Fourier discretisation on ``[-L, L)``: multipliers and functionals,
closed-form solitons, Petviashvili ground states, the linearized operator,
integrating-factor time stepping and orbital-stability experiments.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .spectral import Grid, RealField, SpectralField  # noqa: E402
from .functionals import WaveParams, FunctionalRecord  # noqa: E402
from .soliton import SolitonSpec, bo_soliton  # noqa: E402
from .ground_state import SolverOptions, GroundState, petviashvili_solve  # noqa: E402
from .linearized import LinearizedOp, SpectrumReport  # noqa: E402
from .evolution import EvolutionConfig, Trajectory, evolve  # noqa: E402
from .stability import StabilityReport, GammaStudyRow, orbital_distance  # noqa: E402
