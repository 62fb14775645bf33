"""Shallow-water flow on canal networks with angle-aware junction conditions."""

__version__ = "0.1.0"

from .estimator import JunctionSolver
from .exceptions import (
    ConfigError,
    DegenerateTriangleError,
    DryStateError,
    InvalidShapeError,
    NoConvergenceError,
    SimulationError,
    SupercriticalError,
    SWJunctionError,
)
from .geometry import JunctionGeometry, JunctionShape, build
from .junction import JunctionTrace, NewtonOptions, solve, solve_equal_energy
from .network import Canal, NetworkState, TimeControls, compute_dt, run, step
from .swe import PhysicalConstants, State, flux, godunov_flux, solve_riemann

__all__ = [
    "__version__",
    "Canal",
    "ConfigError",
    "DegenerateTriangleError",
    "DryStateError",
    "InvalidShapeError",
    "JunctionGeometry",
    "JunctionShape",
    "JunctionSolver",
    "JunctionTrace",
    "NetworkState",
    "NewtonOptions",
    "NoConvergenceError",
    "PhysicalConstants",
    "SimulationError",
    "State",
    "SupercriticalError",
    "SWJunctionError",
    "TimeControls",
    "build",
    "compute_dt",
    "flux",
    "godunov_flux",
    "run",
    "solve",
    "solve_equal_energy",
    "solve_riemann",
    "step",
]
