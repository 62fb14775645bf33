"""Finite-volume evolution on a network of canals joined at three-way junctions.

Each canal carries a uniform grid of cell averages ``(h, q)``. Interior faces
use the Godunov flux; an end attached to a junction takes the physical flux
of the state returned by the junction solve; free ends use homogeneous
Neumann ghost cells.

Orientation: a junction's incoming canal ends there (its last face touches
the junction); the two outgoing canals start there (their first face).
"""

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import junction as jsolver
from .exceptions import DryStateError, SimulationError, SWJunctionError
from .geometry import JunctionShape, build
from .swe import DEFAULT_CONSTANTS, H_MIN, godunov_flux_arrays

JUNCTION_MODELS = ("momentum", "energy")


@dataclass(eq=False)
class Canal:
    name: str
    length: float
    half_width: float
    h: np.ndarray
    q: np.ndarray
    upstream: Optional[str] = None  # junction at x = 0 (canal outgoing there)
    downstream: Optional[str] = None  # junction at x = length (canal incoming there)

    def __post_init__(self):
        self.h = np.array(self.h, dtype=float)
        self.q = np.array(self.q, dtype=float)
        if self.h.shape != self.q.shape or self.h.ndim != 1:
            raise ValueError(f"canal {self.name}: h and q must be 1D arrays of equal size")
        if self.cells < 2:
            raise ValueError(f"canal {self.name}: at least two cells required")
        if not self.length > 0 or not self.half_width > 0:
            raise ValueError(f"canal {self.name}: length and half-width must be positive")
        if not (np.all(np.isfinite(self.h)) and np.all(np.isfinite(self.q))):
            raise ValueError(f"canal {self.name}: non-finite cell values")
        if np.any(self.h < H_MIN):
            raise DryStateError(f"canal {self.name}: dry cell in initial data")

    @classmethod
    def uniform(cls, name, length, cells, half_width, h=1.0, v=0.0):
        h_arr = np.full(cells, float(h))
        return cls(name, float(length), float(half_width), h_arr, h_arr * float(v))

    @property
    def cells(self):
        return self.h.size

    @property
    def dx(self):
        return self.length / self.cells

    @property
    def x(self):
        return (np.arange(self.cells) + 0.5) * self.dx

    @property
    def v(self):
        return self.q / self.h

    def max_speed(self, g):
        return float(np.max(np.abs(self.v) + np.sqrt(g * self.h)))

    def copy(self):
        return replace(self, h=self.h.copy(), q=self.q.copy())


@dataclass(eq=False)
class Junction:
    name: str
    shape: JunctionShape
    incoming: str
    outgoing: tuple
    model: str = "momentum"
    last_solution: Optional[np.ndarray] = None
    geometry: object = field(init=False, repr=False)

    def __post_init__(self):
        if self.model not in JUNCTION_MODELS:
            raise ValueError(f"junction {self.name}: unknown model {self.model!r}")
        self.outgoing = tuple(self.outgoing)
        if len(self.outgoing) != 2:
            raise ValueError(f"junction {self.name}: exactly two outgoing canals required")
        self.geometry = build(self.shape)

    @property
    def canals(self):
        return (self.incoming,) + self.outgoing

    def copy(self):
        out = Junction(self.name, self.shape, self.incoming, self.outgoing, self.model)
        out.last_solution = None if self.last_solution is None else self.last_solution.copy()
        return out


@dataclass(frozen=True)
class JunctionRecord:
    """Outcome of one junction solve, kept for the run log."""

    step: int
    t: float
    junction: str
    x: np.ndarray
    iterations: int
    residual: float
    determinant: float


@dataclass(eq=False)
class NetworkState:
    canals: dict = field(default_factory=dict)
    junctions: dict = field(default_factory=dict)
    t: float = 0.0
    step: int = 0
    records: list = field(default_factory=list)  # junction records of the last step

    def add_canal(self, canal):
        if canal.name in self.canals:
            raise ValueError(f"duplicate canal {canal.name!r}")
        self.canals[canal.name] = canal
        return canal

    def add_junction(self, name, theta, phi, incoming, outgoing, model="momentum"):
        """Attach a junction, taking the half-widths from the three canals."""
        if name in self.junctions:
            raise ValueError(f"duplicate junction {name!r}")
        names = (incoming,) + tuple(outgoing)
        missing = [n for n in names if n not in self.canals]
        if missing:
            raise ValueError(f"junction {name}: unknown canals {missing}")
        if len(set(names)) != 3:
            raise ValueError(f"junction {name}: the three canals must be distinct")
        c1, c2, c3 = (self.canals[n] for n in names)
        if c1.downstream is not None:
            raise ValueError(f"canal {incoming} already ends at junction {c1.downstream}")
        for c in (c2, c3):
            if c.upstream is not None:
                raise ValueError(f"canal {c.name} already starts at junction {c.upstream}")
        shape = JunctionShape(theta, phi, c1.half_width, c2.half_width, c3.half_width)
        junc = Junction(name, shape, incoming, tuple(outgoing), model)
        c1.downstream = name
        c2.upstream = name
        c3.upstream = name
        self.junctions[name] = junc
        return junc

    def copy(self):
        return NetworkState(
            {k: c.copy() for k, c in self.canals.items()},
            {k: j.copy() for k, j in self.junctions.items()},
            self.t, self.step, list(self.records),
        )

    def trace(self, name):
        """Canal-side states facing junction ``name``."""
        junc = self.junctions[name]
        c1, c2, c3 = (self.canals[n] for n in junc.canals)
        h = np.array([c1.h[-1], c2.h[0], c3.h[0]])
        q = np.array([c1.q[-1], c2.q[0], c3.q[0]])
        return np.concatenate([h, q / h])

    def total_volume(self, weighted=True):
        """Water volume; ``weighted`` multiplies each canal by its full width."""
        return sum(
            (2.0 * c.half_width if weighted else 1.0) * c.dx * float(np.sum(c.h))
            for c in self.canals.values()
        )


@dataclass(frozen=True)
class TimeControls:
    t_end: float
    cfl: float = 0.9
    max_steps: int = 10_000_000

    def __post_init__(self):
        if not 0 < self.cfl <= 1:
            raise ValueError("cfl must lie in (0, 1]")
        if not self.t_end >= 0:
            raise ValueError("t_end must be nonnegative")
        if self.max_steps < 0:
            raise ValueError("max_steps must be nonnegative")


@dataclass(frozen=True)
class Cadence:
    """When the observer sees the state: every ``every`` steps and/or at ``times``."""

    every: Optional[int] = None
    times: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(sorted(float(t) for t in self.times)))
        if self.every is not None and self.every < 1:
            raise ValueError("every must be a positive step count")


def compute_dt(state, tc, c=DEFAULT_CONSTANTS):
    """CFL time step, clipped so the run stops exactly at ``tc.t_end``."""
    remaining = tc.t_end - state.t
    if remaining <= 0:
        return 0.0
    dx = min(canal.dx for canal in state.canals.values())
    speed = max(canal.max_speed(c.g) for canal in state.canals.values())
    if speed == 0:
        return remaining
    return min(tc.cfl * dx / speed, remaining)


def _solve_junction(state, junc, c, opts):
    trace = state.trace(junc.name)
    try:
        if junc.model == "momentum":
            sol = jsolver.solve(trace, junc.geometry, opts, c, warm_start=junc.last_solution)
            det = jsolver.existence_diagnostic(sol.x, trace, junc.geometry, c)
        else:
            s = junc.shape
            sol = jsolver.solve_equal_energy(trace, s.s1, s.s2, s.s3, opts, c,
                                             warm_start=junc.last_solution)
            det = jsolver.existence_diagnostic(sol.x, trace, junc.geometry, c, system="energy")
    except SWJunctionError as exc:
        raise SimulationError(
            f"junction {junc.name} failed at step {state.step} (t={state.t!r}): {exc}",
            step=state.step, time=state.t, junction=junc.name, trace=trace.tolist(),
        ) from exc
    return sol, det


def step(state, dt, c=DEFAULT_CONSTANTS, opts=jsolver.NewtonOptions()):
    """Advance ``state`` in place by one forward-Euler step of length ``dt``."""
    # faces that touch a junction: (canal, end) -> (mass flux, momentum flux)
    junction_flux = {}
    records = []
    solutions = {}
    for junc in state.junctions.values():
        sol, det = _solve_junction(state, junc, c, opts)
        solutions[junc.name] = sol
        h, q = sol.h, sol.q
        fh = q
        fq = q * q / h + 0.5 * c.g * h * h
        ends = [(junc.incoming, "right"), (junc.outgoing[0], "left"), (junc.outgoing[1], "left")]
        for k, key in enumerate(ends):
            junction_flux[key] = (fh[k], fq[k])
        records.append(JunctionRecord(state.step + 1, state.t + dt, junc.name, sol.x.copy(),
                                      sol.iterations, sol.residual_norm, det))

    updates = {}
    for canal in state.canals.values():
        h, q = canal.h, canal.q
        fh = np.empty(canal.cells + 1)
        fq = np.empty(canal.cells + 1)
        try:
            fh[1:-1], fq[1:-1] = godunov_flux_arrays(h[:-1], q[:-1], h[1:], q[1:], c.g)
        except SWJunctionError as exc:
            raise SimulationError(
                f"canal {canal.name}: interface flux failed at step {state.step}: {exc}",
                step=state.step, time=state.t,
            ) from exc
        # Neumann ghost cell: the Godunov flux of identical states is the physical flux
        fh[0], fq[0] = junction_flux.get((canal.name, "left"),
                                         (q[0], q[0] * q[0] / h[0] + 0.5 * c.g * h[0] * h[0]))
        fh[-1], fq[-1] = junction_flux.get(
            (canal.name, "right"), (q[-1], q[-1] * q[-1] / h[-1] + 0.5 * c.g * h[-1] * h[-1]))
        ratio = dt / canal.dx
        h_new = h - ratio * (fh[1:] - fh[:-1])
        q_new = q - ratio * (fq[1:] - fq[:-1])
        if np.any(~(h_new >= H_MIN)):
            raise SimulationError(
                f"canal {canal.name}: height below the wet floor after step {state.step + 1}",
                step=state.step + 1, time=state.t + dt,
            )
        updates[canal.name] = (h_new, q_new)

    for name, (h_new, q_new) in updates.items():
        state.canals[name].h = h_new
        state.canals[name].q = q_new
    for name, sol in solutions.items():
        state.junctions[name].last_solution = sol.x.copy()
    state.t = state.t + dt
    state.step += 1
    state.records = records
    return state


def run(state, tc, c=DEFAULT_CONSTANTS, observer: Optional[Callable] = None,
        cadence=Cadence(), opts=jsolver.NewtonOptions(), on_step: Optional[Callable] = None):
    """Advance ``state`` to ``tc.t_end`` (or ``tc.max_steps``).

    ``observer(state)`` is called with the initial state, at every cadence
    point, and with the final state; snapshots are not copied, so an
    observer that keeps them must copy. ``on_step(state)`` is called after
    every step (used for junction logs). If a step fails the observer still
    receives the last good state before the error propagates.
    """
    pending = [t for t in cadence.times if t > state.t and t <= tc.t_end]
    emitted_step = state.step
    if observer is not None:
        observer(state)
    steps = 0
    while state.t < tc.t_end and steps < tc.max_steps:
        dt = compute_dt(state, tc, c)
        target = tc.t_end if dt >= tc.t_end - state.t else None
        if pending and state.t + dt >= pending[0]:
            dt = pending[0] - state.t
            target = pending[0]
        try:
            step(state, dt, c, opts)
        except SimulationError:
            if observer is not None and emitted_step != state.step:
                observer(state)
            raise
        if target is not None:
            # land exactly on output times despite round-off in t + dt
            state.t = target
        steps += 1
        if on_step is not None:
            on_step(state)
        hit_time = bool(pending) and state.t >= pending[0]
        while pending and state.t >= pending[0]:
            pending.pop(0)
        hit_every = cadence.every is not None and state.step % cadence.every == 0
        if observer is not None and (hit_time or hit_every) and emitted_step != state.step:
            observer(state)
            emitted_step = state.step
    if observer is not None and emitted_step != state.step:
        observer(state)
    return state
