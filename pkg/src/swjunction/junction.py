"""Nonlinear junction system and its Newton solver.

Unknowns are ordered ``x = (h1, h2, h3, v1, v2, v3)``: the states on the
junction side of each canal face. The trace ``x*`` holds the canal-side
states. Canal 1 is incoming (its velocity is positive toward the junction);
canals 2 and 3 are outgoing (positive away from it).

Two closures are provided. The momentum system balances mass and both
momentum components over the junction triangle. The equal-energy system
equates ``q^2/h + g h^2/2`` across the canals together with width-weighted
mass conservation. Both are completed by the half-Riemann wave-curve rows.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import DryStateError, NoConvergenceError, SupercriticalError
from .swe import DEFAULT_CONSTANTS, H_MIN, wave_jump

logger = logging.getLogger(__name__)

# below this the Newton iterate is already at round-off; no polishing step
_POLISH_FLOOR = 1e-14


@dataclass(frozen=True)
class NewtonOptions:
    tol: float = 1e-10
    max_iter: int = 50
    damping: float = 0.5
    min_step: float = 1e-4

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not 0 < self.damping < 1:
            raise ValueError("damping must lie in (0, 1)")
        if not 0 < self.min_step <= 1:
            raise ValueError("min_step must lie in (0, 1]")


@dataclass(frozen=True, eq=False)
class JunctionTrace:
    """Canal-side states ``(h1*, h2*, h3*, v1*, v2*, v3*)`` facing the junction."""

    x_star: np.ndarray

    def __post_init__(self):
        x = np.array(self.x_star, dtype=float).reshape(6)
        if not np.all(np.isfinite(x)):
            raise ValueError(f"non-finite junction trace {x}")
        if np.any(x[:3] < H_MIN):
            raise DryStateError(f"dry junction trace {x}")
        object.__setattr__(self, "x_star", x)

    @classmethod
    def from_states(cls, u1, u2, u3):
        return cls(np.array([u1.h, u2.h, u3.h, u1.v, u2.v, u3.v]))

    @property
    def h(self):
        return self.x_star[:3]

    @property
    def v(self):
        return self.x_star[3:]

    def froude(self, g=DEFAULT_CONSTANTS.g):
        return np.abs(self.v) / np.sqrt(g * self.h)

    def check_subcritical(self, g=DEFAULT_CONSTANTS.g):
        fr = self.froude(g)
        if np.any(fr >= 1.0):
            raise SupercriticalError(f"trace is not subcritical (Froude {fr})")


@dataclass(frozen=True, eq=False)
class JunctionSolution:
    x: np.ndarray
    residual_norm: float
    iterations: int

    @property
    def h(self):
        return self.x[:3]

    @property
    def v(self):
        return self.x[3:]

    @property
    def q(self):
        return self.x[:3] * self.x[3:]


def _as_trace(trace):
    return trace if isinstance(trace, JunctionTrace) else JunctionTrace(trace)


def _check_x(x):
    x = np.asarray(x, dtype=float)
    if x.shape != (6,):
        raise ValueError(f"junction unknowns must have shape (6,), got {x.shape}")
    if np.any(~(x[:3] > 0)):
        raise DryStateError(f"nonpositive junction height in {x}")
    return x


# canal 1 meets the junction through a left-going wave, canals 2, 3 right-going
_WAVE_SIGN = np.array([1.0, -1.0, -1.0])


def _wave_rows(x, trace, g):
    jump, djump = wave_jump(x[:3], trace.h, g)
    rows = x[3:] - trace.v + _WAVE_SIGN * jump
    return rows, _WAVE_SIGN * djump


def residual(x, trace, geom, c=DEFAULT_CONSTANTS):
    """Momentum-closure residual: mass, x-momentum, y-momentum, wave curves."""
    x = _check_x(x)
    trace = _as_trace(trace)
    g = c.g
    h, v = x[:3], x[3:]
    a, b, gm = geom.alpha, geom.beta, geom.gamma
    cos_k, sin_k = geom.directions[:, 0], geom.directions[:, 1]
    q = h * v
    flow = gm * q * v  # momentum carried along each canal axis
    pressure = 0.5 * g * h * h
    out = np.empty(6)
    out[0] = a[0] * q[0] + gm[1] * q[1] + gm[2] * q[2]
    out[1] = a[0] * (q[0] * v[0] + pressure[0]) + flow[1] * cos_k[1] + a[1] * pressure[1] \
        + flow[2] * cos_k[2] + a[2] * pressure[2]
    out[2] = b[0] * pressure[0] + flow[1] * sin_k[1] + b[1] * pressure[1] \
        + flow[2] * sin_k[2] + b[2] * pressure[2]
    out[3:], _ = _wave_rows(x, trace, g)
    return out


def jacobian(x, trace, geom, c=DEFAULT_CONSTANTS):
    """Analytic derivative of :func:`residual` with respect to ``x``."""
    x = _check_x(x)
    trace = _as_trace(trace)
    g = c.g
    h, v = x[:3], x[3:]
    a, b, gm = geom.alpha, geom.beta, geom.gamma
    cos_k, sin_k = geom.directions[:, 0], geom.directions[:, 1]
    jac = np.zeros((6, 6))
    jac[0, :3] = gm * v
    jac[0, 3:] = gm * h
    # canal 1: gamma_1 == alpha_1 and the axis is x, so the generic
    # expressions below reduce to alpha_1 (v^2 + g h) and 2 alpha_1 h v
    jac[1, :3] = gm * v * v * cos_k + g * a * h
    jac[1, 3:] = 2.0 * gm * h * v * cos_k
    jac[2, :3] = gm * v * v * sin_k + g * b * h
    jac[2, 3:] = 2.0 * gm * h * v * sin_k
    _, dwave = _wave_rows(x, trace, g)
    jac[3:, :3] = np.diag(dwave)
    jac[3:, 3:] = np.eye(3)
    return jac


def energy_residual(x, trace, widths, c=DEFAULT_CONSTANTS):
    """Equal-energy closure: ``s1 q1 - s2 q2 - s3 q3`` and ``E1 - E2``, ``E1 - E3``."""
    x = _check_x(x)
    trace = _as_trace(trace)
    s = np.asarray(widths, dtype=float)
    h, v = x[:3], x[3:]
    q = h * v
    e = q * v + 0.5 * c.g * h * h
    out = np.empty(6)
    out[0] = s[0] * q[0] - s[1] * q[1] - s[2] * q[2]
    out[1] = e[0] - e[1]
    out[2] = e[0] - e[2]
    out[3:], _ = _wave_rows(x, trace, c.g)
    return out


def energy_jacobian(x, trace, widths, c=DEFAULT_CONSTANTS):
    x = _check_x(x)
    trace = _as_trace(trace)
    s = np.asarray(widths, dtype=float) * np.array([1.0, -1.0, -1.0])
    h, v = x[:3], x[3:]
    de_dh = v * v + c.g * h
    de_dv = 2.0 * h * v
    jac = np.zeros((6, 6))
    jac[0, :3] = s * v
    jac[0, 3:] = s * h
    for row, k in ((1, 1), (2, 2)):
        jac[row, 0], jac[row, k] = de_dh[0], -de_dh[k]
        jac[row, 3], jac[row, 3 + k] = de_dv[0], -de_dv[k]
    _, dwave = _wave_rows(x, trace, c.g)
    jac[3:, :3] = np.diag(dwave)
    jac[3:, 3:] = np.eye(3)
    return jac


def existence_diagnostic(x, trace, geom, c=DEFAULT_CONSTANTS, system="momentum"):
    """Determinant of the junction Jacobian at ``x``.

    A value near zero warns that the root may not continue smoothly in time.
    ``system="energy"`` evaluates the equal-energy closure instead, using the
    half-widths of ``geom.shape``.
    """
    if system == "momentum":
        return float(np.linalg.det(jacobian(x, trace, geom, c)))
    if system == "energy":
        return float(np.linalg.det(energy_jacobian(x, trace, geom.shape.widths, c)))
    raise ValueError(f"unknown junction system {system!r}")


def orthogonal_determinant(x, widths, g=DEFAULT_CONSTANTS.g):
    """Closed-form determinant of the equal-energy Jacobian on rarefaction branches.

    ``l1 l2 l3 (s1 l2 l3 - s2 l1 l3 - s3 l1 l2)`` with ``l1 = v1 - sqrt(g h1)``
    and ``lk = vk + sqrt(g hk)`` for the outgoing canals.
    """
    h, v = np.asarray(x[:3], dtype=float), np.asarray(x[3:], dtype=float)
    lam = v + np.sqrt(g * h) * np.array([-1.0, 1.0, 1.0])
    s1, s2, s3 = widths
    l1, l2, l3 = lam
    return float(l1 * l2 * l3 * (s1 * l2 * l3 - s2 * l1 * l3 - s3 * l1 * l2))


def vanishing_velocity_determinant(heights, geom, g=DEFAULT_CONSTANTS.g):
    """Closed-form determinant of the momentum Jacobian at ``v = 0``."""
    h1, h2, h3 = np.asarray(heights, dtype=float)
    a1, a2, a3 = geom.alpha
    b1, b2, b3 = geom.beta
    g2, g3 = geom.gamma[1], geom.gamma[2]
    bracket = (-a1 * (a2 * b3 - a3 * b2) * np.sqrt(h2 * h3)
               - g2 * (a1 * b3 - a3 * b1) * np.sqrt(h1 * h3)
               + g3 * (a1 * b2 - a2 * b1) * np.sqrt(h1 * h2))
    return float(g ** 2.5 * np.sqrt(h1 * h2 * h3) * bracket)


# --------------------------------------------------------------------------- #
# Newton driver                                                                #
# --------------------------------------------------------------------------- #


def _row_scales(trace, widths, g, momentum_has_width):
    hbar = float(np.mean(trace.h))
    sbar = float(np.mean(widths))
    wave = 1.0 / np.sqrt(g * hbar)
    mass = wave / (sbar * hbar)
    mom = 1.0 / (g * hbar * hbar)
    if momentum_has_width:
        mom /= sbar
    return np.array([mass, mom, mom, wave, wave, wave])


def _newton(fun, jac, x0, scales, opts):
    x = np.array(x0, dtype=float)
    if np.any(x[:3] <= H_MIN):
        raise DryStateError(f"initial guess has a dry height: {x}")
    r = scales * fun(x)
    norm = np.max(np.abs(r))
    iterations = 0
    while norm > opts.tol:
        if iterations >= opts.max_iter:
            raise NoConvergenceError(
                f"junction Newton hit the iteration cap ({opts.max_iter}), residual {norm:.3e}")
        try:
            dx = np.linalg.solve(scales[:, None] * jac(x), -r)
        except np.linalg.LinAlgError as exc:
            raise NoConvergenceError(f"singular junction Jacobian at {x}") from exc
        merit = np.linalg.norm(r)
        lam = 1.0
        while True:
            xn = x + lam * dx
            if np.all(xn[:3] > H_MIN):
                rn = scales * fun(xn)
                if np.all(np.isfinite(rn)) and np.linalg.norm(rn) < merit:
                    break
            lam *= opts.damping
            if lam < opts.min_step:
                raise NoConvergenceError(
                    f"junction Newton line search hit the damping floor, residual {norm:.3e}")
        x, r = xn, rn
        norm = np.max(np.abs(r))
        iterations += 1
    if iterations and norm > _POLISH_FLOOR:
        # one extra full step drives a quadratically converging iterate to round-off
        try:
            xn = x + np.linalg.solve(scales[:, None] * jac(x), -r)
        except np.linalg.LinAlgError:
            xn = x
        if np.all(xn[:3] > H_MIN):
            rn = scales * fun(xn)
            if np.max(np.abs(rn)) < norm:
                x, norm = xn, np.max(np.abs(rn))
                iterations += 1
    return x, float(norm), iterations


def _solve_with_fallback(fun, jac, trace, scales, opts, warm_start, g):
    hbar = float(np.mean(trace.h))
    rest = np.array([hbar, hbar, hbar, 0.0, 0.0, 0.0])
    first = trace.x_star if warm_start is None else np.asarray(warm_start, dtype=float)
    try:
        x, norm, its = _newton(fun, jac, first, scales, opts)
    except (NoConvergenceError, DryStateError) as exc:
        logger.debug("junction Newton failed from %s (%s); retrying from rest", first, exc)
        x, norm, its = _newton(fun, jac, rest, scales, opts)
    fr = np.abs(x[3:]) / np.sqrt(g * x[:3])
    if np.any(fr >= 1.0):
        raise SupercriticalError(f"junction solution {x} is not subcritical (Froude {fr})")
    return JunctionSolution(x, norm, its)


def solve(trace, geom, opts=NewtonOptions(), c=DEFAULT_CONSTANTS, warm_start=None):
    """Junction states for the momentum closure.

    Damped Newton from ``warm_start`` (or the trace), with one retry from
    the lake-at-rest state at the mean trace height.

    Raises
    ------
    NoConvergenceError, DryStateError, SupercriticalError
    """
    trace = _as_trace(trace)
    scales = _row_scales(trace, geom.shape.widths, c.g, momentum_has_width=True)
    return _solve_with_fallback(
        lambda x: residual(x, trace, geom, c),
        lambda x: jacobian(x, trace, geom, c),
        trace, scales, opts, warm_start, c.g,
    )


def solve_equal_energy(trace, s1, s2, s3, opts=NewtonOptions(), c=DEFAULT_CONSTANTS,
                       warm_start=None):
    """Junction states for the equal-energy closure (angle independent)."""
    trace = _as_trace(trace)
    widths = np.array([s1, s2, s3], dtype=float)
    if np.any(~(widths > 0)):
        raise ValueError("half-widths must be positive")
    scales = _row_scales(trace, widths, c.g, momentum_has_width=False)
    return _solve_with_fallback(
        lambda x: energy_residual(x, trace, widths, c),
        lambda x: energy_jacobian(x, trace, widths, c),
        trace, scales, opts, warm_start, c.g,
    )
