"""One-dimensional shallow-water kernel.

Physical flux, characteristic speeds, the two Lax wave curves, the exact
intermediate state of the Riemann problem and the Godunov flux built on it.
Flat bottom, no friction, wet states only.

Scalar helpers take :class:`State` objects; the ``*_arrays`` variants work on
numpy arrays of heights/discharges and are what the finite-volume loop calls.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import DryStateError, NoConvergenceError

G_DEFAULT = 9.81
H_MIN = 1e-12

# |phi_l - phi_r| accepted at the intermediate height (velocity units)
RIEMANN_TOL = 1e-12


@dataclass(frozen=True)
class PhysicalConstants:
    g: float = G_DEFAULT

    def __post_init__(self):
        if not np.isfinite(self.g) or self.g <= 0:
            raise ValueError(f"gravity must be positive and finite, got {self.g!r}")


DEFAULT_CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class State:
    """Water height ``h`` [m] and discharge per unit width ``q`` [m^2/s]."""

    h: float
    q: float

    def __post_init__(self):
        if not (np.isfinite(self.h) and np.isfinite(self.q)):
            raise ValueError(f"non-finite state ({self.h!r}, {self.q!r})")
        if self.h < H_MIN:
            raise DryStateError(f"water height {self.h!r} below wet floor {H_MIN}")

    @classmethod
    def from_hv(cls, h, v):
        return cls(float(h), float(h) * float(v))

    @property
    def v(self):
        return self.q / self.h

    def reflect(self):
        """Mirror image under x -> -x."""
        return State(self.h, -self.q)


class WavePair(NamedTuple):
    lambda1: float
    lambda2: float


def flux(u, c=DEFAULT_CONSTANTS):
    """Physical flux ``(h v, h v^2 + g h^2 / 2)``."""
    return np.array(_flux_hq(u.h, u.q, c.g))


def _flux_hq(h, q, g):
    return q, q * q / h + 0.5 * g * h * h


def eigenvalues(u, c=DEFAULT_CONSTANTS):
    a = float(np.sqrt(c.g * u.h))
    v = u.v
    return WavePair(v - a, v + a)


def froude(u, c=DEFAULT_CONSTANTS):
    return abs(u.v) / float(np.sqrt(c.g * u.h))


def is_subcritical(u, c=DEFAULT_CONSTANTS):
    # Fr == 1 counts as critical
    return bool(froude(u, c) < 1.0)


# --------------------------------------------------------------------------- #
# Wave curves                                                                  #
# --------------------------------------------------------------------------- #


def wave_jump(h, h_k, g):
    """Velocity jump across a wave connecting depth ``h_k`` to depth ``h``.

    Rarefaction branch ``2(sqrt(g h) - sqrt(g h_k))`` for ``h <= h_k``, shock
    branch ``(h - h_k) sqrt(g (h + h_k) / (2 h h_k))`` otherwise. Returns the
    jump and its derivative in ``h``; at ``h == h_k`` the derivative is taken
    from the rarefaction side. Works elementwise on arrays.
    """
    h = np.asarray(h, dtype=float)
    h_k = np.asarray(h_k, dtype=float)
    shock = h > h_k
    # evaluate both branches on safe arguments, then select
    rare = 2.0 * (np.sqrt(g * h) - np.sqrt(g * h_k))
    d_rare = np.sqrt(g / h)
    root = np.sqrt(g * (h + h_k) / (2.0 * h * h_k))
    shk = (h - h_k) * root
    d_shk = root - (h - h_k) * g / (4.0 * h * h * root)
    return np.where(shock, shk, rare), np.where(shock, d_shk, d_rare)


def _check_height(h):
    h = np.asarray(h, dtype=float)
    if np.any(~(h > 0)):
        raise DryStateError("wave curves are defined for positive heights only")
    return h


def phi_l(h, u_l, c=DEFAULT_CONSTANTS):
    """Velocities reachable from ``u_l`` through a left-going (1-)wave."""
    h = _check_height(h)
    jump, _ = wave_jump(h, u_l.h, c.g)
    out = u_l.v - jump
    return float(out) if out.ndim == 0 else out


def phi_r(h, u_r, c=DEFAULT_CONSTANTS):
    """Velocities reachable from ``u_r`` through a right-going (2-)wave."""
    h = _check_height(h)
    jump, _ = wave_jump(h, u_r.h, c.g)
    out = u_r.v + jump
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------- #
# Riemann problem                                                              #
# --------------------------------------------------------------------------- #


def riemann_star(h_l, v_l, h_r, v_r, g=G_DEFAULT, max_iter=100, h_hi=None):
    """Intermediate height and velocity of the Riemann problem, elementwise.

    Solves ``phi_l(h) = phi_r(h)`` by Newton iteration from the
    two-rarefaction estimate, safeguarded by bisection on a bracket whose
    upper end starts at ``h_hi`` (default ``max(h_l, h_r, guess)``) and is
    doubled until it encloses the root.

    Raises
    ------
    DryStateError
        If an input height is below ``H_MIN`` or the data would open a vacuum.
    NoConvergenceError
        If ``max_iter`` iterations do not bring the residual under
        ``RIEMANN_TOL``.
    """
    h_l, v_l, h_r, v_r = np.broadcast_arrays(
        *(np.asarray(a, dtype=float) for a in (h_l, v_l, h_r, v_r))
    )
    if np.any(~(h_l >= H_MIN)) or np.any(~(h_r >= H_MIN)):
        raise DryStateError("Riemann data contain a dry or invalid height")
    dv = v_r - v_l
    c_l = np.sqrt(g * h_l)
    c_r = np.sqrt(g * h_r)

    def residual(h):
        fl, dfl = wave_jump(h, h_l, g)
        fr, dfr = wave_jump(h, h_r, g)
        return -dv - (fl + fr), -(dfl + dfr)

    lo = np.full(h_l.shape, H_MIN)
    f_lo, _ = residual(lo)
    if np.any(f_lo <= 0):
        raise DryStateError("depth positivity violated: the Riemann solution has a dry core")

    guess = (0.5 * (c_l + c_r) - 0.25 * dv) ** 2 / g
    hi = np.maximum(np.maximum(h_l, h_r), guess) if h_hi is None else np.broadcast_to(
        np.asarray(h_hi, dtype=float), h_l.shape
    ).copy()
    hi = np.maximum(hi, 2.0 * H_MIN)
    f_hi, _ = residual(hi)
    for _ in range(200):
        grow = f_hi > 0
        if not grow.any():
            break
        lo = np.where(grow, hi, lo)
        hi = np.where(grow, 2.0 * hi, hi)
        f_hi, _ = residual(hi)
    else:
        raise NoConvergenceError("could not bracket the intermediate height")

    h = np.where((guess > lo) & (guess < hi), guess, 0.5 * (lo + hi))
    scale = 1.0 + np.abs(v_l) + np.abs(v_r) + c_l + c_r
    f, df = residual(h)
    for _ in range(max_iter):
        done = np.abs(f) <= 1e-14 * scale
        if done.all():
            break
        lo = np.where(f > 0, h, lo)
        hi = np.where(f < 0, h, hi)
        step = f / df
        h_new = h - step
        outside = ~((h_new > lo) & (h_new < hi))
        h_new = np.where(outside, 0.5 * (lo + hi), h_new)
        h_new = np.where(done, h, h_new)
        stalled = h_new == h
        h = h_new
        f, df = residual(h)
        if np.all(done | stalled):
            break
    if np.any(np.abs(f) > RIEMANN_TOL):
        raise NoConvergenceError("Riemann solver did not reach the residual tolerance")
    if np.any(h < H_MIN):
        raise DryStateError("intermediate height below the wet floor")
    fl, _ = wave_jump(h, h_l, g)
    fr, _ = wave_jump(h, h_r, g)
    v = 0.5 * ((v_l - fl) + (v_r + fr))
    return h, v


def solve_riemann(u_l, u_r, c=DEFAULT_CONSTANTS):
    """Intermediate state of the Riemann problem between ``u_l`` and ``u_r``."""
    if u_l == u_r:
        return u_l
    h, v = riemann_star(u_l.h, u_l.v, u_r.h, u_r.v, c.g)
    h = float(h)
    return State(h, h * float(v))


def sample_riemann_arrays(h_l, q_l, h_r, q_r, g=G_DEFAULT):
    """Exact Riemann solution at ``x/t = 0`` as ``(h, q)`` arrays.

    All four wave configurations are handled, including sonic points inside
    either rarefaction fan.
    """
    h_l, q_l, h_r, q_r = np.broadcast_arrays(
        *(np.asarray(a, dtype=float) for a in (h_l, q_l, h_r, q_r))
    )
    v_l = q_l / h_l
    v_r = q_r / h_r
    h_s, v_s = riemann_star(h_l, v_l, h_r, v_r, g)
    c_l = np.sqrt(g * h_l)
    c_r = np.sqrt(g * h_r)
    c_s = np.sqrt(g * h_s)

    shock_l = h_s > h_l
    s_shock_l = v_l - c_l * np.sqrt(0.5 * h_s * (h_s + h_l)) / h_l
    head_l = np.where(shock_l, s_shock_l, v_l - c_l)
    tail_l = np.where(shock_l, s_shock_l, v_s - c_s)

    shock_r = h_s > h_r
    s_shock_r = v_r + c_r * np.sqrt(0.5 * h_s * (h_s + h_r)) / h_r
    head_r = np.where(shock_r, s_shock_r, v_r + c_r)
    tail_r = np.where(shock_r, s_shock_r, v_s + c_s)

    # sonic values inside the fans
    c_fan_l = (v_l + 2.0 * c_l) / 3.0
    c_fan_r = (2.0 * c_r - v_r) / 3.0

    left = head_l >= 0
    fan_l = (head_l < 0) & (tail_l > 0)
    right = head_r <= 0
    fan_r = (tail_r < 0) & (head_r > 0)
    conds = [left, fan_l, right, fan_r]
    h = np.select(conds, [h_l, c_fan_l**2 / g, h_r, c_fan_r**2 / g], default=h_s)
    v = np.select(conds, [v_l, c_fan_l, v_r, -c_fan_r], default=v_s)
    q = np.select([left, right], [q_l, q_r], default=h * v)
    return h, q


def godunov_flux_arrays(h_l, q_l, h_r, q_r, g=G_DEFAULT):
    """Godunov flux on arrays of interface states; returns ``(F_h, F_q)``."""
    h_l, q_l, h_r, q_r = np.broadcast_arrays(
        *(np.atleast_1d(np.asarray(a, dtype=float)) for a in (h_l, q_l, h_r, q_r))
    )
    same = (h_l == h_r) & (q_l == q_r)
    f_h = q_l.copy()
    f_q = q_l * q_l / h_l + 0.5 * g * h_l * h_l
    mixed = ~same
    if mixed.any():
        h, q = sample_riemann_arrays(h_l[mixed], q_l[mixed], h_r[mixed], q_r[mixed], g)
        f_h[mixed], f_q[mixed] = _flux_hq(h, q, g)
    return f_h, f_q


def godunov_flux(u_l, u_r, c=DEFAULT_CONSTANTS):
    f_h, f_q = godunov_flux_arrays(u_l.h, u_l.q, u_r.h, u_r.q, c.g)
    return np.array([f_h[0], f_q[0]])
