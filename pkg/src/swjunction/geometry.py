"""Junction triangle built from the canal angles and half-widths.

Canal 1 runs along +x and ends at the origin; canal 2 leaves at angle
``phi <= 0`` and canal 3 at angle ``theta >= 0``. The triangle is spanned by
the pairwise intersections of the inner walls:

* ``p13``: upper wall of canal 1 with the upper wall of canal 3,
* ``p12``: lower wall of canal 1 with the lower wall of canal 2,
* ``p23``: lower wall of canal 3 with the upper wall of canal 2.

Edge ``k`` is the face through which canal ``k`` exchanges water with the
triangle. ``alpha[k]`` and ``beta[k]`` are the x/y components of
``l_k * n_k`` and ``gamma[k]`` its projection on the axis of canal ``k``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateTriangleError, InvalidShapeError

ANGLE_SNAP = 1e-12
HALF_PI = 0.5 * math.pi


def _snap(value, target):
    return target if abs(value - target) < ANGLE_SNAP else value


@dataclass(frozen=True)
class JunctionShape:
    """Angles (radians) of canals 3 and 2 with the x axis, and half-widths."""

    theta: float
    phi: float
    s1: float
    s2: float
    s3: float

    def __post_init__(self):
        vals = (self.theta, self.phi, self.s1, self.s2, self.s3)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidShapeError(f"non-finite junction parameters {vals}")
        object.__setattr__(self, "theta", _snap(_snap(float(self.theta), 0.0), HALF_PI))
        object.__setattr__(self, "phi", _snap(_snap(float(self.phi), 0.0), -HALF_PI))
        for name in ("s1", "s2", "s3"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for message in self.problems():
            raise InvalidShapeError(message)

    def problems(self):
        """All invariant violations, as readable messages."""
        out = []
        if not 0.0 <= self.theta <= HALF_PI:
            out.append(f"theta={self.theta!r} outside [0, pi/2]")
        if not -HALF_PI <= self.phi <= 0.0:
            out.append(f"phi={self.phi!r} outside [-pi/2, 0]")
        for name in ("s1", "s2", "s3"):
            if not getattr(self, name) > 0:
                out.append(f"{name}={getattr(self, name)!r} must be positive")
        if out:
            return out
        if self.kind == "theta0" and not _close(self.s1, self.s3):
            out.append("theta=0 with phi!=0 requires s1 == s3")
        if self.kind == "phi0" and not _close(self.s1, self.s2):
            out.append("phi=0 with theta!=0 requires s1 == s2")
        return out

    @property
    def kind(self):
        """``straight``, ``tee``, ``theta0``, ``phi0`` or ``generic``."""
        if self.theta == 0.0 and self.phi == 0.0:
            return "straight"
        if self.theta == HALF_PI and self.phi == -HALF_PI:
            return "tee"
        if self.theta == 0.0:
            return "theta0"
        if self.phi == 0.0:
            return "phi0"
        return "generic"

    @property
    def widths(self):
        return np.array([self.s1, self.s2, self.s3])

    def scaled(self, factor):
        return JunctionShape(self.theta, self.phi, factor * self.s1, factor * self.s2, factor * self.s3)


def _close(a, b):
    return abs(a - b) <= 1e-12 * max(abs(a), abs(b))


def _trig(angle):
    # exact values on the snapped special angles keep symmetric setups symmetric
    if angle == 0.0:
        return 1.0, 0.0
    if angle == HALF_PI:
        return 0.0, 1.0
    if angle == -HALF_PI:
        return 0.0, -1.0
    return math.cos(angle), math.sin(angle)


@dataclass(frozen=True, eq=False)
class JunctionGeometry:
    shape: JunctionShape
    p12: np.ndarray
    p13: np.ndarray
    p23: np.ndarray
    lengths: np.ndarray
    normals: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    directions: np.ndarray = field(repr=False)

    @property
    def l1(self):
        return self.lengths[0]

    @property
    def l2(self):
        return self.lengths[1]

    @property
    def l3(self):
        return self.lengths[2]

    @property
    def n1(self):
        return self.normals[0]

    @property
    def n2(self):
        return self.normals[1]

    @property
    def n3(self):
        return self.normals[2]

    @property
    def centroid(self):
        return (self.p12 + self.p13 + self.p23) / 3.0

    @property
    def area(self):
        return 0.5 * _cross(self.p23 - self.p12, self.p13 - self.p12)

    def edge_midpoints(self):
        return np.array([
            0.5 * (self.p12 + self.p13),
            0.5 * (self.p12 + self.p23),
            0.5 * (self.p13 + self.p23),
        ])


def _cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def degeneracy_indicator(shape):
    """Left-hand side of the collinearity condition for generic angles.

    Zero when the three wall intersections are aligned. Homogeneous of degree
    two in the widths. It is only meaningful when ``sin(theta)``,
    ``sin(phi)`` and ``sin(theta - phi)`` are all nonzero; on the special
    angles it vanishes identically even though the special-case triangles
    are fine.
    """
    t, p = shape.theta, shape.phi
    a = shape.s1 * math.sin(t - p) + shape.s3 * math.sin(p) - shape.s2 * math.sin(t)
    return a * a + 4.0 * shape.s2 * shape.s3 * math.sin(p) * math.sin(t)


def _geom_eps(shape):
    return 1e-12 * (shape.s1 + shape.s2 + shape.s3) ** 2


def vertices(shape):
    """``(p12, p13, p23)`` including the special-angle prescriptions."""
    s1, s2, s3 = shape.s1, shape.s2, shape.s3
    ct, st = _trig(shape.theta)
    cp, sp = _trig(shape.phi)
    kind = shape.kind
    if kind == "straight":
        return np.array([0.0, -s1]), np.array([0.0, s1]), np.array([s1, 0.0])
    if kind == "tee":
        if _close(s2, s3):
            return np.array([-s2, -s1]), np.array([-s2, s1]), np.array([s2, 0.0])
        return np.array([-s2, -s1]), np.array([-s3, s1]), np.array([min(s2, s3), 0.0])
    p13 = np.array([0.0, s1]) if kind == "theta0" else np.array([(s1 * ct - s3) / st, s1])
    p12 = np.array([0.0, -s1]) if kind == "phi0" else np.array([(s2 - s1 * cp) / sp, -s1])
    sdiff = st * cp - ct * sp
    p23 = np.array([(s3 * cp + s2 * ct) / sdiff, (s3 * sp + s2 * st) / sdiff])
    return p12, p13, p23


def is_degenerate(shape):
    """True when the junction triangle collapses onto a line.

    Generic angles use the closed-form indicator; the special configurations
    (zero angles, T-junction) test the signed area of their prescribed
    vertices instead, because the indicator is identically zero there.
    """
    if shape.kind == "generic":
        return abs(degeneracy_indicator(shape)) <= _geom_eps(shape)
    p12, p13, p23 = vertices(shape)
    return abs(0.5 * _cross(p23 - p12, p13 - p12)) <= _geom_eps(shape)


def is_orthogonal(shape):
    """True when every canal axis is perpendicular to its triangle edge."""
    ct, st = _trig(shape.theta)
    cp, sp = _trig(shape.phi)
    tol = 1e-12 * max(shape.s1, shape.s2, shape.s3)
    return (abs(shape.s2 * sp + shape.s3 * st) <= tol
            and abs(shape.s1 - shape.s2 * cp - shape.s3 * ct) <= tol)


def build(shape):
    """Construct the junction triangle, its edges and projection coefficients.

    Raises
    ------
    DegenerateTriangleError
        If the triangle is degenerate, or inverted (its vertices come out
        clockwise, so the canal-facing normals would point inward).
    """
    if is_degenerate(shape):
        raise DegenerateTriangleError(f"degenerate junction triangle for {shape}")
    p12, p13, p23 = vertices(shape)
    # counter-clockwise walk p12 -> p23 -> p13; outward normal of a->b is (dy, -dx)
    edges = [(p13, p12), (p12, p23), (p23, p13)]
    scaled_normals = np.array([[b[1] - a[1], -(b[0] - a[0])] for a, b in edges])
    lengths = np.hypot(scaled_normals[:, 0], scaled_normals[:, 1])
    normals = scaled_normals / lengths[:, None]

    ct, st = _trig(shape.theta)
    cp, sp = _trig(shape.phi)
    directions = np.array([[1.0, 0.0], [cp, sp], [ct, st]])
    alpha = scaled_normals[:, 0].copy()
    beta = scaled_normals[:, 1].copy()
    gamma = np.einsum("ij,ij->i", scaled_normals, directions)
    gamma[0] = alpha[0]

    geom = JunctionGeometry(shape, p12, p13, p23, lengths, normals, alpha, beta, gamma, directions)
    mids = geom.edge_midpoints() - geom.centroid
    if geom.area <= 0 or np.any(np.einsum("ij,ij->i", normals, mids) <= 0):
        raise DegenerateTriangleError(f"inverted junction triangle for {shape}")
    return geom


def closed_form_coefficients(shape):
    """``alpha, beta, gamma`` from the generic closed-form expressions.

    Independent of :func:`build`; used to cross-check it. Generic angles only.
    """
    if shape.kind != "generic":
        raise ValueError("closed forms need nonzero sin(theta), sin(phi), sin(theta - phi)")
    s1, s2, s3 = shape.s1, shape.s2, shape.s3
    t, p = shape.theta, shape.phi
    ratio = (s2 * math.sin(t) + s3 * math.sin(p)) / math.sin(t - p)
    cross = (s2 * math.cos(t) + s3 * math.cos(p)) / math.sin(t - p)
    alpha = np.array([-2.0 * s1, s1 + ratio, s1 - ratio])
    beta = np.array([
        (s1 * math.sin(t + p) - s2 * math.sin(t) - s3 * math.sin(p)) / (math.sin(p) * math.sin(t)),
        -cross - (s1 * math.cos(p) - s2) / math.sin(p),
        cross - (s1 * math.cos(t) - s3) / math.sin(t),
    ])
    gamma = np.array([
        alpha[0],
        alpha[1] * math.cos(p) + beta[1] * math.sin(p),
        alpha[2] * math.cos(t) + beta[2] * math.sin(t),
    ])
    return alpha, beta, gamma
