"""Scikit-learn style front end for the junction solve.

``JunctionSolver`` is a stateless transformer: ``fit`` only builds the
junction triangle from the hyperparameters, ``transform`` maps rows of
canal traces ``(h1, h2, h3, v1, v2, v3)`` to the junction-face states in
the same layout. Rows are solved in order, each warm-started from the
previous root.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import junction as jsolver
from .geometry import JunctionShape, build
from .swe import G_DEFAULT, PhysicalConstants

SYSTEMS = ("momentum", "energy")


class JunctionSolver(TransformerMixin, BaseEstimator):
    """Solve the three-canal junction for a batch of traces.

    Parameters
    ----------
    theta, phi : float
        Angles of canals 3 and 2 with canal 1, ``0 <= theta <= pi/2`` and
        ``-pi/2 <= phi <= 0``.
    s1, s2, s3 : float
        Canal half-widths.
    system : {"momentum", "energy"}
        Momentum balance on the junction triangle, or the equal-energy closure.
    g : float
        Gravity.
    tol, max_iter, damping, min_step
        Newton controls, see :class:`swjunction.junction.NewtonOptions`.
    warm_start : bool
        Start each row from the previous row's solution.

    Attributes
    ----------
    geometry_ : JunctionGeometry
    n_features_in_ : int
    """

    def __init__(self, theta=np.pi / 6, phi=-np.pi / 6, s1=1.0, s2=1.0, s3=1.0,
                 system="momentum", g=G_DEFAULT, tol=1e-10, max_iter=50,
                 damping=0.5, min_step=1e-4, warm_start=True):
        self.theta = theta
        self.phi = phi
        self.s1 = s1
        self.s2 = s2
        self.s3 = s3
        self.system = system
        self.g = g
        self.tol = tol
        self.max_iter = max_iter
        self.damping = damping
        self.min_step = min_step
        self.warm_start = warm_start

    def _options(self):
        return jsolver.NewtonOptions(self.tol, self.max_iter, self.damping, self.min_step)

    def fit(self, X=None, y=None):
        if self.system not in SYSTEMS:
            raise ValueError(f"system must be one of {SYSTEMS}, got {self.system!r}")
        self.constants_ = PhysicalConstants(float(self.g))
        self.options_ = self._options()
        shape = JunctionShape(self.theta, self.phi, self.s1, self.s2, self.s3)
        self.geometry_ = build(shape)
        self.n_features_in_ = 6
        if X is not None:
            _check_traces(X)
        return self

    def transform(self, X):
        check_is_fitted(self, "geometry_")
        X = _check_traces(X)
        out = np.empty_like(X)
        self.iterations_ = np.zeros(X.shape[0], dtype=int)
        previous = None
        for i, row in enumerate(X):
            sol = self._solve_row(row, previous)
            out[i] = sol.x
            self.iterations_[i] = sol.iterations
            if self.warm_start:
                previous = sol.x
        return out

    def _solve_row(self, trace, warm):
        if self.system == "momentum":
            return jsolver.solve(trace, self.geometry_, self.options_, self.constants_, warm_start=warm)
        s = self.geometry_.shape
        return jsolver.solve_equal_energy(trace, s.s1, s.s2, s.s3, self.options_,
                                          self.constants_, warm_start=warm)

    def residual(self, X, Y):
        """Unscaled residual norms ``max |R(Y_i; X_i)|`` for each row."""
        check_is_fitted(self, "geometry_")
        X = _check_traces(X)
        Y = _check_traces(Y)
        s = self.geometry_.shape
        norms = np.empty(X.shape[0])
        for i, (trace, x) in enumerate(zip(X, Y)):
            if self.system == "momentum":
                r = jsolver.residual(x, trace, self.geometry_, self.constants_)
            else:
                r = jsolver.energy_residual(x, trace, s.widths, self.constants_)
            norms[i] = np.max(np.abs(r))
        return norms


def _check_traces(X):
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != 6:
        raise ValueError(f"expected 6 columns (h1, h2, h3, v1, v2, v3), got {X.shape[1]}")
    if np.any(X[:, :3] <= 0):
        raise ValueError("trace heights must be positive")
    return X
