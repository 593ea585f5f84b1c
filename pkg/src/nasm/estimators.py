"""scikit-learn style wrappers around the solvers.

These let the numerical routines sit inside parameter searches and
pipelines: hyperparameters go in ``__init__``, fitted state ends in ``_``.
"""
from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import kam, transport
from .maps import MapParams
from .rotation import estimate_rotation_number, resolve_omega


class InvariantCircleSolver(BaseEstimator, TransformerMixin):
    """Solve for one invariant circle; ``transform`` maps angles to points.

    ``fit`` ignores ``X``.  After fitting, ``circle_`` holds the solution and
    ``report_`` the Newton history.
    """

    def __init__(self, kappa1=0.0, kappa2=0.0, omega="golden", n_modes=64, tol=1e-11,
                 mode_cap=2**16, refine=2):
        self.kappa1 = kappa1
        self.kappa2 = kappa2
        self.omega = omega
        self.n_modes = n_modes
        self.tol = tol
        self.mode_cap = mode_cap
        self.refine = refine

    def fit(self, X=None, y=None):
        cfg = kam.SolverConfig(tol=self.tol, mode_cap=self.mode_cap, refine=self.refine)
        w = resolve_omega(self.omega)
        self.circle_, self.report_ = kam.solve_invariant_circle(
            MapParams(self.kappa1, self.kappa2), w.value, cfg=cfg, n=self.n_modes
        )
        self.omega_ = float(w.value)
        if not self.report_.converged:
            raise RuntimeError(f"invariant circle solve failed: {self.report_.reason}")
        return self

    def transform(self, X):
        check_is_fitted(self, "circle_")
        theta = check_array(X, ensure_2d=False).ravel()
        return self.circle_(theta)

    def score(self, X=None, y=None):
        """Negative residual of the invariance equation (higher is better)."""
        check_is_fitted(self, "circle_")
        e = kam.invariance_error(MapParams(self.kappa1, self.kappa2), self.circle_)
        return -float(np.max(np.abs(e)))


class TransportDetector(BaseEstimator, ClassifierMixin):
    """Classify parameter pairs ``(kappa1, kappa2)`` as transporting (1) or not (0)."""

    def __init__(self, M=1000, N=100_000, threshold=2.0, seeding="lattice", seed=0, window="displacement"):
        self.M = M
        self.N = N
        self.threshold = threshold
        self.seeding = seeding
        self.seed = seed
        self.window = window

    def _config(self):
        return transport.ScanConfig(M=self.M, N=self.N, threshold=self.threshold,
                                    seeding=self.seeding, seed=self.seed, window=self.window)

    def fit(self, X=None, y=None):
        self.config_ = self._config()
        self.classes_ = np.array([0, 1])
        return self

    def predict(self, X):
        check_is_fitted(self, "config_")
        X = check_array(X)
        if X.shape[1] != 2:
            raise ValueError(f"expected (n, 2) parameter pairs, got shape {X.shape}")
        return np.array([int(transport.detect_global_transport(tuple(row), self.config_)[0]) for row in X])


class CriticalBoundary(BaseEstimator):
    """Trace a critical boundary along rays and test points against it.

    ``method="direct"`` bisects the transport onset, ``method="kam"``
    continues the circle of rotation ``omega`` to breakdown.  ``predict``
    returns 1 for parameters inside the traced region (radius below the
    boundary radius interpolated at the point's angle).
    """

    def __init__(self, method="direct", angles=None, n_rays=9, M=1000, N=100_000, tol=1e-3,
                 omega="golden", mode_cap=2**13, workers=1):
        self.method = method
        self.angles = angles
        self.n_rays = n_rays
        self.M = M
        self.N = N
        self.tol = tol
        self.omega = omega
        self.mode_cap = mode_cap
        self.workers = workers

    def _angles(self):
        if self.angles is not None:
            return [float(a) for a in self.angles]
        return list(np.linspace(0.0, math.pi, self.n_rays))

    def fit(self, X=None, y=None):
        angles = self._angles()
        if self.method == "direct":
            cfg = transport.ScanConfig(M=self.M, N=self.N)
            self.curve_ = transport.trace_cb_gt(angles, cfg, self.tol, workers=self.workers)
        elif self.method == "kam":
            self.curve_ = kam.trace_cb_omega(self.omega, angles, cfg=kam.SolverConfig(mode_cap=self.mode_cap))
        else:
            raise ValueError(f"unknown method {self.method!r}")
        if len(self.curve_) == 0:
            raise RuntimeError("every ray failed")
        return self

    def boundary_radius(self, angle):
        check_is_fitted(self, "curve_")
        c = self.curve_.sorted()
        a = np.asarray(c.angles)
        return np.interp(angle, a, c.radii)

    def predict(self, X):
        X = check_array(X)
        ang = np.arctan2(X[:, 1], X[:, 0])
        r = np.hypot(X[:, 0], X[:, 1])
        return (r < self.boundary_radius(ang)).astype(int)


class RotationNumberEstimator(BaseEstimator, TransformerMixin):
    """Map initial conditions ``(x, y)`` to rotation-number estimates."""

    def __init__(self, kappa1=0.0, kappa2=0.0, n_iter=10_000, method="weighted"):
        self.kappa1 = kappa1
        self.kappa2 = kappa2
        self.n_iter = n_iter
        self.method = method

    def fit(self, X=None, y=None):
        self.params_ = MapParams(self.kappa1, self.kappa2)
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        X = check_array(X)
        w = estimate_rotation_number(self.params_, (X[:, 0], X[:, 1]), self.n_iter, method=self.method)
        return np.atleast_1d(w)
