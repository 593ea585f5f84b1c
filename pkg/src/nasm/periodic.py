"""Period-one orbits, Greene residues, stability grids and m/n orbit finding."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .maps import (
    TWO_PI,
    Jacobian2,
    MapParams,
    PhasePoint,
    composed_step,
    jacobian,
    sin2pi,
)

POINT_CLASSES = ("I", "II", "III", "IV")

# representative primary fixed point of each stability class
CLASS_POINTS = {
    "I": PhasePoint(0.0, 0.0),
    "II": PhasePoint(0.5, 0.0),
    "III": PhasePoint(0.0, 0.5),
    "IV": PhasePoint(0.5, 0.5),
}


class NotPeriodicError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class FixedPointRecord:
    location: PhasePoint
    period: int
    winding: int
    residue: float

    @property
    def stable(self) -> bool:
        return 0.0 < self.residue < 1.0


def primary_fixed_points() -> list[PhasePoint]:
    return [
        PhasePoint(0.5, 0.0),
        PhasePoint(0.0, 0.0),
        PhasePoint(0.0, 0.5),
        PhasePoint(0.0, -0.5),
        PhasePoint(0.5, 0.5),
        PhasePoint(0.5, -0.5),
    ]


def _orbit_jacobian(params, pts) -> Jacobian2:
    m = Jacobian2(1.0, 0.0, 0.0, 1.0)
    for p in pts:
        m = jacobian(params, p) @ m
    return m


def residue_of_orbit(params: MapParams, orbit, tol: float = 1e-10) -> float:
    """Greene residue ``(2 - tr M) / 4`` of a periodic orbit.

    ``orbit`` lists the points of one period in order.  Consecutive images
    may differ by integer shifts in ``x`` only.
    """
    pts = [PhasePoint(float(p[0]), float(p[1])) for p in orbit]
    if not pts:
        raise NotPeriodicError("empty orbit")
    for i, p in enumerate(pts):
        q = composed_step(params, p)
        nxt = pts[(i + 1) % len(pts)]
        dx = q.x - nxt.x
        if abs(dx - round(dx)) > tol or abs(q.y - nxt.y) > tol:
            raise NotPeriodicError(f"point {i} does not map onto the next one (dx={dx:.3e}, dy={q.y - nxt.y:.3e})")
    return 0.25 * (2.0 - _orbit_jacobian(params, pts).trace)


def closed_form_quantity(point_class: str, kappa1, kappa2):
    """The combination whose membership in (0, 2) decides stability."""
    if point_class == "I":
        return -kappa1 - kappa2 - kappa1 * kappa2 / 2
    if point_class == "II":
        return kappa1 + kappa2 - kappa1 * kappa2 / 2
    if point_class == "III":
        return kappa2 - kappa1 + kappa1 * kappa2 / 2
    if point_class == "IV":
        return kappa1 - kappa2 + kappa1 * kappa2 / 2
    raise ValueError(f"unknown point class {point_class!r}")


def primary_residue(point_class: str, kappa1, kappa2):
    """Vectorized residue of a primary fixed point via the Jacobian product."""
    p = CLASS_POINTS[point_class]
    return 0.25 * (2.0 - jacobian(MapParams(kappa1, kappa2), p).trace)


def grid_centers(lo: float, hi: float, n: int) -> np.ndarray:
    """Cell centers, mirror-exact when the interval is symmetric about 0."""
    h = (hi - lo) / n
    return 0.5 * (lo + hi) + (np.arange(n) - 0.5 * (n - 1)) * h


@dataclass
class StabilityGrid:
    point_class: str
    box: tuple[float, float, float, float]
    resolution: int
    kappa1: np.ndarray
    kappa2: np.ndarray
    closed_form: np.ndarray
    by_residue: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def stable(self) -> np.ndarray:
        return self.closed_form

    def interior_mask(self) -> np.ndarray:
        """Cells whose 8 neighbours share their closed-form classification."""
        s = self.closed_form
        inner = np.zeros_like(s, dtype=bool)
        c = s[1:-1, 1:-1]
        ok = np.ones_like(c, dtype=bool)
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                ok &= s[1 + di : s.shape[0] - 1 + di, 1 + dj : s.shape[1] - 1 + dj] == c
        inner[1:-1, 1:-1] = ok
        return inner

    def agreement(self) -> float:
        """Fraction of interior cells where both classifications agree."""
        mask = self.interior_mask()
        return float(np.mean(self.closed_form[mask] == self.by_residue[mask]))

    def rows(self):
        """``(kappa1, kappa2, class, stable)`` tuples, kappa1 varying fastest."""
        for j, k2 in enumerate(self.kappa2):
            for i, k1 in enumerate(self.kappa1):
                yield float(k1), float(k2), self.point_class, bool(self.closed_form[j, i])


def stability_region(point_class: str, box=(-2.0, 2.0, -2.0, 2.0), resolution: int = 400) -> StabilityGrid:
    """Stability of one class of primary fixed points on a cell-centred grid.

    Arrays are indexed ``[kappa2_index, kappa1_index]``.
    """
    if resolution < 1:
        raise ValueError("resolution must be positive")
    if point_class not in POINT_CLASSES:
        raise ValueError(f"unknown point class {point_class!r}")
    k1lo, k1hi, k2lo, k2hi = box
    k1 = grid_centers(k1lo, k1hi, resolution)
    k2 = grid_centers(k2lo, k2hi, resolution)
    K1, K2 = np.meshgrid(k1, k2)
    q = closed_form_quantity(point_class, K1, K2)
    R = primary_residue(point_class, K1, K2)
    return StabilityGrid(
        point_class,
        tuple(box),
        resolution,
        k1,
        k2,
        (q > 0) & (q < 2),
        (R > 0) & (R < 1),
    )


def secondary_equation(x, params: MapParams):
    """Left minus right side of the secondary period-one condition."""
    k1, k2 = params
    s = sin2pi(x)
    return k1 * s + k2 * np.sin(TWO_PI * (x - np.rint(x)) + 0.5 * k1 * s)


def _reduced_equation(x, params: MapParams):
    # the secondary equation divided by sin(2 pi x), which removes the
    # primary roots; finite at x = 0 and 1/2 for grid points avoiding them
    k1, k2 = params
    s = sin2pi(x)
    return k1 + k2 * np.sin(TWO_PI * (x - np.rint(x)) + 0.5 * k1 * s) / s


def solve_secondary_period1(params: MapParams, n_grid: int = 2**12, polish_tol: float = 1e-15) -> list[FixedPointRecord]:
    """All secondary period-one orbits in the cell x in [0, 1).

    Roots are bracketed by sign changes on a grid offset from the primary
    roots ``x = 0, 1/2`` and polished with Brent's method.  ``y`` comes from
    ``2 y = -(kappa1 / 2 pi) sin(2 pi x)`` taken in (-1/2, 1/2].
    """
    params = MapParams(*params)
    x = (np.arange(n_grid) + 0.5) / n_grid
    h = _reduced_equation(x, params)
    idx = np.nonzero(np.sign(h[:-1]) * np.sign(h[1:]) < 0)[0]
    out = []
    for i in idx:
        xs = brentq(_reduced_equation, x[i], x[i + 1], args=(params,), xtol=polish_tol, rtol=4 * np.finfo(float).eps)
        ys = -0.5 * params.kappa1 / TWO_PI * np.sin(TWO_PI * xs)
        ys = ys - np.ceil(ys - 0.5)  # into (-1/2, 1/2]
        p = PhasePoint(float(xs), float(ys))
        out.append(FixedPointRecord(p, 1, 0, residue_of_orbit(params, [p])))
    return out


def z_star_estimate(params: MapParams) -> float | None:
    """Third-order estimate of ``|2 pi x* - pi|`` for the secondary orbits.

    Returns ``None`` where the estimated square is negative (no nearby
    secondary orbits) or the denominator vanishes.
    """
    k1, k2 = params
    num = 6 * k1 + 6 * k2 - 3 * k1 * k2
    den = k1 - k1 * k2 / 2 + k2 * (1 - k1 / 2) ** 3
    if den == 0.0:
        return None
    q = num / den
    if q < 0:
        return None
    return float(np.sqrt(q))


def find_periodic_orbit(
    params: MapParams,
    m: int,
    n: int,
    guess,
    tol: float = 1e-12,
    max_iter: int = 50,
) -> FixedPointRecord:
    """Newton solve of ``T^n(z) = z + (m, 0)`` on the lift."""
    if n < 1:
        raise ValueError("n must be >= 1")
    params = MapParams(*params)
    z = np.array([float(guess[0]), float(guess[1])])
    for _ in range(max_iter):
        p = PhasePoint(*z)
        M = Jacobian2(1.0, 0.0, 0.0, 1.0)
        for _ in range(n):
            M = jacobian(params, p) @ M
            p = composed_step(params, p)
        G = np.array([p.x - z[0] - m, p.y - z[1]])
        if np.max(np.abs(G)) < tol:
            break
        A = M.to_array() - np.eye(2)
        if abs(np.linalg.det(A)) < 1e-14:
            raise ConvergenceError("singular linearization (residue near 0)")
        z = z - np.linalg.solve(A, G)
        if not np.all(np.isfinite(z)):
            raise ConvergenceError("Newton iterate is not finite")
    else:
        raise ConvergenceError(f"no convergence in {max_iter} iterations")
    orbit = [PhasePoint(float(z[0]), float(z[1]))]
    for _ in range(n - 1):
        orbit.append(composed_step(params, orbit[-1]))
    res = 0.25 * (2.0 - _orbit_jacobian(params, orbit).trace)
    return FixedPointRecord(PhasePoint(float(z[0]), float(z[1])), n, m, float(res))
