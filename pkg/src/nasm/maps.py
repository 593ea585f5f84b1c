"""Standard map, its inverse, the period-two composed map and the rotating map.

Everything here works on the lift: ``x`` is never reduced modulo one unless
:func:`project_to_cell` is called.  All functions accept scalars or numpy
arrays for the point coordinates, so the same code drives single orbits and
large ensembles.
"""
from __future__ import annotations

from typing import Iterator, NamedTuple

import numpy as np

TWO_PI = 2.0 * np.pi


class MapParams(NamedTuple):
    """Kick strengths ``(kappa1, kappa2)`` of one realization of the map."""

    kappa1: float
    kappa2: float

    @property
    def twist_region(self) -> bool:
        return abs(self.kappa1) < 2.0 and abs(self.kappa2) < 2.0

    def swapped(self) -> "MapParams":
        return MapParams(self.kappa2, self.kappa1)


class PhasePoint(NamedTuple):
    x: float
    y: float


class Jacobian2(NamedTuple):
    """2x2 derivative ``[[a, b], [c, d]]``; fields may be arrays."""

    a: float
    b: float
    c: float
    d: float

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    @property
    def trace(self):
        return self.a + self.d

    def __matmul__(self, other: "Jacobian2") -> "Jacobian2":
        return Jacobian2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def to_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)


class RotatingMapParams(NamedTuple):
    """Parameters of the three-dimensional rotating standard map.

    The kick at phase ``phi`` is ``kbar + dkappa * cos(2 pi phi)`` and the
    phase advances by ``Omega`` each step.
    """

    kbar: float
    dkappa: float
    Omega: float = 0.5
    phi0: float = 0.0

    @classmethod
    def from_map_params(cls, params: MapParams, phi0: float = 0.0) -> "RotatingMapParams":
        k1, k2 = params
        return cls(0.5 * (k1 + k2), 0.5 * (k2 - k1), 0.5, phi0)

    def nasm_params(self) -> MapParams:
        """Kick pair of the equivalent alternating map when ``Omega = 1/2``.

        The first kick is the one at phase ``phi0``; ``phi0 = 1/2`` gives
        ``(kbar - dkappa, kbar + dkappa)``, the ordering of
        :meth:`from_map_params`.  The kicks are computed exactly as
        :func:`rotating_step` computes them.
        """
        if self.Omega != 0.5:
            raise ValueError("only Omega = 1/2 reduces to an alternating kick")
        a = self.kbar + self.dkappa * cos2pi(self.phi0)
        b = self.kbar + self.dkappa * cos2pi((self.phi0 + 0.5) % 1.0)
        return MapParams(float(a), float(b))


def sin2pi(x):
    """``sin(2 pi x)`` after exact reduction of ``x`` to [-1/2, 1/2]."""
    r = x - np.rint(x)
    return np.sin(TWO_PI * r)


def cos2pi(x):
    r = x - np.rint(x)
    return np.cos(TWO_PI * r)


def _num(v):
    return float(v) if np.ndim(v) == 0 else np.asarray(v, dtype=float)


def _as_xy(p):
    x, y = p
    return _num(x), _num(y)


def std_step(eps: float, p) -> PhasePoint:
    x, y = _as_xy(p)
    y1 = y + eps / TWO_PI * sin2pi(x)
    return PhasePoint(x + y1, y1)


def std_inverse_step(eps: float, p) -> PhasePoint:
    x, y = _as_xy(p)
    x0 = x - y
    return PhasePoint(x0, y - eps / TWO_PI * sin2pi(x0))


def forcing(params: MapParams, p):
    """The pair ``(F1, F2)`` such that the composed map is
    ``(x + 2y + F1, y + F2)``."""
    k1, k2 = params
    x, y = _as_xy(p)
    a = k1 / TWO_PI * sin2pi(x)
    f2 = a + k2 / TWO_PI * sin2pi(x + y + a)
    return a + f2, f2


def composed_step(params: MapParams, p) -> PhasePoint:
    """One step of the autonomous map ``S_{kappa2} o S_{kappa1}``.

    The kicks are grouped as ``y1 = y + a``, ``y' = y1 + b``,
    ``x' = (x + y1) + y'`` which is ``(x + 2y + F1, y + F2)`` with the
    additions ordered exactly like two successive :func:`std_step` calls, so
    the conjugacy and reflection identities hold bit for bit.
    """
    k1, k2 = params
    x, y = _as_xy(p)
    y1 = y + k1 / TWO_PI * sin2pi(x)
    x1 = x + y1
    y2 = y1 + k2 / TWO_PI * sin2pi(x1)
    return PhasePoint(x1 + y2, y2)


def composed_inverse_step(params: MapParams, p) -> PhasePoint:
    k1, k2 = params
    return std_inverse_step(k1, std_inverse_step(k2, p))


def iterate(params: MapParams, p0, n: int) -> PhasePoint:
    """Return the ``n``-th iterate of :func:`composed_step` (vectorized)."""
    p = PhasePoint(*_as_xy(p0))
    for _ in range(n):
        p = composed_step(params, p)
    return p


def orbit(params: MapParams, p0, n: int) -> np.ndarray:
    """Iterates ``0..n`` of the composed map as an ``(n + 1, 2)`` array."""
    out = np.empty((n + 1, 2))
    x, y = _as_xy(p0)
    out[0] = x, y
    for i in range(1, n + 1):
        x, y = composed_step(params, (x, y))
        out[i] = x, y
    return out


def iter_nasm(params: MapParams, p0) -> Iterator[PhasePoint]:
    """Endless generator over the alternating-kick orbit, starting with ``p0``.

    Step ``n`` uses ``kappa1`` when ``n`` is even and ``kappa2`` when odd, so
    every second point is an iterate of :func:`composed_step`.
    """
    kicks = (params[0], params[1])
    p = PhasePoint(*_as_xy(p0))
    n = 0
    while True:
        yield p
        p = std_step(kicks[n & 1], p)
        n += 1


def nasm_trajectory(params: MapParams, p0, n: int, out: np.ndarray | None = None) -> np.ndarray:
    """Points ``0..n`` of the nonautonomous orbit as an ``(n + 1, 2)`` array."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if out is None:
        out = np.empty((n + 1, 2))
    elif out.shape != (n + 1, 2):
        raise ValueError(f"out must have shape {(n + 1, 2)}, got {out.shape}")
    for i, p in zip(range(n + 1), iter_nasm(params, p0)):
        out[i] = p
    return out


def std_jacobian(eps: float, p) -> Jacobian2:
    x, _ = _as_xy(p)
    k = eps * cos2pi(x)
    return Jacobian2(1.0 + k, 1.0 + 0.0 * k, k, 1.0 + 0.0 * k)


def jacobian(params: MapParams, p) -> Jacobian2:
    """Derivative of :func:`composed_step` at ``p`` (chain rule)."""
    k1, k2 = params
    inner = std_step(k1, p)
    return std_jacobian(k2, inner) @ std_jacobian(k1, p)


def twist_derivative(params: MapParams, p):
    """``d x_{n+1} / d y_n`` of the composed map at fixed ``x_n``."""
    k1, k2 = params
    x, y = _as_xy(p)
    return 2.0 + k2 * cos2pi(x + y + k1 / TWO_PI * sin2pi(x))


def rotating_step(rp: RotatingMapParams, state):
    """One step ``(x, y, phi) -> (x', y', phi')`` of the rotating map."""
    x, y, phi = state
    k = rp.kbar + rp.dkappa * cos2pi(phi)
    x, y = std_step(k, (x, y))
    return x, y, (phi + rp.Omega) % 1.0


def rotating_trajectory(rp: RotatingMapParams, p0, n: int) -> np.ndarray:
    """Points ``0..n`` of the rotating map as an ``(n + 1, 3)`` array."""
    out = np.empty((n + 1, 3))
    state = (*_as_xy(p0), rp.phi0)
    out[0] = state
    for i in range(1, n + 1):
        state = rotating_step(rp, state)
        out[i] = state
    return out


# Dyadic lattice arithmetic.  States live on multiples of LATTICE_UNIT with
# the lift split into an integer winding and a fraction in [0, 1).  Half and
# integer shifts, negation and the folded sine are then exact, so orbit
# symmetries hold bit for bit instead of drifting apart at a chaotic rate.
LATTICE_UNIT = 2.0**-44


def snap(v):
    """Round to the nearest lattice point (ties to even, odd-symmetric)."""
    return np.rint(np.asarray(v, dtype=float) / LATTICE_UNIT) * LATTICE_UNIT


def sin2pi_folded(x):
    """``sin(2 pi x)`` evaluated on the first quarter period only.

    Folding is exact for lattice inputs, which makes
    ``sin2pi_folded(x + 1/2) == -sin2pi_folded(x)`` and oddness hold exactly.
    """
    r = np.asarray(x, dtype=float)
    r = r - np.rint(r)
    a = np.abs(r)
    a = np.where(a > 0.25, 0.5 - a, a)
    return np.sign(r) * np.sin(TWO_PI * a)


class LatticeState(NamedTuple):
    """Lift point ``(wind + frac, y)`` with ``frac`` in [0, 1)."""

    wind: np.ndarray
    frac: np.ndarray
    y: np.ndarray

    @classmethod
    def from_lift(cls, x, y) -> "LatticeState":
        x = snap(x)
        w = np.floor(x)
        return cls(w.astype(np.int64), x - w, snap(y))

    @property
    def x(self):
        return self.wind + self.frac


def _lattice_kick(state: LatticeState, kappa) -> LatticeState:
    y = state.y + snap(np.asarray(kappa) / TWO_PI * sin2pi_folded(state.frac))
    x = state.frac + y
    w = np.floor(x)
    return LatticeState(state.wind + w.astype(np.int64), x - w, y)


def lattice_std_step(kappa, state: LatticeState) -> LatticeState:
    return _lattice_kick(state, kappa)


def lattice_std_inverse_step(kappa, state: LatticeState) -> LatticeState:
    """Exact inverse of :func:`lattice_std_step`."""
    x = state.frac - state.y
    w = np.floor(x)
    frac = x - w
    y = state.y - snap(np.asarray(kappa) / TWO_PI * sin2pi_folded(frac))
    return LatticeState(state.wind + w.astype(np.int64), frac, y)


def lattice_composed_step(params, state: LatticeState) -> LatticeState:
    """The composed map on the dyadic lattice (kicks rounded to the lattice).

    ``params`` entries may be arrays broadcasting against the state.
    """
    return _lattice_kick(_lattice_kick(state, params[0]), params[1])


def project_to_cell(p, both: bool = False) -> PhasePoint:
    """Reduce ``x`` to [0, 1); with ``both`` also reduce ``y``."""
    x, y = _as_xy(p)
    return PhasePoint(np.mod(x, 1.0), np.mod(y, 1.0) if both else y)
