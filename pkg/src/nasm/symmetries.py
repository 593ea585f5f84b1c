"""Coordinate/parameter symmetries of the composed map as executable transforms.

Each transform carries its action on an initial condition, on the kick
parameters, the predicted relation between the two orbits on the lift
(including the iterate-dependent integer shifts) and the affine action on
rotation numbers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .maps import (
    LatticeState,
    MapParams,
    PhasePoint,
    composed_step,
    lattice_composed_step,
    lattice_std_inverse_step,
    lattice_std_step,
    std_inverse_step,
    std_step,
)

KINDS = ("Reflect", "Translate", "TranslateReflect", "P3shift", "P4shift", "P34shift")


@dataclass(frozen=True)
class SymmetryTransform:
    """One of the six orbit symmetries.

    ``r`` and ``s`` are the integer shifts used by ``Translate`` and are
    ignored by the other kinds.
    """

    kind: str
    r: int = 0
    s: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown symmetry transform {self.kind!r}; expected one of {KINDS}")
        if self.kind == "Translate" and (int(self.r) != self.r or int(self.s) != self.s):
            raise ValueError("Translate needs integer shifts")

    def point(self, p) -> PhasePoint:
        x, y = p
        k = self.kind
        if k == "Reflect":
            return PhasePoint(-x, -y)
        if k == "Translate":
            return PhasePoint(x + self.r, y + self.s)
        if k == "TranslateReflect":
            return PhasePoint(1.0 - x, 1.0 - y)
        if k == "P3shift":
            return PhasePoint(x + 0.5, y)
        if k == "P4shift":
            return PhasePoint(x, y + 0.5)
        return PhasePoint(x + 0.5, y + 0.5)

    def params(self, params: MapParams) -> MapParams:
        k1, k2 = params
        k = self.kind
        if k == "P3shift":
            return MapParams(-k1, -k2)
        if k == "P4shift":
            return MapParams(k1, -k2)
        if k == "P34shift":
            return MapParams(-k1, k2)
        return MapParams(k1, k2)

    def orbit_relation(self, n):
        """Affine relation between the ``n``-th iterates of the two orbits.

        Returns ``(sx, x_int, x_frac, sy, y_shift)`` meaning
        ``x'_n = sx * x_n + x_int + x_frac`` and ``y'_n = sy * y_n + y_shift``;
        the integer part of the x shift is kept apart for exact bookkeeping.
        """
        k = self.kind
        if k == "Reflect":
            return -1, 0, 0.0, -1, 0.0
        if k == "Translate":
            return 1, self.r + 2 * n * self.s, 0.0, 1, float(self.s)
        if k == "TranslateReflect":
            return -1, 1 + 2 * n, 0.0, -1, 1.0
        if k == "P3shift":
            return 1, 0, 0.5, 1, 0.0
        if k == "P4shift":
            return 1, n, 0.0, 1, 0.5
        return 1, n, 0.5, 1, 0.5

    def predict(self, x_n, y_n, n):
        """Transformed-orbit point predicted from the original ``n``-th iterate."""
        sx, xi, xf, sy, ys = self.orbit_relation(n)
        return sx * x_n + xi + xf, sy * y_n + ys

    @property
    def rotation_action(self) -> tuple[float, float]:
        """``(scale, shift)`` with ``omega' = scale * omega + shift``."""
        return {
            "Reflect": (-1.0, 0.0),
            "Translate": (1.0, 2.0 * self.s),
            "TranslateReflect": (-1.0, 2.0),
            "P3shift": (1.0, 0.0),
            "P4shift": (1.0, 1.0),
            "P34shift": (1.0, 1.0),
        }[self.kind]


def get_transform(kind: str | SymmetryTransform, r: int = 0, s: int = 0) -> SymmetryTransform:
    if isinstance(kind, SymmetryTransform):
        return kind
    return SymmetryTransform(kind, r, s)


def all_transforms() -> list[SymmetryTransform]:
    return [SymmetryTransform(k, 1, -1) if k == "Translate" else SymmetryTransform(k) for k in KINDS]


def apply_symmetry(t, p, params: MapParams) -> tuple[PhasePoint, MapParams]:
    t = get_transform(t)
    return t.point(p), t.params(MapParams(*params))


def check_orbit_symmetry(t, params, p0, n, mode: str = "lattice"):
    """Largest deviation from the predicted orbit identity over ``n`` steps.

    Both the original and the transformed systems are iterated on the lift.
    ``p0`` and the entries of ``params`` may be arrays (one sample each); ``n``
    may then be an array of per-sample step counts.  In ``"lattice"`` mode
    the orbits run on the dyadic lattice where the identities are exact; in
    ``"float"`` mode plain double precision is used and deviations grow at
    the orbit's Lyapunov rate.
    """
    t = get_transform(t)
    n_arr = np.asarray(n)
    if np.any(n_arr < 1):
        raise ValueError("n must be >= 1")
    n_max = int(n_arr.max())
    k1, k2 = (np.asarray(k, dtype=float) for k in params)
    tk = t.params(MapParams(k1, k2))
    x0, y0 = (np.asarray(c, dtype=float) for c in p0)
    if mode == "lattice":
        p = LatticeState.from_lift(x0, y0)
        qx, qy = t.point((p.x, p.y))
        q = LatticeState.from_lift(qx, qy)
        step = lattice_composed_step
    elif mode == "float":
        p = PhasePoint(x0, y0)
        q = t.point(p)
        step = composed_step
    else:
        raise ValueError(f"unknown mode {mode!r}")
    worst = np.zeros(np.broadcast(x0, y0, k1, k2, n_arr).shape)
    for i in range(1, n_max + 1):
        p = step((k1, k2), p)
        q = step(tk, q)
        sx, xi, xf, sy, ys = t.orbit_relation(i)
        if mode == "lattice":
            # integer and fractional parts compared separately, then summed
            dx = (q.wind - sx * p.wind - xi) + (q.frac - sx * p.frac - xf)
        else:
            dx = q.x - (sx * p.x + xi + xf)
        dy = q.y - (sy * p.y + ys)
        dev = np.maximum(np.abs(dx), np.abs(dy))
        worst = np.where(i <= n_arr, np.maximum(worst, dev), worst)
    return float(worst) if worst.ndim == 0 else worst


def rotation_symmetry_predict(t, omega: float) -> float:
    scale, shift = get_transform(t).rotation_action
    return scale * omega + shift


def conjugate_by_std(params: MapParams, p, n: int, mode: str = "float") -> float:
    """Max deviation of ``S_k2^-1 o T^k_{k1 k2} o S_k2`` from ``T^k_{k2 k1}``, k <= n.

    ``mode="lattice"`` runs both sides on the dyadic lattice, where the
    identity is exact; in ``"float"`` mode roundoff grows along chaotic orbits.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    k1, k2 = (np.asarray(k, dtype=float) for k in params)
    x0, y0 = (np.asarray(c, dtype=float) for c in p)
    if mode == "float":
        fwd, inv, comp = std_step, std_inverse_step, composed_step
        w = PhasePoint(x0, y0)
    elif mode == "lattice":
        fwd, inv, comp = lattice_std_step, lattice_std_inverse_step, lattice_composed_step
        w = LatticeState.from_lift(x0, y0)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    z = fwd(k2, w)
    worst = 0.0
    for _ in range(n):
        z = comp((k1, k2), z)
        w = comp((k2, k1), w)
        back = inv(k2, z)
        if mode == "lattice":
            dx = (back.wind - w.wind) + (back.frac - w.frac)
        else:
            dx = back.x - w.x
        worst = max(worst, float(np.max(np.abs(dx))), float(np.max(np.abs(back.y - w.y))))
    return worst


def rescale_axis_case(kappa1: float, p, axis: int = 1) -> PhasePoint:
    """Image of ``p`` under the rescaled standard map with ``eps = 2 kappa``.

    With ``axis=1`` this evaluates ``P_{1/2} o S_{2 kappa} o P_2`` which equals
    one step of the composed map at ``(kappa, 0)``.  With ``axis=2`` it
    evaluates the same conjugated through ``S_0``, equal to one step at
    ``(0, kappa)``.
    """
    x, y = p
    if axis == 2:
        x, y = std_step(0.0, (x, y))
    X, Y = std_step(2.0 * kappa1, (x, 2.0 * y))
    out = PhasePoint(X, 0.5 * Y)
    if axis == 2:
        out = std_inverse_step(0.0, out)
    elif axis != 1:
        raise ValueError("axis must be 1 or 2")
    return out
