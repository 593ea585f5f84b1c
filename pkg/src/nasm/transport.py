"""Direct detection of global transport and the critical boundary it implies.

A parameter pair shows transport when some seed's lift displacement
``|y_n - y_0|`` exceeds the threshold (2 by default) within ``N`` iterates of
the composed map.  Bisection along rays ``r (cos a, sin a)`` then gives an
upper bound for the critical radius on each ray.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numba
import numpy as np

from .maps import MapParams

log = logging.getLogger(__name__)

KAPPA_G = 0.971635406  # critical parameter of the standard map

_TWO_PI = 2.0 * math.pi
_CHUNK = 512


class BracketError(RuntimeError):
    """Transport is absent at the outer radius or present at the inner one."""


@dataclass(frozen=True)
class ScanConfig:
    M: int = 1000
    N: int = 100_000
    box: tuple[float, float, float, float] = (0.0, 1.0, 0.0, 0.3)  # x0, x1, y0, y1
    threshold: float = 2.0
    seeding: str = "lattice"  # or "random"
    seed: int = 0
    window: str = "displacement"  # or "absolute"

    def __post_init__(self):
        if self.M < 1 or self.N < 1:
            raise ValueError("M and N must be >= 1")
        if self.threshold < 2.0:
            raise ValueError("threshold must be >= 2")
        if self.seeding not in ("lattice", "random"):
            raise ValueError(f"unknown seeding {self.seeding!r}")
        if self.window not in ("displacement", "absolute"):
            raise ValueError(f"unknown window {self.window!r}")
        x0, x1, y0, y1 = self.box
        if not (x1 > x0 and y1 >= y0):
            raise ValueError("box must be (x0, x1, y0, y1) with x1 > x0, y1 >= y0")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["box"] = list(self.box)
        return d


@dataclass(frozen=True)
class EscapeRecord:
    seed_index: int
    seed: tuple[float, float]
    iterate: int
    displacement: float


def seeds(cfg: ScanConfig) -> np.ndarray:
    """Initial conditions, shape ``(M, 2)``.

    Lattice seeding uses the additive R2 low-discrepancy sequence, so the
    first ``M`` seeds of a larger run are exactly the seeds of a smaller one.
    """
    x0, x1, y0, y1 = cfg.box
    if cfg.seeding == "lattice":
        g = 1.32471795724474602596  # plastic number
        i = np.arange(1, cfg.M + 1, dtype=float)
        u = np.mod(0.5 + i / g, 1.0)
        v = np.mod(0.5 + i / (g * g), 1.0)
    else:
        rng = np.random.default_rng(cfg.seed)
        u, v = rng.random(cfg.M), rng.random(cfg.M)
    return np.column_stack([x0 + (x1 - x0) * u, y0 + (y1 - y0) * v])


@numba.njit(cache=True)
def _sin2pi(x):
    return math.sin(_TWO_PI * (x - np.rint(x)))


@numba.njit(cache=True)
def _scan_kernel(k1, k2, xs, ys, n_iter, lo, hi, relative):
    # Advances every seed in chunks so an escape anywhere is found early.
    # Returns (seed index, iterate, displacement); index -1 when none escaped.
    m = xs.shape[0]
    x = xs.copy()
    y = ys.copy()
    a1 = k1 / _TWO_PI
    a2 = k2 / _TWO_PI
    done = 0
    while done < n_iter:
        steps = min(_CHUNK, n_iter - done)
        for j in range(m):
            xj = x[j]
            yj = y[j]
            ref = ys[j] if relative else 0.0
            for t in range(steps):
                y1 = yj + a1 * _sin2pi(xj)
                x1 = xj + y1
                yj = y1 + a2 * _sin2pi(x1)
                xj = x1 + yj
                d = yj - ref
                if d > hi or d < lo:
                    return j, done + t + 1, yj - ys[j]
            x[j] = xj
            y[j] = yj
        done += steps
    return -1, 0, 0.0


def detect_global_transport(params: MapParams, cfg: ScanConfig = ScanConfig()):
    """``(transport, escape)``; ``escape`` is an :class:`EscapeRecord` or ``None``."""
    k1, k2 = (float(v) for v in params)
    s = seeds(cfg)
    if cfg.window == "displacement":
        lo, hi, rel = -cfg.threshold, cfg.threshold, True
    else:
        lo, hi, rel = cfg.box[2] - cfg.threshold, cfg.box[3] + cfg.threshold, False
    j, it, disp = _scan_kernel(k1, k2, s[:, 0].copy(), s[:, 1].copy(), int(cfg.N), lo, hi, rel)
    if j < 0:
        return False, None
    return True, EscapeRecord(int(j), (float(s[j, 0]), float(s[j, 1])), int(it), float(disp))


def ray_point(angle: float, r: float) -> MapParams:
    return MapParams(r * math.cos(angle), r * math.sin(angle))


def twist_edge(angle: float) -> float:
    """Radius where the ray leaves the twist square ``max(|k1|, |k2|) < 2``."""
    c = max(abs(math.cos(angle)), abs(math.sin(angle)))
    return 2.0 / c


@dataclass(frozen=True)
class RayResult:
    angle: float
    r_inner: float  # no transport detected
    r_outer: float  # transport detected
    escape: EscapeRecord | None = None

    @property
    def r_c(self) -> float:
        return 0.5 * (self.r_inner + self.r_outer)

    @property
    def width(self) -> float:
        return self.r_outer - self.r_inner


def critical_ray_bisection(angle: float, cfg: ScanConfig = ScanConfig(), tol: float = 1e-3,
                           r_inner: float = 0.0, r_outer: float | None = None,
                           full_output: bool = False):
    """Bisect the transport onset on the ray ``r (cos angle, sin angle)``.

    The bracket shrinks until its width is at most ``tol``; the midpoint
    ``r_c`` then has no transport detected at ``r_c - tol`` side and
    transport at the ``r_c + tol`` side.  The default outer radius is just
    inside the edge of the twist region.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if r_outer is None:
        r_outer = twist_edge(angle) * (1.0 - 1e-9)
    hit, esc = detect_global_transport(ray_point(angle, r_outer), cfg)
    if not hit:
        raise BracketError(f"no transport at the outer radius {r_outer:.6g} on angle {angle:.6g}")
    if r_inner > 0 and detect_global_transport(ray_point(angle, r_inner), cfg)[0]:
        raise BracketError(f"transport already at the inner radius {r_inner:.6g} on angle {angle:.6g}")
    lo, hi = r_inner, r_outer
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        t, e = detect_global_transport(ray_point(angle, mid), cfg)
        if t:
            hi, esc = mid, e
        else:
            lo = mid
    res = RayResult(angle, lo, hi, esc)
    return res if full_output else res.r_c


@dataclass
class BoundaryCurve:
    """Critical points ordered by ray angle, one row per ray."""

    method: str  # "direct" or "kam"
    angles: list = field(default_factory=list)
    kappa1: list = field(default_factory=list)
    kappa2: list = field(default_factory=list)
    widths: list = field(default_factory=list)
    omega: float | None = None
    tol: float | None = None
    resolution: int | None = None  # N for direct scans, mode cap for kam
    failures: list = field(default_factory=list)  # (angle, message)
    meta: dict = field(default_factory=dict)

    def add(self, angle: float, r: float, width: float):
        if width <= 0:
            raise ValueError("bisection width must be positive")
        self.angles.append(float(angle))
        self.kappa1.append(r * math.cos(angle))
        self.kappa2.append(r * math.sin(angle))
        self.widths.append(float(width))

    def __len__(self):
        return len(self.angles)

    def sorted(self) -> "BoundaryCurve":
        order = np.argsort(self.angles, kind="stable")
        pick = lambda v: [v[i] for i in order]  # noqa: E731
        return BoundaryCurve(self.method, pick(self.angles), pick(self.kappa1), pick(self.kappa2),
                             pick(self.widths), self.omega, self.tol, self.resolution,
                             list(self.failures), dict(self.meta))

    @property
    def radii(self) -> np.ndarray:
        return np.hypot(self.kappa1, self.kappa2)

    def radius_at(self, angle: float) -> float:
        for a, r in zip(self.angles, self.radii):
            if abs(a - angle) < 1e-12:
                return float(r)
        raise KeyError(f"no point at angle {angle}")


def _ray_job(args):
    angle, cfg, tol = args
    try:
        return angle, critical_ray_bisection(angle, cfg, tol, full_output=True), None
    except BracketError as exc:
        return angle, None, str(exc)


def trace_cb_gt(angles, cfg: ScanConfig = ScanConfig(), tol: float = 1e-3, workers: int = 1) -> BoundaryCurve:
    """One bisection per ray; failed rays are recorded, not raised.

    Results do not depend on ``workers`` because seeding is deterministic.
    """
    angles = [float(a) for a in angles]
    if not angles:
        raise ValueError("need at least one angle")
    if any(a < 0 or a > math.pi for a in angles):
        raise ValueError("angles must lie in the upper half-plane [0, pi]")
    jobs = [(a, cfg, tol) for a in sorted(angles)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_ray_job, jobs))
    else:
        results = [_ray_job(j) for j in jobs]
    curve = BoundaryCurve("direct", tol=tol, resolution=cfg.N, meta={"scan": cfg.to_dict()})
    for angle, res, err in results:
        if res is None:
            curve.failures.append((angle, err))
            log.warning("ray %.6f failed: %s", angle, err)
        else:
            curve.add(angle, res.r_c, res.width)
    return curve


def fit_convergence_exponent(samples, kappa_limit: float = KAPPA_G):
    """Fit ``kappa_N - kappa_limit ~ N^(-1/eta)``; returns ``(eta, r_squared)``."""
    samples = [(float(n), float(k)) for n, k in samples]
    if len(samples) < 3:
        raise ValueError("need at least 3 samples")
    N = np.array([s[0] for s in samples])
    d = np.array([s[1] for s in samples]) - kappa_limit
    if np.any(d <= 0) or np.any(N <= 0):
        raise ValueError("every sample needs N > 0 and kappa_N above the limit")
    x, y = np.log(N), np.log(d)
    slope, icpt = np.polyfit(x, y, 1)
    if slope >= 0:
        raise ValueError(f"kappa_N does not decrease with N (slope {slope:.3g})")
    resid = y - (slope * x + icpt)
    ss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss if ss > 0 else 1.0
    return -1.0 / slope, r2
