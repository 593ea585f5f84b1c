"""Spectral Newton solver for invariant circles of the composed map.

A circle is stored on a uniform grid of ``n`` points ``theta_j = j / n`` as

    K(theta) = (theta + u_x(theta), K_y(theta))

with ``u_x`` of zero mean (this pins the phase) and ``K_y`` carrying its own
mean.  The invariance equation ``T o K(theta) = K(theta + omega)`` is solved
by the quadratically convergent quasi-Newton step built on the adapted
symplectic frame, which reduces every linear solve to two cohomological
equations that are diagonal in Fourier space.  Each step costs O(n log n).
"""
from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .maps import TWO_PI, MapParams, jacobian, sin2pi
from .rotation import RotationNumber, resolve_omega

log = logging.getLogger(__name__)

SMALL_DIVISOR_MIN = 1e-9


class SmallDivisorError(ArithmeticError):
    def __init__(self, k: int, divisor: float):
        super().__init__(f"|1 - exp(2 pi i k omega)| = {divisor:.3e} below threshold at k = {k}")
        self.k = k
        self.divisor = divisor


class DegenerateTorsionError(ArithmeticError):
    pass


class SingularFrameError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# Fourier helpers (real grid data <-> rfft coefficients)


def _wavenumbers(n: int) -> np.ndarray:
    return np.arange(n // 2 + 1, dtype=float)


def _drop_nyquist(c: np.ndarray, n: int) -> np.ndarray:
    if n % 2 == 0:
        c[-1] = 0.0
    return c


def spectral_derivative(u: np.ndarray) -> np.ndarray:
    n = u.shape[-1]
    c = np.fft.rfft(u) * (2j * np.pi * _wavenumbers(n))
    return np.fft.irfft(_drop_nyquist(c, n), n)


def spectral_shift(u: np.ndarray, omega: float) -> np.ndarray:
    """``u(theta + omega)`` as a phase rotation of the Fourier coefficients."""
    n = u.shape[-1]
    c = np.fft.rfft(u) * np.exp(2j * np.pi * _wavenumbers(n) * omega)
    return np.fft.irfft(_drop_nyquist(c, n), n)


def resample(u: np.ndarray, n_new: int) -> np.ndarray:
    """Trigonometric interpolation of periodic grid data onto ``n_new`` points."""
    n = u.shape[-1]
    if n_new == n:
        return u.copy()
    c = np.fft.rfft(u) / n
    c = _drop_nyquist(c, n)
    m = n_new // 2 + 1
    out = np.zeros(m, dtype=complex)
    k = min(m, c.shape[0])
    out[:k] = c[:k]
    return np.fft.irfft(_drop_nyquist(out, n_new) * n_new, n_new)


def _low_pass(u: np.ndarray, kmax: int) -> np.ndarray:
    c = np.fft.rfft(u)
    c[kmax:] = 0.0
    return np.fft.irfft(c, u.shape[-1])


def cohomology_solve(rhs: np.ndarray, omega: float, zero_mean_enforced: bool = True, mean_tol: float = 1e-12,
                     divisor_min: float = SMALL_DIVISOR_MIN, noise_floor: float = 0.0) -> np.ndarray:
    """Zero-mean periodic solution ``W`` of ``W(theta) - W(theta + omega) = rhs``.

    The mean of ``rhs`` is the obstruction to solvability: it is removed when
    ``zero_mean_enforced``, otherwise a nonzero mean raises ``ValueError``.
    Normalized coefficients of ``rhs`` below ``noise_floor`` are dropped
    before dividing, so roundoff is not blown up by small divisors.
    """
    rhs = np.asarray(rhs, dtype=float)
    n = rhs.shape[-1]
    c = np.fft.rfft(rhs)
    mean = c[0].real / n
    if not zero_mean_enforced and abs(mean) > mean_tol * max(1.0, np.max(np.abs(rhs))):
        raise ValueError(f"right-hand side has nonzero mean {mean:.3e}; equation is unsolvable")
    k = _wavenumbers(n)
    div = 1.0 - np.exp(2j * np.pi * k * omega)
    kk = k[1:-1] if n % 2 == 0 else k[1:]
    small = np.abs(div[1 : 1 + kk.shape[0]])
    if small.size and small.min() < divisor_min:
        j = int(np.argmin(small))
        raise SmallDivisorError(int(kk[j]), float(small[j]))
    if noise_floor > 0:
        c = np.where(np.abs(c) < noise_floor * n, 0.0, c)
    out = np.zeros_like(c)
    out[1 : 1 + kk.shape[0]] = c[1 : 1 + kk.shape[0]] / div[1 : 1 + kk.shape[0]]
    return np.fft.irfft(out, n)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FourierCircle:
    """Grid representation of a parameterized circle with rotation ``omega``."""

    ux: np.ndarray
    ky: np.ndarray
    omega: float

    def __post_init__(self):
        if self.ux.shape != self.ky.shape or self.ux.ndim != 1:
            raise ValueError("ux and ky must be 1-d arrays of equal length")

    @property
    def n(self) -> int:
        return self.ux.shape[0]

    @property
    def theta(self) -> np.ndarray:
        return np.arange(self.n) / self.n

    @property
    def c(self) -> float:
        return float(self.ky.mean())

    @property
    def uy(self) -> np.ndarray:
        return self.ky - self.ky.mean()

    @classmethod
    def integrable(cls, omega, n: int = 64) -> "FourierCircle":
        """The flat circle ``y = omega / 2`` of the unperturbed composed map."""
        w = float(omega)
        return cls(np.zeros(n), np.full(n, 0.5 * w), w)

    def coefficients(self) -> tuple[np.ndarray, np.ndarray]:
        """Normalized rfft coefficients of ``u_x`` and ``u_y``."""
        return np.fft.rfft(self.ux) / self.n, np.fft.rfft(self.uy) / self.n

    def tail(self) -> float:
        """Largest coefficient modulus beyond ``n / 4``."""
        cx, cy = self.coefficients()
        q = self.n // 4
        return float(max(np.max(np.abs(cx[q:]), initial=0.0), np.max(np.abs(cy[q:]), initial=0.0)))

    def resampled(self, n_new: int) -> "FourierCircle":
        return FourierCircle(resample(self.ux, n_new), resample(self.ky, n_new), self.omega)

    def __call__(self, theta) -> np.ndarray:
        """Evaluate ``K`` at arbitrary ``theta`` (on the lift), shape ``(..., 2)``."""
        theta = np.asarray(theta, dtype=float)
        cx, cy = self.coefficients()
        k = _wavenumbers(self.n)
        w = np.ones_like(k) * 2.0
        w[0] = 1.0
        if self.n % 2 == 0:
            w[-1] = 0.0
        ph = np.exp(2j * np.pi * np.multiply.outer(theta, k))
        ux = np.real(ph @ (w * cx))
        uy = np.real(ph @ (w * cy))
        return np.stack([theta + ux, self.c + uy], axis=-1)

    def with_omega(self, omega: float) -> "FourierCircle":
        return replace(self, omega=float(omega))


@dataclass
class AdaptedFrame:
    """Adapted symplectic frame along a circle, sampled on the grid.

    ``M[..., j]`` is the 2x2 matrix ``[DK | J^-1 DK N]`` at ``theta_j``.
    """

    dk: np.ndarray  # (2, n)
    normalization: np.ndarray  # N = 1 / |DK|^2
    torsion: np.ndarray  # S(theta)
    dk_shift: np.ndarray  # DK(theta + omega)
    normalization_shift: np.ndarray

    @property
    def M(self) -> np.ndarray:
        dx, dy = self.dk
        N = self.normalization
        return np.array([[dx, -dy * N], [dy, dx * N]])

    @property
    def det(self) -> np.ndarray:
        M = self.M
        return M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]


@dataclass
class SolveReport:
    converged: bool = False
    error: float = np.inf
    iterations: int = 0
    n: int = 0
    errors: list = field(default_factory=list)
    seminorms: list = field(default_factory=list)
    exactness: list = field(default_factory=list)
    reason: str = ""
    blowup: bool = False
    step_times: list = field(default_factory=list)


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-11
    max_iter: int = 25
    tail_tol: float = 1e-13
    mode_cap: int = 2**16
    divergence: float = 1e-1
    pad: bool = False
    divisor_min: float = SMALL_DIVISOR_MIN
    refine: int = 2
    refine_above: float = 1e-9
    noise_floor: float = 1e-17
    tail_floor: float = 1e-15  # roundoff per retained mode; see tail_limit

    def tail_limit(self, n: int) -> float:
        """Tail tolerance on an ``n``-point grid.

        Roundoff divided by small divisors of size ~1/k leaves a floor that
        grows like ``n``; asking for less than that only doubles forever.
        """
        return max(self.tail_tol, self.tail_floor * n)


# ---------------------------------------------------------------------------


def _map_on_circle(params, x, y):
    k1, k2 = params
    y1 = y + k1 / TWO_PI * sin2pi(x)
    x1 = x + y1
    y2 = y1 + k2 / TWO_PI * sin2pi(x1)
    return y1, y2


def invariance_error(params: MapParams, K: FourierCircle, pad: bool = False) -> np.ndarray:
    """``T o K(theta) - K(theta + omega)`` on the grid, shape ``(2, n)``.

    The affine parts ``theta`` and ``theta + omega`` cancel analytically in
    the x component.  With ``pad`` the nonlinearity is evaluated on a twice
    finer grid and projected back.
    """
    if pad:
        fine = K.resampled(2 * K.n)
        e = invariance_error(params, fine)
        return np.array([resample(e[0], K.n), resample(e[1], K.n)])
    theta = K.theta
    y1, y2 = _map_on_circle(params, theta + K.ux, K.ky)
    ex = K.ux + y1 + y2 - K.omega - spectral_shift(K.ux, K.omega)
    ey = y2 - spectral_shift(K.ky, K.omega)
    return np.array([ex, ey])


def adapted_frame(params: MapParams, K: FourierCircle, min_norm: float = 1e-12) -> AdaptedFrame:
    """Tangent/symplectic-normal frame along ``K`` and the torsion ``S``."""
    dx = 1.0 + spectral_derivative(K.ux)
    dy = spectral_derivative(K.ky)
    nrm = dx * dx + dy * dy
    if np.min(nrm) < min_norm:
        raise SingularFrameError(f"|DK| vanishes on the grid (min |DK|^2 = {np.min(nrm):.3e})")
    N = 1.0 / nrm
    dxs = 1.0 + spectral_shift(dx - 1.0, K.omega)
    dys = spectral_shift(dy, K.omega)
    Ns = 1.0 / (dxs * dxs + dys * dys)
    D = jacobian(params, (K.theta + K.ux, K.ky))
    # second frame column J^-1 DK N with J^-1 (a, b) = (-b, a)
    vx, vy = -dy * N, dx * N
    wx = D.a * vx + D.b * vy
    wy = D.c * vx + D.d * vy
    S = Ns * (dxs * wx + dys * wy)
    return AdaptedFrame(np.array([dx, dy]), N, S, np.array([dxs, dys]), Ns)


def reduction_residual(params: MapParams, K: FourierCircle, frame: AdaptedFrame | None = None) -> float:
    """``max |DT(K) M(theta) - M(theta + omega) [[1, S], [0, 1]]|`` on the grid."""
    if frame is None:
        frame = adapted_frame(params, K)
    D = jacobian(params, (K.theta + K.ux, K.ky))
    M = frame.M
    dxs, dys = frame.dk_shift
    Ns = frame.normalization_shift
    Mp = np.array([[dxs, -dys * Ns], [dys, dxs * Ns]])
    Dm = np.array([[D.a, D.b], [D.c, D.d]])
    lhs = np.einsum("ijn,jkn->ikn", Dm, M)
    T = np.array([[np.ones(K.n), frame.torsion], [np.zeros(K.n), np.ones(K.n)]])
    rhs = np.einsum("ijn,jkn->ikn", Mp, T)
    return float(np.max(np.abs(lhs - rhs)))


def sobolev_seminorm(K: FourierCircle, s: float = 2.0) -> float:
    """``(sum_k |k|^(2s) (|ux_k|^2 + |uy_k|^2))^(1/2)`` over k != 0 (both signs)."""
    if s < 0:
        raise ValueError("s must be non-negative")
    cx, cy = K.coefficients()
    k = _wavenumbers(K.n)
    w = np.full(k.shape, 2.0)
    w[0] = 0.0
    if K.n % 2 == 0:
        w[-1] = 0.0
    return float(np.sqrt(np.sum(w * k ** (2 * s) * (np.abs(cx) ** 2 + np.abs(cy) ** 2))))


@dataclass
class NewtonStep:
    circle: FourierCircle
    error_before: float
    error_after: float | None
    exactness: float  # mean of the second transformed error component
    frame: AdaptedFrame


def _reduced_solve(fr: AdaptedFrame, e: np.ndarray, omega: float, divisor_min: float, noise_floor: float = 0.0):
    """Correction ``Delta = M W`` from the two cohomological equations.

    Returns ``(delta_x, delta_y, mean_eta2)``.  The average of ``W2`` makes the
    ``W1`` equation solvable; the average of ``W1`` keeps ``mean(delta_x) = 0``.
    """
    dx, dy = fr.dk
    N = fr.normalization
    dxs, dys = fr.dk_shift
    Ns = fr.normalization_shift
    S = fr.torsion
    ex, ey = e
    # eta = -M^{-1}(theta + omega) e(theta)
    eta1 = -Ns * (dxs * ex + dys * ey)
    eta2 = -(-dys * ex + dxs * ey)

    w2 = cohomology_solve(eta2, omega, divisor_min=divisor_min, noise_floor=noise_floor)
    s_mean = float(np.mean(S))
    if abs(s_mean) < 1e-12:
        raise DegenerateTorsionError("average torsion vanishes")
    w2 = w2 + (np.mean(eta1) - np.mean(S * w2)) / s_mean
    w1 = cohomology_solve(eta1 - S * w2, omega, divisor_min=divisor_min, noise_floor=noise_floor)
    w1 = w1 + (np.mean(dy * N * w2) - np.mean(dx * w1)) / np.mean(dx)
    return dx * w1 - dy * N * w2, dy * w1 + dx * N * w2, float(np.mean(eta2))


def newton_step(params: MapParams, K: FourierCircle, cfg: SolverConfig = SolverConfig(),
                e: np.ndarray | None = None, evaluate_after: bool = True) -> NewtonStep:
    """One quasi-Newton correction of ``K``.

    The linearized equation ``DT(K) Delta - Delta(theta + omega) = -e`` is
    solved approximately in the adapted frame.  With ``cfg.refine > 0`` the
    remaining linear residual is fed back through the same reduced solve
    that many times, which moves the step towards the exact Newton step
    at O(n log n) cost per sweep.
    """
    params = MapParams(*params)
    if e is None:
        e = invariance_error(params, K, pad=cfg.pad)
    err0 = float(np.max(np.abs(e)))
    fr = adapted_frame(params, K)
    delta_x, delta_y, exact = _reduced_solve(fr, e, K.omega, cfg.divisor_min, cfg.noise_floor)
    if cfg.refine and err0 > cfg.refine_above:
        D = jacobian(params, (K.theta + K.ux, K.ky))
        for _ in range(cfg.refine):
            rx = D.a * delta_x + D.b * delta_y - spectral_shift(delta_x, K.omega) + e[0]
            ry = D.c * delta_x + D.d * delta_y - spectral_shift(delta_y, K.omega) + e[1]
            cx, cy, _ = _reduced_solve(fr, np.array([rx, ry]), K.omega, cfg.divisor_min, cfg.noise_floor)
            # only the resolved band is corrected; higher modes carry roundoff
            delta_x = delta_x + _low_pass(cx, K.n // 4)
            delta_y = delta_y + _low_pass(cy, K.n // 4)
    ux = K.ux + delta_x
    ux = ux - ux.mean()
    K1 = FourierCircle(ux, K.ky + delta_y, K.omega)
    err1 = float(np.max(np.abs(invariance_error(params, K1, pad=cfg.pad)))) if evaluate_after else None
    return NewtonStep(K1, err0, err1, exact, fr)


def trim_circle(K: FourierCircle, cfg: SolverConfig, n_min: int = 64) -> FourierCircle:
    """Smallest halving of the grid that keeps the tail within tolerance."""
    while K.n // 2 >= n_min:
        small = K.resampled(K.n // 2)
        if small.tail() > cfg.tail_limit(small.n):
            break
        K = small
    return K


def solve_invariant_circle(params: MapParams, omega, K_init: FourierCircle | None = None,
                           cfg: SolverConfig = SolverConfig(), n: int | None = None):
    """Newton iteration until ``max |e| < cfg.tol`` with automatic mode doubling.

    Returns ``(circle, report)``; failures are reported, never raised.
    """
    params = MapParams(*params)
    w = float(resolve_omega(omega).value) if not isinstance(omega, (float, int)) else float(omega)
    if K_init is None:
        K_init = FourierCircle.integrable(w, n or 64)
    elif K_init.omega != w:
        K_init = K_init.with_omega(w)
    if n is not None and n != K_init.n:
        K_init = K_init.resampled(n)

    report = SolveReport(n=K_init.n)
    start = K_init
    while True:
        K, ok = _newton_loop(params, start, cfg, report)
        if ok and K.tail() <= cfg.tail_limit(K.n):
            report.converged = True
            report.n = K.n
            report.seminorms.append(sobolev_seminorm(K))
            return K, report
        if K.n * 2 > cfg.mode_cap:
            if ok:
                report.reason = f"coefficient tail {K.tail():.2e} above {cfg.tail_limit(K.n):.1e} at mode cap {K.n}"
            report.n = K.n
            return K, report
        # retry on a doubled grid: from the converged circle when only the
        # tail was too large, from the initial guess after a Newton failure
        start = (K if ok else start).resampled(2 * K.n)
        report.n = start.n
        log.debug("doubling modes to %d (%s)", start.n, "tail" if ok else report.reason)


def _newton_loop(params, K, cfg: SolverConfig, report: SolveReport):
    try:
        e = invariance_error(params, K, pad=cfg.pad)
    except FloatingPointError as exc:  # pragma: no cover - numpy default is warn
        report.reason = str(exc)
        return K, False
    err = float(np.max(np.abs(e)))
    report.errors.append(err)
    for _ in range(cfg.max_iter):
        if not np.isfinite(err) or err > cfg.divergence:
            report.reason = f"diverged (error {err:.2e})"
            return K, False
        if err < cfg.tol:
            report.error = err
            return K, True
        t0 = time.perf_counter()
        try:
            step = newton_step(params, K, cfg, e=e, evaluate_after=False)
        except (SmallDivisorError, DegenerateTorsionError, SingularFrameError) as exc:
            report.reason = f"{type(exc).__name__}: {exc}"
            return K, False
        K = step.circle
        e = invariance_error(params, K, pad=cfg.pad)
        report.step_times.append(time.perf_counter() - t0)
        report.exactness.append(step.exactness)
        new = float(np.max(np.abs(e)))
        report.iterations += 1
        report.errors.append(new)
        if new > 0.5 * err and new > 100 * cfg.tol:
            # no longer contracting: outside the Newton basin or under-resolved
            report.reason = f"stalled at error {new:.2e}"
            report.error = new
            return K, False
        err = new
    report.error = err
    if err < cfg.tol:
        return K, True
    report.reason = f"no convergence in {cfg.max_iter} iterations (error {err:.2e})"
    return K, False


# ---------------------------------------------------------------------------
# continuation


@dataclass(frozen=True)
class ContinuationConfig:
    step: float = 0.02
    min_step: float = 1e-6
    max_step: float = 0.05
    grow: float = 1.5
    r_max: float = 4.0
    s: float = 2.0
    blowup: float = 1e3
    n_start: int = 64
    secant: bool = False


@dataclass
class BreakdownResult:
    angle: float
    omega: float
    r_accepted: float
    r_rejected: float
    circle: FourierCircle | None
    history: list = field(default_factory=list)  # (r, report) per attempt
    reason: str = ""

    @property
    def kappa_accepted(self) -> MapParams:
        return MapParams(self.r_accepted * np.cos(self.angle), self.r_accepted * np.sin(self.angle))

    @property
    def width(self) -> float:
        return self.r_rejected - self.r_accepted


class UnsolvableAtOrigin(RuntimeError):
    pass


def ray_params(angle: float, r: float) -> MapParams:
    return MapParams(r * np.cos(angle), r * np.sin(angle))


def continue_to_breakdown(angle: float, omega, cont: ContinuationConfig = ContinuationConfig(),
                          cfg: SolverConfig = SolverConfig(mode_cap=2**16), r0: float = 0.0,
                          path=None) -> BreakdownResult:
    """Continue the circle of rotation ``omega`` outward along a ray until it breaks.

    ``path``, when given, maps ``r`` to ``(kappa1, kappa2)`` instead of the
    ray ``r (cos angle, sin angle)``.  Breakdown is declared when the
    Sobolev seminorm of the accepted circle exceeds ``cont.blowup`` or when
    the step has been halved below ``cont.min_step`` without a converged
    solve.  The returned pair ``(r_accepted, r_rejected)`` brackets the
    critical parameter on the ray.
    """
    w = resolve_omega(omega)
    wv = float(w.value)
    at = path if path is not None else (lambda r: ray_params(angle, r))
    K, rep = solve_invariant_circle(at(r0), wv, FourierCircle.integrable(wv, cont.n_start), cfg)
    history = [(r0, rep)]
    if not rep.converged:
        raise UnsolvableAtOrigin(f"no circle with rotation {wv} at r = {r0}: {rep.reason}")
    r, h = r0, cont.step
    prev = None
    while True:
        if r + h > cont.r_max:
            h = cont.r_max - r
            if h <= cont.min_step:
                return BreakdownResult(angle, wv, r, cont.r_max, K, history, "reached r_max")
        guess = trim_circle(K, cfg, cont.n_start)
        if cont.secant and prev is not None:
            pr, pK = prev
            if pK.n != guess.n:
                pK = pK.resampled(guess.n)
            t = h / (r - pr)
            guess = FourierCircle(guess.ux + t * (guess.ux - pK.ux), guess.ky + t * (guess.ky - pK.ky), wv)
        K_new, rep = solve_invariant_circle(at(r + h), wv, guess, cfg)
        history.append((r + h, rep))
        if rep.converged:
            prev = (r, K)
            r, K = r + h, K_new
            sn = rep.seminorms[-1]
            log.debug("angle %.4f accepted r=%.8f n=%d H^s=%.3e", angle, r, K.n, sn)
            if sn > cont.blowup:
                return BreakdownResult(angle, wv, r, r + h, K, history,
                                       f"Sobolev seminorm {sn:.3e} above {cont.blowup:.0e}")
            h = min(h * cont.grow, cont.max_step)
        else:
            if h <= cont.min_step:
                return BreakdownResult(angle, wv, r, r + h, K, history, f"step below minimum: {rep.reason}")
            h = max(0.5 * h, cont.min_step)
            # restart the grid size from the last accepted circle on the next try
            log.debug("angle %.4f rejected r=%.8f (%s)", angle, r + 2 * h, rep.reason)


def trace_cb_omega(omega, angles, cont: ContinuationConfig = ContinuationConfig(),
                   cfg: SolverConfig = SolverConfig(mode_cap=2**16)):
    """Breakdown bracket of the circle with rotation ``omega`` on each ray.

    Each point is the last accepted parameter (a lower bound for the
    breakdown); its width is the distance to the first rejected one.  Rays
    that cannot start are recorded in ``failures``.
    """
    from .transport import BoundaryCurve

    w = resolve_omega(omega)
    curve = BoundaryCurve("kam", omega=float(w.value), tol=cfg.tol, resolution=cfg.mode_cap,
                          meta={"omega_name": w.name, "blowup": cont.blowup, "s": cont.s})
    for angle in sorted(float(a) for a in angles):
        try:
            res = continue_to_breakdown(angle, w, cont, cfg)
        except UnsolvableAtOrigin as exc:
            curve.failures.append((angle, str(exc)))
            continue
        curve.add(angle, res.r_accepted, max(res.width, np.finfo(float).eps))
        curve.meta.setdefault("reasons", []).append(res.reason)
    return curve


# ---------------------------------------------------------------------------
# serialization


def save_circle(path, K: FourierCircle, params: MapParams, cfg: SolverConfig | None = None, extra: dict | None = None):
    """Write an ``.npz`` file holding a JSON header and the grid/coefficient arrays."""
    header = {
        "format": "nasm-circle/1",
        "omega": K.omega,
        "kappa1": float(params[0]),
        "kappa2": float(params[1]),
        "n": K.n,
        "tolerances": None if cfg is None else {"tol": cfg.tol, "tail_tol": cfg.tail_tol},
    }
    if extra:
        header.update(extra)
    cx, cy = K.coefficients()
    with open(path, "wb") as fh:
        np.savez(fh, header=np.array(json.dumps(header)), ux=K.ux, ky=K.ky, coef_x=cx, coef_y=cy)


def load_circle(path) -> tuple[FourierCircle, dict]:
    with np.load(path) as data:
        header = json.loads(str(data["header"]))
        K = FourierCircle(np.array(data["ux"]), np.array(data["ky"]), float(header["omega"]))
    return K, header


def circle_samples_csv(path, K: FourierCircle):
    """CSV of ``theta, x, y`` on the solver grid."""
    theta = K.theta
    with open(path, "w") as fh:
        fh.write("theta,x,y\n")
        for t, x, y in zip(theta, theta + K.ux, K.ky):
            fh.write(f"{t:.17g},{x:.17g},{y:.17g}\n")


__all__ = [
    "AdaptedFrame",
    "BreakdownResult",
    "ContinuationConfig",
    "DegenerateTorsionError",
    "FourierCircle",
    "RotationNumber",
    "SingularFrameError",
    "SmallDivisorError",
    "SolveReport",
    "SolverConfig",
    "adapted_frame",
    "circle_samples_csv",
    "cohomology_solve",
    "continue_to_breakdown",
    "invariance_error",
    "load_circle",
    "newton_step",
    "ray_params",
    "reduction_residual",
    "save_circle",
    "sobolev_seminorm",
    "solve_invariant_circle",
    "trim_circle",
    "trace_cb_omega",
]
