"""Rotation numbers: orbit estimates, continued fractions, named frequencies."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .maps import MapParams, PhasePoint, composed_step

GOLDEN_MEAN = (np.sqrt(5.0) - 1.0) / 2.0

_CF_DIGITS = 60
_CF_TERMS = 40


@dataclass(frozen=True)
class RotationNumber:
    value: float
    cf_terms: tuple[int, ...] = ()
    name: str = ""
    diophantine_nu: float | None = None
    diophantine_tau: float | None = None

    def __float__(self) -> float:
        return float(self.value)

    @classmethod
    def from_value(cls, value: float, n_terms: int = 20, name: str = "") -> "RotationNumber":
        return cls(float(value), tuple(continued_fraction(value, n_terms)), name)

    @classmethod
    def from_terms(cls, terms, name: str = "") -> "RotationNumber":
        return cls(float(evaluate_cf(terms)), tuple(int(a) for a in terms), name)

    @property
    def is_noble(self) -> bool:
        """True when the stored expansion ends in a run of at least ten ones."""
        t = self.cf_terms
        return len(t) > 10 and all(a == 1 for a in t[-10:])


def continued_fraction(x, n_terms: int = 20, eps: float = 1e-12) -> list[int]:
    """Leading continued-fraction terms of ``x``.

    Float inputs stop once the remainder drops below ``eps`` (later terms
    would be rounding noise); mpmath numbers are expanded at their own
    precision.
    """
    terms = []
    if isinstance(x, (float, int, np.floating)):
        x = mpmath.mpf(float(x))
        stop = eps
    else:
        stop = mpmath.mpf(10) ** (-(mpmath.mp.dps - 10))
    for _ in range(n_terms):
        a = int(mpmath.floor(x))
        terms.append(a)
        rem = x - a
        if rem < stop:
            break
        x = 1 / rem
    return terms


def evaluate_cf(terms) -> float:
    value = mpmath.mpf(terms[-1])
    for a in reversed(terms[:-1]):
        value = a + 1 / value
    return float(value)


def convergents(r, k: int) -> list[Fraction]:
    """First ``k`` continued-fraction convergents (the trivial 0/1 skipped)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    terms = r.cf_terms if isinstance(r, RotationNumber) else continued_fraction(r, k + 2)
    out = []
    h0, h1 = 1, 0
    q0, q1 = 0, 1
    for a in terms:
        h0, h1 = a * h0 + h1, h0
        q0, q1 = a * q0 + q1, q0
        if h0 == 0:
            continue
        out.append(Fraction(h0, q0))
        if len(out) == k:
            break
    return out


def complete_with_ones(value: float, depth: int) -> RotationNumber:
    """Keep ``depth`` continued-fraction terms of ``value`` and append a tail of ones.

    The result is the noble number sharing the trusted leading terms.
    """
    head = continued_fraction(value, depth)[:depth]
    terms = head + [1] * _CF_TERMS
    # exact value: last kept term plus the golden tail [0; 1, 1, ...]
    with mpmath.workdps(_CF_DIGITS):
        tail = (mpmath.sqrt(5) - 1) / 2
        v = head[-1] + tail
        for a in reversed(head[:-1]):
            v = a + 1 / v
        return RotationNumber(float(v), tuple(terms))


def _golden_family():
    with mpmath.workdps(_CF_DIGITS):
        g = (mpmath.sqrt(5) - 1) / 2
        return {
            "golden": g,
            "1-golden": 1 - g,
            "2-golden": 2 - g,
            "golden+1": g + 1,
            "2golden": 2 * g,
            "2golden+1": 2 * g + 1,
            "2-2golden": 2 - 2 * g,
            "2golden-1": 2 * g - 1,
            "3-2golden": 3 - 2 * g,
            "(5golden+6)/(4golden+5)": (5 * g + 6) / (4 * g + 5),
            "(golden+1)/(4golden+5)": (g + 1) / (4 * g + 5),
        }


def special_rotation_numbers() -> dict[str, RotationNumber]:
    """Named golden-mean related frequencies with their expansions."""
    out = {}
    with mpmath.workdps(_CF_DIGITS):
        for name, v in _golden_family().items():
            out[name] = RotationNumber(float(v), tuple(continued_fraction(v, _CF_TERMS)), name)
    return out


def resolve_omega(spec) -> RotationNumber:
    """Accept a RotationNumber, a named frequency or a number."""
    if isinstance(spec, RotationNumber):
        return spec
    if isinstance(spec, str):
        named = special_rotation_numbers()
        if spec in named:
            return named[spec]
        try:
            spec = float(spec)
        except ValueError:
            raise KeyError(f"unknown rotation number {spec!r}; known: {sorted(named)}") from None
    return RotationNumber.from_value(float(spec))


def _bump_weights(n: int) -> np.ndarray:
    t = (np.arange(n) + 0.5) / n
    w = np.exp(-1.0 / (t * (1.0 - t)))
    return w / w.sum()


def _weighted_mean(d: np.ndarray) -> np.ndarray:
    w = _bump_weights(d.shape[0])
    return np.tensordot(w, d, axes=(0, 0))


def estimate_rotation_number(
    params: MapParams,
    p0,
    n: int,
    method: str = "weighted",
    tol: float = 1e-8,
    full_output: bool = False,
):
    """Rotation number of the orbit through ``p0`` from ``n`` iterates.

    ``"weighted"`` averages the lift increments with a smooth bump weight,
    which converges much faster than ``1/n`` on quasiperiodic orbits;
    ``"plain"`` returns ``(x_n - x_0) / n``.  With ``full_output`` a dict with
    ``converged`` and ``discrepancy`` (difference between the two half-orbit
    estimates) is returned too.  ``p0`` may hold arrays.
    """
    if n < 100:
        raise ValueError("n must be >= 100")
    x0, y0 = (np.asarray(c, dtype=float) for c in p0)
    d = np.empty((n,) + np.broadcast(x0, y0).shape)
    p = PhasePoint(x0, y0)
    for k in range(n):
        q = composed_step(params, p)
        d[k] = q.x - p.x
        p = q
    if method == "weighted":
        value = _weighted_mean(d)
        h = n // 2
        a, b = _weighted_mean(d[:h]), _weighted_mean(d[h:])
    elif method == "plain":
        value = (p.x - x0) / n
        h = n // 2
        a, b = d[:h].mean(axis=0), d[h:].mean(axis=0)
    else:
        raise ValueError(f"unknown method {method!r}")
    discrepancy = np.abs(a - b)
    if value.ndim == 0:
        value, discrepancy = float(value), float(discrepancy)
    if full_output:
        return value, {"converged": np.all(discrepancy < tol), "discrepancy": discrepancy}
    return value
