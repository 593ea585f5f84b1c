import math

import numpy as np
import pytest

from nasm import kam
from nasm.kam import (
    AdaptedFrame,
    ContinuationConfig,
    DegenerateTorsionError,
    FourierCircle,
    SmallDivisorError,
    SolverConfig,
    adapted_frame,
    cohomology_solve,
    continue_to_breakdown,
    invariance_error,
    load_circle,
    newton_step,
    reduction_residual,
    resample,
    save_circle,
    sobolev_seminorm,
    solve_invariant_circle,
    spectral_derivative,
    spectral_shift,
    trace_cb_omega,
    trim_circle,
)
from nasm.maps import composed_step, std_inverse_step, std_step
from nasm.rotation import GOLDEN_MEAN, estimate_rotation_number

rng = np.random.default_rng(5)
theta = np.arange(64) / 64


@pytest.fixture(scope="module")
def circle03():
    K, rep = solve_invariant_circle((0.3, 0.0), GOLDEN_MEAN, n=256)
    assert rep.converged
    return K


def test_spectral_helpers():
    u = np.sin(2 * np.pi * 3 * theta)
    assert np.allclose(spectral_derivative(u), 6 * np.pi * np.cos(2 * np.pi * 3 * theta), atol=1e-12)
    assert np.allclose(spectral_shift(u, 0.1), np.sin(2 * np.pi * 3 * (theta + 0.1)), atol=1e-13)
    fine = resample(u, 256)
    assert np.allclose(fine, np.sin(2 * np.pi * 3 * np.arange(256) / 256), atol=1e-13)
    assert np.allclose(resample(fine, 64), u, atol=1e-13)


def test_cohomology_solve():
    c = rng.normal(size=8) + 1j * rng.normal(size=8)
    k = np.arange(1, 9)
    rhs = np.real(np.exp(2j * np.pi * np.outer(theta, k)) @ c)
    W = cohomology_solve(rhs, GOLDEN_MEAN)
    assert np.max(np.abs(W - spectral_shift(W, GOLDEN_MEAN) - rhs)) < 1e-12
    assert abs(W.mean()) < 1e-15
    with pytest.raises(ValueError):
        cohomology_solve(rhs + 0.1, GOLDEN_MEAN, zero_mean_enforced=False)
    with pytest.raises(SmallDivisorError) as exc:
        cohomology_solve(rhs, 0.5)
    assert exc.value.k == 2


def test_noise_floor_drops_tiny_modes():
    rhs = 1e-20 * np.cos(2 * np.pi * 5 * theta) + np.cos(2 * np.pi * theta)
    W = cohomology_solve(rhs, GOLDEN_MEAN, noise_floor=1e-17)
    assert np.max(np.abs(W - spectral_shift(W, GOLDEN_MEAN) - np.cos(2 * np.pi * theta))) < 1e-14


def test_integrable_circle():
    K = FourierCircle.integrable(GOLDEN_MEAN, 64)
    assert np.max(np.abs(invariance_error((0.0, 0.0), K))) < 1e-15
    fr = adapted_frame((0.0, 0.0), K)
    assert np.allclose(fr.torsion, 2.0) and np.allclose(fr.det, 1.0)
    assert reduction_residual((0.0, 0.0), K, fr) < 1e-15
    step = newton_step((0.0, 0.0), K)
    assert np.array_equal(step.circle.ux, K.ux) and np.array_equal(step.circle.ky, K.ky)
    K1, rep = solve_invariant_circle((0.0, 0.0), 0.3)
    assert rep.converged and rep.iterations == 0
    with pytest.raises(ValueError):
        FourierCircle(np.zeros(4), np.zeros(5), 0.1)


def test_circle_evaluation(circle03):
    pts = circle03(circle03.theta)
    assert np.allclose(pts[:, 0], circle03.theta + circle03.ux, atol=1e-13)
    assert np.allclose(pts[:, 1], circle03.ky, atol=1e-13)


def test_solution_matches_standard_map_circle(circle03):
    # P_2 K is a circle of the standard map with twice the kick
    pts = circle03(circle03.theta)
    img = circle03(circle03.theta + GOLDEN_MEAN)
    X, Y = std_step(0.6, (pts[:, 0], 2 * pts[:, 1]))
    assert np.max(np.abs(X - img[:, 0])) < 1e-9
    assert np.max(np.abs(Y - 2 * img[:, 1])) < 1e-9


def test_quadratic_contraction_and_witness():
    K = FourierCircle.integrable(GOLDEN_MEAN, 256)
    errs = []
    for _ in range(6):
        st = newton_step((0.3, 0.0), K)
        assert abs(st.exactness) <= 10 * st.error_before**2 + 1e-15  # roundoff floor
        errs.append(st.error_before)
        K = st.circle
        if st.error_after < 1e-12:
            break
    errs.append(st.error_after)
    assert errs[-1] < 1e-12
    for a, b in zip(errs, errs[1:]):
        assert b <= max(10 * a * a, 1e-13)  # 1e-13: floating-point floor


def test_telescoping(circle03):
    K = circle03.resampled(128).with_omega(GOLDEN_MEAN)
    st = newton_step((0.31, 0.0), K)
    direct = np.max(np.abs(invariance_error((0.31, 0.0), st.circle)))
    assert st.error_after == pytest.approx(direct, abs=1e-14)


def test_plain_quasi_newton_still_converges():
    K, rep = solve_invariant_circle((0.3, 0.0), GOLDEN_MEAN, n=256, cfg=SolverConfig(refine=0))
    assert rep.converged and rep.error < 1e-11


def test_symmetry_transported_circle(circle03):
    # P4 shift: (x, y + 1/2) is a circle of (kappa1, -kappa2) with rotation omega + 1
    k1, k2 = 0.3, 0.0
    K, rep = solve_invariant_circle((0.2, 0.15), GOLDEN_MEAN, n=256)
    shifted = FourierCircle(K.ux, K.ky + 0.5, GOLDEN_MEAN + 1)
    assert np.max(np.abs(invariance_error((0.2, -0.15), shifted))) < 1e-10
    # conjugacy: S_k2^-1 o K is invariant for the swapped map
    w = std_inverse_step(0.15, K(K.theta).T)
    w_next = std_inverse_step(0.15, K(K.theta + GOLDEN_MEAN).T)
    img = composed_step((0.15, 0.2), w)
    assert np.max(np.abs(np.array(img) - np.array(w_next))) < 1e-10
    assert k1 + k2 == 0.3  # circle03 parameters unchanged


def test_orbit_on_circle_has_its_rotation_number(circle03):
    p = circle03(0.123)
    w = estimate_rotation_number((0.3, 0.0), p, 20_000)
    assert abs(w - GOLDEN_MEAN) < 1e-8


def test_sobolev_seminorm():
    assert sobolev_seminorm(FourierCircle.integrable(0.3, 32)) == 0.0
    a = 0.01
    K = FourierCircle(2 * a * np.cos(2 * np.pi * 3 * theta), np.zeros(64), 0.3)
    assert sobolev_seminorm(K, s=0) == pytest.approx(a * math.sqrt(2))
    assert sobolev_seminorm(K, s=2) == pytest.approx(a * math.sqrt(2) * 9)
    with pytest.raises(ValueError):
        sobolev_seminorm(K, s=-1)


def test_failures_become_reports():
    K, rep = solve_invariant_circle((0.3, 0.0), 0.5, n=32)
    assert not rep.converged and "SmallDivisor" in rep.reason
    K, rep = solve_invariant_circle((1.5, 1.5), GOLDEN_MEAN, n=32, cfg=SolverConfig(mode_cap=64))
    assert not rep.converged and rep.reason


def test_degenerate_torsion():
    n = 16
    fr = AdaptedFrame(np.array([np.ones(n), np.zeros(n)]), np.ones(n), np.zeros(n),
                      np.array([np.ones(n), np.zeros(n)]), np.ones(n))
    with pytest.raises(DegenerateTorsionError):
        kam._reduced_solve(fr, np.zeros((2, n)), GOLDEN_MEAN, 1e-9)


def test_trim_and_tail():
    K = FourierCircle.integrable(GOLDEN_MEAN, 1024)
    assert trim_circle(K, SolverConfig(), 64).n == 64
    cfg = SolverConfig(tail_tol=1e-13, tail_floor=1e-15)
    assert cfg.tail_limit(64) == 1e-13 and cfg.tail_limit(8192) == pytest.approx(8.192e-12)


def test_save_load_roundtrip(circle03, tmp_path):
    path = tmp_path / "c.npz"
    save_circle(path, circle03, (0.3, 0.0), SolverConfig(), extra={"note": "x"})
    K, header = load_circle(path)
    assert np.array_equal(K.ux, circle03.ux) and K.omega == circle03.omega
    assert header["kappa1"] == 0.3 and header["n"] == circle03.n and header["note"] == "x"
    kam.circle_samples_csv(tmp_path / "c.csv", circle03)
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "theta,x,y" and len(lines) == circle03.n + 1


def test_continuation_on_axis():
    res = continue_to_breakdown(0.0, GOLDEN_MEAN, ContinuationConfig(), SolverConfig(mode_cap=2**12))
    assert 0.45 < res.r_accepted < res.r_rejected
    assert res.r_accepted < 0.485817703
    sn = [rep.seminorms[-1] for _, rep in res.history if rep.converged]
    assert sn == sorted(sn)  # derivatives grow toward breakdown
    # beyond the golden breakdown the solve cannot converge
    K, rep = solve_invariant_circle((0.50, 0.0), GOLDEN_MEAN, K_init=res.circle, cfg=SolverConfig(mode_cap=2**12))
    assert not rep.converged
    assert res.kappa_accepted == pytest.approx((res.r_accepted, 0.0))


def test_continuation_errors():
    # a resonant frequency is trivially fine at zero kick but nowhere else
    res = continue_to_breakdown(0.0, 0.5, ContinuationConfig(), SolverConfig())
    assert res.r_accepted == 0.0 and "SmallDivisor" in res.reason
    with pytest.raises(kam.UnsolvableAtOrigin):
        continue_to_breakdown(0.0, 0.5, ContinuationConfig(), SolverConfig(), r0=0.3)


def test_cb_gamma_reflects_to_gamma_plus_one():
    cfg = SolverConfig(mode_cap=2**11)
    a = trace_cb_omega(GOLDEN_MEAN, [math.pi / 3], ContinuationConfig(), cfg)
    b = trace_cb_omega(GOLDEN_MEAN + 1, [2 * math.pi / 3], ContinuationConfig(), cfg)
    assert a.kappa1[0] == pytest.approx(-b.kappa1[0], abs=1e-3)
    assert a.kappa2[0] == pytest.approx(b.kappa2[0], abs=1e-3)
    assert a.method == "kam" and a.omega == GOLDEN_MEAN
