import numpy as np
import pytest

from nasm.maps import MapParams, PhasePoint, composed_step, std_inverse_step, std_step
from nasm.periodic import (
    CLASS_POINTS,
    POINT_CLASSES,
    ConvergenceError,
    NotPeriodicError,
    closed_form_quantity,
    find_periodic_orbit,
    grid_centers,
    primary_fixed_points,
    primary_residue,
    residue_of_orbit,
    solve_secondary_period1,
    stability_region,
    z_star_estimate,
)

rng = np.random.default_rng(3)


def test_primary_points():
    pts = primary_fixed_points()
    assert len(pts) == 6 and (0.0, 0.0) in pts
    x, y = composed_step((0.9, -1.3), (0.5, 0.5))
    assert abs(x - 0.5 - round(x - 0.5)) < 1e-14 and abs(y - 0.5) < 1e-14


def test_residue_examples():
    assert residue_of_orbit((0, 0), [(0, 0)]) == 0.0
    assert residue_of_orbit((0.5, 0.5), [(0.5, 0.0)]) == pytest.approx(0.4375, abs=1e-14)
    assert closed_form_quantity("II", 0.5, 0.5) == pytest.approx(0.875)
    assert closed_form_quantity("I", 0.5, 0.5) == pytest.approx(-1.125)
    with pytest.raises(NotPeriodicError):
        residue_of_orbit((0.5, 0.5), [(0.3, 0.1)])
    with pytest.raises(NotPeriodicError):
        residue_of_orbit((0.5, 0.5), [])
    with pytest.raises(ValueError):
        closed_form_quantity("V", 0, 0)


@pytest.mark.parametrize("cls", POINT_CLASSES)
def test_residue_is_half_closed_form(cls):
    k1, k2 = rng.uniform(-2, 2, (2, 500))
    assert np.allclose(primary_residue(cls, k1, k2), 0.5 * closed_form_quantity(cls, k1, k2), atol=1e-13)
    p = CLASS_POINTS[cls]
    assert residue_of_orbit((k1[0], k2[0]), [p]) == pytest.approx(primary_residue(cls, k1[0], k2[0]), abs=1e-14)


def test_stability_grid_small():
    g = stability_region("II", (-2, 2, -2, 2), 40)
    assert g.closed_form.shape == (40, 40)
    assert g.agreement() == 1.0
    j = np.argmin(np.abs(g.kappa2 - 0.5))
    i = np.argmin(np.abs(g.kappa1 - 0.5))
    assert g.stable[j, i]
    rows = list(g.rows())
    assert len(rows) == 1600 and rows[0][:3] == (g.kappa1[0], g.kappa2[0], "II")
    assert not stability_region("I", (0.49, 0.51, 0.49, 0.51), 1).stable[0, 0]
    with pytest.raises(ValueError):
        stability_region("II", resolution=0)
    with pytest.raises(ValueError):
        stability_region("X")


def test_grid_centers_mirror_exact():
    c = grid_centers(-2, 2, 400)
    assert np.array_equal(c, -c[::-1])
    assert c[0] == pytest.approx(-2 + 0.005)


def test_grid_parameter_symmetries():
    g = {c: stability_region(c, (-2, 2, -2, 2), 60).closed_form for c in POINT_CLASSES}
    # P3 negates both kicks and swaps I with II, III with IV
    assert np.array_equal(g["I"], g["II"][::-1, ::-1])
    assert np.array_equal(g["III"], g["IV"][::-1, ::-1])
    # P4 negates kappa2 and swaps I with III
    assert np.array_equal(g["I"], g["III"][::-1, :])
    # P34 negates kappa1 and swaps I with IV
    assert np.array_equal(g["I"], g["IV"][:, ::-1])


def test_secondary_orbits():
    assert solve_secondary_period1((0.1, 0.1)) == []
    params = MapParams(3.9, 4.2)
    roots = solve_secondary_period1(params)
    assert len(roots) == 2
    for r in roots:
        x, y = composed_step(params, r.location)
        assert abs(x - r.location.x) < 1e-10 and abs(y - r.location.y) < 1e-10
    # symmetric pair about x = 1/2
    assert roots[0].location.x + roots[1].location.x == pytest.approx(1.0, abs=1e-12)
    assert roots[0].residue == pytest.approx(roots[1].residue, abs=1e-10)


def test_z_star_estimate():
    params = MapParams(3.9, 4.2)
    true = abs(2 * np.pi * solve_secondary_period1(params)[0].location.x - np.pi)
    assert true <= 0.3
    assert z_star_estimate(params) == pytest.approx(true, rel=0.1)
    assert z_star_estimate((0.0, 0.0)) is None  # zero denominator too
    # numerator vanishes on the class II boundary where the pair is born
    k1 = 1.0
    k2 = -k1 / (1 - k1 / 2)
    assert abs(closed_form_quantity("II", k1, k2)) < 1e-14
    assert z_star_estimate((k1, k2)) == pytest.approx(0.0, abs=1e-7)


def test_find_periodic_orbit():
    rec = find_periodic_orbit((0.4, 0.6), 0, 1, (0.48, 0.02))
    assert rec.location == pytest.approx((0.5, 0.0), abs=1e-12)
    assert isinstance(rec.location.x, float)
    # 1/2 orbit on the diagonal is a 1/4 orbit of the standard map
    rec = find_periodic_orbit((0.3, 0.3), 1, 2, (0.0, 0.25))
    p = PhasePoint(*rec.location)
    for _ in range(4):
        p = std_step(0.3, p)
    assert p.x - rec.location.x == pytest.approx(1.0, abs=1e-12)
    assert p.y == pytest.approx(rec.location.y, abs=1e-12)
    with pytest.raises(ValueError):
        find_periodic_orbit((0.3, 0.3), 1, 0, (0, 0))
    with pytest.raises(ConvergenceError):
        find_periodic_orbit((0.0, 0.0), 0, 1, (0.3, 0.1))


def test_residue_invariant_under_conjugacy():
    for params, m, n, guess in [((0.7, 0.4), 1, 3, (0.0, 0.17)), ((0.3, 0.3), 1, 2, (0.0, 0.25))]:
        rec = find_periodic_orbit(params, m, n, guess)
        z = [rec.location]
        for _ in range(n - 1):
            z.append(composed_step(params, z[-1]))
        w = [std_inverse_step(params[1], q) for q in z]
        r = residue_of_orbit((params[1], params[0]), w)
        assert r == pytest.approx(rec.residue, abs=1e-10)
