import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from canalkit import (
    AnalyticJetCurve,
    CurveSpec,
    InvalidParams,
    NotUnitSpeed,
    VanishingCurvature,
    frenet_apparatus,
    make_curve,
    validate_unit_speed,
)
from conftest import SQRT3_2, catenary_jet


def curve(family, **params):
    return make_curve(CurveSpec(family, params))


def fd_jet(curve, s, h=1e-2):
    """First three derivatives of the position by Richardson-extrapolated central differences."""

    def at(step):
        p = curve.derivatives(s + step * np.arange(-3, 4))[0]
        d1 = (p[1] - 8 * p[2] + 8 * p[4] - p[5]) / (12 * step)
        d2 = (-p[1] + 16 * p[2] - 30 * p[3] + 16 * p[4] - p[5]) / (12 * step**2)
        d3 = (p[0] - 8 * p[1] + 13 * p[2] - 13 * p[4] + 8 * p[5] - p[6]) / (8 * step**3)
        return d1, d2, d3

    coarse, fine = at(h), at(h / 2)
    return [(16 * f - c) / 15 for f, c in zip(fine, coarse)]


def fd_frenet(curve, s):
    d1, d2, d3 = fd_jet(curve, s)
    kappa = np.linalg.norm(np.cross(d1, d2))
    tau = np.dot(np.cross(d1, d2), d3) / kappa**2
    # d(kappa)/ds from kappa at neighbouring points
    h = 1e-3
    k = [np.linalg.norm(np.cross(*fd_jet(curve, s + dh)[:2])) for dh in (-2 * h, -h, h, 2 * h)]
    kprime = (k[0] - 8 * k[1] + 8 * k[2] - k[3]) / (12 * h)
    return kappa, tau, kprime


def test_line_along_x_axis_has_standard_frame():
    c = curve("line", point=[0, 0, 0], direction=[1, 0, 0])
    s = np.array([-1.0, 0.0, 2.5])
    fr = frenet_apparatus(c, s)
    np.testing.assert_allclose(fr.position, np.stack([s, 0 * s, 0 * s], axis=-1))
    assert np.all(fr.kappa == 0) and np.all(fr.tau == 0) and np.all(fr.kappa_prime == 0)
    np.testing.assert_array_equal(fr.T[0], [1, 0, 0])
    np.testing.assert_array_equal(fr.N[0], [0, 1, 0])
    np.testing.assert_array_equal(fr.B[0], [0, 0, 1])


def test_line_frame_skips_parallel_basis_vector():
    c = curve("line", direction=[0, 0, 3])
    fr = frenet_apparatus(c, 0.0)
    np.testing.assert_allclose(fr.T, [0, 0, 1])
    np.testing.assert_allclose(fr.N, [1, 0, 0])
    np.testing.assert_allclose(fr.B, np.cross(fr.T, fr.N))


def test_helix_curvature_and_torsion():
    c = curve("helix", a=0.5, b=SQRT3_2)
    s = np.linspace(-3, 3, 13)
    fr = frenet_apparatus(c, s)
    np.testing.assert_allclose(fr.position[:, 0], 0.5 * np.cos(s), atol=1e-15)
    np.testing.assert_allclose(fr.position[:, 2], SQRT3_2 * s, atol=1e-15)
    np.testing.assert_allclose(fr.kappa, 0.5, rtol=1e-15)
    np.testing.assert_allclose(fr.tau, SQRT3_2, rtol=1e-15)
    np.testing.assert_allclose(fr.kappa_prime, 0.0, atol=1e-15)


def test_circle_curvature():
    fr = frenet_apparatus(curve("circle", rho=2.0), 0.0)
    assert fr.kappa == pytest.approx(0.5, rel=1e-15)
    assert fr.tau == pytest.approx(0.0, abs=1e-15)
    np.testing.assert_allclose(fr.position, [2, 0, 0])


@pytest.mark.parametrize(
    "c",
    [
        curve("helix", a=0.5, b=SQRT3_2),
        curve("helix", a=1.3, b=-0.4),
        curve("circle", rho=2.0),
        make_curve(CurveSpec("analytic", jet=catenary_jet, interval=(-3, 3))),
    ],
    ids=["helix", "left-helix", "circle", "catenary"],
)
@pytest.mark.parametrize("s", [-1.7, 0.0, 0.4, 2.2])
def test_frenet_matches_finite_differences(c, s):
    kappa, tau, kprime = fd_frenet(c, s)
    fr = frenet_apparatus(c, s)
    assert fr.kappa == pytest.approx(kappa, rel=1e-6, abs=1e-9)
    assert fr.tau == pytest.approx(tau, rel=1e-6, abs=1e-9)
    # nested differences: roundoff floor near 2e-8
    assert fr.kappa_prime == pytest.approx(kprime, rel=1e-6, abs=1e-7)


def test_catenary_curvature_closed_form():
    c = make_curve(CurveSpec("analytic", jet=catenary_jet, interval=(-3, 3)))
    s = np.linspace(-2.5, 2.5, 11)
    fr = frenet_apparatus(c, s)
    np.testing.assert_allclose(fr.kappa, 1 / (1 + s * s), rtol=1e-14)
    np.testing.assert_allclose(fr.kappa_prime, -2 * s / (1 + s * s) ** 2, rtol=1e-13, atol=1e-15)
    np.testing.assert_allclose(fr.tau, 0.0, atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(
    a=st.floats(0.1, 3.0),
    b=st.floats(-3.0, 3.0),
    s=st.floats(-10.0, 10.0),
)
def test_frame_orthonormal_and_right_handed(a, b, s):
    fr = frenet_apparatus(curve("helix", a=a, b=b), s)
    frame = np.stack([fr.T, fr.N, fr.B])
    np.testing.assert_allclose(frame @ frame.T, np.eye(3), atol=1e-9)
    np.testing.assert_allclose(np.cross(fr.T, fr.N), fr.B, atol=1e-9)
    assert fr.kappa >= 0


def test_frenet_is_pure():
    c = curve("helix", a=0.5, b=SQRT3_2)
    s = np.linspace(-1, 1, 7)
    a, b = frenet_apparatus(c, s), frenet_apparatus(c, s)
    for name in ("position", "T", "N", "B", "kappa", "kappa_prime", "tau"):
        np.testing.assert_array_equal(getattr(a, name), getattr(b, name))


def test_validate_unit_speed():
    assert validate_unit_speed(curve("helix", a=0.5, b=SQRT3_2), 100, 1e-10)

    def doubled(s):
        return np.array([[2 * s, 0, 0], [2, 0, 0], [0, 0, 0], [0, 0, 0], [0, 0, 0]], dtype=float)

    assert not validate_unit_speed(AnalyticJetCurve(doubled, (-1, 1)))

    def circle2(s):
        return np.array(
            [[2 * math.cos(s / 2 + k * math.pi / 2) / 2**k, 2 * math.sin(s / 2 + k * math.pi / 2) / 2**k, 0] for k in range(5)]
        )

    assert validate_unit_speed(AnalyticJetCurve(circle2, (-5, 5)), 100, 1e-10)
    with pytest.raises(InvalidParams):
        validate_unit_speed(AnalyticJetCurve(circle2, (-5, 5)), 1)


def test_make_curve_rejects_bad_input():
    with pytest.raises(InvalidParams):
        curve("helix", a=0.0, b=1.0)
    with pytest.raises(InvalidParams):
        curve("helix", a=float("nan"), b=1.0)
    with pytest.raises(InvalidParams):
        curve("circle", rho=-1.0)
    with pytest.raises(InvalidParams):
        curve("spiral")
    with pytest.raises(InvalidParams):
        make_curve(CurveSpec("helix", {"a": 1, "b": 0}, interval=(1, -1)))
    with pytest.raises(InvalidParams):
        make_curve(CurveSpec("analytic", jet=catenary_jet))  # missing interval


def test_analytic_not_unit_speed_rejected():
    def slow(s):
        return np.array([[s / 2, 0, 0], [0.5, 0, 0], [0, 0, 0], [0, 0, 0], [0, 0, 0]])

    with pytest.raises(NotUnitSpeed):
        make_curve(CurveSpec("analytic", jet=slow, interval=(0, 1)))


def test_straight_analytic_curve_has_no_frenet_frame():
    def straight(s):
        return np.array([[s, 0, 0], [1, 0, 0], [0, 0, 0], [0, 0, 0], [0, 0, 0]], dtype=float)

    c = make_curve(CurveSpec("analytic", jet=straight, interval=(0, 1)))
    with pytest.raises(VanishingCurvature):
        frenet_apparatus(c, 0.5)


def test_curve_spec_from_dict():
    spec = CurveSpec.from_dict({"family": "Helix", "a": 0.5, "b": 0.8660254037844386, "interval": [-2, 2]})
    c = make_curve(spec)
    assert c.interval == (-2.0, 2.0)
    assert c.to_dict() == {"family": "helix", "a": 0.5, "b": 0.8660254037844386}
