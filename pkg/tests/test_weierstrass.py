import numpy as np
import pytest

from wlab.catalog import make_catenoid, make_helicoid, make_plane
from wlab.complexkit import AnalyticFn
from wlab.errors import NotAGraph, NotApplicable, SingularPoint
from wlab.weierstrass import (
    End,
    EndKind,
    ParamGrid,
    associate,
    ball_area_profile,
    end_fit,
    flux,
    gauss_degree,
    gauss_map,
    immerse,
    jorge_meeks_check,
    lopez_ros,
    mesh,
    metric_curvature,
    normal_derivative,
    period_report,
    similarity,
    superharmonic_check,
    total_curvature,
)


@pytest.fixture(scope="module")
def helicoid():
    return make_helicoid()


# --- Immersion and curvature ---


@pytest.mark.parametrize("s", [-1.0, 0.5, 2.0])
def test_catenoid_immersion_is_rotational(catenoid, s):
    """Test that X(e^{s+it}) has height s and radius cosh s."""
    X = immerse(catenoid, np.exp(s + 0.7j))
    assert X[2] == pytest.approx(s, abs=1e-9)
    assert np.hypot(X[0], X[1]) == pytest.approx(np.cosh(s), abs=1e-9)


def test_waist_curvature_and_normal(catenoid):
    lam, K, N = metric_curvature(catenoid, np.array([1.0 + 0j]))
    assert lam[0] == pytest.approx(1.0)
    assert K[0] == pytest.approx(-1.0)
    assert np.allclose(N[0], [1.0, 0.0, 0.0])


def test_curvature_rejects_singular_point(catenoid):
    with pytest.raises(SingularPoint):
        metric_curvature(catenoid, np.array([0j]))


def test_normal_derivative_matches_finite_differences():
    """Test ∂_z N = ½(∂_x - i∂_y) N for g = e^z."""
    z = 0.3 + 0.4j
    h = 1e-5

    def N(w):
        return gauss_map(np.exp(w))

    dx = (N(z + h) - N(z - h)) / (2 * h)
    dy = (N(z + 1j * h) - N(z - 1j * h)) / (2 * h)
    expected = 0.5 * (dx - 1j * dy)
    assert np.allclose(normal_derivative(np.exp(z), np.exp(z)), expected, atol=1e-8)


def test_catenoid_total_curvature_on_annulus(catenoid):
    """Test ∫K dA = -4π tanh 5 over e^{-5} < |z| < e^5."""
    annulus = ParamGrid((-5.0, 5.0), (0.0, 2 * np.pi), 256, 64, kind="log")
    total = total_curvature(catenoid, annulus)
    assert total == pytest.approx(-4 * np.pi * np.tanh(5.0), rel=1e-4)


def test_plane_mesh_is_flat():
    plane = mesh(make_plane(), ParamGrid((-1.0, 1.0), (-1.0, 1.0), 16, 16))
    assert np.all(plane.curvature == 0.0)
    assert plane.faces().shape == (256, 4)


def test_mesh_agrees_with_immersion(catenoid):
    grid = ParamGrid((-1.0, 1.0), (0.0, 2 * np.pi), 16, 32, kind="log")
    surface = mesh(catenoid, grid)
    z = surface.domain[5, 7]
    assert np.allclose(surface.positions[5, 7], immerse(catenoid, z), atol=1e-8)


def test_threaded_mesh_matches_serial(catenoid):
    grid = ParamGrid((-1.0, 1.0), (0.0, 2 * np.pi), 16, 32, kind="log")
    serial = mesh(catenoid, grid)
    threaded = mesh(catenoid, grid, workers=4)
    assert np.allclose(serial.positions, threaded.positions, rtol=0, atol=1e-12)


# --- Flux and periods ---


def test_catenoid_flux_is_vertical(catenoid):
    F = flux(catenoid, catenoid.cycle("horizontal")).F
    assert np.allclose(F, [0.0, 0.0, 2 * np.pi], atol=1e-9)


def test_catenoid_periods_close(catenoid):
    assert period_report(catenoid).residual < 1e-10


def test_lopez_ros_keeps_catenoid_closed(catenoid):
    assert period_report(lopez_ros(catenoid, 2.0)).residual < 1e-10


def test_conjugate_catenoid_does_not_close(catenoid):
    """Test that the conjugate surface picks up the vertical period 2π."""
    report = period_report(associate(catenoid, np.pi / 2))
    assert report.residual == pytest.approx(2 * np.pi, rel=1e-8)


def test_similarity_scales_flux(catenoid):
    scaled = similarity(catenoid, 2.0, 0.0)
    F = flux(scaled, scaled.cycle("horizontal")).F
    assert F[2] == pytest.approx(4 * np.pi)


# --- Ends and global checks ---


def test_catenoid_end_fit():
    """Test x₃ = a log r + b with a ≈ 1, b ≈ log 2 on the upper end."""
    data = make_catenoid()
    samples = mesh(data, ParamGrid((np.log(200) - 0.1, np.log(800) + 0.1), (0, 2 * np.pi), 64, 128, kind="log"))
    fit = end_fit(samples, R=100.0)
    assert fit.a == pytest.approx(1.0, abs=1e-3)
    assert fit.b == pytest.approx(np.log(2.0), abs=1e-3)


def test_end_fit_rejects_multisheeted_patch(helicoid):
    samples = mesh(helicoid, ParamGrid((0.5, 2.0), (-2 * np.pi, 2 * np.pi), 16, 64))
    with pytest.raises(NotAGraph):
        end_fit(samples)


def test_catenoid_area_ratio_is_monotone(catenoid):
    surface = mesh(catenoid, ParamGrid((-3.2, 3.2), (0.0, 2 * np.pi), 640, 256, kind="log"))
    profile = ball_area_profile(surface, (-1.0, 0.0, 0.0), [1.25, 2.0, 5.0, 10.0])
    ratios = [ratio for _, ratio in profile]
    assert all(b >= a - 1e-6 for a, b in zip(ratios, ratios[1:]))
    assert ratios[0] > np.pi


def test_plane_area_ratio_is_pi():
    surface = mesh(make_plane(), ParamGrid((-2.0, 2.0), (-2.0, 2.0), 200, 200))
    for _, ratio in ball_area_profile(surface, (0.0, 0.0, 0.0), [0.5, 1.0, 2.0]):
        assert ratio == pytest.approx(np.pi, abs=0.05)


def test_superharmonic_on_catenoid(catenoid):
    region = mesh(catenoid, ParamGrid((0.2, 2.0), (0.0, 2 * np.pi), 128, 256, kind="log"))
    assert superharmonic_check(catenoid, region).violation < 1e-6


def test_superharmonic_on_helicoid(helicoid):
    region = mesh(helicoid, ParamGrid((0.9, 2.0), (-1.0, 0.0), 128, 128))
    assert superharmonic_check(helicoid, region).violation < 1e-6


def test_jorge_meeks_catenoid(catenoid):
    degree, gap = jorge_meeks_check(catenoid, genus=0, ends=2)
    assert degree == 1
    assert gap == 0


def test_jorge_meeks_not_applicable_to_helicoid(helicoid):
    with pytest.raises(NotApplicable):
        jorge_meeks_check(helicoid, genus=0, ends=1)


@pytest.mark.parametrize("power", [1, 2, 3])
def test_jorge_meeks_counts_zeros_away_from_ends(power):
    """Test g = zⁿ, dh = dz: the zero at the origin is not enclosed by any end loop."""
    enneper = make_plane().evolve(
        g=AnalyticFn(lambda z: z**power, ((0j, power),), f"z^{power}"),
        ends=(End(0j, EndKind.PLANAR, at_infinity=True),),
        name=f"enneper({power})",
    )
    degree, gap = jorge_meeks_check(enneper, genus=0, ends=1)
    assert degree == power
    assert gap == power


def test_gauss_degree_counts_zeros_near_infinity():
    """Test g = (z - 5)(z + 7)/z³: two finite zeros, one triple pole, a zero at infinity."""
    data = make_plane().evolve(
        g=AnalyticFn(lambda z: (z - 5) * (z + 7) / z**3, ((5 + 0j, 1), (-7 + 0j, 1), (0j, -3))),
    )
    assert gauss_degree(data) == 3


def test_jorge_meeks_not_applicable_to_cylinder_chart(riemann_dz):
    with pytest.raises(NotApplicable):
        jorge_meeks_check(riemann_dz, genus=1, ends=2)
