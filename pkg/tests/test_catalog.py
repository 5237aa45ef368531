import logging

import numpy as np
import pytest
from scipy import special

from wlab.aop import _cache
from wlab.catalog import (
    cylinder_constants,
    cylinder_translation,
    jacobi_complex,
    make_catenoid_cylinder,
    make_helicoid_dz,
    make_perturbed,
    make_plane,
    make_riemann,
    make_riemann_cylinder,
    normalize_flux,
    require_dz,
    resolve,
)
from wlab.complexkit import Contour, cauchy_derivative, contour_integrate
from wlab.errors import NotDzNormalized, ZeroVerticalFlux
from wlab.weierstrass import (
    ParamGrid,
    associate,
    flux,
    jorge_meeks_check,
    lopez_ros,
    period_report,
    total_curvature,
    weierstrass_form,
)


# --- Jacobi functions and cylinder constants ---


def test_jacobi_complex_reduces_to_real():
    u = np.array([0.1, 0.7, 1.3])
    sn, cn, dn = jacobi_complex(u, 0.5)
    s, c, d, _ = special.ellipj(u, 0.5)
    assert np.allclose(sn, s) and np.allclose(cn, c) and np.allclose(dn, d)


def test_jacobi_complex_identities():
    u = np.array([0.3 + 0.2j, 1.1 - 0.4j])
    sn, cn, dn = jacobi_complex(u, 0.3)
    assert np.allclose(sn**2 + cn**2, 1.0)
    assert np.allclose(dn**2 + 0.3 * sn**2, 1.0)


def test_symmetric_cylinder_has_unit_period():
    cc = cylinder_constants(1.0)
    assert cc.period == pytest.approx(1.0)
    assert cc.zero(0) == pytest.approx(0.5)
    assert cc.pole(0) == pytest.approx(0.5j)


# --- Riemann example in the cylinder chart ---


def test_riemann_cylinder_zeros_and_poles(riemann_dz):
    cc = cylinder_constants(1.0)
    assert abs(riemann_dz.g(cc.zero(0) + 1e-9)) < 1e-12
    assert abs(riemann_dz.g(cc.pole(0) + 1e-3)) > 1e4


@pytest.mark.parametrize("n", [1, 2, 3])
def test_riemann_cylinder_derivatives(riemann_dz, n):
    """Test the declared derivatives against Cauchy derivatives of g."""
    z = np.array([0.3 + 0.2j, 0.15 + 0.8j])
    expected = cauchy_derivative(riemann_dz.g, z, n, r=0.05, points=64)
    assert np.allclose(riemann_dz.dg(n)(z), expected, rtol=1e-8)


def test_riemann_cylinder_total_curvature(riemann_dz):
    """Test ∫K dA = -8π over one fundamental domain of the quotient."""
    P = cylinder_constants(1.0).period
    x0, y0 = P / 4 + P / 256, 0.25 + 1 / 256
    grid = ParamGrid((x0, x0 + P), (y0, y0 + 1.0), 64, 64)
    assert total_curvature(riemann_dz, grid) == pytest.approx(-8 * np.pi, rel=0.02)


def test_riemann_cylinder_translation_height(riemann_dz):
    T = cylinder_translation(riemann_dz)
    assert T[2] == pytest.approx(cylinder_constants(1.0).period, abs=1e-9)


def test_riemann_cylinder_periods_close(riemann_dz):
    """Test that the planar ends carry no period and the vertical cycle closes up to translation."""
    report = period_report(riemann_dz)
    for end in report.ends:
        assert end.deviation < 1e-8


@pytest.mark.parametrize("end", [0, 1])
@pytest.mark.parametrize("radius", [0.1, 0.3])
def test_riemann_cylinder_end_flux_matches_residues(riemann_dz, end, radius):
    """Test F = π(Re(r₁ - r₂), -Im(r₁ + r₂), 0) on any circle around a planar end."""
    ends = period_report(riemann_dz).as_dict()["ends"]
    r1 = complex(*ends[end]["residue_dh_over_g"])
    r2 = complex(*ends[end]["residue_g_dh"])
    expected = np.pi * np.array([(r1 - r2).real, -(r1 + r2).imag, 0.0])
    F = flux(riemann_dz, Contour.circle(riemann_dz.ends[end].location, radius)).F
    assert np.allclose(F, expected, atol=1e-7)


@pytest.mark.parametrize("radius", [0.25, 0.5, 0.75])
def test_catenoid_end_flux_matches_residues(catenoid, radius):
    """Test that the inner catenoid end carries the vertical flux 2π·Re res dh."""
    ends = period_report(catenoid).as_dict()["ends"]
    r1 = complex(*ends[0]["residue_dh_over_g"])
    r2 = complex(*ends[0]["residue_g_dh"])
    r3 = contour_integrate(catenoid.phi, catenoid.ends[0].loop) / (2j * np.pi)
    expected = np.pi * np.array([(r1 - r2).real, -(r1 + r2).imag, 2 * r3.real])
    F = flux(catenoid, Contour.circle(0j, radius)).F
    assert np.allclose(F, expected, atol=1e-9)
    assert np.allclose(F, [0.0, 0.0, 2 * np.pi], atol=1e-9)


def test_lambda_outside_supported_range_warns(caplog):
    with caplog.at_level(logging.WARNING):
        make_riemann_cylinder(30.0)
    assert "fuera del rango" in caplog.text


def test_lambda_must_be_positive():
    with pytest.raises(ValueError):
        make_riemann_cylinder(-1.0)


# --- Riemann example on the elliptic curve ---


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_make_riemann_closes_periods(lam):
    data, params = make_riemann(lam)
    assert params.residual < 1e-8
    assert params.as_dict()["lambda"] == lam
    degree, gap = jorge_meeks_check(data, genus=1, ends=2)
    assert degree == 2
    assert gap == 0


def test_make_riemann_is_cached():
    _cache.clear()
    first = make_riemann(1.0)
    assert make_riemann(1.0) is first
    _cache.clear()


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_make_riemann_unit_vertical_flux(lam):
    """Test that the closed-form amplitude gives vertical flux 1 on the a-cycle."""
    data, params = make_riemann(lam)
    assert flux(data, params.a_cycle).F[2] == pytest.approx(1.0, abs=1e-10)


def test_symmetric_riemann_example_is_self_conjugate():
    """Test that the conjugate of M₁ closes on a and its a-period has the length of T₁."""
    data, params = make_riemann(1.0)
    conjugate = associate(data, np.pi / 2)
    assert np.allclose(flux(conjugate, params.a_cycle).F, 0.0, atol=1e-7)
    period = np.real(contour_integrate(weierstrass_form(conjugate), params.a_cycle, tol=1e-11))
    assert np.linalg.norm(period) == pytest.approx(np.linalg.norm(params.T), rel=1e-6)


def test_riemann_translation_pairs_with_reciprocal_flux():
    """Test |T_λ|/|T_λ,3| = |F_a(M_1/λ)|/|F_a,3(M_1/λ)| through the conjugate's a-period."""
    _, params = make_riemann(2.0)
    reciprocal, reciprocal_params = make_riemann(0.5)
    conjugate = associate(reciprocal, np.pi / 2)
    form = weierstrass_form(conjugate)
    period = np.real(contour_integrate(form, reciprocal_params.a_cycle, tol=1e-11))
    left = np.linalg.norm(params.T) / abs(params.T[2])
    right = np.linalg.norm(period) / abs(period[2])
    assert left == pytest.approx(right, rel=1e-4)


def test_lopez_ros_opens_riemann_periods():
    """Test that g ↦ 2g breaks conj(∮g dh) = ∮dh/g on the a-cycle."""
    data, _ = make_riemann(1.0)
    report = period_report(lopez_ros(data, 2.0), cycles=data.cycles)
    assert report.residual > 1e-3


def test_riemann_flux_has_positive_horizontal_part():
    data, _ = make_riemann(1.0)
    normalized, scale, _ = normalize_flux(data)
    F = flux(normalized, normalized.cycle("horizontal")).F
    assert F[2] == pytest.approx(1.0, abs=1e-9)
    assert F[0] > 0
    assert abs(F[1]) < 1e-9
    assert scale > 0


def test_normalize_flux_rejects_zero_vertical_flux():
    """Test g = z, dh = dz (Enneper) around the unit circle."""
    enneper = make_plane().evolve(
        g=resolve("catenoid").g,
        cycles=(("horizontal", Contour.circle(0j, 1.0)),),
    )
    with pytest.raises(ZeroVerticalFlux):
        normalize_flux(enneper)


# --- Other catalog entries ---


def test_catenoid_cylinder_flux():
    data = make_catenoid_cylinder()
    F = flux(data, data.cycle("horizontal")).F
    assert np.allclose(F, [0.0, 0.0, 2 * np.pi], atol=1e-9)


def test_helicoid_dz_is_normalized():
    assert require_dz(make_helicoid_dz()) is not None


def test_perturbed_datum_has_periodic_modulus():
    """Test that |g| and g'/g are i-periodic although g is not."""
    data = make_perturbed(0.1)
    z = np.array([0.1 + 0.2j, -0.3 + 0.7j])
    assert np.allclose(np.abs(data.g(z + 1j)), np.abs(data.g(z)))
    ratio = data.dg(1)(z) / data.g(z)
    assert np.allclose(data.dg(1)(z + 1j) / data.g(z + 1j), ratio)


# --- Names ---


@pytest.mark.parametrize(
    "name,expected",
    [
        ("plane", "plane"),
        ("catenoid", "catenoid"),
        ("helicoid", "helicoid"),
        ("perturbed:ε=0.2", "perturbed:ε=0.2"),
        ("perturbed:eps=0.2", "perturbed:ε=0.2"),
    ],
)
def test_resolve_names(name, expected):
    assert resolve(name).name == expected


def test_resolve_dz_gauge():
    assert resolve("riemann:λ=1", gauge="dz").name == "riemann-dz:λ=1"
    assert resolve("catenoid", gauge="dz").name == "catenoid-dz"


def test_resolve_rejects_unknown_name():
    with pytest.raises(ValueError):
        resolve("costa")


def test_require_dz_rejects_chart_data():
    with pytest.raises(NotDzNormalized):
        require_dz(resolve("catenoid"))
