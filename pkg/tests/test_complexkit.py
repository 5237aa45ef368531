import numpy as np
import pytest

from wlab.complexkit import (
    AnalyticFn,
    Contour,
    SampledLine,
    cauchy_derivative,
    contour_integrate,
    count_zeros_poles,
    laurent_jet,
    residue_at,
    spectral_derivative,
)
from wlab.errors import (
    AliasingDetected,
    MultipleSingularities,
    SingularityOnPath,
    ZeroOnPath,
)


@pytest.fixture
def inverse():
    return AnalyticFn(lambda z: 1.0 / z, ((0j, -1),), "1/z")


# --- Contours ---


def test_contour_requires_enough_samples():
    with pytest.raises(ValueError):
        Contour(np.array([0, 1, 2], dtype=complex), closed=False)


def test_closed_contour_endpoints_must_match():
    pts = np.linspace(0, 1, 10) + 0j
    with pytest.raises(ValueError):
        Contour(pts, closed=True)


def test_vertical_loop_closes_modulo_period():
    loop = Contour.vertical_loop(0.25, n=32)
    assert loop.closed
    assert loop.samples[-1] - loop.samples[0] == pytest.approx(1j)


# --- Integration ---


def test_integral_of_inverse_around_origin(inverse):
    """Test that ∮ dz/z = 2πi and reverses sign with the orientation."""
    c = Contour.circle(0j, 1.0)
    assert contour_integrate(inverse, c) == pytest.approx(2j * np.pi, abs=1e-10)
    assert contour_integrate(inverse, c.reversed()) == pytest.approx(-2j * np.pi, abs=1e-10)


def test_integral_of_entire_function_vanishes():
    f = AnalyticFn(np.exp, (), "exp")
    assert abs(contour_integrate(f, Contour.circle(0.3 + 0.2j, 2.0))) < 1e-10


def test_vector_valued_integrand():
    f = AnalyticFn(lambda z: np.stack([1.0 / z, np.ones_like(z)], axis=-1), ((0j, -1),))
    value = contour_integrate(f, Contour.circle(0j, 1.0))
    assert value.shape == (2,)
    assert value[0] == pytest.approx(2j * np.pi, abs=1e-10)
    assert abs(value[1]) < 1e-10


def test_singularity_on_path_is_rejected(inverse):
    c = Contour.segment(-1.0, 1.0)
    with pytest.raises(SingularityOnPath):
        contour_integrate(inverse, c)


def test_periodic_copies_are_guarded():
    """Test that a vertical loop sees the singularity one period above."""
    f = AnalyticFn(lambda z: 1.0 / (z - 1.5j), ((1.5j, -1),))
    with pytest.raises(SingularityOnPath):
        contour_integrate(f, Contour.vertical_loop(0.0))


# --- Residues and Laurent jets ---


def test_residue_of_simple_pole():
    f = AnalyticFn(lambda z: 3.0 / (z - 0.5) + z**2, ((0.5 + 0j, -1),))
    assert residue_at(f, 0.5, 0.1) == pytest.approx(3.0, abs=1e-10)


def test_residue_rejects_second_singularity():
    f = AnalyticFn(lambda z: 1 / z + 1 / (z - 0.1), ((0j, -1), (0.1 + 0j, -1)))
    with pytest.raises(MultipleSingularities):
        residue_at(f, 0j, 0.5)


def test_laurent_jet_of_double_pole():
    """Test the jet of -2/z² + 1 + z: c₋₂ = -2, c₀ = 1, c₁ = 1."""
    f = AnalyticFn(lambda z: -2 / z**2 + 1 + z, ((0j, -2),))
    jet = laurent_jet(f, 0j, m=4, r=0.5)
    assert jet.coefficient(-2) == pytest.approx(-2.0, abs=1e-10)
    assert jet.coefficient(-1) == pytest.approx(0.0, abs=1e-10)
    assert jet.coefficient(0) == pytest.approx(1.0, abs=1e-10)
    assert jet.coefficient(1) == pytest.approx(1.0, abs=1e-10)
    assert jet.tail_decays()


def test_laurent_jet_off_center_sees_shift():
    """Test that centring at ẑ = z₀ - δ gives c₋₃ = 2δ·c₋₂."""
    delta = 0.01
    f = AnalyticFn(lambda z: -2 / (z - delta) ** 2)
    jet = laurent_jet(f, 0j, m=4, r=0.2)
    assert jet.coefficient(-3) / (2 * jet.coefficient(-2)) == pytest.approx(delta, abs=1e-10)


# --- Argument principle ---


def test_count_zeros_minus_poles():
    f = AnalyticFn(lambda z: (z - 0.2) ** 2 * (z + 0.3) / (z - 0.5j))
    assert count_zeros_poles(f, Contour.circle(0j, 1.0)) == 2


def test_count_fails_with_zero_on_path():
    f = AnalyticFn(lambda z: z - 1.0)
    with pytest.raises(ZeroOnPath):
        count_zeros_poles(f, Contour.circle(0j, 1.0))


# --- Derivatives ---


def test_spectral_derivative_of_exponential():
    """Test that ∂_z e^{2πz} = 2π e^{2πz} on a vertical line."""
    line = SampledLine.sample(lambda z: np.exp(2 * np.pi * z), 0.1, 32)
    d1 = spectral_derivative(line, 1)
    assert np.allclose(d1.values, 2 * np.pi * line.values, atol=1e-9)


def test_spectral_derivative_antiperiodic():
    """Test half-integer modes: e^{πz} changes sign after one period."""
    line = SampledLine.sample(lambda z: np.exp(np.pi * z), 0.0, 32, antiperiodic=True)
    d2 = spectral_derivative(line, 2)
    assert np.allclose(d2.values, np.pi**2 * line.values, atol=1e-9)


@pytest.mark.parametrize("order,factor", [(1, 0.0), (2, (8 * np.pi) ** 2), (4, (8 * np.pi) ** 4)])
def test_spectral_derivative_keeps_nyquist_mode_in_even_orders(order, factor):
    """Test that (-1)^j keeps its mode in even orders and drops it in odd ones."""
    line = SampledLine(0.0, (-1.0) ** np.arange(8) + 0j)
    out = spectral_derivative(line, order, alias_tol=2.0)
    assert np.allclose(out.values, factor * line.values, rtol=1e-12, atol=1e-9)


def test_spectral_derivative_detects_aliasing():
    rng = np.random.default_rng(0)
    line = SampledLine(0.0, rng.standard_normal(32) + 0j)
    with pytest.raises(AliasingDetected):
        spectral_derivative(line, 1)


def test_cauchy_derivative_matches_closed_form():
    z = np.array([0.3 + 0.1j, -0.2 + 0.4j])
    d3 = cauchy_derivative(np.exp, z, n=3, r=0.1, points=32)
    assert np.allclose(d3, np.exp(z), atol=1e-10)


def test_sampled_line_needs_power_of_two():
    with pytest.raises(ValueError):
        SampledLine(0.0, np.ones(12))
