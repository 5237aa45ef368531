from dataclasses import replace

import numpy as np
import pytest

from wlab.catalog import cylinder_constants, make_catenoid_cylinder
from wlab.complexkit import AnalyticFn, SampledLine
from wlab.errors import BranchObstruction, GaugeMismatch, PoleCollision, TrackLost
from wlab.kdv.commands import rational_potential, soliton_profile
from wlab.kdvflow import (
    algebro_geometric_rank,
    evolve_flow,
    flow_state,
    flow_translate,
    kdv_invariants,
    kdv_real_evolve,
    locate_pole,
    miura_consistency,
    miura_identity,
    pole_propagation,
    schrodinger_check,
    shiffman_evolve,
    sqrt_branch,
    stationary_check,
    u_from_g,
)

P = cylinder_constants(1.0).period


@pytest.fixture
def riemann_u(riemann_dz):
    return u_from_g(riemann_dz, SampledLine(P / 4, np.zeros(128)))


# --- Miura and Schrödinger ---


def test_miura_identity_holds_symbolically():
    assert miura_identity()


def test_miura_consistency_on_riemann_line(riemann_dz):
    assert miura_consistency(riemann_dz, SampledLine(P / 4, np.zeros(64))) < 1e-8


def test_schrodinger_on_catenoid_uses_antiperiodic_branch():
    """Test y = e^{-z/2}: g = e^z winds once, so y changes sign after 2πi."""
    data = make_catenoid_cylinder()
    line = SampledLine(0.3, np.zeros(64), period=2 * np.pi)
    assert sqrt_branch(line.with_values(data.g(line.z))).antiperiodic
    assert schrodinger_check(data, line) < 1e-8


def test_schrodinger_on_riemann_line(riemann_dz):
    assert schrodinger_check(riemann_dz, SampledLine(P / 4, np.zeros(64))) < 1e-8


def test_sqrt_branch_rejects_zero():
    values = np.ones(8, dtype=complex)
    values[3] = 0.0
    with pytest.raises(BranchObstruction):
        sqrt_branch(SampledLine(0.0, values))


# --- Real KdV ---


def test_soliton_translates_at_its_speed():
    """Test that (c/2)sech²(√c/2 (y - y₀)) moves by c·T."""
    line = SampledLine(0.0, np.zeros(256), period=20.0)
    u0 = line.with_values(soliton_profile(line.y, 16.0, 10.0))
    out = kdv_real_evolve(u0, 0.05, 1e-4)
    expected = soliton_profile(line.y, 16.0, 10.0 + 16.0 * 0.05)
    assert np.max(np.abs(np.real(out.values) - expected)) < 1e-4
    m0, e0 = kdv_invariants(u0)
    m1, e1 = kdv_invariants(out)
    assert abs(m1 - m0) / abs(m0) < 1e-8
    assert abs(e1 - e0) / abs(e0) < 1e-6


def test_small_amplitude_follows_airy_dispersion():
    """Test ε cos(ky) ↦ ε cos(ky + k³t) in the linear regime."""
    eps, k, T = 1e-6, 3, 0.1
    line = SampledLine(0.0, np.zeros(64), period=2 * np.pi)
    u0 = line.with_values(eps * np.cos(k * line.y))
    out = kdv_real_evolve(u0, T, 1e-3)
    assert np.allclose(np.real(out.values), eps * np.cos(k * line.y + k**3 * T), atol=1e-11)


def test_real_evolve_rejects_complex_data():
    line = SampledLine(0.0, np.full(16, 1.0 + 1.0j))
    with pytest.raises(ValueError):
        kdv_real_evolve(line, 0.1, 0.01)


# --- Flows of the hierarchy ---


def test_flow_translate_shifts_exponential():
    line = SampledLine.sample(lambda z: np.exp(2 * np.pi * z), 0.0, 32)
    moved = flow_translate(line, 0.1)
    assert np.allclose(moved.values, line.values * np.exp(-0.2 * np.pi))


def test_flow_translate_antiperiodic():
    line = SampledLine.sample(lambda z: np.exp(np.pi * z), 0.0, 32, antiperiodic=True)
    moved = flow_translate(line, 0.1)
    assert np.allclose(moved.values, line.values * np.exp(-0.1 * np.pi))


def test_flow_zero_agrees_with_translation():
    line = SampledLine.sample(lambda z: np.exp(2 * np.pi * z), 0.0, 32)
    evolved = evolve_flow(line, 0, 0.1, 1e-3)
    assert np.allclose(evolved.values, flow_translate(line, 0.1).values, rtol=1e-7, atol=0)


def test_stationary_check():
    """Test 𝒫₂(u) = u'' + 3u²: constant for u ≡ 1, not for ε cos y."""
    assert stationary_check(SampledLine(0.0, np.ones(32))) < 1e-12
    eps = 1e-3
    line = SampledLine(0.0, np.zeros(32), period=2 * np.pi)
    assert stationary_check(line.with_values(eps * np.cos(line.y))) > 0.5 * eps


# --- Algebro-geometric test ---


def test_rational_potential_is_stationary_for_kdv():
    """Test that -2/z² is killed by the KdV flow: dependency at n = 1."""
    u, points = rational_potential()
    report = algebro_geometric_rank(u, n_max=3, z=points)
    assert report.dependent_at == 1
    assert report.residual < 1e-6


@pytest.mark.parametrize("value", [0.0, 1.0])
def test_constant_potential_is_degenerate(value):
    """Test that every flow vanishes on a constant potential."""
    report = algebro_geometric_rank(SampledLine(0.0, np.full(32, value)), n_max=2)
    assert report.rank == 0
    assert report.dependent_at == 1


def test_riemann_potential_is_finite_gap(riemann_u):
    report = algebro_geometric_rank(riemann_u, n_max=3)
    assert report.dependent_at == 1
    assert report.residual < 1e-6


def test_rank_rejects_flow_range():
    with pytest.raises(ValueError):
        algebro_geometric_rank(SampledLine(0.0, np.ones(32)), n_max=0)


# --- Poles ---


def test_locate_pole_on_both_sides(riemann_u):
    """Test that u has double poles with c₋₂ = -2 at the ends ±P/2."""
    for side, expected in ((1, P / 2), (-1, -P / 2)):
        z0, a = locate_pole(riemann_u, side)
        assert z0.real == pytest.approx(expected, abs=1e-6)
        assert min(z0.imag, 1.0 - z0.imag) < 1e-6
        assert a == pytest.approx(-2.0, abs=1e-5)


def test_pole_propagation_follows_moving_pole():
    def family():
        for t in range(5):
            center = 0.3 + 0.02 * t
            yield t, AnalyticFn(lambda z, c=center: -2.0 / (z - c) ** 2)

    track = pole_propagation(family(), 0.3 + 0j)
    assert np.allclose(track.positions("pole"), 0.3 + 0.02 * np.arange(5), atol=1e-10)
    assert np.allclose(track.leading("pole"), -2.0, atol=1e-10)


def test_pole_propagation_loses_track_without_pole():
    family = [(0, AnalyticFn(lambda z: z**2))]
    with pytest.raises(TrackLost):
        pole_propagation(family, 0j)


# --- Shiffman flow ---


def test_flow_state_rejects_line_near_end(riemann_dz):
    with pytest.raises(PoleCollision):
        flow_state(riemann_dz, x0=P / 2 - 0.01)


def test_shiffman_flow_preserves_periods(riemann_dz):
    state = flow_state(riemann_dz, n=64)
    result = shiffman_evolve(state, T=0.05, dt=1e-3, tol=1e-8)
    assert result.state.t.real == pytest.approx(0.05)
    assert result.max_drift() < 1e-5
    assert result.max_route_discrepancy() < 1e-5
    assert result.max_gauge_discrepancy() < 1e-5
    assert result.spacing_drift() < 1e-5
    assert np.allclose(result.track.leading("right"), -2.0, atol=0.05)


def test_shiffman_flow_rejects_inconsistent_potential(riemann_dz):
    """Test that a u not computed from g stops the flow at once."""
    state = flow_state(riemann_dz, n=64)
    shifted = replace(state, u=state.u.with_values(state.u.values + 1.0))
    with pytest.raises(GaugeMismatch):
        shiffman_evolve(shifted, T=0.01, dt=1e-3)
