import math

import numpy as np
import pytest

from wavecrit import littlewood_paley as lp
from wavecrit import propagator as pr
from wavecrit import spectral as sp
from wavecrit.spectral import GridSpec, RealField, StatePair


def _state(grid, rng):
    return StatePair(sp.random_field(grid, rng), sp.random_field(grid, rng))


def test_time_zero_identity(grid2, rng):
    s = _state(grid2, rng)
    out = pr.evolve_linear(s, 0.0)
    assert np.allclose(out.u.values, s.u.values, atol=1e-14)
    assert np.allclose(out.ut.values, s.ut.values, atol=1e-14)


def test_single_mode_cosine(grid2):
    s = StatePair(sp.plane_mode(grid2, (2, 1)), RealField(grid2, np.zeros(grid2.shape)))
    t = 0.731
    w = math.sqrt(5)
    out = pr.evolve_linear(s, t)
    assert np.allclose(out.u.values, math.cos(t * w) * s.u.values, atol=1e-13)
    assert np.allclose(out.ut.values, -w * math.sin(t * w) * s.u.values, atol=1e-13)


def test_half_period_swap_keeps_mode_energy(grid2):
    s = StatePair(sp.plane_mode(grid2, (3, 0)), RealField(grid2, np.zeros(grid2.shape)))
    out = pr.evolve_linear(s, math.pi / 6)  # quarter turn, t |xi| = pi/2
    assert np.max(np.abs(out.u.values)) < 1e-13
    e0 = pr.linear_energy_per_mode(s)
    assert np.allclose(pr.linear_energy_per_mode(out), e0, atol=1e-12 * e0.max())


def test_zero_mode_drifts(grid2):
    s = StatePair(RealField(grid2, np.full(grid2.shape, 1.0)), RealField(grid2, np.full(grid2.shape, 0.5)))
    out = pr.evolve_linear(s, 4.0)
    assert np.allclose(out.u.values, 3.0)
    assert np.allclose(out.ut.values, 0.5)


def test_zero_state_energy(grid2):
    assert np.all(pr.linear_energy_per_mode(StatePair.zeros(grid2)) == 0)


def test_linear_energy_conserved(grid2, rng):
    s = _state(grid2, rng)
    e0 = pr.linear_energy(s)
    for t in (0.3, 5.0, -12.0):
        assert pr.linear_energy(pr.evolve_linear(s, t)) == pytest.approx(e0, rel=1e-12)


def test_commutes_with_multipliers(grid2, rng):
    s = StatePair(sp.random_field(grid2, rng, mean_zero=True), sp.random_field(grid2, rng, mean_zero=True))
    t = 1.7
    a = lp.project_band(pr.evolve_linear(s, t).u, 4).values
    b = pr.evolve_linear(StatePair(lp.project_band(s.u, 4), lp.project_band(s.ut, 4)), t).u.values
    assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(a))
    c = sp.fractional_derivative(pr.evolve_linear(s, t).u, 0.5).values
    e = pr.evolve_linear(StatePair(sp.fractional_derivative(s.u, 0.5), sp.fractional_derivative(s.ut, 0.5)), t)
    assert np.max(np.abs(c - e.u.values)) <= 1e-12 * np.max(np.abs(c))


def test_numba_and_numpy_rotation_agree(grid2, rng):
    from wavecrit import _kernels

    a = sp.rfft(sp.random_field(grid2, rng).values)
    b = sp.rfft(sp.random_field(grid2, rng).values)
    w = grid2.abs_xi_half()
    ref = _kernels.rotate_pair_numpy(a, b, w, 2.3)
    got = _kernels.rotate_pair(a, b, w, 2.3)
    for x, y in zip(ref, got):
        assert np.max(np.abs(x - y)) < 1e-12 * np.max(np.abs(x))


def test_sine_propagator_zero_mode(grid2):
    g = RealField(grid2, np.full(grid2.shape, 2.0))
    assert np.allclose(pr.sine_propagator(g, 1.5).values, 3.0)


def test_support_and_horizon():
    g = GridSpec(1, 256, 40.0)
    f = sp.gaussian(g, width=0.5)
    diam = pr.support_diameter(f, 1e-12)
    assert 2 * 0.5 * math.sqrt(2 * math.log(1e12)) - 2 * g.dx <= diam <= 2 * 0.5 * math.sqrt(2 * math.log(1e12)) + 2 * g.dx
    assert pr.wrap_horizon(f) == pytest.approx(20.0 - diam)


def test_horizon_enforced():
    g = GridSpec(2, 128, 40.0)
    f = sp.gaussian(g, width=0.5)
    with pytest.raises(pr.HorizonError):
        pr.dispersive_decay_fit(f, 4, [1.0, 19.9])
    with pytest.raises(ValueError):
        pr.dispersive_decay_fit(f, 4, [0.0, 1.0])


def test_l2_slope_is_flat_in_2d():
    g = GridSpec(2, 512, 200.0)
    # low frequencies make the L^2 norm grow like sqrt(log t); kill them
    f = sp.fractional_derivative(sp.gaussian(g, width=1.0), 2)
    h = pr.wrap_horizon(f)
    slope = pr.dispersive_decay_fit(f, 2.0, np.geomspace(h / 8, 0.9 * h, 6))
    assert abs(slope) < 0.05


def test_double_duhamel_equal_times(grid2, rng):
    g = sp.random_field(grid2, rng)
    h = sp.random_field(grid2, rng)
    g, h = g * (1 / sp.lebesgue_norm(g, 2)), h * (1 / sp.lebesgue_norm(h, 2))
    assert pr.double_duhamel_identity_check(g, h, 2.0, 2.0) <= 1e-12
    lhs, rhs = pr.double_duhamel_physical(g, h, 2.0, 2.0)
    assert rhs == pytest.approx(-grid2.cell_volume * float(np.sum(g.values * h.values)), abs=1e-12)
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_double_duhamel_single_mode(grid2):
    g = sp.plane_mode(grid2, (1, 2))
    t1, t2 = 3.1, -1.4
    lhs, rhs = pr.double_duhamel_physical(g, g, t1, t2)
    expected = -math.cos((t1 - t2) * math.sqrt(5)) * sp.lebesgue_norm(g, 2) ** 2
    assert lhs == pytest.approx(expected, abs=1e-12)
    assert rhs == pytest.approx(expected, abs=1e-12)
