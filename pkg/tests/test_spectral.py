import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavecrit import spectral as sp
from wavecrit.spectral import GridSpec, RealField, StatePair, Trajectory


def test_grid_validation():
    with pytest.raises(sp.StructuralError):
        GridSpec(2, 48)
    with pytest.raises(sp.StructuralError):
        GridSpec(2, 2)
    with pytest.raises(sp.StructuralError):
        GridSpec(2, 16, -1.0)
    with pytest.raises(sp.StructuralError):
        GridSpec(3, 1024)  # over the point cap


def test_lattice_frequencies():
    g = GridSpec(1, 8, 4 * math.pi)
    assert np.allclose(g.abs_xi(), np.abs(np.fft.fftfreq(8, 1 / 8)) * 0.5)


def test_field_rejects_nonfinite(grid2):
    bad = np.zeros(grid2.shape)
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        RealField(grid2, bad)
    with pytest.raises(Exception):
        RealField(grid2, np.zeros((4, 4)))


def test_constant_field_single_coefficient(grid2):
    F = sp.forward_transform(RealField(grid2, np.full(grid2.shape, 3.0))).coefficients
    assert abs(F.flat[0]) > 0
    rest = F.copy()
    rest.flat[0] = 0
    assert np.max(np.abs(rest)) < 1e-12


def test_cosine_mode_two_conjugate_coefficients(grid2):
    f = sp.plane_mode(grid2, (1, 0))
    F = sp.forward_transform(f).coefficients
    big = np.argwhere(np.abs(F) > 1e-9)
    assert len(big) == 2
    a, b = (F[tuple(i)] for i in big)
    assert np.isclose(a, np.conj(b))


@pytest.mark.parametrize("d,n", [(1, 64), (2, 32), (3, 16), (6, 8)])
def test_roundtrip_and_parseval(d, n, rng):
    g = GridSpec(d, n)
    for _ in range(100 if d < 6 else 5):
        f = sp.random_field(g, rng)
        back = sp.inverse_transform(sp.forward_transform(f))
        assert np.max(np.abs(back.values - f.values)) <= 1e-12 * np.max(np.abs(f.values))
        l2 = sp.lebesgue_norm(f, 2)
        spec = math.sqrt(g.cell_volume * np.sum(np.abs(sp.fft(f.values)) ** 2))
        assert abs(l2 - spec) <= 1e-12 * l2


def test_inverse_rejects_non_hermitian(grid2):
    F = np.zeros(grid2.shape, dtype=complex)
    F[1, 0] = 1j
    with pytest.raises(sp.StructuralError):
        sp.inverse_transform(sp.SpectralField(grid2, F))


def test_multiplier_identity_and_laplacian(grid2):
    f = sp.plane_mode(grid2, (2, 1))
    F = sp.forward_transform(f)
    assert np.allclose(sp.apply_multiplier(F, 1.0).coefficients, F.coefficients)
    lap = sp.apply_multiplier(F, lambda xi: xi[0] ** 2 + xi[1] ** 2)
    assert np.allclose(sp.inverse_transform(lap).values, 5.0 * f.values, atol=1e-12)


def test_multiplier_composition_commutes(grid2, rng):
    F = sp.forward_transform(sp.random_field(grid2, rng))
    m1 = sp.radial(lambda r: np.exp(-r))
    m2 = sp.radial(lambda r: 1 + r ** 2)
    a = sp.apply_multiplier(sp.apply_multiplier(F, m1), m2).coefficients
    b = sp.apply_multiplier(sp.apply_multiplier(F, m2), m1).coefficients
    c = sp.apply_multiplier(F, lambda xi: m1(xi) * m2(xi)).coefficients
    scale = np.max(np.abs(F.coefficients))
    assert np.max(np.abs(a - b)) <= 1e-12 * scale
    assert np.max(np.abs(a - c)) <= 1e-12 * scale


def test_singular_multiplier_detected(grid2, rng):
    F = sp.forward_transform(sp.random_field(grid2, rng))
    with pytest.raises(sp.SingularMultiplierError):
        sp.apply_multiplier(F, sp.radial(lambda r: 1 / r))
    # the same symbol is fine on a mean-zero field
    G = sp.forward_transform(sp.random_field(grid2, rng, mean_zero=True))
    sp.apply_multiplier(G, sp.radial(lambda r: 1 / r))


def test_fractional_derivative_conventions(grid2, rng):
    f = sp.random_field(grid2, rng)
    same = sp.fractional_derivative(f, 0)
    assert np.allclose(same.values, f.values, atol=1e-12)
    mode = sp.plane_mode(grid2, (3, 4))
    assert np.allclose(sp.fractional_derivative(mode, 2).values, 25 * mode.values, atol=1e-10)
    with pytest.raises(sp.MeanNonzeroError):
        sp.fractional_derivative(f, -1)


def test_derivative_composition(grid2, rng):
    f = sp.random_field(grid2, rng, mean_zero=True)
    once = sp.fractional_derivative(f, 2).values
    twice = sp.fractional_derivative(sp.fractional_derivative(f, 1), 1).values
    assert np.max(np.abs(once - twice)) <= 1e-12 * np.max(np.abs(once))
    down = sp.fractional_derivative(sp.fractional_derivative(f, 0.7), -0.7).values
    assert np.max(np.abs(down - f.values)) <= 1e-12 * np.max(np.abs(f.values))


def test_sobolev_norm_single_mode():
    # A cos(2 x) on [0, 2pi)^1: |xi| = 2, ||.||_{H^1} = 2 A sqrt(pi)
    g = GridSpec(1, 32)
    A = 1.5
    f = sp.plane_mode(g, (2,), amplitude=A)
    assert math.isclose(sp.sobolev_norm(f, 1), 2 * A * math.sqrt(math.pi), rel_tol=1e-12)
    assert sp.sobolev_norm(RealField(g, np.zeros(g.shape)), 1) == 0


def test_h1_consistency_with_direct_sums(grid2, rng):
    f = sp.random_field(grid2, rng, kmax=8)
    mean = f.values.mean()
    full = sp.sobolev_norm(f, 1) ** 2 + sp.lebesgue_norm(f, 2) ** 2
    F = sp.fft(f.values)
    direct = grid2.cell_volume * np.sum((1 + grid2.abs_xi() ** 2) * np.abs(F) ** 2)
    assert math.isclose(full, direct, rel_tol=1e-12)
    assert math.isclose(sp.lebesgue_norm(f - RealField(grid2, np.full(grid2.shape, mean)), 2) ** 2
                        + mean ** 2 * grid2.volume, sp.lebesgue_norm(f, 2) ** 2, rel_tol=1e-10)


def test_lebesgue_norm_cases(grid2):
    c = RealField(grid2, np.full(grid2.shape, 2.0))
    assert math.isclose(sp.lebesgue_norm(c, 4), 2.0 * grid2.L ** (2 / 4), rel_tol=1e-12)
    mode = sp.plane_mode(grid2, (1, 0), amplitude=3.0)
    assert math.isclose(sp.lebesgue_norm(mode, np.inf), 3.0, rel_tol=1e-12)
    with pytest.raises(ValueError):
        sp.lebesgue_norm(mode, 0.5)


def test_spacetime_norm(grid2, rng):
    f = sp.random_field(grid2, rng)
    s = StatePair(f, f)
    one = Trajectory(grid2)
    one.append(0.0, s)
    assert sp.spacetime_norm(one, np.inf, 3) == pytest.approx(sp.lebesgue_norm(f, 3))
    const = Trajectory(grid2)
    for t in np.linspace(0, 2, 5):
        const.append(t, s)
    assert sp.spacetime_norm(const, 4, 3) == pytest.approx(2 ** 0.25 * sp.lebesgue_norm(f, 3), rel=1e-12)
    g = sp.random_field(grid2, rng)
    two = Trajectory(grid2)
    two.append(0.0, s)
    two.append(0.5, StatePair(g, g))
    hand = (0.25 * sp.lebesgue_norm(f, 3) ** 2 + 0.25 * sp.lebesgue_norm(g, 3) ** 2) ** 0.5
    assert sp.spacetime_norm(two, 2, 3) == pytest.approx(hand, rel=1e-12)
    with pytest.raises(sp.StructuralError):
        sp.spacetime_norm(Trajectory(grid2), 2, 2)


def test_trajectory_bookkeeping(grid2):
    tr = Trajectory(grid2)
    s = StatePair.zeros(grid2)
    tr.append(0.0, s)
    with pytest.raises(sp.StructuralError):
        tr.append(0.0, s)
    tr.append(0.1, s)
    tr.append(0.3, s)
    with pytest.raises(sp.StructuralError):
        tr.uniform_step()
    with pytest.raises(KeyError):
        tr.state_at(0.2)


def test_scaling_doubles_mode_and_amplitude(grid2):
    f = sp.plane_mode(grid2, (1, 2), amplitude=0.5)
    scaled = sp.scaling_transform(f, 2)
    assert np.allclose(scaled.values, sp.plane_mode(grid2, (2, 4), amplitude=1.0).values, atol=1e-12)


def test_scaling_aliasing_guard(grid2):
    with pytest.raises(sp.AliasingError):
        sp.scaling_transform(sp.plane_mode(grid2, (9, 0)), 2)


@pytest.mark.parametrize("d,n", [(2, 32), (3, 16), (6, 8)])
def test_critical_norm_scaling_invariance(d, n, rng):
    """On the box L/lam the rescaled field has the same critical norm."""
    g = GridSpec(d, n)
    lam = 2
    s_c = (d - 2) / 2
    f = sp.random_field(g, rng, kmax=n // (2 * lam) - 1, mean_zero=True)
    period = sp.fundamental_period(sp.scaling_transform(f, lam), lam)
    assert sp.sobolev_norm(period, s_c) == pytest.approx(sp.sobolev_norm(f, s_c), rel=1e-12)


def test_derivative_homogeneity_under_scaling(grid2, rng):
    """|D|^s of the rescaled field equals lam^s (|D|^s f) rescaled."""
    f = sp.random_field(grid2, rng, kmax=7)
    s = 1.3
    lhs = sp.fractional_derivative(sp.scaling_transform(f, 2), s).values
    rhs = 2 ** s * sp.scaling_transform(sp.fractional_derivative(f, s), 2).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(lhs))


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 2 ** 32 - 1))
def test_derivative_linearity(a, b, seed):
    g = GridSpec(2, 16)
    r = np.random.default_rng(seed)
    f, h = sp.random_field(g, r), sp.random_field(g, r)
    lhs = sp.fractional_derivative(f * a + h * b, 0.8).values
    rhs = a * sp.fractional_derivative(f, 0.8).values + b * sp.fractional_derivative(h, 0.8).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-11 * (1 + np.max(np.abs(rhs)))


def test_time_weights():
    assert list(sp.time_weights([0.0])) == [0.0]
    assert np.allclose(sp.time_weights([0, 1, 2]), [0.5, 1, 0.5])
