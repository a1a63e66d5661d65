"""Linear half-wave group on phase space.

Per Fourier mode with w = |xi| the free flow acts as the matrix

    [ cos(tw)      sin(tw)/w ]
    [ -w sin(tw)   cos(tw)   ]

and the w = 0 mode drifts freely (u += t u_t), the continuous limit of
sin(tw)/w.  A mean-nonzero velocity therefore grows u linearly in time.
"""

import numpy as np

from . import _kernels
from .spectral import RealField, StatePair, fft, ifft, irfft, lebesgue_norm_array, rfft


class HorizonError(ValueError):
    """Requested times reach the periodic wrap-around horizon."""


def rotate(grid, u_hat, ut_hat, t, half=True):
    """Apply the free flow to coefficient arrays (rfft layout by default)."""
    omega = grid.abs_xi_half() if half else grid.abs_xi()
    return _kernels.rotate_pair(u_hat, ut_hat, omega, float(t))


def evolve_linear(state: StatePair, t: float) -> StatePair:
    grid = state.grid
    a, b = rotate(grid, rfft(state.u.values), rfft(state.ut.values), t)
    return StatePair(RealField(grid, irfft(a, grid.shape)), RealField(grid, irfft(b, grid.shape)))


def linear_energy_per_mode(state: StatePair) -> np.ndarray:
    """|xi|^2 |u_hat|^2 + |ut_hat|^2 on the full lattice (unitary coefficients)."""
    grid = state.grid
    return grid.abs_xi() ** 2 * np.abs(fft(state.u.values)) ** 2 + np.abs(fft(state.ut.values)) ** 2


def linear_energy(state: StatePair) -> float:
    return 0.5 * state.grid.cell_volume * float(np.sum(linear_energy_per_mode(state)))


def sine_propagator(g: RealField, t: float) -> RealField:
    """sin(t|D|)/|D| g, with the zero mode mapped to t * mean."""
    grid = g.grid
    a, _ = rotate(grid, np.zeros(grid.shape[:-1] + (grid.n // 2 + 1,), dtype=complex), rfft(g.values), t)
    return RealField(grid, irfft(a, grid.shape))


def support_diameter(g: RealField, tol=1e-12):
    """Diameter of the set where |g| exceeds tol * max|g| (torus-aware, per-axis span)."""
    grid = g.grid
    vals = np.abs(g.values)
    mask = vals > tol * vals.max()
    spans = []
    for axis in range(grid.d):
        occupied = np.any(mask, axis=tuple(a for a in range(grid.d) if a != axis))
        # longest circular gap of unoccupied cells gives the complement span
        idx = np.nonzero(occupied)[0]
        if idx.size == 0:
            spans.append(0.0)
            continue
        gaps = np.diff(np.concatenate([idx, [idx[0] + grid.n]]))
        spans.append((grid.n - gaps.max() + 1) * grid.dx)
    return float(np.sqrt(np.sum(np.square(spans))))


def wrap_horizon(g: RealField, tol=1e-12):
    return g.grid.L / 2 - support_diameter(g, tol)


def dispersive_decay_fit(g: RealField, p: float, times, support_tol=1e-12, return_norms=False):
    """Fit log ||sin(t|D|)/|D| g||_p against log t.

    The slope approximates -(d-1)/2 (1 - 2/p) on R^d.  All times must stay
    below L/2 - diam(supp g), where the periodic images start to interfere.
    """
    grid = g.grid
    times = np.asarray(times, dtype=float)
    if np.any(times <= 0):
        raise ValueError("fit times must be positive")
    horizon = wrap_horizon(g, support_tol)
    if times.max() >= horizon:
        raise HorizonError(f"time {times.max():.3g} reaches the wrap-around horizon {horizon:.3g}")
    g_hat = rfft(g.values)
    zero = np.zeros_like(g_hat)
    norms = []
    for t in times:
        a, _ = rotate(grid, zero, g_hat, t)
        norms.append(lebesgue_norm_array(grid, irfft(a, grid.shape), p))
    norms = np.asarray(norms)
    slope = float(np.polyfit(np.log(times), np.log(norms), 1)[0])
    return (slope, norms) if return_norms else slope


def double_duhamel_identity_check(g: RealField, h: RealField, t1: float, t2: float) -> float:
    """|LHS - RHS| for the unitarity identity behind the double Duhamel trick.

    LHS = <|D| sin(t1|D|)/|D| g, -|D| sin(t2|D|)/|D| h> + <cos(t1|D|) g, -cos(t2|D|) h>
    RHS = <g, -cos((t1 - t2)|D|) h>
    Both sides are L^2 pairings on the box computed from the coefficients
    independently: the left via the four propagated fields, the right via a
    single cosine multiplier.
    """
    grid = g.grid
    w = grid.abs_xi()
    G = fft(g.values)
    H = fft(h.values)
    h3 = grid.cell_volume

    def pair(a, b):
        return float(np.real(np.vdot(a, b))) * h3

    lhs = pair(np.sin(t1 * w) * G, -np.sin(t2 * w) * H) + pair(np.cos(t1 * w) * G, -np.cos(t2 * w) * H)
    rhs = pair(G, -np.cos((t1 - t2) * w) * H)
    return abs(lhs - rhs)


def double_duhamel_physical(g: RealField, h: RealField, t1: float, t2: float):
    """Same identity with every field synthesised in physical space (slower)."""
    grid = g.grid
    w = grid.abs_xi()
    G = fft(g.values)
    H = fft(h.values)
    fields = [ifft(m).real for m in (np.sin(t1 * w) * G, -np.sin(t2 * w) * H,
                                     np.cos(t1 * w) * G, -np.cos(t2 * w) * H,
                                     -np.cos((t1 - t2) * w) * H)]
    h3 = grid.cell_volume
    lhs = h3 * (np.sum(fields[0] * fields[1]) + np.sum(fields[2] * fields[3]))
    rhs = h3 * np.sum(g.values * fields[4])
    return float(lhs), float(rhs)
