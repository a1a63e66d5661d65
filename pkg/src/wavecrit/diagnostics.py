"""Scalar functionals and almost-periodicity diagnostics.

Critical regularity s_c = (d - 2)/2 is used as a float here so that the
dynamics dimensions d = 1, 2, 3 are covered; negative orders act on the
mean-free part of a field.  "Critical density" below means

    rho(x) = (|D|^{s_c} u)^2 + (|D|^{s_c - 1} u_t)^2,

whose integral is the squared critical norm of (u, u_t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .spectral import StatePair, Trajectory, fft, ifft, power_symbol, time_weights

# average of 1/|y| over the unit cube centred at 0, per dimension
SINGULAR_CELL_AVERAGE = {
    2: 4 * math.asinh(1.0),
    3: 3 * math.log(2 + math.sqrt(3)) - math.pi / 2,
}


class UndefinedSignal(ValueError):
    """Quantity is undefined for the given state (e.g. a zero field)."""


def crit_index(d):
    return (d - 2) / 2


def _order_symbol(grid, s):
    sym = power_symbol(grid, s)
    if s < 0:
        sym = sym.copy()
        sym.flat[0] = 0.0
    return sym


def critical_spectra(state: StatePair):
    """Per-mode critical mass |xi|^{2s_c}|u_hat|^2 and |xi|^{2s_c-2}|ut_hat|^2."""
    grid = state.grid
    s = crit_index(grid.d)
    U = fft(state.u.values)
    Ut = fft(state.ut.values)
    return _order_symbol(grid, 2 * s) * np.abs(U) ** 2, _order_symbol(grid, 2 * s - 2) * np.abs(Ut) ** 2


def critical_norms(state: StatePair):
    """(||u||_{H^{s_c}}, ||u_t||_{H^{s_c-1}}); negative orders on the mean-free part."""
    mu, mut = critical_spectra(state)
    h = state.grid.cell_volume
    return math.sqrt(h * float(mu.sum())), math.sqrt(h * float(mut.sum()))


def energy(state: StatePair) -> float:
    """1/2 |grad u|^2 + 1/2 u_t^2 + 1/4 u^4 integrated over the box.

    The gradient term is summed in Fourier space (Parseval), the other two
    by the lattice Riemann sum.
    """
    grid = state.grid
    h = grid.cell_volume
    U = fft(state.u.values)
    grad = float(np.sum(grid.abs_xi() ** 2 * np.abs(U) ** 2))
    kin = float(np.sum(state.ut.values ** 2))
    pot = float(np.sum(state.u.values ** 4))
    return h * (0.5 * grad + 0.5 * kin + 0.25 * pot)


def energy_density(state: StatePair) -> np.ndarray:
    grid = state.grid
    U = fft(state.u.values)
    grad2 = np.zeros(grid.shape)
    for xi in grid.xi():
        comp = xi * np.ones(grid.shape)
        # the Nyquist row of an odd multiplier has no real counterpart
        comp[np.isclose(np.abs(comp), np.pi * grid.n / grid.L)] = 0.0
        grad2 += ifft(1j * comp * U).real ** 2
    return 0.5 * grad2 + 0.5 * state.ut.values ** 2 + 0.25 * state.u.values ** 4


def critical_density(state: StatePair) -> np.ndarray:
    grid = state.grid
    s = crit_index(grid.d)
    a = ifft(_order_symbol(grid, s) * fft(state.u.values)).real
    b = ifft(_order_symbol(grid, s - 1) * fft(state.ut.values)).real
    return a ** 2 + b ** 2


def lebesgue_power(f, p):
    """h^d sum |f|^p, i.e. ||f||_p^p."""
    return f.grid.cell_volume * float(np.sum(np.abs(f.values) ** p))


def norm_report(state: StatePair, t=0.0, s_list=(), p_list=()):
    from .spectral import lebesgue_norm, sobolev_norm

    out = {"t": t, "energy": energy(state)}
    for s in s_list:
        out[f"hs_{s}"] = sobolev_norm(state.u, s)
    for p in p_list:
        out[f"lp_{p}"] = lebesgue_norm(state.u, p)
    return out


# Morawetz

def torus_distance(grid, center):
    r2 = 0.0
    for x, c in zip(grid.coordinates(), center):
        delta = (x - c + grid.L / 2) % grid.L - grid.L / 2
        r2 = r2 + delta ** 2
    return np.sqrt(r2) * np.ones(grid.shape)


def morawetz_weight(grid, center):
    """1/|x - center| on the torus; the cell holding the centre gets c_d/h.

    c_d is the mean of 1/|y| over a unit cube (c_2 = 4 asinh 1,
    c_3 = 3 ln(2 + sqrt 3) - pi/2), so the singular cell contributes its
    exact cell average.  The centre is snapped to the nearest grid point.
    """
    if grid.d not in SINGULAR_CELL_AVERAGE:
        raise ValueError(f"Morawetz weight is implemented for d in (2, 3), got {grid.d}")
    center = np.asarray(center, dtype=float)
    snapped = np.round(center / grid.dx) * grid.dx
    r = torus_distance(grid, snapped)
    w = np.empty_like(r)
    nz = r > 0.5 * grid.dx
    w[nz] = 1.0 / r[nz]
    w[~nz] = SINGULAR_CELL_AVERAGE[grid.d] / grid.dx
    return w


def morawetz_density_integral(u, weight):
    """h^d sum u^4 w."""
    return u.grid.cell_volume * float(_kernels.weighted_power_sum(u.values, weight, 4.0))


def morawetz_accumulate(traj: Trajectory, center=None) -> float:
    """Trapezoid-in-time integral of int u^4/|x - center| dx over stored snapshots."""
    grid = traj.grid
    if center is None:
        center = np.full(grid.d, grid.L / 2)
    if len(traj.states) < 2:
        return 0.0
    traj.uniform_step()
    w = morawetz_weight(grid, center)
    vals = np.array([morawetz_density_integral(s.u, w) for s in traj.states])
    return float(np.sum(time_weights(traj.times) * vals))


# almost periodicity

def _smallest_dyadic(grid):
    return 2.0 ** math.floor(math.log2(2 * math.pi / grid.L))


def frequency_scale(state: StatePair, eta: float) -> float | None:
    """Smallest dyadic N whose critical mass above |xi| = N is <= eta * total.

    Returns None for a zero state.  N is never below the smallest dyadic
    at or under the lattice's first nonzero frequency.
    """
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1)")
    grid = state.grid
    mu, mut = critical_spectra(state)
    mass = (mu + mut).ravel()
    total = float(mass.sum())
    if total <= 0:
        return None
    radii = grid.abs_xi().ravel()
    order = np.argsort(radii, kind="stable")
    r_sorted = radii[order]
    m_sorted = mass[order]
    # tail[i] = mass strictly above r_sorted[i] (group equal radii)
    uniq, start = np.unique(r_sorted, return_index=True)
    cums = np.concatenate([[0.0], np.cumsum(m_sorted)])
    ends = np.append(start[1:], len(r_sorted))
    tails = total - cums[ends]
    ok = np.nonzero(tails <= eta * total)[0]
    r_star = float(uniq[ok[0]])
    floor_N = _smallest_dyadic(grid)
    if r_star <= floor_N:
        return floor_N
    return 2.0 ** math.ceil(math.log2(r_star) - 1e-12)


@dataclass
class CenterEstimate:
    center: np.ndarray
    confidence: np.ndarray
    low_confidence: bool


def spatial_center(state: StatePair, confidence_floor=0.1) -> CenterEstimate | None:
    """Per-axis circular mean of the critical density; None for a zero state."""
    grid = state.grid
    rho = critical_density(state)
    total = float(rho.sum())
    if total <= 0:
        return None
    centers = []
    conf = []
    for i, x in enumerate(grid.coordinates()):
        z = np.sum(rho * np.exp(2j * np.pi * x / grid.L))
        conf.append(abs(z) / total)
        centers.append((np.angle(z) * grid.L / (2 * np.pi)) % grid.L)
    conf = np.array(conf)
    return CenterEstimate(np.array(centers), conf, bool(conf.min() < confidence_floor))


def compactness_modulus(state: StatePair, eta: float, N_t: float, x_t) -> float:
    """Smallest R with critical mass outside B(x_t, R) <= eta * total, times N_t.

    Returns inf (saturation) when R would exceed half the box side.
    """
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1)")
    grid = state.grid
    rho = critical_density(state).ravel()
    total = float(rho.sum())
    if total <= 0:
        raise UndefinedSignal("zero state has no compactness radius")
    r = torus_distance(grid, np.asarray(x_t, dtype=float)).ravel()
    order = np.argsort(r, kind="stable")
    r_sorted = r[order]
    uniq, start = np.unique(r_sorted, return_index=True)
    cums = np.concatenate([[0.0], np.cumsum(rho[order])])
    ends = np.append(start[1:], len(r_sorted))
    outside = total - cums[ends]
    ok = np.nonzero(outside <= eta * total)[0]
    R = float(uniq[ok[0]])
    if R > grid.L / 2:
        return math.inf
    return R * N_t


@dataclass
class AlmostPeriodicityRecord:
    t: float
    N_t: float
    x_t: np.ndarray
    C_eta: dict = field(default_factory=dict)
    norm: float | None = None
    confidence: float = 1.0


def almost_periodicity_record(state: StatePair, t=0.0, etas=(0.1, 0.01), eta_freq=0.01):
    N = frequency_scale(state, eta_freq)
    c = spatial_center(state)
    if N is None or c is None:
        raise UndefinedSignal("zero state")
    radii = {eta: compactness_modulus(state, eta, N, c.center) for eta in etas}
    hs, hs_ut = critical_norms(state)
    return AlmostPeriodicityRecord(t, N, c.center, radii, math.hypot(hs, hs_ut), float(c.confidence.min()))


def finite_speed_check(traj: Trajectory, r0: float, tol: float = 1e-8, center=None, margin_cells=2) -> bool:
    """Energy leaving B(center, r0 + t + margin) stays below tol (relative).

    Uses the local energy density 1/2|grad u|^2 + 1/2 u_t^2 + 1/4 u^4, whose
    support obeys unit-speed propagation; the mass outside the growing ball
    is compared with the total energy at the same time.  The t = 0 snapshot
    is checked too, so data that is not localised fails.
    """
    grid = traj.grid
    center = np.full(grid.d, grid.L / 2) if center is None else np.asarray(center, dtype=float)
    r = torus_distance(grid, center)
    for t, state in zip(traj.times, traj.states):
        e = energy_density(state)
        total = float(e.sum())
        if total <= 0:
            continue
        outside = float(e[r > r0 + t + margin_cells * grid.dx].sum())
        if outside > tol * total:
            return False
    return True


def classify_scenario(records, truncated: bool, soliton_factor=2.0, cascade_factor=8.0,
                      compact_factor=4.0, divergence_factor=10.0, eta=None) -> str:
    """Heuristic trichotomy label for a run.

    finite-time   : truncated run whose critical norm grew by divergence_factor
    soliton-like  : N(t) within soliton_factor of constant
    cascade-like  : N(t) never below its start and max/min >= cascade_factor
    A run whose compactness radius C(eta) (in units of 1/N(t)) spreads by
    more than compact_factor is not almost periodic and gets "unclassified".
    """
    if len(records) < 10:
        raise ValueError("classification needs at least 10 records")
    if truncated:
        norms = [r.norm for r in records if r.norm is not None]
        if norms and max(norms) >= divergence_factor * max(norms[0], 1e-300):
            return "finite-time"
        return "unclassified"
    if records[0].C_eta:
        key = min(records[0].C_eta) if eta is None else eta
        radii = np.array([r.C_eta[key] for r in records], dtype=float)
        if not np.all(np.isfinite(radii)):
            return "unclassified"
        positive = radii[radii > 0]
        if positive.size and positive.max() > compact_factor * positive.min():
            return "unclassified"
    N = np.array([r.N_t for r in records], dtype=float)
    if N.max() <= soliton_factor * N.min():
        return "soliton-like"
    if N.min() >= N[0] and N.max() >= cascade_factor * N.min():
        return "cascade-like"
    return "unclassified"


@dataclass
class CascadeCheck:
    N: list
    low: list
    low_bound: list
    high: list
    high_bound: list
    constant: float

    @property
    def holds(self):
        return all(l <= self.constant * b * (1 + 1e-12) + 1e-300 for l, b in zip(self.low, self.low_bound)) and \
            all(h <= self.constant * b * (1 + 1e-12) + 1e-300 for h, b in zip(self.high, self.high_bound))

    @property
    def measured_constant(self):
        ratios = [a / b for a, b in zip(self.low + self.high, self.low_bound + self.high_bound) if b > 0]
        return max(ratios, default=0.0)

    @property
    def tightening(self):
        """High-frequency bound nonincreasing as N grows."""
        order = np.argsort(self.N, kind="stable")
        hb = np.array(self.high_bound)[order]
        return bool(np.all(np.diff(hb) <= 1e-12 * max(hb.max(), 1e-300)))


def cascade_energy_vanishing_check(states, eps: float, cutoff=1.0, constant=10.0, N_list=None, eta=0.01):
    """Compare the low/high-frequency energy split with interpolation bounds.

    With K = cutoff * N(t) and theta = eps/(eps + s_c - 1):
      low  : 1/2 sum_{0<|xi|<=K} |xi|^2|u|^2 + |ut|^2
             <= 1/2 [A_u^theta B_u^(1-theta) + A_t^theta B_t^(1-theta)]
             A_u = sum |xi|^{2s_c}|u|^2, B_u = sum |xi|^{2(1-eps)}|u|^2,
             A_t = sum |xi|^{2s_c-2}|ut|^2, B_t = sum |xi|^{-2 eps}|ut|^2
      high : 1/2 sum_{|xi|>K} (...) <= K^{-2(s_c-1)} * (critical mass above K)/2
    Needs s_c > 1 (d >= 5).  The zero mode is left out (homogeneous norms).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    out = CascadeCheck([], [], [], [], [], constant)
    for i, state in enumerate(states):
        grid = state.grid
        s = crit_index(grid.d)
        if s <= 1:
            raise ValueError("energy-vanishing bounds need s_c > 1 (d >= 5)")
        theta = eps / (eps + s - 1)
        N = N_list[i] if N_list is not None else frequency_scale(state, eta)
        K = cutoff * N
        h = grid.cell_volume
        a = grid.abs_xi()
        U2 = np.abs(fft(state.u.values)) ** 2
        T2 = np.abs(fft(state.ut.values)) ** 2
        lowm = (a > 0) & (a <= K)
        highm = a > K
        with np.errstate(divide="ignore"):
            Au = np.sum(a[lowm] ** (2 * s) * U2[lowm])
            Bu = np.sum(a[lowm] ** (2 * (1 - eps)) * U2[lowm])
            At = np.sum(a[lowm] ** (2 * s - 2) * T2[lowm])
            Bt = np.sum(a[lowm] ** (-2 * eps) * T2[lowm])
        low = 0.5 * h * float(np.sum(a[lowm] ** 2 * U2[lowm] + T2[lowm]))
        low_bound = 0.5 * h * float(Au ** theta * Bu ** (1 - theta) + At ** theta * Bt ** (1 - theta))
        high = 0.5 * h * float(np.sum(a[highm] ** 2 * U2[highm] + T2[highm]))
        crit_high = float(np.sum(a[highm] ** (2 * s) * U2[highm] + a[highm] ** (2 * s - 2) * T2[highm]))
        high_bound = 0.5 * h * K ** (-2 * (s - 1)) * crit_high
        out.N.append(N)
        out.low.append(low)
        out.low_bound.append(low_bound)
        out.high.append(high)
        out.high_bound.append(high_bound)
    return out


def energy_radius(state: StatePair, tol: float, center=None) -> float:
    """Smallest r with local energy outside B(center, r) <= tol * total."""
    grid = state.grid
    center = np.full(grid.d, grid.L / 2) if center is None else np.asarray(center, dtype=float)
    e = energy_density(state).ravel()
    r = torus_distance(grid, center).ravel()
    order = np.argsort(r, kind="stable")
    outside = e.sum() - np.cumsum(e[order])
    ok = np.nonzero(outside <= tol * e.sum())[0]
    return float(r[order][ok[0]])
