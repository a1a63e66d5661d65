"""Periodic lattice fields, Fourier transforms, multipliers and norms.

Conventions
-----------
A :class:`GridSpec` (d, n, L) samples the box [0, L)^d at x_j = j L / n.
The transform is the unitary DFT (``norm="ortho"``), so with the cell
volume h^d = (L/n)^d the continuum quantities are approximated by

    ||f||_{L^2}^2      = h^d sum_j |f_j|^2 = h^d sum_k |F_k|^2
    ||f||_{H^s dot}^2  = h^d sum_k |xi_k|^{2s} |F_k|^2,   xi_k = 2 pi k / L.

For |xi|^s at xi = 0 we use 0 when s > 0 and 1 when s == 0; negative s is
only allowed on mean-zero fields.

Scaling.  On the torus the map f -> lam * f(lam x) is realised in frequency
space (mode k goes to lam*k with amplitude times lam).  The image is
L/lam-periodic, so norms that are scale invariant on R^d are compared on
one fundamental cell, see :func:`fundamental_period`.  This is a discrete
model of the continuum rescaling, not the literal map.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.fft as sfft

from . import _kernels

MAX_POINTS = int(os.environ.get("WAVECRIT_MAX_POINTS", 2 ** 24))


class StructuralError(ValueError):
    """Shapes or grids that do not match."""


class SingularMultiplierError(ValueError):
    pass


class MeanNonzeroError(ValueError):
    pass


class AliasingError(ValueError):
    pass


def _workers():
    return _kernels.THREADS or 1


@dataclass(frozen=True)
class GridSpec:
    d: int
    n: int
    L: float = 2 * np.pi

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise StructuralError(f"dimension must be a positive integer, got {self.d}")
        n = int(self.n)
        if n != self.n or n < 4 or n & (n - 1):
            raise StructuralError(f"points per axis must be a power of two >= 4, got {self.n}")
        if not (np.isfinite(self.L) and self.L > 0):
            raise StructuralError(f"box length must be positive, got {self.L}")
        if n ** self.d > MAX_POINTS:
            raise StructuralError(f"grid {n}^{self.d} exceeds the point cap {MAX_POINTS}")
        object.__setattr__(self, "L", float(self.L))

    @property
    def shape(self):
        return (self.n,) * self.d

    @property
    def dx(self):
        return self.L / self.n

    @property
    def cell_volume(self):
        return self.dx ** self.d

    @property
    def volume(self):
        return self.L ** self.d

    def mode_indices(self):
        """Integer wavenumbers per axis in FFT order, range [-n/2, n/2)."""
        return np.fft.fftfreq(self.n, 1.0 / self.n).astype(np.int64)

    def coordinates(self):
        """Open-mesh coordinate arrays x_j = j L/n."""
        x = np.arange(self.n) * self.dx
        return tuple(x.reshape([-1 if a == i else 1 for a in range(self.d)]) for i in range(self.d))

    def xi(self):
        return _xi_axes(self)

    def abs_xi(self):
        return _abs_xi(self)

    def abs_xi_half(self):
        """|xi| on the rfftn half-spectrum layout (last axis truncated)."""
        return _abs_xi_half(self)

    def zeros(self):
        return np.zeros(self.shape)


@lru_cache(maxsize=32)
def _xi_axes(grid):
    k = grid.mode_indices() * (2 * np.pi / grid.L)
    return tuple(k.reshape([-1 if a == i else 1 for a in range(grid.d)]) for i in range(grid.d))


@lru_cache(maxsize=32)
def _abs_xi(grid):
    sq = np.zeros(grid.shape)
    for comp in _xi_axes(grid):
        sq = sq + comp ** 2
    out = np.sqrt(sq)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=32)
def _abs_xi_half(grid):
    k = grid.mode_indices() * (2 * np.pi / grid.L)
    kr = np.arange(grid.n // 2 + 1) * (2 * np.pi / grid.L)
    sq = np.zeros(grid.shape[:-1] + (grid.n // 2 + 1,))
    for i in range(grid.d):
        axis = kr if i == grid.d - 1 else k
        sq = sq + axis.reshape([-1 if a == i else 1 for a in range(grid.d)]) ** 2
    out = np.sqrt(sq)
    out.setflags(write=False)
    return out


def _frozen(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class RealField:
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.size != self.grid.n ** self.grid.d:
            raise StructuralError(f"field has {v.size} samples, grid needs {self.grid.n ** self.grid.d}")
        v = v.reshape(self.grid.shape)
        if not np.all(np.isfinite(v)):
            raise ValueError("field samples must be finite")
        object.__setattr__(self, "values", _frozen(v))

    def _check(self, other):
        if other.grid != self.grid:
            raise StructuralError("fields live on different grids")

    def __add__(self, other):
        self._check(other)
        return RealField(self.grid, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return RealField(self.grid, self.values - other.values)

    def __mul__(self, c):
        return RealField(self.grid, self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self):
        return RealField(self.grid, -self.values)


@dataclass(frozen=True, eq=False)
class SpectralField:
    grid: GridSpec
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        if c.shape != self.grid.shape:
            raise StructuralError(f"coefficient array shape {c.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "coefficients", _frozen(c))


@dataclass(frozen=True, eq=False)
class StatePair:
    u: RealField
    ut: RealField

    def __post_init__(self):
        if self.u.grid != self.ut.grid:
            raise StructuralError("u and u_t live on different grids")

    @property
    def grid(self):
        return self.u.grid

    @classmethod
    def from_arrays(cls, grid, u, ut=None):
        ut = np.zeros(grid.shape) if ut is None else ut
        return cls(RealField(grid, u), RealField(grid, ut))

    @classmethod
    def zeros(cls, grid):
        return cls.from_arrays(grid, grid.zeros(), grid.zeros())

    def __add__(self, other):
        return StatePair(self.u + other.u, self.ut + other.ut)

    def __sub__(self, other):
        return StatePair(self.u - other.u, self.ut - other.ut)

    def __mul__(self, c):
        return StatePair(self.u * c, self.ut * c)

    __rmul__ = __mul__


@dataclass
class Trajectory:
    """Time-ordered snapshots with per-step diagnostic records.

    ``times``/``states`` hold the stored snapshots; ``records`` holds one
    dict per solver step (including steps whose state was not stored).
    """

    grid: GridSpec
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    records: list = field(default_factory=list)
    truncated: bool = False
    reason: str | None = None

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise StructuralError("times and states differ in length")

    def append(self, t, state):
        if self.times and t <= self.times[-1]:
            raise StructuralError("trajectory times must increase")
        self.times.append(float(t))
        self.states.append(state)

    def __len__(self):
        return len(self.states)

    @property
    def final(self):
        return self.states[-1]

    def state_at(self, t, tol=1e-9):
        for ti, s in zip(self.times, self.states):
            if abs(ti - t) <= tol * max(1.0, abs(t)):
                return s
        raise KeyError(f"no stored snapshot at t={t}")

    def uniform_step(self, rtol=1e-9):
        if len(self.times) < 2:
            return None
        steps = np.diff(self.times)
        if np.max(np.abs(steps - steps[0])) > rtol * max(steps[0], 1e-300) + 1e-14:
            raise StructuralError("trajectory is not uniformly sampled")
        return float(steps[0])


# transforms

def fft(values):
    return sfft.fftn(values, norm="ortho", workers=_workers())


def ifft(coeffs):
    return sfft.ifftn(coeffs, norm="ortho", workers=_workers())


def rfft(values):
    return sfft.rfftn(values, norm="ortho", workers=_workers())


def irfft(coeffs, shape):
    return sfft.irfftn(coeffs, s=shape, norm="ortho", workers=_workers())


def forward_transform(f: RealField) -> SpectralField:
    return SpectralField(f.grid, fft(f.values))


def inverse_transform(F: SpectralField, imag_tol=1e-9) -> RealField:
    out = ifft(F.coefficients)
    scale = max(np.max(np.abs(out.real)), 1e-300)
    if np.max(np.abs(out.imag)) > imag_tol * scale:
        raise StructuralError("coefficients are not Hermitian; inverse is not real")
    return RealField(F.grid, out.real)


def symbol_values(grid, m):
    """Evaluate a symbol on the lattice; ``m`` is an array or a callable of xi."""
    if callable(m):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            vals = m(grid.xi())
    else:
        vals = m
    return np.broadcast_to(np.asarray(vals, dtype=float), grid.shape)


def radial(fn):
    """Lift a function of |xi| to a symbol."""
    def symbol(xi):
        return fn(np.sqrt(sum(c ** 2 for c in np.broadcast_arrays(*xi))))
    return symbol


def _multiply(coeffs, vals, tol=1e-12):
    finite = np.isfinite(vals)
    if finite.all():
        return coeffs * vals
    # coefficients at roundoff level (e.g. the mean of a mean-free field) do not count
    mag = np.abs(coeffs)
    bad = ~finite & (mag > tol * max(float(mag.max()), 1e-300))
    if bad.any():
        idx = tuple(int(i[0]) for i in np.nonzero(bad))
        raise SingularMultiplierError(f"symbol is not finite at lattice index {idx}")
    return np.where(finite, coeffs * np.where(finite, vals, 0.0), 0.0)


def apply_multiplier(F: SpectralField, m) -> SpectralField:
    return SpectralField(F.grid, _multiply(F.coefficients, symbol_values(F.grid, m)))


def power_symbol(grid, s, half=False):
    """|xi|^s with the zero-mode convention of this module (inf at 0 for s<0)."""
    a = grid.abs_xi_half() if half else grid.abs_xi()
    if s == 0:
        return np.ones_like(a)
    with np.errstate(divide="ignore"):
        out = a ** s
    if s > 0:
        out[a == 0] = 0.0
    return out


def _check_mean(grid, coeffs, s, tol=1e-12):
    if s >= 0:
        return
    zero = abs(coeffs.flat[0])
    total = np.sqrt(np.sum(np.abs(coeffs) ** 2))
    if zero > tol * max(total, 1e-300):
        raise MeanNonzeroError(f"negative order {s} needs a mean-zero field")


def fractional_derivative(f: RealField, s: float) -> RealField:
    F = fft(f.values)
    _check_mean(f.grid, F, s)
    sym = power_symbol(f.grid, s)
    if s < 0:
        sym = sym.copy()
        sym.flat[0] = 0.0
    return RealField(f.grid, ifft(F * sym).real)


def _sobolev_sq(grid, coeffs, s):
    _check_mean(grid, coeffs, s)
    sym = power_symbol(grid, 2 * s)
    if s < 0:
        sym = sym.copy()
        sym.flat[0] = 0.0
    return grid.cell_volume * float(np.sum(sym * np.abs(coeffs) ** 2))


def sobolev_norm(f: RealField, s: float) -> float:
    return float(np.sqrt(_sobolev_sq(f.grid, fft(f.values), s)))


def sobolev_norm_array(grid, values, s):
    return float(np.sqrt(_sobolev_sq(grid, fft(values), s)))


def lebesgue_norm(f, p) -> float:
    values = f.values if isinstance(f, RealField) else np.asarray(f)
    grid = f.grid if isinstance(f, RealField) else None
    return lebesgue_norm_array(grid, values, p)


def lebesgue_norm_array(grid, values, p):
    if p == np.inf:
        return float(np.max(np.abs(values))) if values.size else 0.0
    if p < 1:
        raise ValueError(f"Lebesgue exponent must be >= 1, got {p}")
    h = grid.cell_volume if grid is not None else 1.0
    a = np.abs(values)
    m = float(np.max(a)) if a.size else 0.0
    if m == 0:
        return 0.0
    # factor out the max to avoid overflow for large p
    return m * float(h * np.sum((a / m) ** p)) ** (1.0 / p)


def time_weights(times):
    """Trapezoid weights on a uniform time grid (a single sample gets weight 0)."""
    t = np.asarray(times, dtype=float)
    if t.size < 2:
        return np.zeros(t.size)
    w = np.empty(t.size)
    steps = np.diff(t)
    w[0] = steps[0] / 2
    w[-1] = steps[-1] / 2
    w[1:-1] = (steps[:-1] + steps[1:]) / 2
    return w


def spacetime_norm(traj: Trajectory, q, r) -> float:
    """L^q_t L^r_x norm over the stored snapshots (trapezoid rule in t)."""
    if not traj.states:
        raise StructuralError("empty trajectory")
    traj.uniform_step()
    inner = np.array([lebesgue_norm(s.u, r) for s in traj.states])
    if q == np.inf:
        return float(inner.max())
    w = time_weights(traj.times)
    return float(np.sum(w * inner ** q) ** (1.0 / q))


# scaling

def _band_limit_ok(grid, coeffs, limit, tol=1e-12):
    k = np.abs(grid.mode_indices())
    mask = np.zeros(grid.shape, dtype=bool)
    for i in range(grid.d):
        mask |= (k >= limit).reshape([-1 if a == i else 1 for a in range(grid.d)])
    scale = max(np.max(np.abs(coeffs)), 1e-300)
    return np.max(np.abs(coeffs[mask]), initial=0.0) <= tol * scale


def scaling_transform(f: RealField, lam: int) -> RealField:
    """lam * f(lam x), realised by sending mode k to lam*k (same grid)."""
    lam = int(lam)
    if lam < 2:
        raise ValueError("scaling factor must be an integer >= 2")
    grid = f.grid
    F = fft(f.values)
    if grid.n % (2 * lam) or not _band_limit_ok(grid, F, grid.n // (2 * lam)):
        raise AliasingError(f"field is not band-limited to |k| < n/(2*{lam})")
    k = grid.mode_indices()
    src = np.nonzero(np.abs(k) < grid.n // (2 * lam))[0]
    dst = (k[src] * lam) % grid.n
    G = np.zeros_like(F)
    G[np.ix_(*([dst] * grid.d))] = lam * F[np.ix_(*([src] * grid.d))]
    return RealField(grid, ifft(G).real)


def scale_state(state: StatePair, lam: int) -> StatePair:
    """Scaling of a phase-space point: u -> lam u(lam x), u_t -> lam^2 u_t(lam x)."""
    return StatePair(scaling_transform(state.u, lam), scaling_transform(state.ut, lam) * lam)


def fundamental_period(f: RealField, lam: int) -> RealField:
    """Restrict an (L/lam)-periodic field to one period on GridSpec(d, n/lam, L/lam)."""
    lam = int(lam)
    grid = f.grid
    if grid.n % lam:
        raise StructuralError("lam must divide n")
    small = GridSpec(grid.d, grid.n // lam, grid.L / lam)
    sl = (slice(0, small.n),) * grid.d
    return RealField(small, f.values[sl])


# test and demo data

def random_field(grid, rng, kmax=None, mean_zero=False, decay=0.0):
    """Random real field with modes |k_i| <= kmax (default: full band)."""
    F = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    if kmax is not None:
        k = np.abs(grid.mode_indices())
        for i in range(grid.d):
            F = F * (k <= kmax).reshape([-1 if a == i else 1 for a in range(grid.d)])
    if decay:
        F = F / (1.0 + grid.abs_xi()) ** decay
    values = ifft(F).real
    # take real part then remove Nyquist content so the field is exactly band-limited
    F = fft(values)
    if kmax is None or kmax >= grid.n // 2:
        k = grid.mode_indices()
        for i in range(grid.d):
            F = F * (k != -grid.n // 2).reshape([-1 if a == i else 1 for a in range(grid.d)])
    if mean_zero:
        F.flat[0] = 0.0
    return RealField(grid, ifft(F).real)


def gaussian(grid, center=None, width=1.0, amplitude=1.0):
    """Periodised Gaussian bump; the nearest image is used on each axis."""
    center = np.full(grid.d, grid.L / 2) if center is None else np.asarray(center, dtype=float)
    r2 = 0.0
    for x, c in zip(grid.coordinates(), center):
        dxa = (x - c + grid.L / 2) % grid.L - grid.L / 2
        r2 = r2 + dxa ** 2
    return RealField(grid, amplitude * np.exp(-r2 / (2 * width ** 2)) * np.ones(grid.shape))


def plane_mode(grid, k, amplitude=1.0, phase=0.0):
    """amplitude * cos(2 pi k.x / L + phase) for an integer wave vector k."""
    arg = phase
    for x, ki in zip(grid.coordinates(), k):
        arg = arg + 2 * np.pi * ki * x / grid.L
    return RealField(grid, amplitude * np.cos(arg) * np.ones(grid.shape))
