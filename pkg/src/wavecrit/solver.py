"""Nonlinear evolution by Picard iteration on the Duhamel formula.

Equation: u_tt - Lap u + sign * u^3 = 0 (sign=+1 defocusing).  On a slab
[t0, t0 + dt] the solution satisfies

    u(t0 + tau) = W(tau)(u0, u1) - int_0^tau sin((tau - s)|D|)/|D| F(u(t0 + s)) ds
    F(u) = sign * u^3.

The nonlinearity is replaced by its Lagrange interpolant through
``quad_nodes`` equispaced nodes (both slab ends included), and the kernel
integrals against each Lagrange basis polynomial are computed once per
(grid, dt, nodes) with Gauss-Legendre quadrature and the exact kernel.
With three nodes this is a fourth-order symmetric collocation scheme whose
linear part is exact.  ``quad_nodes=1`` freezes F at the slab start
(explicit, second order).

``reference_evolve`` is an unrelated method-of-lines integrator (classical
RK4 in Fourier space) kept for cross-validation only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import diagnostics
from .propagator import rotate
from .spectral import RealField, StatePair, Trajectory, irfft, rfft, time_weights


class ConfigError(ValueError):
    pass


class ContractionFailure(RuntimeError):
    """Picard iteration did not converge on a slab."""

    def __init__(self, message, iterations=0, residual=float("nan")):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class StabilityError(RuntimeError):
    """Explicit reference integrator would violate its stability limit."""


class UnavailableError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    dt: float
    T: float
    quad_nodes: int = 3
    picard_tol: float = 1e-12
    picard_max: int = 50
    dealias: bool = True
    sign: int = 1
    nonlinear: bool = True
    snapshot_every: int = 1
    overflow: float = 1e6
    morawetz_center: tuple | None = None

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ConfigError(f"horizon T must be positive, got {self.T}")
        if int(self.quad_nodes) != self.quad_nodes or self.quad_nodes < 1:
            raise ConfigError(f"quad_nodes must be a positive integer, got {self.quad_nodes}")
        if not (self.picard_tol >= 1e-14):
            raise ConfigError(f"picard_tol must be >= 1e-14, got {self.picard_tol}")
        if self.picard_max < 1:
            raise ConfigError("picard_max must be >= 1")
        if self.sign not in (1, -1):
            raise ConfigError(f"sign must be +1 or -1, got {self.sign}")
        if self.snapshot_every < 1:
            raise ConfigError("snapshot_every must be >= 1")
        steps = self.T / self.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ConfigError(f"horizon {self.T} is not a whole number of steps of {self.dt}")

    @property
    def steps(self):
        return int(round(self.T / self.dt))


def contraction_dt_bound(state: StatePair) -> float:
    """Heuristic slab width below which one Picard sweep contracts.

    The Duhamel map's Lipschitz constant on a slab is about
    (3/2) max|u|^2 dt^2, so dt < sqrt(2/3)/max|u| keeps it below one.
    """
    m = float(np.max(np.abs(state.u.values)))
    return math.inf if m == 0 else math.sqrt(2.0 / 3.0) / m


def dealias_mask(grid, half=True):
    """Keep |k_i| < n/4 on every axis (1/2 rule for a cubic term)."""
    n = grid.n
    k = np.abs(np.fft.fftfreq(n, 1.0 / n))
    kr = np.arange(n // 2 + 1)
    mask = np.ones(grid.shape[:-1] + ((n // 2 + 1) if half else n,), dtype=bool)
    for i in range(grid.d):
        axis = kr if (half and i == grid.d - 1) else k
        mask &= (axis < n // 4).reshape([-1 if a == i else 1 for a in range(grid.d)])
    return mask


def _lagrange(nodes, x):
    """Values of each Lagrange basis polynomial at points x, shape (m, len(x))."""
    out = np.ones((len(nodes), len(x)))
    for m, xm in enumerate(nodes):
        for j, xj in enumerate(nodes):
            if j != m:
                out[m] *= (x - xj) / (xm - xj)
    return out


class SlabOperator:
    """Precomputed per-mode Duhamel weights for one (grid, dt, nodes) triple."""

    def __init__(self, grid, dt, quad_nodes=3, dealias=True):
        self.grid = grid
        self.dt = float(dt)
        self.q = int(quad_nodes)
        omega = grid.abs_xi_half()
        self.omega = omega
        self.interp = np.linspace(0.0, dt, self.q) if self.q > 1 else np.array([0.0])
        self.taus = np.linspace(0.0, dt, max(self.q, 2))
        self.mask = dealias_mask(grid) if dealias else None
        wmax = float(omega.max())
        ngl = max(self.q + 2, 8 + int(math.ceil(wmax * dt)))
        x, w = np.polynomial.legendre.leggauss(ngl)
        self.weights_u = []
        self.weights_ut = []
        for tau in self.taus[1:]:
            s = tau * (1 + x) / 2
            basis = _lagrange(self.interp, s)
            wu = [np.zeros_like(omega) for _ in self.interp]
            wt = [np.zeros_like(omega) for _ in self.interp]
            for g in range(ngl):
                lag = tau - s[g]
                c = np.cos(lag * omega)
                sn = np.where(omega > 0, np.sin(lag * omega) / np.where(omega > 0, omega, 1.0), lag)
                for m in range(len(self.interp)):
                    coef = w[g] * tau / 2 * basis[m, g]
                    wu[m] += coef * sn
                    wt[m] += coef * c
            self.weights_u.append(wu)
            self.weights_ut.append(wt)

    def linear(self, u_hat, ut_hat):
        return [rotate(self.grid, u_hat, ut_hat, tau) for tau in self.taus]

    def nonlinear_hat(self, u, sign):
        with np.errstate(over="ignore", invalid="ignore"):
            F = rfft(sign * u ** 3)
        if self.mask is not None:
            F = F * self.mask
        return F


@dataclass
class SlabResult:
    taus: np.ndarray
    u: list          # physical u at each tau
    u_hat: list
    ut_hat: list
    iterations: int
    residual: float

    def end_state(self, grid):
        return StatePair(RealField(grid, self.u[-1]), RealField(grid, irfft(self.ut_hat[-1], grid.shape)))


def duhamel_map(v_nodes, state0: StatePair, op: SlabOperator, sign=1, nonlinear=True):
    """One application of the Duhamel map at the slab nodes.

    ``v_nodes`` are physical u values at ``op.interp``; returns the image
    (u_hat, ut_hat) at every output node ``op.taus``.
    """
    lin = op.linear(rfft(state0.u.values), rfft(state0.ut.values))
    u_hat = [a for a, _ in lin]
    ut_hat = [b for _, b in lin]
    if not nonlinear:
        return u_hat, ut_hat
    F = [op.nonlinear_hat(v, sign) for v in v_nodes]
    for j in range(1, len(op.taus)):
        for m, Fm in enumerate(F):
            u_hat[j] = u_hat[j] - op.weights_u[j - 1][m] * Fm
            ut_hat[j] = ut_hat[j] - op.weights_ut[j - 1][m] * Fm
    return u_hat, ut_hat


def picard_solve_slab(state0: StatePair, cfg: SolverConfig, op: SlabOperator | None = None) -> SlabResult:
    grid = state0.grid
    if op is None:
        op = SlabOperator(grid, cfg.dt, cfg.quad_nodes, cfg.dealias)
    shape = grid.shape
    lin = op.linear(rfft(state0.u.values), rfft(state0.ut.values))
    lin_u = [a for a, _ in lin]
    lin_ut = [b for _, b in lin]
    u_phys = [state0.u.values] + [irfft(a, shape) for a in lin_u[1:]]
    if not cfg.nonlinear:
        return SlabResult(op.taus, u_phys, lin_u, lin_ut, 1, 0.0)
    F0 = op.nonlinear_hat(state0.u.values, cfg.sign)
    ninterp = len(op.interp)
    history = []
    for it in range(1, cfg.picard_max + 1):
        F = [F0] + [op.nonlinear_hat(u_phys[m], cfg.sign) for m in range(1, ninterp)]
        u_hat = list(lin_u)
        ut_hat = list(lin_ut)
        for j in range(1, len(op.taus)):
            for m, Fm in enumerate(F):
                u_hat[j] = u_hat[j] - op.weights_u[j - 1][m] * Fm
                ut_hat[j] = ut_hat[j] - op.weights_ut[j - 1][m] * Fm
        new_phys = [state0.u.values] + [irfft(a, shape) for a in u_hat[1:]]
        scale = max(max(float(np.max(np.abs(x))) for x in new_phys), 1e-300)
        residual = max(float(np.max(np.abs(a - b))) for a, b in zip(new_phys[1:], u_phys[1:])) / scale
        u_phys = new_phys
        if not math.isfinite(residual) or not math.isfinite(scale):
            raise ContractionFailure("non-finite values in Picard sweep", it, residual)
        history.append(residual)
        if residual <= cfg.picard_tol or ninterp == 1:
            return SlabResult(op.taus, u_phys, u_hat, ut_hat, it, residual)
        if len(history) >= 4 and history[-1] > history[-2] > history[-3] > history[-4]:
            raise ContractionFailure(f"Picard residual growing ({residual:.3e})", it, residual)
    raise ContractionFailure(
        f"no convergence in {cfg.picard_max} sweeps (residual {residual:.3e})", cfg.picard_max, residual)


def _torus_center(grid, center):
    return np.full(grid.d, grid.L / 2) if center is None else np.asarray(center, dtype=float)


def evolve(state0: StatePair, cfg: SolverConfig) -> Trajectory:
    """Slab-by-slab Picard evolution with per-step diagnostics.

    Each record holds t, energy, hs_crit, hs_crit_minus1_ut,
    l_dplus1_accum (the L^{d+1}_{t,x} norm over [0, t], trapezoid in t),
    morawetz_accum, picard_iters and residual.  The run stops early, with
    ``truncated`` set, on contraction failure or when max|u| exceeds
    ``cfg.overflow``.
    """
    grid = state0.grid
    op = SlabOperator(grid, cfg.dt, cfg.quad_nodes, cfg.dealias)
    weight = diagnostics.morawetz_weight(grid, _torus_center(grid, cfg.morawetz_center))
    traj = Trajectory(grid)
    traj.append(0.0, state0)
    p = grid.d + 1
    state = state0
    lp_prev = diagnostics.lebesgue_power(state.u, p)
    mw_prev = diagnostics.morawetz_density_integral(state.u, weight)
    lp_acc = 0.0
    mw_acc = 0.0
    traj.records.append(_record(0.0, state, 0.0, p, 0.0, 0, 0.0))
    for step in range(1, cfg.steps + 1):
        t = step * cfg.dt
        try:
            slab = picard_solve_slab(state, cfg, op)
        except ContractionFailure as exc:
            traj.truncated = True
            traj.reason = f"contraction failure at t={t - cfg.dt:.6g}: {exc}"
            break
        u_end = slab.u[-1]
        ut_end = irfft(slab.ut_hat[-1], grid.shape)
        peak = float(np.max(np.abs(u_end)))
        if not math.isfinite(peak) or peak > cfg.overflow or not np.all(np.isfinite(ut_end)):
            traj.truncated = True
            traj.reason = f"norm overflow at t={t:.6g} (max|u|={peak:.3e})"
            break
        state = StatePair(RealField(grid, u_end), RealField(grid, ut_end))
        lp = diagnostics.lebesgue_power(state.u, p)
        mw = diagnostics.morawetz_density_integral(state.u, weight)
        lp_acc += 0.5 * cfg.dt * (lp_prev + lp)
        mw_acc += 0.5 * cfg.dt * (mw_prev + mw)
        lp_prev, mw_prev = lp, mw
        traj.records.append(_record(t, state, lp_acc, p, mw_acc, slab.iterations, slab.residual))
        if step % cfg.snapshot_every == 0 or step == cfg.steps:
            traj.append(t, state)
    return traj


def _record(t, state, lp_acc, p, mw_acc, iters, residual):
    hs, hs_ut = diagnostics.critical_norms(state)
    return {
        "t": t,
        "energy": diagnostics.energy(state),
        "hs_crit": hs,
        "hs_crit_minus1_ut": hs_ut,
        "l_dplus1_accum": lp_acc ** (1.0 / p),
        "morawetz_accum": mw_acc,
        "picard_iters": iters,
        "residual": residual,
    }


def rk4_stability_limit(grid):
    return 2.8 / float(grid.abs_xi().max())


def reference_evolve(state0: StatePair, cfg: SolverConfig, substeps: int = 1) -> Trajectory:
    """Classical RK4 on the Fourier-space method of lines (oracle only).

    Raises StabilityError when dt/substeps * |xi|_max exceeds 2.8, the
    imaginary-axis stability limit of RK4.
    """
    grid = state0.grid
    h = cfg.dt / substeps
    if h > rk4_stability_limit(grid):
        raise StabilityError(f"step {h:.3g} exceeds the RK4 limit {rk4_stability_limit(grid):.3g}")
    omega2 = grid.abs_xi_half() ** 2
    mask = dealias_mask(grid) if cfg.dealias else None
    shape = grid.shape

    def rhs(a, b):
        if cfg.nonlinear:
            F = rfft(cfg.sign * irfft(a, shape) ** 3)
            if mask is not None:
                F = F * mask
        else:
            F = 0.0
        return b, -omega2 * a - F

    a = rfft(state0.u.values)
    b = rfft(state0.ut.values)
    traj = Trajectory(grid)
    traj.append(0.0, state0)
    for step in range(1, cfg.steps + 1):
        for _ in range(substeps):
            k1a, k1b = rhs(a, b)
            k2a, k2b = rhs(a + h / 2 * k1a, b + h / 2 * k1b)
            k3a, k3b = rhs(a + h / 2 * k2a, b + h / 2 * k2b)
            k4a, k4b = rhs(a + h * k3a, b + h * k3b)
            a = a + h / 6 * (k1a + 2 * k2a + 2 * k3a + k4a)
            b = b + h / 6 * (k1b + 2 * k2b + 2 * k3b + k4b)
        if step % cfg.snapshot_every == 0 or step == cfg.steps:
            traj.append(step * cfg.dt, StatePair(RealField(grid, irfft(a, shape)), RealField(grid, irfft(b, shape))))
    return traj


# experiments built on the solver

def critical_pair_norm(state: StatePair) -> float:
    hs, hs_ut = diagnostics.critical_norms(state)
    return math.hypot(hs, hs_ut)


def l_dplus1_difference(traj_a: Trajectory, traj_b: Trajectory) -> float:
    """||u_a - u_b||_{L^{d+1}_{t,x}} over the common stored snapshots."""
    if traj_a.times != traj_b.times:
        raise ValueError("trajectories are sampled at different times")
    p = traj_a.grid.d + 1
    inner = np.array([diagnostics.lebesgue_power(a.u - b.u, p) for a, b in zip(traj_a.states, traj_b.states)])
    return float(np.sum(time_weights(traj_a.times) * inner) ** (1.0 / p))


@dataclass
class StabilityReport:
    eps: list
    distances: list
    truncated: bool

    @property
    def response(self):
        return [d / e if e > 0 else 0.0 for d, e in zip(self.distances, self.eps)]

    def ratio(self, e1, e2):
        i, j = self.eps.index(e1), self.eps.index(e2)
        return self.distances[i] / self.distances[j]

    def bounded(self, spread=2.0):
        r = [x for x, e in zip(self.response, self.eps) if e > 0]
        return bool(r) and max(r) <= spread * min(r)


def stability_experiment(state0: StatePair, perturbation: StatePair, eps_levels, cfg: SolverConfig,
                         norm_tol=1e-9) -> StabilityReport:
    """Distance D(eps) between runs from state0 and state0 + eps * perturbation."""
    size = critical_pair_norm(perturbation)
    if abs(size - 1.0) > norm_tol:
        raise ValueError(f"perturbation must have unit critical norm, got {size}")
    cfg = replace(cfg, snapshot_every=1)
    base = evolve(state0, cfg)
    truncated = base.truncated
    distances = []
    for eps in eps_levels:
        if eps == 0:
            distances.append(0.0)
            continue
        other = evolve(state0 + perturbation * eps, cfg)
        truncated = truncated or other.truncated
        distances.append(l_dplus1_difference(base, other))
    return StabilityReport(list(eps_levels), distances, truncated)


def normalize_critical(state: StatePair) -> StatePair:
    size = critical_pair_norm(state)
    if size == 0:
        raise ValueError("cannot normalise a state with zero critical norm")
    return state * (1.0 / size)


def pull_back(state: StatePair, t: float) -> StatePair:
    """Free-flow state at time 0 that matches ``state`` at time t."""
    grid = state.grid
    a, b = rotate(grid, rfft(state.u.values), rfft(state.ut.values), -t)
    return StatePair(RealField(grid, irfft(a, grid.shape)), RealField(grid, irfft(b, grid.shape)))


def scattering_extract(traj: Trajectory, times):
    """Pulled-back candidate asymptotic states and their successive distances."""
    if traj.truncated and traj.times[-1] < max(times) - 1e-12:
        raise UnavailableError("trajectory was truncated before the requested times")
    candidates = [pull_back(traj.state_at(t), t) for t in times]
    diffs = [critical_pair_norm(b - a) for a, b in zip(candidates, candidates[1:])]
    return candidates, diffs


def crit_norm_series(traj: Trajectory):
    return np.array([r["hs_crit"] for r in traj.records]), np.array([r["hs_crit_minus1_ut"] for r in traj.records])


def sobolev_sup(traj: Trajectory):
    """sup_t of the critical pair norm over recorded steps."""
    hs, hs_ut = crit_norm_series(traj)
    return float(np.max(np.hypot(hs, hs_ut))) if len(hs) else 0.0

