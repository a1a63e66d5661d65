"""Discrete Gronwall recursion on dyadic sequences.

The recursion, for k = 0..K,

    x_k <= C 2^{-gamma k} + eta sum_{l<k} 2^{-gamma (k-l)} x_l
                          + eta sum_{l>=k} 2^{-gamma' (l-k)} x_l

has, under the smallness hypothesis

    eta <= 1/4 min{1 - 2^-gamma, 1 - 2^-gamma', 1 - 2^(rho - gamma)},

bounded solutions obeying x_k <= (4C + ||x||_inf) 2^{-rho k}.  Here the
infinite forward sum is truncated at K and its remainder is bounded by
sup(x) 2^{-gamma'(K-k)} / (1 - 2^-gamma'), which keeps the check decidable
and errs on the generous side by one factor of 2^gamma'.

The frequency-decay recursion is the special case with
gamma = d - d/R - 3 and gamma' = d/R - d/2 + 2, reached from its raw
index form by the square-root device: with eta' = C' eta small enough
(eta' <= 2^{-4(gamma+gamma')}) the near-diagonal terms are absorbed and
sqrt(eta') plays the role of eta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .exponents import DomainError, decay_R_window


class NoFixedPoint(RuntimeError):
    pass


class Inapplicable(ValueError):
    pass


def _is_exact(v):
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def _pow2_neg(e):
    """2^{-e}, exact when e is an integer."""
    if _is_exact(e) and Fraction(e).denominator == 1:
        return Fraction(1, 2 ** int(e)) if e >= 0 else Fraction(2 ** int(-e))
    return 2.0 ** (-float(e))


@dataclass(frozen=True)
class GronwallParams:
    gamma: float
    gamma2: float
    C: float
    eta: float
    rho: float

    def __post_init__(self):
        for name in ("gamma", "gamma2", "C", "eta", "rho"):
            v = getattr(self, name)
            if not v > 0:
                raise ValueError(f"{name} must be positive, got {v}")
        if not self.rho < self.gamma:
            raise ValueError(f"rho must be below gamma ({self.rho} >= {self.gamma})")

    def threshold(self):
        terms = [1 - _pow2_neg(self.gamma), 1 - _pow2_neg(self.gamma2), 1 - _pow2_neg(self.gamma - self.rho)]
        if all(isinstance(t, Fraction) for t in terms):
            return min(terms) / 4
        return min(float(t) for t in terms) / 4

    def floats(self):
        return float(self.gamma), float(self.gamma2), float(self.C), float(self.eta), float(self.rho)


def gronwall_hypothesis(params: GronwallParams) -> bool:
    thr = params.threshold()
    if isinstance(thr, Fraction) and _is_exact(params.eta):
        return Fraction(params.eta) <= thr
    return float(params.eta) <= float(thr)


def tail_remainder(x, gamma2):
    """Bound on the forward sum beyond the truncation, per k."""
    x = np.asarray(x, dtype=float)
    K = x.size - 1
    k = np.arange(K + 1)
    sup = float(x.max()) if x.size else 0.0
    return sup * 2.0 ** (-gamma2 * (K - k)) / (1 - 2.0 ** (-gamma2))


def recursion_rhs(x, params: GronwallParams, with_tail=True):
    gamma, gamma2, C, eta, _ = params.floats()
    x = np.ascontiguousarray(x, dtype=float)
    tail = eta * tail_remainder(x, gamma2) if with_tail else np.zeros_like(x)
    return _kernels.gronwall_rhs(x, C, eta, gamma, gamma2, tail)


def gronwall_recursion_holds(x, params: GronwallParams, slack=1e-12) -> bool:
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        return False
    rhs = recursion_rhs(x, params)
    return bool(np.all(x <= rhs * (1 + slack) + slack * 1e-300))


def decay_bound(x, params: GronwallParams):
    """(4C + ||x||_inf) 2^{-rho k}."""
    x = np.asarray(x, dtype=float)
    _, _, C, _, rho = params.floats()
    return (4 * C + x.max()) * 2.0 ** (-rho * np.arange(x.size))


def bound_holds(x, C, rho, rtol=1e-12) -> bool:
    """x_k <= (4C + ||x||_inf) 2^{-rho k}, compared in log2 so deep tails do not underflow."""
    x = np.asarray(x, dtype=float)
    pos = x > 0
    k = np.arange(x.size)[pos]
    lhs = np.log2(x[pos])
    rhs = math.log2(4 * C + x.max()) - rho * k + math.log2(1 + rtol)
    return bool(np.all(lhs <= rhs))


def maximal_sequence(params: GronwallParams, K: int, tol=1e-15, max_iter=10_000, require_hypothesis=True):
    """Largest fixed point of the truncated recursion (zero beyond K).

    The right side is order preserving, so iterating from a supersolution
    gives a decreasing sequence of iterates.  The constant C / (1 - mass),
    with mass the total kernel weight times eta, is such a supersolution.
    """
    if require_hypothesis and not gronwall_hypothesis(params):
        raise NoFixedPoint("smallness hypothesis fails; no bounded fixed point is guaranteed")
    gamma, gamma2, C, eta, _ = params.floats()
    mass = eta * (2.0 ** -gamma / (1 - 2.0 ** -gamma) + 1 / (1 - 2.0 ** -gamma2))
    if mass >= 1:
        raise NoFixedPoint(f"kernel mass {mass:.3g} >= 1; iteration does not contract")
    start = C / (1 - mass)
    y = np.full(K + 1, start)
    zeros = np.zeros(K + 1)
    for _ in range(max_iter):
        new = _kernels.gronwall_rhs(y, C, eta, gamma, gamma2, zeros)
        if not np.all(np.isfinite(new)) or new.max() > start * (1 + 1e-12):
            raise NoFixedPoint("iteration left the invariant box")
        # entries span many decades; converge each one relatively, down to
        # a floor below which the sequence has effectively underflowed
        change = float(np.max(np.abs(new - y) / np.maximum(new, 1e-280)))
        y = new
        if change <= tol:
            return y
    raise NoFixedPoint(f"no convergence in {max_iter} iterations")


def certified_exponent(y, C, cap):
    """Largest rho' <= cap with y_k <= (4C + ||y||) 2^{-rho' k} for all k >= 1."""
    y = np.asarray(y, dtype=float)
    k = np.arange(1, y.size)
    if k.size == 0:
        return cap
    pref = 4 * C + y.max()
    pos = y[1:] > 0
    if not pos.any():
        return cap
    vals = (math.log2(pref) - np.log2(y[1:][pos])) / k[pos]
    return float(min(cap, vals.min()))


def asymptotic_rate(y, start=None):
    """Least-squares slope of -log2 y_k against k over the back half."""
    y = np.asarray(y, dtype=float)
    start = y.size // 2 if start is None else start
    k = np.arange(start, y.size)
    keep = y[start:] > 1e-280
    if keep.sum() < 2:
        return math.nan
    return float(-np.polyfit(k[keep], np.log2(y[start:][keep]), 1)[0])


# frequency-decay recursion

def decay_rates(d: int, R):
    R = Fraction(R) if _is_exact(R) or isinstance(R, str) else R
    gamma = d - d / R - 3
    gamma2 = d / R - Fraction(d, 2) + 2 if isinstance(R, Fraction) else d / R - d / 2 + 2
    return gamma, gamma2


def _in_window(d, R):
    lo, hi = decay_R_window(d)
    return float(lo) < float(R) < float(hi)


def max_eta_prime(gamma, gamma2, rho):
    """Largest eta' allowed by both smallness conditions."""
    g, g2, r = float(gamma), float(gamma2), float(rho)
    quarter = 0.25 * min(1 - 2 ** -g, 1 - 2 ** -g2, 1 - 2 ** (r - g))
    return min(quarter ** 2, 2.0 ** (-4 * (g + g2)))


def raw_decay_rhs(x, gamma, gamma2, eta_prime, C_prime, tail=True):
    """Index form: C' 2^{-k gamma} + eta' sum_{i<=k+2} 2^{(i-k)gamma} x_i + eta' sum_{i>=k+3} 2^{(k-i)gamma'} x_i."""
    x = np.asarray(x, dtype=float)
    K = x.size - 1
    out = np.empty_like(x)
    for k in range(K + 1):
        i_near = np.arange(0, min(k + 2, K) + 1)
        i_far = np.arange(k + 3, K + 1)
        near = np.sum(2.0 ** ((i_near - k) * gamma) * x[i_near])
        far = np.sum(2.0 ** ((k - i_far) * gamma2) * x[i_far])
        out[k] = C_prime * 2.0 ** (-k * gamma) + eta_prime * (near + far)
    if tail:
        out += eta_prime * tail_remainder(x, gamma2)
    return out


def split_decay_rhs(x, gamma, gamma2, eta_prime, C_prime, tail=True):
    """Form after the square-root device: Gronwall recursion with eta = sqrt(eta')."""
    params = GronwallParams(gamma, gamma2, C_prime, math.sqrt(eta_prime), min(gamma / 2, 1.0))
    return recursion_rhs(x, params, with_tail=tail)


@dataclass
class DecayFit:
    d: int
    R: float
    gamma: float
    gamma2: float
    rho: float
    eta: float
    eta_prime: float
    C_prime: float
    sequence: np.ndarray
    bound: np.ndarray
    exponent: float
    rate: float

    @property
    def bound_holds(self):
        return bound_holds(self.sequence, self.C_prime, self.rho)


def decay_recursion_fixpoint(d: int, R, eta=None, K: int = 60, C_prime=1.0, rho=None) -> DecayFit:
    """Maximal solution of the frequency-decay recursion and its decay exponent.

    ``exponent`` is the largest rate <= rho certified by the sequence
    itself against the prefactor 4C' + ||x||; ``rate`` is the raw
    asymptotic slope of -log2 x_k.  In high dimension K is shortened so the
    last entry stays a normal float.
    """
    if d < 6:
        raise DomainError("decay recursion is set up for d >= 6")
    if not _in_window(d, R):
        lo, hi = decay_R_window(d)
        raise DomainError(f"R={R} outside the window ({lo}, {hi})")
    gamma, gamma2 = decay_rates(d, R)
    g, g2 = float(gamma), float(gamma2)
    rho = (d - 4) / 2 if rho is None else float(rho)
    if rho >= g:
        raise Inapplicable(f"rho={rho} is not below gamma={g:.6g}; choose a smaller rho")
    if rho <= 0:
        raise Inapplicable("rho must be positive")
    cap = max_eta_prime(g, g2, rho)
    if eta is None:
        eta_prime = cap
        eta = cap / C_prime
    else:
        eta_prime = C_prime * eta
        if eta_prime > cap * (1 + 1e-15):
            raise Inapplicable(f"eta'={eta_prime:.3g} exceeds the admissible {cap:.3g}")
    params = GronwallParams(g, g2, C_prime, math.sqrt(eta_prime), rho)
    if not gronwall_hypothesis(params):
        raise Inapplicable("square-root smallness hypothesis fails")
    # keep C' 2^{-gamma K} inside the normal float range; denormal tails lose precision
    K = max(2, min(K, int((900 + math.log2(max(C_prime, 1.0))) / g)))
    y = maximal_sequence(params, K)
    bound = decay_bound(y, params)
    return DecayFit(d, float(R), g, g2, rho, float(eta), eta_prime, float(C_prime), y, bound,
                    certified_exponent(y, C_prime, rho), asymptotic_rate(y))


def c_prime_sensitivity(d, R, values=(0.5, 1.0, 2.0, 4.0), K=60):
    """Decay exponent and rate for several combinatorial constants C'."""
    out = []
    for c in values:
        fit = decay_recursion_fixpoint(d, R, K=K, C_prime=c)
        out.append({"C_prime": c, "eta": fit.eta, "exponent": fit.exponent, "rate": fit.rate})
    return out
