"""Smooth dyadic frequency projections and Bernstein-ratio measurements.

The bump is radial in the physical frequency |xi| (not the lattice index):

    g(x)   = exp(-1/x) for x > 0, else 0
    phi(r) = g(2 - r) / (g(2 - r) + g(r - 1))

so phi = 1 on [0, 1], phi = 0 on [2, inf), it is C-infinity and strictly
decreasing on (1, 2), and phi(3/2) = 1/2 by symmetry.  Symbols:

    P_{<=N}: phi(|xi|/N)       P_N: phi(|xi|/N) - phi(2|xi|/N)
    P_{>N} = 1 - P_{<=N}       P_{M<.<=N} = P_{<=N} - P_{<=M}
"""

import math

import numpy as np

from .spectral import RealField, fft, ifft, lebesgue_norm_array, power_symbol


class DyadicError(ValueError):
    pass


def _g(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def bump(r):
    r = np.asarray(r, dtype=float)
    a = _g(2.0 - r)
    b = _g(r - 1.0)
    return a / (a + b)


def check_dyadic(N):
    N = float(N)
    if N <= 0:
        raise DyadicError(f"dyadic index must be positive, got {N}")
    k = math.log2(N)
    if k != round(k):
        raise DyadicError(f"{N} is not a power of two")
    return N


def leq_symbol(grid, N):
    return bump(grid.abs_xi() / check_dyadic(N))


def band_symbol(grid, N):
    N = check_dyadic(N)
    a = grid.abs_xi()
    return bump(a / N) - bump(2 * a / N)


def _apply(f, sym):
    return RealField(f.grid, ifft(fft(f.values) * sym).real)


def project_leq(f, N):
    return _apply(f, leq_symbol(f.grid, N))


def project_gt(f, N):
    return _apply(f, 1.0 - leq_symbol(f.grid, N))


def project_band(f, N):
    return _apply(f, band_symbol(f.grid, N))


def project_range(f, M, N):
    """P_{M < . <= N} = P_{<=N} - P_{<=M}."""
    if check_dyadic(M) > check_dyadic(N):
        raise DyadicError(f"range needs M <= N, got M={M}, N={N}")
    return _apply(f, leq_symbol(f.grid, N) - leq_symbol(f.grid, M))


def dyadic_between(M, N):
    """Dyadic N1 with M < N1 <= N."""
    M, N = check_dyadic(M), check_dyadic(N)
    out = []
    k = round(math.log2(M)) + 1
    while 2.0 ** k <= N:
        out.append(2.0 ** k)
        k += 1
    return out


def active_shells(grid):
    """Dyadic N whose band symbol is not identically zero on the lattice.

    A shell P_N sees |xi| in (N/2, 2N); the lattice spans
    [2 pi/L, |xi|_max], so only about log2(n/2) shells survive.
    """
    a = grid.abs_xi()
    lo = a[a > 0].min()
    hi = a.max()
    k = math.floor(math.log2(lo / 2.0))
    out = []
    while 2.0 ** k / 2 < hi:
        N = 2.0 ** k
        if np.any(band_symbol(grid, N) != 0):
            out.append(N)
        k += 1
    return out


def partition(f):
    """Low remainder P_{<=N0/2} plus the shells P_N; their sum is f."""
    shells = active_shells(f.grid)
    low = project_leq(f, shells[0] / 2)
    return low, [(N, project_band(f, N)) for N in shells]


def bernstein_ratio(f, N, p, q, s):
    """Ratios whose boundedness in N is the content of Bernstein's inequality.

    Returns a dict with keys
      ``lebesgue``  : ||P_N f||_q / (N^{d/p - d/q} ||P_N f||_p)
      ``deriv_up``  : || |D|^s P_N f ||_p / (N^s ||P_N f||_p)
      ``deriv_down``: || |D|^-s P_N f ||_p / (N^-s ||P_N f||_p)
      ``low``       : || |D|^s P_{<=N} f ||_p / (N^s ||P_{<=N} f||_p)
    or None when P_N f vanishes (undefined ratio).
    """
    N = check_dyadic(N)
    if not (1 <= p <= q):
        raise ValueError("need 1 <= p <= q")
    if s < 0:
        raise ValueError("need s >= 0")
    grid = f.grid
    F = fft(f.values)
    band = F * band_symbol(grid, N)
    scale = max(np.sqrt(np.sum(np.abs(F) ** 2)), 1e-300)
    if np.sqrt(np.sum(np.abs(band) ** 2)) <= 1e-14 * scale:
        return None
    d = grid.d
    pn = ifft(band).real
    pn_p = lebesgue_norm_array(grid, pn, p)
    pn_q = lebesgue_norm_array(grid, pn, q)
    inv_q = 0.0 if q == np.inf else 1.0 / q
    up = ifft(band * power_symbol(grid, s)).real
    down_sym = power_symbol(grid, -s).copy()
    down_sym.flat[0] = 0.0
    down = ifft(band * down_sym).real
    low = F * leq_symbol(grid, N)
    low_vals = ifft(low).real
    low_up = ifft(low * power_symbol(grid, s)).real
    low_p = lebesgue_norm_array(grid, low_vals, p)
    return {
        "lebesgue": pn_q / (N ** (d / p - d * inv_q) * pn_p),
        "deriv_up": lebesgue_norm_array(grid, up, p) / (N ** s * pn_p),
        "deriv_down": lebesgue_norm_array(grid, down, p) / (N ** (-s) * pn_p),
        "low": lebesgue_norm_array(grid, low_up, p) / (N ** s * low_p) if low_p > 0 else None,
    }
