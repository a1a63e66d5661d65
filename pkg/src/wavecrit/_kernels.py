"""Hot loops with a numba path and a plain numpy path.

Set ``WAVECRIT_NUMBA=0`` to force the numpy implementations (useful when
debugging or on platforms without an LLVM toolchain).  Both paths are
exposed under explicit names so the benchmark and the tests can compare
them directly.
"""

import os

import numpy as np

USE_NUMBA = os.environ.get("WAVECRIT_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")


def _threads():
    raw = os.environ.get("WAVECRIT_THREADS")
    if not raw:
        return None
    try:
        value = int(raw)
    except ValueError:
        return None
    return value if value > 0 else None


THREADS = _threads()


# numpy reference implementations

def rotate_pair_numpy(a, b, omega, t):
    """Apply the per-mode half-wave matrix to coefficient arrays (a, b).

    Returns (cos(t w) a + sin(t w)/w b, -w sin(t w) a + cos(t w) b), using
    the w -> 0 limit (a + t b, b) where w == 0.
    """
    c = np.cos(t * omega)
    s = np.sin(t * omega)
    safe = np.where(omega > 0, omega, 1.0)
    s_over = np.where(omega > 0, s / safe, t)
    return c * a + s_over * b, -omega * s * a + c * b


def gronwall_rhs_numpy(x, C, eta, gamma, gamma2, tail):
    """Right side of the dyadic recursion for every k in one shot.

    ``tail`` is an extra per-k term (the geometric remainder beyond the
    truncation); pass zeros when it is not wanted.
    """
    K = x.shape[0]
    k = np.arange(K)
    diff = k[:, None] - k[None, :]
    past = np.where(diff > 0, 2.0 ** (-gamma * np.maximum(diff, 0)), 0.0)
    future = np.where(diff <= 0, 2.0 ** (-gamma2 * np.abs(np.minimum(diff, 0))), 0.0)
    return C * 2.0 ** (-gamma * k) + eta * (past @ x) + eta * (future @ x) + tail


def weighted_power_sum_numpy(u, w, p):
    return float(np.sum(np.abs(u) ** p * w))


def _jit_versions():
    from numba import njit

    @njit(cache=True, fastmath=False)
    def rotate_pair(a, b, omega, t):
        a_flat = a.ravel()
        b_flat = b.ravel()
        w_flat = omega.ravel()
        out_a = np.empty_like(a_flat)
        out_b = np.empty_like(b_flat)
        for i in range(a_flat.shape[0]):
            w = w_flat[i]
            c = np.cos(t * w)
            if w > 0.0:
                s = np.sin(t * w)
                out_a[i] = c * a_flat[i] + (s / w) * b_flat[i]
                out_b[i] = -w * s * a_flat[i] + c * b_flat[i]
            else:
                out_a[i] = a_flat[i] + t * b_flat[i]
                out_b[i] = b_flat[i]
        return out_a.reshape(a.shape), out_b.reshape(b.shape)

    @njit(cache=True)
    def gronwall_rhs(x, C, eta, gamma, gamma2, tail):
        # running sums turn the two convolutions into O(K) recurrences
        K = x.shape[0]
        out = np.empty(K)
        qp = 2.0 ** (-gamma)
        qf = 2.0 ** (-gamma2)
        past = np.zeros(K)
        acc = 0.0
        for k in range(1, K):
            acc = qp * (acc + x[k - 1])
            past[k] = acc
        future = np.zeros(K)
        acc = 0.0
        for k in range(K - 1, -1, -1):
            acc = x[k] + qf * acc
            future[k] = acc
        for k in range(K):
            out[k] = C * 2.0 ** (-gamma * k) + eta * past[k] + eta * future[k] + tail[k]
        return out

    @njit(cache=True)
    def weighted_power_sum(u, w, p):
        u_flat = u.ravel()
        w_flat = w.ravel()
        total = 0.0
        m = int(p)
        if m == p and 1 <= m <= 8:
            # integer powers by repeated products; pow() is several times slower
            for i in range(u_flat.shape[0]):
                a = abs(u_flat[i])
                v = a
                for _ in range(m - 1):
                    v *= a
                total += v * w_flat[i]
            return total
        for i in range(u_flat.shape[0]):
            total += abs(u_flat[i]) ** p * w_flat[i]
        return total

    return rotate_pair, gronwall_rhs, weighted_power_sum


if USE_NUMBA:
    try:
        rotate_pair_numba, gronwall_rhs_numba, weighted_power_sum_numba = _jit_versions()
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False

if USE_NUMBA:
    rotate_pair = rotate_pair_numba
    gronwall_rhs = gronwall_rhs_numba
    weighted_power_sum = weighted_power_sum_numba
    if THREADS is not None:
        import numba

        numba.set_num_threads(min(THREADS, numba.config.NUMBA_NUM_THREADS))
else:
    rotate_pair = rotate_pair_numpy
    gronwall_rhs = gronwall_rhs_numpy
    weighted_power_sum = weighted_power_sum_numpy


def backend():
    return "numba" if USE_NUMBA else "numpy"
