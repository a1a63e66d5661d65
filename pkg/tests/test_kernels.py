import os
import subprocess
import sys

import numpy as np
import pytest

from wavecrit import _kernels

numba = pytest.importorskip("numba")
JIT_ROTATE, JIT_GRONWALL, JIT_POWER = _kernels._jit_versions()


def test_rotation_kernels_agree(rng):
    shape = (16, 9)
    a = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    b = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    w = np.abs(rng.standard_normal(shape)) * 10
    w[0, 0] = 0.0
    for t in (0.0, 0.37, -5.0):
        for x, y in zip(_kernels.rotate_pair_numpy(a, b, w, t), JIT_ROTATE(a, b, w, t)):
            assert np.max(np.abs(x - y)) <= 1e-13 * (1 + np.max(np.abs(x)))


@pytest.mark.parametrize("gamma,gamma2", [(1.5, 1.0), (0.3, 3.0)])
def test_gronwall_kernels_agree(rng, gamma, gamma2):
    x = rng.uniform(0, 2, 50)
    tail = rng.uniform(0, 1e-3, 50)
    ref = _kernels.gronwall_rhs_numpy(x, 1.3, 0.02, gamma, gamma2, tail)
    got = JIT_GRONWALL(x, 1.3, 0.02, gamma, gamma2, tail)
    assert np.allclose(ref, got, rtol=1e-12, atol=0)


@pytest.mark.parametrize("p", [4.0, 3.0, 2.5])
def test_power_sum_kernels_agree(rng, p):
    u = rng.standard_normal((32, 32))
    w = rng.uniform(0, 3, (32, 32))
    assert JIT_POWER(u, w, p) == pytest.approx(_kernels.weighted_power_sum_numpy(u, w, p), rel=1e-12)


def test_environment_switch_selects_numpy():
    env = dict(os.environ, WAVECRIT_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", "import wavecrit; print(wavecrit.backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
