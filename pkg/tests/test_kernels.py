"""Parity between the compiled kernels and the pure-numpy fallback."""

import numpy as np
import pytest

from twinbeam import _kernels
from twinbeam._kernels import _numpy as knp

compiled = pytest.importorskip("twinbeam._kernels._core")


def test_backend_selected():
    assert _kernels.BACKEND in ("compiled", "python")


@pytest.mark.parametrize("n", [1, 2, 3, 8, 13])
def test_block_sum_parity(n):
    rng = np.random.default_rng(n)
    a = rng.integers(0, 2000, size=(81, 97)).astype(float)
    assert np.array_equal(compiled.block_sum(a, n), knp.block_sum(a, n))


def test_block_sum_float_parity_close():
    rng = np.random.default_rng(10)
    a = rng.normal(size=(64, 64)) * 1e3
    c = compiled.block_sum(a, 4)
    p = knp.block_sum(a, 4)
    assert np.allclose(c, p, rtol=1e-13, atol=1e-9)


def test_block_sum_readonly_input():
    a = np.ones((8, 8))
    a.flags.writeable = False
    assert compiled.block_sum(a, 2)[0, 0] == 4.0


def test_deposit_parity():
    rng = np.random.default_rng(2)
    rows = rng.integers(0, 50, 10000)
    cols = rng.integers(0, 70, 10000)
    o1 = np.zeros((50, 70))
    o2 = np.zeros((50, 70))
    compiled.deposit(o1, rows, cols)
    knp.deposit(o2, rows, cols)
    assert np.array_equal(o1, o2)
    assert o1.sum() == 10000


def test_deposit_weighted_parity():
    rng = np.random.default_rng(3)
    rows = rng.integers(0, 20, 5000)
    cols = rng.integers(0, 20, 5000)
    w = rng.exponential(1.0, 5000)
    o1 = np.zeros((20, 20))
    o2 = np.zeros((20, 20))
    compiled.deposit_weighted(o1, rows, cols, w)
    knp.deposit_weighted(o2, rows, cols, w)
    assert np.allclose(o1, o2, rtol=1e-12)


@pytest.mark.parametrize("shape", [(40, 40), (33, 47)])
def test_pearson_map_parity(shape):
    rng = np.random.default_rng(4)
    a = rng.normal(size=shape)
    b = np.roll(a, (3, -2), axis=(0, 1)) + 0.1 * rng.normal(size=shape)
    m1 = compiled.pearson_shift_map(a, b, 6, 6)
    m2 = knp.pearson_shift_map(a, b, 6, 6)
    assert np.allclose(m1, m2, atol=1e-10)
    assert np.unravel_index(m1.argmax(), m1.shape) == (3 + 6, -2 + 6)


def test_pearson_map_degenerate_zero():
    a = np.ones((10, 10))
    m = compiled.pearson_shift_map(a, a, 2, 2)
    assert np.all(m == 0.0)


def test_fallback_forced_by_env():
    import os
    import subprocess
    import sys

    env = dict(os.environ, TWINBEAM_KERNEL_BACKEND="python")
    out = subprocess.run(
        [sys.executable, "-c", "import twinbeam; print(twinbeam.KERNEL_BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
