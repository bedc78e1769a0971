import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from discode import _kernels as K

needs_numba = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba backend disabled")

rng = np.random.default_rng(7)


def series(n, k, lead=None):
    s = (rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))) / np.arange(1, k + 1)
    if lead is not None:
        s[:, 0] = lead
    return s


def test_backend_matches_flag():
    assert K.backend() == ("numba" if K.HAVE_NUMBA else "numpy")


def test_numpy_series_algebra():
    a, b = series(5, 12), series(5, 12, lead=2.0)
    assert np.allclose(K.np_series_mul(K.np_series_div(a, b), b), a, atol=1e-12)
    assert np.allclose(K.np_series_log(K.np_series_exp(a))[:, 1:], a[:, 1:], atol=1e-10)
    # exp(z) about 0 has coefficients 1/k!
    z = np.zeros((1, 6), complex)
    z[0, 1] = 1
    want = [1, 1, 1 / 2, 1 / 6, 1 / 24, 1 / 120]
    assert np.allclose(K.np_series_exp(z)[0], want)


@needs_numba
@pytest.mark.parametrize("name", ["series_mul", "series_div"])
def test_binary_parity(name):
    a, b = series(20, 16), series(20, 16, lead=1.5 - 0.5j)
    np.testing.assert_allclose(getattr(K, "nb_" + name)(a, b), getattr(K, "np_" + name)(a, b),
                               rtol=1e-12, atol=1e-14)


@needs_numba
@pytest.mark.parametrize("name", ["series_exp", "series_log"])
def test_unary_parity(name):
    a = series(20, 16, lead=0.7 + 0.2j)
    np.testing.assert_allclose(getattr(K, "nb_" + name)(a), getattr(K, "np_" + name)(a),
                               rtol=1e-12, atol=1e-14)


@needs_numba
@given(st.lists(st.complex_numbers(max_magnitude=0.95, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=6))
def test_blaschke_parity(zeros):
    c = np.array(zeros, dtype=np.complex128)
    z = np.array([0.0, 0.3 - 0.2j, -0.8j, 0.99], dtype=np.complex128)
    np.testing.assert_allclose(K.nb_blaschke_taylor(z, c, 8), K.np_blaschke_taylor(z, c, 8),
                               rtol=1e-10, atol=1e-12)


def test_blaschke_long_product_stays_finite():
    c = np.full(4000, 0.5 + 0j)
    z = np.array([-0.99 + 0j])
    for f in (K.np_blaschke_taylor, K.blaschke_taylor):
        v = f(z, c, 2)
        assert np.all(np.isfinite(v))


@needs_numba
def test_carleson_parity():
    a = 0.9 * np.exp(2j * np.pi * rng.random(30)) * rng.random(30)
    z = 0.9 * np.exp(2j * np.pi * rng.random(500)) * np.sqrt(rng.random(500))
    w = rng.random(500)
    np.testing.assert_allclose(K.nb_carleson_sums(a, z, w), K.np_carleson_sums(a, z, w), rtol=1e-12)


def test_numpy_fallback_in_a_subprocess():
    code = (
        "import numpy as np, discode\n"
        "from discode import _kernels as K\n"
        "assert discode.backend() == 'numpy' and K.series_mul is K.np_series_mul\n"
        "from discode.blaschke import FiniteBlaschke\n"
        "print(abs(FiniteBlaschke([0.5])(0.0)))\n"
    )
    env = dict(os.environ, DISCODE_DISABLE_NUMBA="1")
    r = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert abs(float(r.stdout) - 0.5) < 1e-15
