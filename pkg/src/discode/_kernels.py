"""Hot inner loops, compiled with numba when available.

Every kernel exists twice: an ``@njit`` version and a vectorised numpy
version with the same signature.  The numpy path is used when numba cannot be
imported or when the environment variable ``DISCODE_DISABLE_NUMBA`` is set to
a non-empty value other than ``0``.  Both paths are exercised by the test
suite and compared in ``benchmarks/bench_kernels.py``.

Truncated Taylor series are stored as complex arrays of shape ``(n, K)``:
row ``i`` holds the coefficients ``c_0 .. c_{K-1}`` of a series at one point.
"""

import os

import numpy as np

_flag = os.environ.get("DISCODE_DISABLE_NUMBA", "")
NUMBA_REQUESTED = _flag in ("", "0")

try:
    if not NUMBA_REQUESTED:
        raise ImportError
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

# Factor 2**500 is used to keep long Blaschke products representable.
_SCALE_EXP = 500
_TINY = 2.0 ** -_SCALE_EXP
_HUGE = 2.0 ** _SCALE_EXP


# --------------------------------------------------------------------------
# numpy implementations
# --------------------------------------------------------------------------

def np_series_mul(a, b):
    n, K = a.shape
    c = np.zeros((n, K), dtype=np.complex128)
    for k in range(K):
        c[:, k] = np.sum(a[:, : k + 1] * b[:, k::-1], axis=1)
    return c


def np_series_div(a, b):
    n, K = a.shape
    c = np.zeros((n, K), dtype=np.complex128)
    b0 = b[:, 0]
    for k in range(K):
        s = a[:, k].copy()
        if k:
            s -= np.sum(b[:, 1 : k + 1] * c[:, k - 1 :: -1][:, :k], axis=1)
        c[:, k] = s / b0
    return c


def np_series_exp(a):
    n, K = a.shape
    e = np.zeros((n, K), dtype=np.complex128)
    e[:, 0] = np.exp(a[:, 0])
    j = np.arange(1, K)
    for k in range(1, K):
        e[:, k] = np.sum(j[:k] * a[:, 1 : k + 1] * e[:, k - 1 :: -1][:, :k], axis=1) / k
    return e


def np_series_log(a):
    n, K = a.shape
    out = np.zeros((n, K), dtype=np.complex128)
    out[:, 0] = np.log(a[:, 0])
    a0 = a[:, 0]
    for k in range(1, K):
        s = a[:, k].copy()
        if k > 1:
            j = np.arange(1, k)
            s -= np.sum(j * out[:, 1:k] * a[:, k - 1 : 0 : -1], axis=1) / k
        out[:, k] = s / a0
    return out


def _np_factor_series(z, c, K):
    """Taylor coefficients of one normalised Blaschke factor at points ``z``."""
    n = z.shape[0]
    s = np.zeros((n, K), dtype=np.complex128)
    if c == 0:
        s[:, 0] = z
        if K > 1:
            s[:, 1] = 1.0
        return s
    d0 = 1.0 - np.conj(c) * z
    u = np.exp(-1j * np.angle(c)) / d0
    q = np.conj(c) / d0
    s[:, 0] = u * (c - z)
    tail = u * (abs(c) ** 2 - 1.0) / d0
    qp = np.ones(n, dtype=np.complex128)
    for j in range(1, K):
        s[:, j] = tail * qp
        qp = qp * q
    return s


def np_blaschke_taylor(z, zeros, K):
    n = z.shape[0]
    p = np.zeros((n, K), dtype=np.complex128)
    p[:, 0] = 1.0
    expo = np.zeros(n)
    for c in zeros:
        p = np_series_mul(p, _np_factor_series(z, c, K))
        m = np.max(np.abs(p), axis=1)
        small = (m < _TINY) & (m > 0)
        if np.any(small):
            p[small] *= _HUGE
            expo[small] -= _SCALE_EXP
    return p * (2.0 ** expo)[:, None]


def np_carleson_sums(a, z, w):
    out = np.empty(a.shape[0])
    chunk = max(1, 2_000_000 // max(1, z.shape[0]))
    for s in range(0, a.shape[0], chunk):
        aa = a[s : s + chunk, None]
        ker = (1.0 - np.abs(aa) ** 2) / np.abs(1.0 - np.conj(aa) * z[None, :]) ** 2
        out[s : s + chunk] = ker @ w
    return out


# --------------------------------------------------------------------------
# numba implementations
# --------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def nb_series_mul(a, b):
        n, K = a.shape
        c = np.zeros((n, K), dtype=np.complex128)
        for i in range(n):
            for k in range(K):
                s = 0j
                for j in range(k + 1):
                    s += a[i, j] * b[i, k - j]
                c[i, k] = s
        return c

    @njit(cache=True)
    def nb_series_div(a, b):
        n, K = a.shape
        c = np.zeros((n, K), dtype=np.complex128)
        for i in range(n):
            b0 = b[i, 0]
            for k in range(K):
                s = a[i, k]
                for j in range(1, k + 1):
                    s -= b[i, j] * c[i, k - j]
                c[i, k] = s / b0
        return c

    @njit(cache=True)
    def nb_series_exp(a):
        n, K = a.shape
        e = np.zeros((n, K), dtype=np.complex128)
        for i in range(n):
            e[i, 0] = np.exp(a[i, 0])
            for k in range(1, K):
                s = 0j
                for j in range(1, k + 1):
                    s += j * a[i, j] * e[i, k - j]
                e[i, k] = s / k
        return e

    @njit(cache=True)
    def nb_series_log(a):
        n, K = a.shape
        out = np.zeros((n, K), dtype=np.complex128)
        for i in range(n):
            a0 = a[i, 0]
            out[i, 0] = np.log(a0)
            for k in range(1, K):
                s = a[i, k]
                acc = 0j
                for j in range(1, k):
                    acc += j * out[i, j] * a[i, k - j]
                out[i, k] = (s - acc / k) / a0
        return out

    @njit(cache=True)
    def nb_blaschke_taylor(z, zeros, K):
        n = z.shape[0]
        out = np.zeros((n, K), dtype=np.complex128)
        fac = np.zeros(K, dtype=np.complex128)
        p = np.zeros(K, dtype=np.complex128)
        tmp = np.zeros(K, dtype=np.complex128)
        for i in range(n):
            zi = z[i]
            p[:] = 0
            p[0] = 1.0
            expo = 0
            for c in zeros:
                fac[:] = 0
                if c == 0:
                    fac[0] = zi
                    if K > 1:
                        fac[1] = 1.0
                else:
                    d0 = 1.0 - np.conj(c) * zi
                    u = np.exp(-1j * np.angle(c)) / d0
                    q = np.conj(c) / d0
                    fac[0] = u * (c - zi)
                    tail = u * (abs(c) ** 2 - 1.0) / d0
                    qp = 1.0 + 0j
                    for j in range(1, K):
                        fac[j] = tail * qp
                        qp *= q
                for k in range(K):
                    s = 0j
                    for j in range(k + 1):
                        s += p[j] * fac[k - j]
                    tmp[k] = s
                m = 0.0
                for k in range(K):
                    p[k] = tmp[k]
                    m = max(m, abs(tmp[k]))
                if 0 < m < _TINY:
                    for k in range(K):
                        p[k] *= _HUGE
                    expo -= _SCALE_EXP
            scale = 2.0 ** expo
            for k in range(K):
                out[i, k] = p[k] * scale
        return out

    @njit(cache=True)
    def nb_carleson_sums(a, z, w):
        out = np.empty(a.shape[0])
        for i in range(a.shape[0]):
            ai = a[i]
            ca = np.conj(ai)
            num = 1.0 - abs(ai) ** 2
            s = 0.0
            for j in range(z.shape[0]):
                d = 1.0 - ca * z[j]
                s += w[j] / (d.real * d.real + d.imag * d.imag)
            out[i] = num * s
        return out

    series_mul = nb_series_mul
    series_div = nb_series_div
    series_exp = nb_series_exp
    series_log = nb_series_log
    blaschke_taylor = nb_blaschke_taylor
    carleson_sums = nb_carleson_sums
else:
    series_mul = np_series_mul
    series_div = np_series_div
    series_exp = np_series_exp
    series_log = np_series_log
    blaschke_taylor = np_blaschke_taylor
    carleson_sums = np_carleson_sums


def backend():
    """Name of the active kernel backend: ``"numba"`` or ``"numpy"``."""
    return "numba" if HAVE_NUMBA else "numpy"
