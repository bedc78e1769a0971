"""Analytic functions represented by their local Taylor series.

An :class:`Analytic` object answers ``taylor(z, K)``: the first ``K`` Taylor
coefficients at every point of ``z``.  Sums, products, quotients, ``exp``,
``log`` and powers of such objects are formed by truncated series
arithmetic, which is forward-mode automatic differentiation of arbitrary
order.  Derivatives obtained this way are exact up to rounding; no finite
differences are involved.
"""

from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from . import _kernels as K_


def _factorials(n):
    return np.array([float(factorial(k)) for k in range(n)])


@dataclass(frozen=True)
class Jet:
    """Value and derivatives of a function at a point (or array of points).

    ``derivs[..., k]`` is the k-th complex derivative.
    """

    z: np.ndarray
    derivs: np.ndarray

    @property
    def order(self):
        return self.derivs.shape[-1] - 1

    @property
    def value(self):
        return self.derivs[..., 0]

    @property
    def d1(self):
        return self.derivs[..., 1]

    @property
    def d2(self):
        return self.derivs[..., 2]

    @property
    def d3(self):
        return self.derivs[..., 3]

    def __getitem__(self, k):
        return self.derivs[..., k]


class Analytic:
    """Base class: subclasses implement ``_series(z, K)`` on 1-D arrays."""

    descriptor = "composite"

    def _series(self, z, K):
        raise NotImplementedError

    def taylor(self, z, K):
        """Taylor coefficients ``c_0..c_{K-1}``, shape ``z.shape + (K,)``."""
        z = np.asarray(z, dtype=np.complex128)
        flat = z.reshape(-1)
        out = np.asarray(self._series(flat, K), dtype=np.complex128)
        return out.reshape(z.shape + (K,))

    def jet(self, z, order=2):
        z = np.asarray(z, dtype=np.complex128)
        c = self.taylor(z, order + 1)
        return Jet(z, c * _factorials(order + 1))

    def __call__(self, z):
        return self.taylor(z, 1)[..., 0]

    def derivative(self, m=1):
        return derivative(self, m)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o = as_analytic(other)
        return Series(lambda z, K: self._series(z, K) + o._series(z, K))

    __radd__ = __add__

    def __neg__(self):
        return Series(lambda z, K: -self._series(z, K))

    def __sub__(self, other):
        return self + (-as_analytic(other))

    def __rsub__(self, other):
        return as_analytic(other) + (-self)

    def __mul__(self, other):
        if np.isscalar(other):
            c = complex(other)
            return Series(lambda z, K: c * self._series(z, K))
        o = as_analytic(other)
        return Series(lambda z, K: K_.series_mul(self._series(z, K), o._series(z, K)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if np.isscalar(other):
            c = complex(other)
            return Series(lambda z, K: self._series(z, K) / c)
        o = as_analytic(other)
        return Series(lambda z, K: K_.series_div(self._series(z, K), o._series(z, K)))

    def __rtruediv__(self, other):
        return as_analytic(other) / self

    def __pow__(self, s):
        if isinstance(s, int) and s >= 0:
            out = constant(1.0)
            for _ in range(s):
                out = out * self
            return out
        return power(self, s)


class Series(Analytic):
    """Analytic function given by a series callable ``fn(z, K)``."""

    def __init__(self, fn, descriptor="composite"):
        self._fn = fn
        self.descriptor = descriptor

    def _series(self, z, K):
        return self._fn(z, K)


def as_analytic(x):
    if isinstance(x, Analytic):
        return x
    return constant(x)


def constant(c):
    c = complex(c)

    def fn(z, K):
        out = np.zeros((z.shape[0], K), dtype=np.complex128)
        out[:, 0] = c
        return out

    return Series(fn, "constant")


def _identity_fn(z, K):
    out = np.zeros((z.shape[0], K), dtype=np.complex128)
    out[:, 0] = z
    if K > 1:
        out[:, 1] = 1.0
    return out


identity = Series(_identity_fn, "identity")


def polynomial(coeffs):
    """Polynomial ``sum coeffs[k] z**k``."""
    coeffs = np.asarray(coeffs, dtype=np.complex128)

    def fn(z, K):
        # Horner in series arithmetic
        x = _identity_fn(z, K)
        out = np.zeros((z.shape[0], K), dtype=np.complex128)
        for c in coeffs[::-1]:
            out = K_.series_mul(out, x)
            out[:, 0] += c
        return out

    return Series(fn, "polynomial")


def exp(f):
    f = as_analytic(f)
    return Series(lambda z, K: K_.series_exp(f._series(z, K)))


def log(f):
    """Principal-branch logarithm (branch fixed by the value at each point)."""
    f = as_analytic(f)
    return Series(lambda z, K: K_.series_log(f._series(z, K)))


def power(f, s):
    s = complex(s)
    f = as_analytic(f)
    return Series(lambda z, K: K_.series_exp(s * K_.series_log(f._series(z, K))))


def sqrt(f):
    return power(f, 0.5)


def shift_series(c, m):
    """Coefficients of the m-th derivative from coefficients ``c`` (last axis)."""
    K = c.shape[-1] - m
    j = np.arange(K)
    scale = np.array([factorial(jj + m) / factorial(jj) for jj in j], dtype=float)
    return c[..., m:] * scale


def derivative(f, m=1):
    f = as_analytic(f)
    if m == 0:
        return f
    return Series(lambda z, K: shift_series(f._series(z, K + m), m))


def mobius(a):
    """The self-inverse disc automorphism ``(a - z)/(1 - conj(a) z)``."""
    a = complex(a)
    return (constant(a) - identity) / (1.0 - np.conj(a) * identity)


def antiderivative(c, c0=0.0):
    """Series of the antiderivative with constant term ``c0``."""
    c = np.asarray(c, dtype=np.complex128)
    out = np.empty(c.shape[:-1] + (c.shape[-1] + 1,), dtype=np.complex128)
    out[..., 0] = c0
    out[..., 1:] = c / np.arange(1, c.shape[-1] + 1)
    return out


def reexpand(q, h, K):
    """Re-centre a series ``q`` (coefficients at p) at ``p + h``.

    ``q`` has shape ``(M,)``, ``h`` shape ``(n,)``; returns ``(n, K)``.
    """
    q = np.asarray(q, dtype=np.complex128)
    h = np.asarray(h, dtype=np.complex128)
    M = q.shape[0]
    out = np.zeros((h.shape[0], K), dtype=np.complex128)
    for k in range(min(K, M)):
        acc = np.zeros(h.shape[0], dtype=np.complex128)
        for j in range(M - 1, k - 1, -1):
            acc = acc * h + comb(j, k) * q[j]
        out[:, k] = acc
    return out


class RemovableQuotient(Analytic):
    """``num/den`` where ``den`` has known zeros that ``num`` cancels.

    Inside pseudo-hyperbolic ``radius`` of a listed zero ``p`` of order ``m``
    the quotient is formed from the series of ``num`` and ``den`` at ``p``
    with the leading ``m`` coefficients dropped, then re-expanded at the query
    point.  Elsewhere plain series division is used.
    """

    def __init__(self, num, den, points, orders=None, radius=1e-2, local_order=16):
        self.num = as_analytic(num)
        self.den = as_analytic(den)
        self.points = np.asarray(points, dtype=np.complex128).reshape(-1)
        if orders is None:
            orders = [1] * len(self.points)
        self.orders = list(orders)
        self.radius = float(radius)
        self.local_order = int(local_order)
        self.descriptor = "removable-quotient"
        self._local = {}

    def _local_series(self, i, K):
        key = (i, K)
        if key not in self._local:
            p = self.points[i : i + 1]
            m = self.orders[i]
            M = K + self.local_order
            n = self.num._series(p, M + m)[:, m:]
            d = self.den._series(p, M + m)[:, m:]
            self._local[key] = K_.series_div(n, d)[0]
        return self._local[key]

    def _series(self, z, K):
        out = np.empty((z.shape[0], K), dtype=np.complex128)
        far = np.ones(z.shape[0], dtype=bool)
        for i, p in enumerate(self.points):
            rho = np.abs(z - p) / np.abs(1.0 - np.conj(p) * z)
            near = far & (rho <= self.radius)
            if np.any(near):
                out[near] = reexpand(self._local_series(i, K), z[near] - p, K)
                far &= ~near
        if np.any(far):
            zf = z[far]
            out[far] = K_.series_div(self.num._series(zf, K), self.den._series(zf, K))
        return out


def fd_audit(f, z, h=1e-4, order=2):
    """Relative gap between jet derivatives and central differences.

    Returns the worst relative discrepancy over ``z`` for derivatives
    ``1..order`` (order at most 2).
    """
    z = np.asarray(z, dtype=np.complex128).reshape(-1)
    j = f.jet(z, order)
    fp, fm = f(z + h), f(z - h)
    f0 = j.value
    worst = 0.0
    d1 = (fp - fm) / (2 * h)
    worst = max(worst, np.max(np.abs(d1 - j.d1) / np.maximum(1.0, np.abs(j.d1))))
    if order >= 2:
        d2 = (fp - 2 * f0 + fm) / h**2
        worst = max(worst, np.max(np.abs(d2 - j.d2) / np.maximum(1.0, np.abs(j.d2))))
    return float(worst)
