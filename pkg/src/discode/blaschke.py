"""Finite Blaschke products."""

from typing import NamedTuple

import numpy as np

from . import _kernels as K_
from .geometry import DiscPoint, make_grid, pseudo_hyperbolic
from .jets import Analytic


class FiniteBlaschke(Analytic):
    """``prod_n (|z_n|/z_n) (z_n - z)/(1 - conj(z_n) z)``; zeros at 0 contribute ``z``.

    Taylor coefficients come from exact series multiplication of the
    factors, so the jet is exact at the zeros as well.  Running products are
    rescaled by powers of two whenever they would underflow.
    """

    descriptor = "blaschke"

    def __init__(self, zeros):
        zs = [complex(DiscPoint(z)) for z in np.atleast_1d(np.asarray(zeros, dtype=np.complex128))]
        self.zeros = np.asarray(zs, dtype=np.complex128)

    @property
    def origin_multiplicity(self):
        return int(np.sum(self.zeros == 0))

    def _series(self, z, K):
        return K_.blaschke_taylor(np.ascontiguousarray(z), self.zeros, K)

    def eval_jet(self, z, order=1):
        return self.jet(z, order)

    def factor(self, n, z):
        """Value of the ``n``-th factor at ``z``."""
        c = self.zeros[n]
        z = np.asarray(z, dtype=np.complex128)
        if c == 0:
            return z
        return np.exp(-1j * np.angle(c)) * (c - z) / (1.0 - np.conj(c) * z)

    def deleted_product(self, n):
        c = self.zeros[n]
        others = np.delete(self.zeros, n)
        return float(np.prod(pseudo_hyperbolic(others, c))) if len(others) else 1.0

    def derivative_at_zero(self, zn, tol=1e-14):
        return derivative_at_zero(self, zn, tol)


def separation_constant(zeros):
    """``min_n prod_{k != n} rho_p(z_k, z_n)``; 1 for a single point."""
    z = np.atleast_1d(np.asarray(zeros, dtype=np.complex128))
    if len(z) == 0:
        raise ValueError("separation constant of an empty sequence")
    rho = pseudo_hyperbolic(z[:, None], z[None, :])
    np.fill_diagonal(rho, 1.0)
    if np.any(rho == 0.0):
        i, j = np.argwhere(rho == 0.0)[0]
        raise ValueError(f"duplicate points {z[i]} and {z[j]}: sequence is not separated")
    return float(np.min(np.prod(rho, axis=1)))


def derivative_at_zero(B, zn, tol=1e-14):
    """``B'(z_n)`` from the deleted product and the derivative of its own factor."""
    zn = complex(zn)
    hits = np.flatnonzero(np.abs(B.zeros - zn) <= tol)
    if len(hits) == 0:
        raise ValueError(f"{zn} is not a zero of the Blaschke product")
    if len(hits) > 1:
        raise ValueError(f"{zn} is a zero of multiplicity {len(hits)}")
    n = hits[0]
    c = B.zeros[n]
    rest = np.prod([B.factor(k, c) for k in range(len(B.zeros)) if k != n])
    if c == 0:
        return complex(rest)
    own = -np.exp(-1j * np.angle(c)) / (1.0 - abs(c) ** 2)
    return complex(own * rest)


class PointMassReport(NamedTuple):
    constant: float
    maximizer: complex


def carleson_point_mass_constant(zeros, weights=None, a_grid=None):
    """Grid maximum of ``sum_n w_n (1-|a|^2)/|1 - conj(a) z_n|^2``.

    This is a lower bound for the supremum over the disc.  The default
    ``a_grid`` is the masses themselves plus a boundary-refined grid.
    """
    z = np.atleast_1d(np.asarray(zeros, dtype=np.complex128))
    w = (1.0 - np.abs(z)) if weights is None else np.asarray(weights, dtype=float)
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    if a_grid is None:
        g = make_grid(48, 128, 0.999, "boundary-refined")
        a_grid = np.concatenate([[0.0], z, g.points.ravel()])
    a = np.ascontiguousarray(np.atleast_1d(np.asarray(a_grid, dtype=np.complex128)))
    vals = K_.carleson_sums(a, np.ascontiguousarray(z), np.ascontiguousarray(w))
    k = int(np.argmax(vals))
    return PointMassReport(float(vals[k]), complex(a[k]))
