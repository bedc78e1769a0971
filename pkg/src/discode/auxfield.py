"""The auxiliary field ``u = log(|f1|^2 + |f2|^2) - log|W|`` and its identities.

Everything is computed from the solution jets.  The quotient ``f1/f2`` is
never formed where it could have a pole: spherical quantities use
``|W| / (|f1|^2 + |f2|^2)``.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels as K_
from .gallery import PROFILE_RADII, circle_sup
from .geometry import omega_distance
from .jets import Analytic, as_analytic


@dataclass(frozen=True, eq=False)
class AuxFieldSample:
    z: np.ndarray
    u: np.ndarray
    du: np.ndarray
    grad_norm: np.ndarray
    lap: np.ndarray
    d2u: np.ndarray
    quotient_spherical: np.ndarray

    def invariant_gaps(self):
        """Worst violations of the definitional relations (all ~0)."""
        return {
            "sph_vs_exp(-u)": float(np.max(np.abs(self.quotient_spherical * np.exp(self.u) - 1))),
            "grad_vs_2|du|": float(np.max(np.abs(self.grad_norm - 2 * np.abs(self.du)))),
            "min_lap": float(np.min(self.lap)),
        }

    def to_table(self, sep=","):
        cols = ["z_re", "z_im", "u", "du_re", "du_im", "grad_norm", "lap", "sph"]
        lines = [sep.join(cols)]
        for k in range(np.size(self.z)):
            z, du = np.ravel(self.z)[k], np.ravel(self.du)[k]
            vals = (z.real, z.imag, np.ravel(self.u)[k], du.real, du.imag,
                    np.ravel(self.grad_norm)[k], np.ravel(self.lap)[k],
                    np.ravel(self.quotient_spherical)[k])
            lines.append(sep.join(format(float(v), ".17g") for v in vals))
        return "\n".join(lines) + "\n"


def _S(basis, z):
    f1, f2 = basis.f1(z), basis.f2(z)
    return np.abs(f1) ** 2 + np.abs(f2) ** 2


def eval_aux(basis, z):
    z = np.asarray(z, dtype=np.complex128)
    j1, j2 = basis.jets(z, 2)
    S = np.abs(j1.value) ** 2 + np.abs(j2.value) ** 2
    W = abs(basis.wronskian)
    u = np.log(S) - np.log(W)
    du = (j1.d1 * np.conj(j1.value) + j2.d1 * np.conj(j2.value)) / S
    d2u = (j1.d2 * np.conj(j1.value) + j2.d2 * np.conj(j2.value)) / S - du * du
    lap = 4 * W**2 / S**2
    return AuxFieldSample(z, u, du, 2 * np.abs(du), lap, d2u, W / S)


def _stencil_ratios(basis, z, h):
    """``S(z + h e) / S(z)`` for the four stencil directions."""
    z = np.asarray(z, dtype=np.complex128)
    pts = np.stack([z, z + h, z - h, z + 1j * h, z - 1j * h])
    S = _S(basis, pts)
    return S[1:] / S[0]


def _fd_parts(basis, z, h):
    """5-point Laplacians of ``u`` and of ``e^u`` (the latter divided by ``e^u``).

    Written with ratios ``S(z+h e)/S(z)`` so that large ``u`` costs no
    absolute accuracy.
    """
    q = _stencil_ratios(basis, z, h)
    lap_u = np.sum(np.log(q), axis=0) / h**2
    lap_eu = np.sum(q - 1.0, axis=0) / h**2
    return lap_u, lap_eu


class IdentityResiduals(NamedTuple):
    r1: np.ndarray
    r2: np.ndarray
    r3: np.ndarray


def identity_residuals(basis, z, fd_step=1e-3, richardson=True, A=None):
    """Residuals of ``Δu = 4e^{-2u}``, ``Δu + |∇u|^2 = e^{-u} Δe^u`` and
    ``A = -∂²u - (∂u)²``.

    The first two use the 5-point stencil; with ``richardson`` the stencil
    values at ``h`` and ``h/2`` are combined as ``(4 L(h/2) - L(h))/3``.
    The third is stencil-free; ``A`` defaults to the basis coefficient.
    """
    z = np.asarray(z, dtype=np.complex128)
    s = eval_aux(basis, z)
    lu, le = _fd_parts(basis, z, fd_step)
    if richardson:
        lu2, le2 = _fd_parts(basis, z, fd_step / 2)
        lu = (4 * lu2 - lu) / 3
        le = (4 * le2 - le) / 3
    r1 = np.abs(lu - 4 * np.exp(-2 * s.u))
    r2 = np.abs(lu + s.grad_norm**2 - le)
    A = basis.A if A is None else as_analytic(A)
    r3 = np.abs(A(z) + s.d2u + s.du**2) if A is not None else np.full(z.shape, np.nan)
    return IdentityResiduals(r1, r2, r3)


def liouville_residual(basis, z, fd_step=1e-3, richardson=True):
    """``|Δ(-u) + 4 e^{-2u}|``: ``v = -u`` solves ``Δv = -4 e^{2v}`` in the metric view."""
    z = np.asarray(z, dtype=np.complex128)
    s = eval_aux(basis, z)
    lu, _ = _fd_parts(basis, z, fd_step)
    if richardson:
        lu2, _ = _fd_parts(basis, z, fd_step / 2)
        lu = (4 * lu2 - lu) / 3
    v = -s.u
    return np.abs(-lu + 4 * np.exp(2 * v))


# --------------------------------------------------------------------------
# Schwarzian, Bank-Laine, spherical derivative
# --------------------------------------------------------------------------

class BasisQuotient(Analytic):
    """``f1/f2`` as a jet provider; where ``|f2| < |f1|`` it serves ``f2/f1``.

    Only quantities invariant under ``w -> 1/w`` (Schwarzian, spherical
    derivative) may be taken from it.
    """

    descriptor = "quotient"

    def __init__(self, basis):
        self.basis = basis

    def _series(self, z, K):
        a = self.basis.f1._series(z, K)
        b = self.basis.f2._series(z, K)
        flip = np.abs(b[:, 0]) < np.abs(a[:, 0])
        num = np.where(flip[:, None], b, a)
        den = np.where(flip[:, None], a, b)
        return K_.series_div(num, den)


def schwarzian(w, z):
    """``w'''/w' - 1.5 (w''/w')^2``."""
    z = np.asarray(z, dtype=np.complex128)
    j = as_analytic(w).jet(z, 3)
    if np.any(np.abs(j.d1) < 1e-14):
        k = np.flatnonzero(np.abs(np.ravel(j.d1)) < 1e-14)[0]
        raise ValueError(f"w' vanishes (|w'| < 1e-14) at {np.ravel(z)[k]!r}")
    return j.d3 / j.d1 - 1.5 * (j.d2 / j.d1) ** 2


def bank_laine(E, W, z):
    """``((E'/E)^2 - (W/E)^2 - 2E''/E) / 4``."""
    z = np.asarray(z, dtype=np.complex128)
    j = as_analytic(E).jet(z, 2)
    if np.any(np.abs(j.value) < 1e-14):
        k = np.flatnonzero(np.abs(np.ravel(j.value)) < 1e-14)[0]
        raise ValueError(f"E is nearly zero (|E| < 1e-14) at {np.ravel(z)[k]!r}")
    return ((j.d1 / j.value) ** 2 - (W / j.value) ** 2 - 2 * j.d2 / j.value) / 4


def spherical_derivative(w_jet):
    return np.abs(w_jet.d1) / (1 + np.abs(w_jet.value) ** 2)


def _sph(w, z):
    if hasattr(w, "wronskian"):
        return abs(w.wronskian) / _S(w, z)
    return spherical_derivative(as_analytic(w).jet(z, 1))


def _points(grid):
    if hasattr(grid, "points"):
        return np.asarray(grid.points).ravel()
    return np.atleast_1d(np.asarray(grid, dtype=np.complex128)).ravel()


class SupReport(NamedTuple):
    sup: float
    argmax: complex
    profile: np.ndarray


def normality_sup(w, grid, radii=PROFILE_RADII):
    """Grid sup of ``w^#(z)(1-|z|^2)`` with circle sups at ``radii``.

    ``w`` is a jet provider or a solution basis (then ``w = f1/f2`` and the
    pole-free formula is used).
    """
    z = _points(grid)
    fn = lambda x: _sph(w, x) * (1 - np.abs(x) ** 2)  # noqa: E731
    v = fn(z)
    k = int(np.argmax(v))
    prof = np.array([circle_sup(fn, r)[0] for r in radii])
    return SupReport(float(v[k]), complex(z[k]), prof)


def grad_sup(basis, grid, omega=lambda r: 1 - r**2, radii=PROFILE_RADII):
    """Grid sup of ``|∇u(z)| omega(|z|)`` with circle sups at ``radii``."""
    z = _points(grid)

    def fn(x):
        return eval_aux(basis, x).grad_norm * omega(np.abs(x))

    v = fn(z)
    k = int(np.argmax(v))
    prof = np.array([circle_sup(fn, r, angles=1024)[0] for r in radii])
    return SupReport(float(v[k]), complex(z[k]), prof)


class SmoothnessResult(NamedTuple):
    passed: bool
    margin: float
    log_ratio: float
    distance: float


def smoothness_check(basis, z1, z2, lam, omega=lambda r: 1 - r**2, knots=128):
    """Check ``exp(-Λ ρ) <= S(z1)/S(z2) <= exp(Λ ρ)`` with ``ρ = ∫ |dz|/ω``.

    ``S = |f1|^2 + |f2|^2`` and ``ρ`` runs along the polylined hyperbolic
    segment.  The margin is ``Λ ρ - |log(S(z1)/S(z2))|``.
    """
    S = _S(basis, np.array([z1, z2], dtype=np.complex128))
    lr = float(np.log(S[0] / S[1]))
    rho = omega_distance(complex(z1), complex(z2), omega, knots)
    margin = lam * rho - abs(lr)
    return SmoothnessResult(margin >= -1e-12, margin, lr, rho)


def interior_points(n=200, r=0.8):
    """Deterministic sunflower layout of ``n`` points in ``D(0, r)``."""
    k = np.arange(n) + 0.5
    rho = r * np.sqrt(k / n)
    th = k * np.pi * (3 - np.sqrt(5))
    return rho * np.exp(1j * th)
