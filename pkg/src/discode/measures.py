"""Growth norms, Carleson constants, the Ahlfors-Shimizu characteristic and
area-integral balances.

All suprema are grid suprema: lower bounds accompanied by a three-radius
profile and a stabilization verdict, never certified upper bounds.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import roots_genlaguerre, roots_legendre

from . import _kernels as K_
from .auxfield import eval_aux
from .gallery import PROFILE_RADII, circle_sup, verdict
from .geometry import circle_mean, make_grid, pseudo_hyperbolic
from .jets import as_analytic


def _points(grid):
    if hasattr(grid, "points"):
        return np.asarray(grid.points).ravel()
    return np.atleast_1d(np.asarray(grid, dtype=np.complex128)).ravel()


def _outside(z, exclusions):
    keep = np.ones(z.shape, dtype=bool)
    for c, d in exclusions:
        keep &= pseudo_hyperbolic(c, z) >= d
    return keep


# --------------------------------------------------------------------------
# growth norms
# --------------------------------------------------------------------------

class GrowthReport(NamedTuple):
    sup: float
    argmax: complex
    profile: np.ndarray
    verdict: str


def growth_norm(f, alpha, grid, radii=PROFILE_RADII):
    """Grid sup of ``|f(z)| (1-|z|^2)^alpha`` plus circle sups at ``radii``."""
    f = as_analytic(f)
    z = _points(grid)

    def fn(x):
        return np.abs(f(x)) * (1 - np.abs(x) ** 2) ** alpha

    v = fn(z)
    k = int(np.argmax(v))
    prof = np.array([circle_sup(fn, r)[0] for r in radii])
    return GrowthReport(float(v[k]), complex(z[k]), prof, verdict(prof))


def growth_norm_outside(f, alpha, grid, exclusions):
    """Grid sup of ``|f|(1-|z|^2)^alpha`` over nodes outside every exclusion disc."""
    z = _points(grid)
    keep = _outside(z, exclusions)
    if not np.any(keep):
        raise ValueError("the exclusion discs cover every grid node")
    z = z[keep]
    v = np.abs(as_analytic(f)(z)) * (1 - np.abs(z) ** 2) ** alpha
    k = int(np.argmax(v))
    return float(v[k]), complex(z[k])


class MinModulusReport(NamedTuple):
    inf: float
    argmin: complex
    floor_constant: float
    floor_holds: bool


def min_modulus_outside(basis, grid, exclusions=()):
    """Infimum of ``|f1| + |f2|`` off the exclusions and the Cauchy-Schwarz floor.

    From ``|W|^2 <= (|f1|^2+|f2|^2)(|f1'|^2+|f2'|^2)`` one gets
    ``|f1|+|f2| >= c (1-|z|^2)`` with ``c = |W| / M`` and
    ``M = sup sqrt(|f1'|^2+|f2'|^2) (1-|z|^2)`` over the grid.
    """
    z = _points(grid)
    keep = _outside(z, exclusions)
    if not np.any(keep):
        raise ValueError("the exclusion discs cover every grid node")
    j1, j2 = basis.jets(z, 1)
    s = np.abs(j1.value) + np.abs(j2.value)
    dnorm = np.sqrt(np.abs(j1.d1) ** 2 + np.abs(j2.d1) ** 2) * (1 - np.abs(z) ** 2)
    c = abs(basis.wronskian) / float(np.max(dnorm))
    holds = bool(np.all(s >= c * (1 - np.abs(z) ** 2) * (1 - 1e-12)))
    sk, zk = s[keep], z[keep]
    k = int(np.argmin(sk))
    return MinModulusReport(float(sk[k]), complex(zk[k]), c, holds)


# --------------------------------------------------------------------------
# Carleson constants
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityMeasure:
    density: object  # callable z -> nonnegative array
    descriptor: str

    def __call__(self, z):
        v = np.asarray(self.density(z), dtype=float)
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError(f"density {self.descriptor!r} is negative or not finite on the grid")
        return v


def coefficient_density(A):
    A = as_analytic(A)
    return DensityMeasure(lambda z: np.abs(A(z)) ** 2 * (1 - np.abs(z) ** 2) ** 3,
                          "|A|^2(1-|z|^2)^3")


@dataclass(frozen=True, eq=False)
class CarlesonReport:
    descriptor: str
    constant_lower_bound: float
    maximizing_a: complex
    r_max: float
    radii: tuple
    profile: np.ndarray
    verdict: str

    def to_record(self):
        return {
            "measure": self.descriptor,
            "r_max": self.r_max,
            "constant": self.constant_lower_bound,
            "argmax_a": [self.maximizing_a.real, self.maximizing_a.imag],
            "radii": list(self.radii),
            "profile": [float(x) for x in self.profile],
            "verdict": self.verdict,
            "label": "lower bound + stabilization heuristic",
        }


def default_a_grid(levels=10, angular_count=64):
    """``a = 0`` and rings at ``|a| = 1 - 2^{-j}``."""
    radii = 1.0 - 2.0 ** -np.arange(1, levels + 1)
    th = 2 * np.pi * (np.arange(angular_count) + 0.5) / angular_count
    return np.concatenate([[0.0], (radii[:, None] * np.exp(1j * th)[None, :]).ravel()])


def carleson_grid(radii=PROFILE_RADII, radial_count=96, angular_count=512):
    return make_grid(radial_count, angular_count, max(radii), "boundary-refined",
                     breakpoints=tuple(r for r in radii if r < max(radii)))


def carleson_constant(mu, a_grid=None, radii=PROFILE_RADII, grid=None):
    """Max over ``a_grid`` of ``∫_{D(0,r)} (1-|a|^2)/|1-conj(a) z|^2 dμ`` for each ``r``.

    One grid reaching ``max(radii)`` is used for every radius, so the
    profile is non-decreasing in ``r``.
    """
    if not isinstance(mu, DensityMeasure):
        mu = DensityMeasure(mu, "density")
    radii = tuple(sorted(radii))
    grid = carleson_grid(radii) if grid is None else grid
    a = np.ascontiguousarray(default_a_grid() if a_grid is None
                             else np.atleast_1d(np.asarray(a_grid, dtype=np.complex128)))
    sums = np.zeros(len(a))
    profile, argmax = [], []
    start = 0
    for r in radii:
        stop = grid.edge_index(r)
        band = grid.points[start:stop].ravel()
        w = (mu(band) * grid.weights[start:stop].ravel())
        sums = sums + K_.carleson_sums(a, np.ascontiguousarray(band), np.ascontiguousarray(w))
        k = int(np.argmax(sums))
        profile.append(float(sums[k]))
        argmax.append(complex(a[k]))
        start = stop
    prof = np.asarray(profile)
    return CarlesonReport(mu.descriptor, prof[-1], argmax[-1], radii[-1], radii, prof, verdict(prof))


# --------------------------------------------------------------------------
# characteristic and balances
# --------------------------------------------------------------------------

def _sph_sq(w, z):
    if hasattr(w, "wronskian"):
        return eval_aux(w, z).quotient_spherical ** 2
    j = as_analytic(w).jet(z, 1)
    return (np.abs(j.d1) / (1 + np.abs(j.value) ** 2)) ** 2


def _log_radial_rule(r, nodes, angular_count):
    """Nodes and weights for ``∫_{D(0,r)} F(z) log(r/|z|) dm``.

    With ``|z| = r e^{-x/2}`` the measure ``log(r/|z|) dm`` becomes
    ``(r^2/4) x e^{-x} dx dθ``, a generalized Gauss-Laguerre weight, so the
    logarithmic singularity at the origin disappears.
    """
    x, w = roots_genlaguerre(nodes, 1)
    rho = r * np.exp(-x / 2)
    th = 2 * np.pi * np.arange(angular_count) / angular_count
    pts = rho[:, None] * np.exp(1j * th)[None, :]
    wts = (r * r / 4) * w[:, None] * (2 * np.pi / angular_count) * np.ones((1, angular_count))
    return pts, wts


def ahlfors_shimizu_T0(w, r, grid=None, nodes=64, angular_count=128):
    """``(1/π) ∫_{D(0,r)} w^#(z)^2 log(r/|z|) dm(z)``.

    ``w`` is a jet provider or a solution basis (``w = f1/f2``, evaluated
    pole-free).  Without ``grid`` a Gauss-Laguerre rule in ``log(r/|z|)``
    is used; with a :class:`SampleGrid` the log kernel is integrated exactly
    over each radial cell instead (second order in the cell width).
    """
    if not 0 < r < 1:
        raise ValueError("r must lie in (0,1)")
    if grid is not None:
        return float(np.sum(_sph_sq(w, grid.points) * grid.log_kernel_weights(r)) / np.pi)
    pts, wts = _log_radial_rule(r, nodes, angular_count)
    return float(np.sum(_sph_sq(w, pts) * wts) / np.pi)


def ahlfors_shimizu_T0_dual(w, r, nodes=40, radial_count=64, angular_count=256):
    """The same characteristic as ``(1/π) ∫_0^r A(t) dt/t`` with ``A(t)`` the
    spherical area of ``D(0,t)``.  Substituting ``t = r s^2`` makes the
    outer integrand smooth for Gauss-Legendre."""
    x, wq = roots_legendre(nodes)
    s = 0.5 * (x + 1)
    total = 0.0
    for sk, wk in zip(s, wq):
        g = make_grid(radial_count, angular_count, r * sk**2, "uniform")
        area = g.integrate(_sph_sq(w, g.points))
        total += 0.5 * wk * area * 2 / sk  # dt/t = 2 ds/s
    return total / np.pi


def u_field(basis):
    return lambda z: eval_aux(basis, z).u


def circle_mean_u_balance(basis, r, grid=None, nodes=64, angular_count=128):
    """``|mean_{|z|=r} u - u(0) - 2 T0(r)|`` for ``w = f1/f2``."""
    u = u_field(basis)
    m = circle_mean(u, r, angular_count)
    u0 = float(u(np.array([0j]))[0])
    T = ahlfors_shimizu_T0(basis, r, grid, nodes, angular_count)
    return abs(m - u0 - 2 * T)


class Balance(NamedTuple):
    lhs: float
    rhs: float
    residual: float


def littlewood_paley_balance(f, r_max=1.0, nodes=64, angular_count=256):
    """Both sides of the Littlewood-Paley identity for ``f_r(z) = f(r_max z)``.

    ``lhs`` is the circle mean of ``|f|^2`` at ``r_max``; ``rhs`` is
    ``|f(0)|^2 + (2/π) ∫_D |f_r'|^2 log(1/|z|) dm``.  ``r_max = 1`` is
    allowed for functions analytic across the unit circle.
    """
    if not 0 < r_max <= 1:
        raise ValueError("r_max must lie in (0,1]")
    f = as_analytic(f)
    lhs = circle_mean(lambda z: np.abs(f(z)) ** 2, r_max, angular_count)
    pts, wts = _log_radial_rule(1.0, nodes, angular_count)
    d = f.derivative(1)(r_max * pts) * r_max
    f0 = abs(complex(f(np.array([0j]))[0])) ** 2
    rhs = f0 + 2 / np.pi * float(np.sum(np.abs(d) ** 2 * wts))
    return Balance(float(lhs), float(rhs), abs(lhs - rhs))


def monomial(k, c=1.0):
    from .jets import polynomial

    coeffs = np.zeros(k + 1, dtype=complex)
    coeffs[k] = c
    return polynomial(coeffs)


def uchiyama_constant(basis, epsilon, a_grid=None, radii=PROFILE_RADII, grid=None):
    """Carleson profile of ``(|f1'|^2+|f2'|^2)(|f1|^2+|f2|^2)^{ε-1} log(1/|z|) dm``.

    Returns ``(report, sup_f)`` where ``sup_f`` is the grid sup of
    ``max(|f1|, |f2|)`` witnessing boundedness of the basis.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")

    def dens(z):
        j1, j2 = basis.jets(z, 1)
        S = np.abs(j1.value) ** 2 + np.abs(j2.value) ** 2
        D = np.abs(j1.d1) ** 2 + np.abs(j2.d1) ** 2
        return D * S ** (epsilon - 1) * np.log(1 / np.abs(z))

    mu = DensityMeasure(dens, f"(|f1'|^2+|f2'|^2)(|f1|^2+|f2|^2)^({epsilon}-1) log(1/|z|)")
    grid = carleson_grid(radii) if grid is None else grid
    rep = carleson_constant(mu, a_grid, radii, grid)
    z = grid.points.ravel()
    sup_f = float(max(np.max(np.abs(basis.f1(z))), np.max(np.abs(basis.f2(z)))))
    return rep, sup_f


def sublevel_mass(basis, delta, grid=None, radii=PROFILE_RADII):
    """``∫_{|f1|^2+|f2|^2 < δ} dm/(1-|z|^2)`` over ``D(0, r)`` for each ``r``."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    radii = tuple(sorted(radii))
    grid = carleson_grid(radii) if grid is None else grid
    z = grid.points
    S = np.abs(basis.f1(z)) ** 2 + np.abs(basis.f2(z)) ** 2
    contrib = np.where(S < delta, grid.weights / (1 - np.abs(z) ** 2), 0.0)
    ring = contrib.sum(axis=1)
    return np.array([ring[: grid.edge_index(r)].sum() for r in radii])


def lipschitz_audit(f, alpha, pairs, norm=None, grid=None):
    """Worst ``|Δ(|f|(1-|z|^2)^α)| / (ρ_p(z1,z2) ‖f‖)`` over ``pairs``.

    ``norm`` defaults to the grid estimate of ``‖f‖_{H^∞_α}``.
    """
    f = as_analytic(f)
    pairs = np.asarray(pairs, dtype=np.complex128).reshape(-1, 2)
    if norm is None:
        grid = make_grid(64, 256, 0.9, "boundary-refined") if grid is None else grid
        z = grid.points.ravel()
        norm = float(np.max(np.abs(f(z)) * (1 - np.abs(z) ** 2) ** alpha))
    if norm == 0:
        return 0.0
    z1, z2 = pairs[:, 0], pairs[:, 1]
    rho = pseudo_hyperbolic(z1, z2)
    if np.any(rho > 0.5 + 1e-12):
        raise ValueError("pairs must satisfy rho_p <= 1/2")
    g1 = np.abs(f(z1)) * (1 - np.abs(z1) ** 2) ** alpha
    g2 = np.abs(f(z2)) * (1 - np.abs(z2) ** 2) ** alpha
    ok = rho > 0
    if not np.any(ok):
        return 0.0
    return float(np.max(np.abs(g1 - g2)[ok] / (rho[ok] * norm)))
