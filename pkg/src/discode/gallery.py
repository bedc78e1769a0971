"""Explicit coefficient/solution pairs with machine-checkable claims.

Every entry carries closed forms for ``A`` and ``f1`` (and ``f2`` when it is
elementary); jets come from series arithmetic, so they are exact up to
rounding.  Where ``f2`` has no elementary form it is produced by reduction
of order from the origin along straight segments.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import jets as J
from .geometry import make_grid
from .ode import ReductionOfOrder, SolutionBasis, residual

PROFILE_RADII = (0.9, 0.99, 0.999)
GROWTH_FACTOR = 2.0
STABLE_SPREAD = 0.10


@dataclass(frozen=True)
class Claim:
    key: str
    kind: str  # "envelope", "bounded", "divergent", "stable"
    anchor: str
    lower: object = None  # callable r -> lower bound for |f1|
    upper: object = None


@dataclass(eq=False)
class GalleryEntry:
    name: str
    parameters: dict
    A: J.Analytic
    f1: J.Analytic
    f2: J.Analytic = None
    wronskian: complex = None
    claims: list = field(default_factory=list)
    branch_note: str = "principal branch; the log arguments stay off the cut on the disc"

    def basis(self):
        if self.f2 is None:
            raise ValueError(f"entry {self.name} has no second solution")
        return SolutionBasis(self.f1, self.f2, self.wronskian, A=self.A)


def _z():
    return J.identity


def thm1_i(p=0.25):
    if not 0 < p < 0.5:
        raise ValueError("thm1_i needs 0 < p < 1/2")
    z = _z()
    L = J.log(2j / (1 - z))
    f1 = J.exp((1j * p / (2 * np.pi)) * L * L)
    A = p * (p * L * L - 1j * np.pi * L - 1j * np.pi) / (np.pi**2 * (1 - z) ** 2)
    claims = [
        Claim("envelope", "envelope", "2^-p (1-|z|)^p <= |f1| <= 1",
              lambda r: 2.0 ** -p * (1 - r) ** p, lambda r: np.ones_like(r)),
        Claim("coefficient-growth", "divergent", "A not in H^inf_2"),
        Claim("f2-bounded", "bounded", "second solution bounded"),
    ]
    return GalleryEntry("thm1_i", {"p": p}, A, f1, ReductionOfOrder(f1, 0.0), 1.0 + 0j, claims)


def thm1_ii(p=0.25):
    if not 0 < p < 0.5:
        raise ValueError("thm1_ii needs 0 < p < 1/2")
    z = _z()
    M = J.log((1 + z) / (1 - z))
    f1 = J.exp((1j * p / np.pi) * M * M)
    A = 8 * p * (2 * p * M * M - 1j * np.pi * z * M - 1j * np.pi) / (np.pi**2 * (1 - z * z) ** 2)
    claims = [
        Claim("envelope", "envelope", "((1-|z|)/(1+|z|))^p <= |f1| <= ((1+|z|)/(1-|z|))^p",
              lambda r: ((1 - r) / (1 + r)) ** p, lambda r: ((1 + r) / (1 - r)) ** p),
        Claim("coefficient-growth", "divergent", "A not in H^inf_2"),
        Claim("integral-bounded", "bounded-integral", "z -> int_0^z 1/f1^2 is bounded"),
    ]
    return GalleryEntry("thm1_ii", {"p": p}, A, f1, ReductionOfOrder(f1, 0.0), 1.0 + 0j, claims)


def legendre():
    z = _z()
    f1 = J.sqrt(1 - z * z)
    f2 = f1 * J.log((1 + z) / (1 - z))
    A = 1 / (1 - z * z) ** 2
    claims = [Claim("coefficient-growth", "stable", "A in H^inf_2")]
    return GalleryEntry("legendre", {}, A, f1, f2, 2.0 + 0j, claims)


def log_univalent():
    # f1/f2 = -log(1-z); the factor i makes the Wronskian +1
    z = _z()
    f2 = 1j * J.sqrt(1 - z)
    f1 = -J.log(1 - z) * f2
    A = 0.25 / (1 - z) ** 2
    claims = [Claim("coefficient-growth", "stable", "A in H^inf_2")]
    return GalleryEntry("log_univalent", {}, A, f1, f2, 1.0 + 0j, claims)


def exp_singular():
    z = _z()
    f1 = J.exp(-(1 + z) / (1 - z))
    A = -4 * z / (1 - z) ** 4
    claims = [
        Claim("envelope", "envelope", "|f1| <= 1", None, lambda r: np.ones_like(r)),
        Claim("coefficient-growth", "divergent", "A not in H^inf_2"),
    ]
    return GalleryEntry("exp_singular", {}, A, f1, ReductionOfOrder(f1, 0.0), 1.0 + 0j, claims)


_ENTRIES = {
    "thm1_i": thm1_i,
    "thm1_ii": thm1_ii,
    "legendre": legendre,
    "log_univalent": log_univalent,
    "exp_singular": exp_singular,
}
NAMES = tuple(_ENTRIES)


def get_entry(name, **parameters):
    try:
        make = _ENTRIES[name]
    except KeyError:
        raise KeyError(f"unknown gallery entry {name!r}; known: {', '.join(NAMES)}") from None
    return make(**parameters)


# --------------------------------------------------------------------------
# profiles and verification
# --------------------------------------------------------------------------

def circle_sup(fn, r, angles=4096):
    """``max_theta fn(r e^{i theta})`` with a local refinement at the best angle."""
    th = 2 * np.pi * np.arange(angles) / angles
    vals = np.asarray(fn(r * np.exp(1j * th)), dtype=float)
    k = int(np.argmax(vals))
    step = 2 * np.pi / angles
    res = minimize_scalar(
        lambda t: -float(fn(np.array([r * np.exp(1j * t)]))[0]),
        bounds=(th[k] - step, th[k] + step),
        method="bounded",
        options={"xatol": 1e-12},
    )
    if -res.fun > vals[k]:
        return float(-res.fun), complex(r * np.exp(1j * res.x))
    return float(vals[k]), complex(r * np.exp(1j * th[k]))


def growth_profile(f, alpha, radii=PROFILE_RADII):
    """``sup_{|z|=r} |f(z)| (1-r^2)^alpha`` for each radius."""
    out = []
    for r in radii:
        v, _ = circle_sup(lambda z: np.abs(f(z)) * (1 - np.abs(z) ** 2) ** alpha, r)
        out.append(v)
    return np.asarray(out)


def verdict(profile, factor=GROWTH_FACTOR, spread=STABLE_SPREAD):
    p = np.asarray(profile, dtype=float)
    if p[-1] >= factor * p[0]:
        return "growing"
    if (p.max() - p.min()) <= spread * p.max():
        return "stabilized"
    return "inconclusive"


def default_grid():
    return make_grid(64, 256, 0.9, "boundary-refined")


def verify_entry(entry, grid=None, tol=1e-9):
    """Evaluate every claim of ``entry``; returns a list of report rows.

    Each row is a dict with keys ``key``, ``quantity``, ``value``,
    ``tolerance``, ``passed`` and ``claim``.
    """
    grid = default_grid() if grid is None else grid
    z = grid.points.ravel()
    rows = []
    tag = entry.name

    def row(key, quantity, value, tolerance, passed, claim):
        rows.append(dict(key=f"{tag}/{key}", quantity=quantity, value=float(value),
                         tolerance=float(tolerance), passed=bool(passed), claim=claim))

    r1 = residual(entry.A, entry.f1, z)
    row("residual-f1", "max|f''+Af|/(1+|f|)", r1, tol, r1 <= tol, "f1 solves f''+Af=0")
    if entry.f2 is not None:
        r2 = residual(entry.A, entry.f2, z)
        row("residual-f2", "max|f''+Af|/(1+|f|)", r2, tol, r2 <= tol, "f2 solves f''+Af=0")
        sub = z[:: max(1, len(z) // 200)]
        werr = entry.basis().wronskian_error(sub)
        row("wronskian", "max|W-W0|/|W0|", werr, tol, werr <= tol, "Wronskian is constant")
    absf = np.abs(entry.f1(z))
    rz = np.abs(z)
    for c in entry.claims:
        if c.kind == "envelope":
            worst = np.inf
            if c.lower is not None:
                worst = min(worst, np.min(absf - c.lower(rz) * (1 - 1e-12)))
            if c.upper is not None:
                worst = min(worst, np.min(c.upper(rz) * (1 + 1e-12) - absf))
            row(c.key, "min envelope margin", worst, 0.0, worst >= 0, c.anchor)
        elif c.kind == "bounded":
            sup = float(np.max(np.abs(entry.f2(z)))) if entry.f2 is not None else np.nan
            row(c.key, "grid sup |f2|", sup, np.inf, np.isfinite(sup), c.anchor)
        elif c.kind == "bounded-integral":
            th = 2 * np.pi * np.arange(256) / 256
            for r in PROFILE_RADII:
                sup = float(np.max(np.abs(entry.f2.integral(r * np.exp(1j * th)))))
                row(f"{c.key}/r={r}", "observed sup |int 1/f1^2|", sup, np.inf,
                    np.isfinite(sup), c.anchor)
        elif c.kind in ("divergent", "stable"):
            prof = growth_profile(entry.A, 2.0)
            v = verdict(prof)
            want = "growing" if c.kind == "divergent" else "stabilized"
            for r, pv in zip(PROFILE_RADII, prof):
                row(f"{c.key}/r={r}", "sup|A|(1-r^2)^2", pv, np.inf, True, c.anchor)
            if want == "growing":
                row(f"{c.key}/verdict", "profile ratio r=0.999 vs r=0.9", prof[-1] / prof[0],
                    GROWTH_FACTOR, v == want, c.anchor)
            else:
                row(f"{c.key}/verdict", "profile spread (max-min)/max",
                    (prof.max() - prof.min()) / prof.max(), STABLE_SPREAD, v == want, c.anchor)
    return rows
