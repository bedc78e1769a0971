"""Integration of f'' + A f = 0 along paths in the disc."""

from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.special import roots_legendre

from . import _kernels as K_
from .geometry import (
    DiscPoint,
    PathSpec,
    build_avoiding_path,
    euclidean_disc,
    pseudo_hyperbolic,
)
from .jets import Analytic, as_analytic, antiderivative, reexpand


class NumericalAbort(RuntimeError):
    """Integration or evaluation could not reach the requested accuracy."""


# --------------------------------------------------------------------------
# data types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class InitialData:
    z0: complex
    f0: complex
    f0_prime: complex

    def __post_init__(self):
        object.__setattr__(self, "z0", complex(DiscPoint(self.z0)))
        if self.f0 == 0 and self.f0_prime == 0:
            raise ValueError("initial data (0, 0) gives the trivial solution")


@dataclass(frozen=True, eq=False)
class SolutionTrace:
    """Accepted steps of one integration.

    ``f`` and ``fp`` have shape ``(n_samples, m)`` for ``m`` solutions
    integrated together.
    """

    path: PathSpec
    s: np.ndarray
    z: np.ndarray
    f: np.ndarray
    fp: np.ndarray
    tolerance: float
    achieved: float
    steps: int
    rejected: int
    w_samples: np.ndarray = None

    def column(self, j):
        return SolutionTrace(
            self.path, self.s, self.z, self.f[:, j : j + 1], self.fp[:, j : j + 1],
            self.tolerance, self.achieved, self.steps, self.rejected,
        )

    def wronskian(self, i=0, j=1):
        """Wronskian at every sample (the extended-precision value when kept)."""
        if self.w_samples is not None and (i, j) == (0, 1):
            return self.w_samples
        return self.f[:, i] * self.fp[:, j] - self.fp[:, i] * self.f[:, j]

    def at(self, s, A=None):
        """Dense output at arclength ``s`` by cubic Hermite interpolation.

        The derivative of ``f'`` needed for its own Hermite interpolant is
        ``-A f``; without ``A`` only ``f`` is interpolated and ``f'`` is
        linear.
        """
        s = float(s)
        k = int(np.clip(np.searchsorted(self.s, s, side="right") - 1, 0, len(self.s) - 2))
        s0, s1 = self.s[k], self.s[k + 1]
        h = s1 - s0
        t = (s - s0) / h if h > 0 else 0.0
        u = (self.z[k + 1] - self.z[k]) / h if h > 0 else 1.0
        h00, h10 = 2 * t**3 - 3 * t**2 + 1, t**3 - 2 * t**2 + t
        h01, h11 = -2 * t**3 + 3 * t**2, t**3 - t**2
        f = (h00 * self.f[k] + h10 * h * u * self.fp[k]
             + h01 * self.f[k + 1] + h11 * h * u * self.fp[k + 1])
        if A is None:
            fp = (1 - t) * self.fp[k] + t * self.fp[k + 1]
        else:
            a0, a1 = A(self.z[k]), A(self.z[k + 1])
            fp = (h00 * self.fp[k] - h10 * h * u * a0 * self.f[k]
                  + h01 * self.fp[k + 1] - h11 * h * u * a1 * self.f[k + 1])
        z = self.z[k] + (s - s0) * u
        return z, f, fp

    def to_table(self, column=0, sep=","):
        lines = [sep.join(["z_re", "z_im", "f_re", "f_im", "fp_re", "fp_im"])]
        for z, f, fp in zip(self.z, self.f[:, column], self.fp[:, column]):
            vals = (z.real, z.imag, f.real, f.imag, fp.real, fp.imag)
            lines.append(sep.join(format(float(v), ".17g") for v in vals))
        return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Dormand-Prince 5(4)
# --------------------------------------------------------------------------

_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4

SAFETY = 0.9
STEP_CAP = 0.05
BOUNDARY_MARGIN = 1e-6


def _integrate_polyline(Afun, vertices, f0, fp0, tol, h0=None):
    """Integrate the fundamental system along a polyline.

    ``f0`` and ``fp0`` are length-``m`` vectors (``m`` solutions at once).
    Returns arrays of arclength, z, f, f' plus step statistics.
    """
    verts = np.asarray(vertices, dtype=np.complex128)
    m = len(f0)
    y = np.concatenate([np.asarray(f0, complex), np.asarray(fp0, complex)])
    S, Z, Y = [0.0], [verts[0]], [y.copy()]
    s_total = 0.0
    worst = 0.0
    steps = rejected = 0
    err_prev = 1.0
    h = h0
    for p, q in zip(verts[:-1], verts[1:]):
        L = abs(q - p)
        if L == 0:
            continue
        u = (q - p) / L

        def rhs(s, y):
            zz = p + s * u
            a = Afun(zz)
            return u * np.concatenate([y[m:], -a * y[:m]])

        s = 0.0
        k1 = rhs(0.0, y)
        if h is None:
            h = min(1e-3, L)
        while s < L:
            z_here = p + s * u
            cap = STEP_CAP * (1.0 - abs(z_here))
            h = min(h, cap, L - s)
            if h < 1e-14 * (1.0 + s_total):
                raise NumericalAbort(
                    f"step size underflow at z = {z_here!r} (last good point); "
                    f"|A| = {abs(Afun(z_here)):.3e}"
                )
            ks = [k1]
            for i in range(1, 7):
                yi = y + h * sum(_A[i][j] * ks[j] for j in range(i))
                ks.append(rhs(s + _C[i] * h, yi))
            y5 = y + h * sum(_B5[j] * ks[j] for j in range(7) if _B5[j] != 0)
            errv = h * sum(_E[j] * ks[j] for j in range(7) if _E[j] != 0)
            scale = tol + tol * np.maximum(np.abs(y), np.abs(y5))
            err = float(np.max(np.abs(errv) / scale))
            if not np.isfinite(err):
                h *= 0.2
                rejected += 1
                continue
            if err <= 1.0:
                s_new = s + h
                if L - s_new < 1e-15 * L:
                    s_new = L
                s = s_new
                y = y5
                k1 = ks[6]
                steps += 1
                worst = max(worst, err)
                S.append(s_total + s)
                Z.append(p + s * u if s < L else q)
                Y.append(y.copy())
                fac = SAFETY * max(err, 1e-10) ** (-0.7 / 5) * err_prev ** (0.4 / 5)
                err_prev = max(err, 1e-4)
                h *= min(5.0, max(0.2, fac))
            else:
                rejected += 1
                h *= max(0.2, SAFETY * err ** (-1 / 5))
        s_total += L
    Y = np.asarray(Y)
    return np.asarray(S), np.asarray(Z), Y[:, :m], Y[:, m:], worst * tol, steps, rejected


def _integrate_polyline_mp(Afun, vertices, f0, fp0, digits, ratio=0.2, max_order=200):
    """Taylor-series stepping of the fundamental system in ``digits`` precision.

    The coefficients of ``A`` are taken in double precision at each step
    centre.  Each step solves the equation with that polynomial coefficient
    to ``digits`` accuracy, so the Wronskian is conserved far beyond what
    double-precision state vectors allow when solutions grow large.
    """
    import mpmath

    verts = np.asarray(vertices, dtype=np.complex128)
    m = len(f0)
    S, Z, F, Fp, W = [0.0], [verts[0]], [], [], []
    s_total = 0.0
    steps = 0
    with mpmath.workdps(digits):
        eps = mpmath.mpf(10) ** (-digits)
        f = [mpmath.mpc(complex(x)) for x in f0]
        fp = [mpmath.mpc(complex(x)) for x in fp0]

        def record():
            F.append([complex(x) for x in f])
            Fp.append([complex(x) for x in fp])
            if m == 2:
                W.append(complex(f[0] * fp[1] - fp[0] * f[1]))

        record()
        for p, q in zip(verts[:-1], verts[1:]):
            L = abs(q - p)
            if L == 0:
                continue
            u = (q - p) / L
            s = 0.0
            z = complex(p)
            while s < L:
                h = min(ratio * (1.0 - abs(z)), L - s)
                if h < 1e-14:
                    raise NumericalAbort(f"step size underflow at z = {z!r}")
                s_new = s + h if L - (s + h) > 1e-15 * L else L
                z_new = complex(q) if s_new == L else complex(p + s_new * u)
                dz = mpmath.mpc(z_new) - mpmath.mpc(z)
                N = max_order
                hh = mpmath.mpf(h)
                a = [mpmath.mpc(complex(x)) for x in Afun.taylor(np.array([z]), N)[0]]
                new_f, new_fp = [], []
                for col in range(m):
                    c = [f[col], fp[col]]
                    val = c[0] + c[1] * dz
                    der = c[1]
                    pw = dz
                    small = 0
                    for k in range(N - 2):
                        ck = -mpmath.fdot(a[: k + 1], c[k::-1]) / ((k + 2) * (k + 1))
                        c.append(ck)
                        dterm = (k + 2) * ck * pw
                        pw *= dz
                        term = ck * pw
                        der += dterm
                        val += term
                        tiny = abs(term) + abs(dterm) * hh <= eps * (abs(val) + abs(der) * hh)
                        small = small + 1 if tiny else 0
                        if small >= 3:
                            break
                    else:
                        raise NumericalAbort(f"Taylor series did not converge at z = {z!r}")
                    new_f.append(val)
                    new_fp.append(der)
                f, fp = new_f, new_fp
                s, z = s_new, z_new
                steps += 1
                S.append(s_total + s)
                Z.append(z)
                record()
            s_total += L
    W = np.asarray(W) if m == 2 else None
    return np.asarray(S), np.asarray(Z), np.asarray(F), np.asarray(Fp), steps, W


def _check_path(path):
    for v in path.vertices:
        if abs(v) > 1.0 - BOUNDARY_MARGIN:
            raise NumericalAbort(f"path vertex {v!r} is within {BOUNDARY_MARGIN} of the boundary")


def _as_path(path, z0):
    if isinstance(path, PathSpec):
        return path
    if np.isscalar(path):
        return PathSpec((complex(z0), complex(path)))
    return PathSpec(tuple(complex(v) for v in path))


def integrate(A, init, path, tol=1e-10):
    """Adaptive Dormand-Prince integration of one solution along ``path``.

    ``path`` is a :class:`PathSpec`, a vertex sequence, or a single end point
    (straight segment from ``init.z0``).
    """
    A = as_analytic(A)
    path = _as_path(path, init.z0)
    if abs(path.start - init.z0) > 1e-15:
        raise ValueError("path does not start at the initial point")
    _check_path(path)
    S, Z, F, Fp, ach, n, rej = _integrate_polyline(
        A, path.vertices, [init.f0], [init.f0_prime], tol
    )
    return SolutionTrace(path, S, Z, F, Fp, tol, ach, n, rej)


def integrate_system(A, z0, F0, Fp0, path, tol=1e-10, digits=None):
    """Integrate several solutions together (shared steps).

    With ``digits`` set, Taylor-series stepping in that many decimal digits
    replaces the double-precision Runge-Kutta stepper.
    """
    A = as_analytic(A)
    path = _as_path(path, z0)
    _check_path(path)
    if digits is None:
        S, Z, F, Fp, ach, n, rej = _integrate_polyline(A, path.vertices, F0, Fp0, tol)
        return SolutionTrace(path, S, Z, F, Fp, tol, ach, n, rej)
    S, Z, F, Fp, n, W = _integrate_polyline_mp(A, path.vertices, F0, Fp0, digits)
    return SolutionTrace(path, S, Z, F, Fp, 10.0 ** -digits, 10.0 ** -digits, n, 0, W)


def ode_taylor(a, f0, fp0):
    """Taylor coefficients of a solution from those of ``A`` (shape ``(n, K)``)."""
    a = np.asarray(a, dtype=np.complex128)
    n, K = a.shape
    c = np.zeros((n, K), dtype=np.complex128)
    c[:, 0] = f0
    if K > 1:
        c[:, 1] = fp0
    for k in range(K - 2):
        acc = np.sum(a[:, : k + 1] * c[:, k::-1], axis=1)
        c[:, k + 2] = -acc / ((k + 2) * (k + 1))
    return c


def radial_paths(z0=0.0, r=0.9, count=8):
    th = 2 * np.pi * np.arange(count) / count
    return [PathSpec((complex(z0), complex(r * np.exp(1j * t)))) for t in th]


# --------------------------------------------------------------------------
# bases
# --------------------------------------------------------------------------

@dataclass(eq=False)
class SolutionBasis:
    f1: Analytic
    f2: Analytic
    wronskian: complex
    traces: list = field(default_factory=list)
    A: Analytic = None

    def __post_init__(self):
        if self.wronskian == 0:
            raise ValueError("a basis needs a nonzero Wronskian")

    def jets(self, z, order=2):
        return self.f1.jet(z, order), self.f2.jet(z, order)

    def wronskian_error(self, z):
        j1, j2 = self.jets(z, 1)
        w = j1.value * j2.d1 - j1.d1 * j2.value
        return float(np.max(np.abs(w - self.wronskian)) / abs(self.wronskian))

    def change(self, a, b, c, d):
        """Basis ``(a f1 + b f2, c f1 + d f2)``."""
        return SolutionBasis(
            a * self.f1 + b * self.f2, c * self.f1 + d * self.f2,
            (a * d - b * c) * self.wronskian, A=self.A,
        )


class _PropagatedFundamental:
    """Shared state for the two providers of :func:`propagate_basis`."""

    def __init__(self, A, traces, tol):
        self.A = A
        self.traces = traces
        self.tol = tol
        self.Z = np.concatenate([t.z for t in traces])
        self.F = np.concatenate([t.f for t in traces])
        self.Fp = np.concatenate([t.fp for t in traces])
        self._cache = {}

    def state(self, z):
        key = complex(z)
        if key not in self._cache:
            k = int(np.argmin(np.abs(self.Z - key)))
            if abs(self.Z[k] - key) < 1e-15:
                f, fp = self.F[k], self.Fp[k]
            else:
                _, _, F, Fp, *_ = _integrate_polyline(
                    self.A, [self.Z[k], key], self.F[k], self.Fp[k], self.tol
                )
                f, fp = F[-1], Fp[-1]
            self._cache[key] = (f, fp)
        return self._cache[key]


class ODEProvider(Analytic):
    descriptor = "ode-trace"

    def __init__(self, shared, column):
        self.shared = shared
        self.column = column

    def _series(self, z, K):
        st = [self.shared.state(zz) for zz in z]
        f0 = np.array([s[0][self.column] for s in st])
        fp0 = np.array([s[1][self.column] for s in st])
        a = self.shared.A._series(z, max(K - 2, 1))
        if a.shape[1] < K:
            a = np.pad(a, ((0, 0), (0, K - a.shape[1])))
        return ode_taylor(a, f0, fp0)


def propagate_basis(A, z0=0.0, path_family=None, tol=1e-10, digits=None):
    """Fundamental system with initial jets (1, 0) and (0, 1) at ``z0``.

    Both solutions are integrated together along each path of the family,
    so the Wronskian is available at every accepted step.  ``digits``
    switches the traces to extended-precision Taylor stepping, needed when
    the solutions grow so large that ``f1 f2' - f1' f2`` cancels below
    double precision.
    """
    A = as_analytic(A)
    z0 = complex(DiscPoint(z0))
    if path_family is None:
        path_family = radial_paths(z0)
    traces = [integrate_system(A, z0, [1.0, 0.0], [0.0, 1.0], _as_path(p, z0), tol, digits)
              for p in path_family]
    shared = _PropagatedFundamental(A, traces, tol)
    return SolutionBasis(ODEProvider(shared, 0), ODEProvider(shared, 1), 1.0 + 0j, traces, A)


# --------------------------------------------------------------------------
# reduction of order
# --------------------------------------------------------------------------

_GL_X, _GL_W = roots_legendre(16)
PANEL_RATIO = 0.5
MIN_MODULUS = 1e-12


def exclusion_radius(zeros, cap=0.2):
    """Half the smallest pairwise pseudo-hyperbolic gap, capped."""
    z = np.atleast_1d(np.asarray(zeros, dtype=np.complex128))
    if len(z) < 2:
        return cap
    rho = pseudo_hyperbolic(z[:, None], z[None, :])
    np.fill_diagonal(rho, np.inf)
    return float(min(cap, 0.5 * rho.min()))


def _gl(g, a, b):
    """Gauss-Legendre sums of g and |g| over panels [a, b]."""
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    pts = mid[:, None] + half[:, None] * _GL_X[None, :]
    vals = g(pts)
    # row sums rather than a BLAS product: the result must not depend on how
    # many panels share the call, or finite differences of f2 pick up noise
    return (half * (vals * _GL_W).sum(axis=1), np.abs(half) * (np.abs(vals) * _GL_W).sum(axis=1),
            pts, vals)


def _dist_to_points(a, b, pts):
    if len(pts) == 0:
        return np.full(a.shape, np.inf)
    d = b - a
    out = np.full(a.shape, np.inf)
    for c in pts:
        t = np.clip(((c - a) * np.conj(d)).real / np.maximum(np.abs(d) ** 2, 1e-300), 0, 1)
        out = np.minimum(out, np.abs(a + t * d - c))
    return out


def path_integrals(g, a, b, owner, n_owner, singular=(), rtol=1e-13, guard=None):
    """Sum of ``∫ g dz`` over straight pieces ``a -> b`` grouped by ``owner``.

    Pieces are first cut so that every panel is short compared with its
    distance to the boundary and to ``singular`` points, then bisected
    until 16-point Gauss-Legendre agrees with its two halves.
    """
    a, b, owner = (np.asarray(x) for x in (a, b, owner))
    sing = np.asarray(singular, dtype=np.complex128)
    # geometric pre-splitting
    while True:
        L = np.abs(b - a)
        room = np.minimum(1.0 - np.maximum(np.abs(a), np.abs(b)), _dist_to_points(a, b, sing))
        split = L > PANEL_RATIO * room
        if not np.any(split):
            break
        m = 0.5 * (a + b)
        a = np.concatenate([a[~split], a[split], m[split]])
        b = np.concatenate([b[~split], m[split], b[split]])
        owner = np.concatenate([owner[~split], owner[split], owner[split]])
    total = np.zeros(n_owner, dtype=np.complex128)
    while len(a):
        m = 0.5 * (a + b)
        I0, _, p0, v0 = _gl(g, a, b)
        Il, Al, pl, vl = _gl(g, a, m)
        Ir, Ar, pr, vr = _gl(g, m, b)
        if guard is not None:
            guard(np.concatenate([p0.ravel(), pl.ravel(), pr.ravel()]))
        ok = np.abs(I0 - (Il + Ir)) <= rtol * (Al + Ar)
        stuck = ~ok & (np.abs(b - a) < 1e-9)
        if np.any(stuck):
            # panels this short fail to converge only next to a pole of g
            k = int(np.argmax(stuck))
            raise NumericalAbort(
                f"quadrature stalled near {complex(m[k])!r}; an unlisted zero of f1 may lie on the path"
            )
        np.add.at(total, owner[ok], (Il + Ir)[ok])
        bad = ~ok
        a, b, owner = (
            np.concatenate([a[bad], m[bad]]),
            np.concatenate([m[bad], b[bad]]),
            np.concatenate([owner[bad], owner[bad]]),
        )
    return total


class ReductionOfOrder(Analytic):
    """Second solution ``f2 = f1 ∫_alpha^z dζ/f1(ζ)^2`` (so ``W(f1, f2) = 1``).

    Paths avoid the exclusion discs, whose centres are taken as the simple
    zeros of ``f1``.  Close to a zero ``z_n`` the integrand has a double
    pole; there ``f2`` is built from the Laurent expansion of ``1/f1^2``
    about ``z_n``, matched to the quadrature value at a nearby point, which
    yields an ordinary Taylor series of ``f2`` at ``z_n``.
    """

    descriptor = "reduction-of-order"

    def __init__(self, f1, alpha=0.0, exclusions=(), local_order=32, rtol=1e-13):
        self.f1 = as_analytic(f1)
        self.alpha = complex(DiscPoint(alpha))
        self.exclusions = tuple((complex(DiscPoint(c)), float(d)) for c, d in exclusions)
        for c, d in self.exclusions:
            if pseudo_hyperbolic(c, self.alpha) < d:
                raise ValueError(f"alpha {self.alpha} lies inside the exclusion disc at {c}")
        self.local_order = local_order
        self.rtol = rtol
        self.zeros = [c for c, _ in self.exclusions]
        self.residues = {}
        self._local = {}

    # quadrature ----------------------------------------------------------
    def _g(self, pts):
        f = self.f1(pts)
        a = np.abs(f)
        k = int(np.argmin(a)) if a.size else 0
        if a.size and a.flat[k] < MIN_MODULUS:
            raise NumericalAbort(
                f"|f1| = {a.flat[k]:.3e} below {MIN_MODULUS} at path point {pts.flat[k]!r}"
            )
        return 1.0 / (f * f)

    def _needs_detour(self, z):
        need = np.zeros(z.shape, dtype=bool)
        grow = 1.0 / np.cos(np.pi / 32) * (1 + 2e-6)
        for c, d in self.exclusions:
            ce, R = euclidean_disc(c, d)
            R *= grow
            inside = pseudo_hyperbolic(c, z) < d
            dvec = z - self.alpha
            t = np.clip(((ce - self.alpha) * np.conj(dvec)).real / np.maximum(np.abs(dvec) ** 2, 1e-300), 0, 1)
            near = np.abs(self.alpha + t * dvec - ce) <= R
            # targets inside the disc: detour only if the chord passes close to the zero
            tc = np.clip(((c - self.alpha) * np.conj(dvec)).real / np.maximum(np.abs(dvec) ** 2, 1e-300), 0, 1)
            close = np.abs(self.alpha + tc * dvec - c) < 0.5 * np.abs(z - c)
            need |= np.where(inside, close, near)
        return need

    def integral(self, z):
        """``∫_alpha^z dζ/f1^2`` along an avoiding path, vectorised over ``z``."""
        z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
        need = self._needs_detour(z)
        A, B, O = [], [], []
        # straight targets on a common ray from alpha share the path prefix:
        # integrate between consecutive targets and accumulate
        straight = np.flatnonzero(~need)
        d = z[straight] - self.alpha
        ray = np.round(np.angle(d) * 1e9)
        order = straight[np.lexsort((np.abs(d), ray))]
        ray_sorted = np.round(np.angle(z[order] - self.alpha) * 1e9)
        first = np.ones(len(order), dtype=bool)
        first[1:] = ray_sorted[1:] != ray_sorted[:-1]
        prev = np.empty(len(order), dtype=np.complex128)
        prev[first] = self.alpha
        prev[~first] = z[order][np.flatnonzero(~first) - 1]
        A.append(prev)
        B.append(z[order])
        O.append(order)
        for i in np.flatnonzero(need):
            v = np.asarray(build_avoiding_path(self.alpha, z[i], self.exclusions, radial_entry=True).vertices)
            A.append(v[:-1])
            B.append(v[1:])
            O.append(np.full(len(v) - 1, i))
        a, b, o = np.concatenate(A), np.concatenate(B), np.concatenate(O)
        keep = a != b
        total = path_integrals(self._g, a[keep], b[keep], o[keep], len(z), self.zeros, self.rtol)
        bounds = np.append(np.flatnonzero(first), len(order))
        for s0, s1 in zip(bounds[:-1], bounds[1:]):
            if s1 - s0 > 1:
                idx = order[s0:s1]
                total[idx] = np.cumsum(total[idx])
        return total

    # local expansion at a zero ------------------------------------------
    def local_radius(self, i):
        return self.exclusions[i][1] / 4.0

    def _local_series(self, i):
        if i in self._local:
            return self._local[i]
        zn = self.zeros[i]
        M = self.local_order
        F = self.f1._series(np.array([zn]), M + 2)[0]
        if abs(F[0]) > 1e-8 * max(1.0, abs(F[1])):
            self._local[i] = None
            return None
        q = F[1 : M + 2].reshape(1, -1)
        one = np.zeros_like(q)
        one[0, 0] = 1.0
        d = K_.series_div(one, K_.series_mul(q, q))[0]
        self.residues[zn] = complex(d[1])
        j = np.arange(2, M + 1)
        # match the regular part at a point on the local circle facing alpha
        direction = (self.alpha - zn) / abs(self.alpha - zn) if self.alpha != zn else 1.0
        eps = 0.9 * self.local_radius(i) * (1.0 - abs(zn) ** 2) * direction
        G = -d[0] / eps + np.sum(d[2:] * eps ** (j - 1) / (j - 1))
        Kc = self.integral(np.array([zn + eps]))[0] - G
        P = np.zeros(M + 1, dtype=np.complex128)
        P[0] = -d[0]
        P[1] = Kc
        P[2:] = d[2:] / (j - 1)
        f2 = K_.series_mul(q, P.reshape(1, -1))[0]
        self._local[i] = f2
        return f2

    def _series(self, z, K):
        out = np.empty((z.shape[0], K), dtype=np.complex128)
        far = np.ones(z.shape[0], dtype=bool)
        for i, zn in enumerate(self.zeros):
            near = far & (pseudo_hyperbolic(zn, z) <= self.local_radius(i))
            if np.any(near):
                loc = self._local_series(i)
                if loc is not None:
                    out[near] = reexpand(loc, z[near] - zn, K)
                    far &= ~near
        if np.any(far):
            zf = z[far]
            I = self.integral(zf)
            f1s = self.f1._series(zf, K)
            if K > 1:
                one = np.zeros((len(zf), K - 1), dtype=np.complex128)
                one[:, 0] = 1.0
                f1k = f1s[:, : K - 1]
                g = K_.series_div(one, K_.series_mul(f1k, f1k))
                Iser = antiderivative(g, I)
            else:
                Iser = I.reshape(-1, 1)
            out[far] = K_.series_mul(f1s, Iser)
        return out


def second_solution(f1, alpha, z, exclusions=()):
    """``f1(z) ∫_alpha^z dζ/f1(ζ)^2`` along a zero-avoiding path."""
    return ReductionOfOrder(f1, alpha, exclusions)(z)


def reduction_basis(f1, alpha=0.0, exclusions=(), A=None):
    return SolutionBasis(
        as_analytic(f1), ReductionOfOrder(f1, alpha, exclusions), 1.0 + 0j,
        A=None if A is None else as_analytic(A),
    )


# --------------------------------------------------------------------------
# diagnostics
# --------------------------------------------------------------------------

def _points(grid):
    if hasattr(grid, "points"):
        return np.asarray(grid.points).ravel()
    return np.atleast_1d(np.asarray(grid, dtype=np.complex128)).ravel()


def residual(A, f, grid):
    """``max |f'' + A f| / (1 + |f|)`` over the grid nodes."""
    z = _points(grid)
    A, f = as_analytic(A), as_analytic(f)
    j = f.jet(z, 2)
    r = np.abs(j.d2 + A(z) * j.value) / (1.0 + np.abs(j.value))
    return float(np.max(r))


def find_zeros(f, grid, r_max=None, tol=1e-10, dedupe=1e-6, max_iter=60):
    """Zeros of ``f`` seeded at local minima of ``|f|`` on a polar grid.

    Returns the converged roots with ``|f| <= tol`` inside ``|z| < r_max``;
    seeds that fail to converge are dropped.
    """
    f = as_analytic(f)
    P = np.asarray(grid.points)
    r_max = grid.r_max if r_max is None else r_max
    V = np.abs(f(P))
    nb = []
    for dr in (-1, 0, 1):
        for dt in (-1, 0, 1):
            if dr == dt == 0:
                continue
            shifted = np.roll(V, dt, axis=1)
            if dr == -1:
                shifted = np.vstack([np.full((1, V.shape[1]), np.inf), shifted[:-1]])
            elif dr == 1:
                shifted = np.vstack([shifted[1:], np.full((1, V.shape[1]), np.inf)])
            nb.append(shifted)
    is_min = np.all([V <= s for s in nb], axis=0)
    z = P[is_min].astype(np.complex128)
    active = np.ones(len(z), dtype=bool)
    for _ in range(max_iter):
        if not np.any(active):
            break
        idx = np.flatnonzero(active)
        # Newton on f/f', which stays quadratic at multiple zeros
        j = f.jet(z[idx], 2)
        den = j.d1**2 - j.value * j.d2
        ok = den != 0
        step = np.zeros(len(idx), dtype=np.complex128)
        step[ok] = j.value[ok] * j.d1[ok] / den[ok]
        znew = z[idx] - step
        inside = np.abs(znew) < 1
        z[idx[inside]] = znew[inside]
        small = np.abs(step) < 1e-15 * np.maximum(1.0, np.abs(znew))
        active[idx[~ok | ~inside | small]] = False
    roots = []
    keep = np.abs(z) < r_max
    if np.any(keep):
        vals = np.abs(f(z[keep]))
        for zz, v in zip(z[keep], vals):
            if v <= tol and all(pseudo_hyperbolic(zz, w) > dedupe for w in roots):
                roots.append(complex(zz))
    return roots
