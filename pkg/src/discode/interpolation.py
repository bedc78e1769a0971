"""Finite-node bounded interpolation and the constructive equations built on it.

The interpolants are Lagrange-type sums of normalized Blaschke products,
``h(z) = Σ_n w_n B_n(z)/B_n(z_n)`` with ``B_n`` vanishing on the other
nodes.  They are exact at the nodes and come with the a-priori norm bound
``Σ |w_n| / Π_{k≠n} ρ_p(z_k, z_n)``.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from . import _kernels as K_
from . import jets as J
from .blaschke import FiniteBlaschke, separation_constant
from .gallery import circle_sup, default_grid
from .geometry import DiscPoint, make_grid, pseudo_hyperbolic
from .ode import ReductionOfOrder, SolutionBasis, exclusion_radius, find_zeros, residual
from .records import AuditRow

LIMITATION = ("finite-node Lagrange-Blaschke surrogate; Earl's Blaschke-form "
              "interpolant is not reconstructed")
FIXED_POINT_MULTIPLIER = {"attractive": 0.5, "neutral": 1.0, "repulsive": 2.0}
REMOVABLE_RADIUS = 1e-2


def _nodes(nodes):
    z = np.atleast_1d(np.asarray(nodes, dtype=np.complex128)).ravel()
    for p in z:
        DiscPoint(p)
    if len(z) == 0:
        raise ValueError("at least one node is required")
    if len(z) > 1:
        separation_constant(z)  # raises on duplicates
    return z


@dataclass(frozen=True, eq=False)
class InterpolationProblem:
    nodes: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        z = _nodes(self.nodes)
        w = np.atleast_1d(np.asarray(self.targets, dtype=np.complex128)).ravel()
        if len(w) != len(z):
            raise ValueError("nodes and targets differ in length")
        object.__setattr__(self, "nodes", z)
        object.__setattr__(self, "targets", w)

    @property
    def separation(self):
        return separation_constant(self.nodes)


@dataclass(frozen=True, eq=False)
class HermiteProblem:
    nodes: np.ndarray
    values: np.ndarray
    derivatives: np.ndarray

    def __post_init__(self):
        z = _nodes(self.nodes)
        v = np.atleast_1d(np.asarray(self.values, dtype=np.complex128)).ravel()
        d = np.atleast_1d(np.asarray(self.derivatives, dtype=np.complex128)).ravel()
        if not len(z) == len(v) == len(d):
            raise ValueError("nodes, values and derivatives differ in length")
        object.__setattr__(self, "nodes", z)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "derivatives", d)


@dataclass(frozen=True, eq=False)
class FixedPointSpec:
    nodes: np.ndarray
    types: tuple

    def __post_init__(self):
        z = _nodes(self.nodes)
        if np.any(z == 0):
            raise ValueError("fixed-point nodes must differ from 0")
        types = tuple(self.types)
        if len(types) != len(z):
            raise ValueError("nodes and types differ in length")
        bad = [t for t in types if t not in FIXED_POINT_MULTIPLIER]
        if bad:
            raise ValueError(f"unknown fixed-point type(s) {bad}; use {sorted(FIXED_POINT_MULTIPLIER)}")
        object.__setattr__(self, "nodes", z)
        object.__setattr__(self, "types", types)

    @property
    def multipliers(self):
        return np.array([FIXED_POINT_MULTIPLIER[t] for t in self.types])


# --------------------------------------------------------------------------
# normalized node products
# --------------------------------------------------------------------------

class NodeProduct(J.Analytic):
    """``Π_{k≠n} φ_{z_k}(z)/φ_{z_k}(z_n)``: 1 at ``z_n``, 0 at the other nodes."""

    descriptor = "node-product"

    def __init__(self, nodes, n):
        nodes = np.asarray(nodes, dtype=np.complex128)
        self.node = complex(nodes[n])
        self.others = np.ascontiguousarray(np.delete(nodes, n))
        # unimodular factor conventions cancel in the ratio
        self.scale = 1.0
        if len(self.others):
            self.scale = complex(K_.blaschke_taylor(np.array([self.node]), self.others, 1)[0, 0])

    def _series(self, z, K):
        if len(self.others) == 0:
            out = np.zeros((z.shape[0], K), dtype=np.complex128)
            out[:, 0] = 1.0
            return out
        return K_.blaschke_taylor(np.ascontiguousarray(z), self.others, K) / self.scale


def _deleted_products(nodes):
    z = np.asarray(nodes)
    rho = pseudo_hyperbolic(z[:, None], z[None, :])
    np.fill_diagonal(rho, 1.0)
    return np.prod(rho, axis=1)


@dataclass(frozen=True)
class NormReport:
    boundary_sup: float
    argmax: complex
    a_priori_bound: float
    node_error: float
    limitation: str = LIMITATION


class LagrangeBlaschke(J.Analytic):
    descriptor = "lagrange-blaschke"

    def __init__(self, nodes, targets):
        self.nodes = np.asarray(nodes, dtype=np.complex128)
        self.targets = np.asarray(targets, dtype=np.complex128)
        self.products = [NodeProduct(self.nodes, n) for n in range(len(self.nodes))]

    def _series(self, z, K):
        out = np.zeros((z.shape[0], K), dtype=np.complex128)
        for w, Pn in zip(self.targets, self.products):
            if w != 0:
                out += w * Pn._series(z, K)
        return out

    def numerator(self):
        """Polynomial ``N`` with ``h = N / Π_k (1 - conj(z_k) z)`` (ascending coefficients)."""
        z = self.nodes
        num = np.zeros(1, dtype=np.complex128)
        for n, w in enumerate(self.targets):
            if w == 0:
                continue
            c = w / _phi_product(z, n)
            poly = np.array([1.0, -np.conj(z[n])], dtype=np.complex128)
            for k in range(len(z)):
                if k != n:
                    poly = P.polymul(poly, [z[k], -1.0])
            num = P.polyadd(num, c * poly)
        return num

    def zeros(self, polish=8):
        """Zeros of ``h`` inside the disc, from the numerator polynomial."""
        num = np.trim_zeros(self.numerator(), "b")
        if len(num) <= 1:
            return np.zeros(0, dtype=np.complex128)
        roots = P.polyroots(num)
        roots = roots[np.abs(roots) < 1 - 1e-12]
        out = []
        for r in roots:
            for _ in range(polish):
                j = self.jet(np.array([r]), 1)
                if j.d1[0] == 0:
                    break
                r = r - j.value[0] / j.d1[0]
            out.append(complex(r))
        return np.asarray(out, dtype=np.complex128)


def _phi_product(z, n):
    """``Π_{k≠n} φ_{z_k}(z_n)`` with ``φ_a(z) = (a-z)/(1-conj(a)z)``."""
    out = 1.0 + 0j
    for k in range(len(z)):
        if k != n:
            out *= (z[k] - z[n]) / (1 - np.conj(z[k]) * z[n])
    return out


def lagrange_blaschke_solve(problem):
    """Interpolant ``h`` with ``h(z_n) = w_n`` and its norm report.

    ``boundary_sup`` is ``max |h|`` on the unit circle (``h`` is analytic
    across it), so it is the H^∞ norm up to the angular sampling.
    """
    if not isinstance(problem, InterpolationProblem):
        problem = InterpolationProblem(*problem)
    h = LagrangeBlaschke(problem.nodes, problem.targets)
    sup, arg = circle_sup(lambda x: np.abs(h(x)), 1.0)
    bound = float(np.sum(np.abs(problem.targets) / _deleted_products(problem.nodes)))
    err = float(np.max(np.abs(h(problem.nodes) - problem.targets)))
    return h, NormReport(sup, arg, bound, err)


def earl_eta(delta):
    """Largest ``η`` in (0,1) with ``12η/(1-η)^2 < δ/2``.

    The boundary value is the small root of ``η^2 - (2 + 24/δ)η + 1 = 0``,
    computed as ``1/(b + sqrt(b^2-1))`` to avoid cancellation; it is then
    lowered ulp by ulp until the strict inequality holds in floating point.
    """
    delta = float(delta)
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0,1]")
    b = 1.0 + 12.0 / delta
    eta = 1.0 / (b + np.sqrt(b * b - 1.0))
    while not 12 * eta / (1 - eta) ** 2 < delta / 2:
        eta = np.nextafter(eta, 0.0)
    return float(eta)


# --------------------------------------------------------------------------
# osculating interpolation
# --------------------------------------------------------------------------

class HermiteInterpolant(J.Analytic):
    """``Σ_n (a_n + b_n φ_{z_n}(z)) P_n(z)^2`` with ``P_n`` the node products."""

    descriptor = "hermite-blaschke"

    def __init__(self, nodes, a, b):
        self.nodes = np.asarray(nodes, dtype=np.complex128)
        self.a = np.asarray(a, dtype=np.complex128)
        self.b = np.asarray(b, dtype=np.complex128)
        self.products = [NodeProduct(self.nodes, n) for n in range(len(self.nodes))]

    def _series(self, z, K):
        out = np.zeros((z.shape[0], K), dtype=np.complex128)
        for zn, an, bn, Pn in zip(self.nodes, self.a, self.b, self.products):
            p = Pn._series(z, K)
            lin = bn * J.mobius(zn)._series(z, K)
            lin[:, 0] += an
            out += K_.series_mul(lin, K_.series_mul(p, p))
        return out


def hermite_solve(problem):
    """``g`` with ``g(z_n) = v_n`` and ``g'(z_n) = d_n``.

    At ``z_n`` every other term vanishes to second order, so the conditions
    decouple into the triangular system ``a_n = v_n``,
    ``b_n φ'_{z_n}(z_n) + 2 a_n P_n'(z_n) = d_n`` with ``φ'_{a}(a) = -1/(1-|a|^2)``.
    """
    if not isinstance(problem, HermiteProblem):
        problem = HermiteProblem(*problem)
    z = problem.nodes
    a = problem.values.copy()
    b = np.empty_like(a)
    for n, zn in enumerate(z):
        dP = NodeProduct(z, n).jet(np.array([zn]), 1).d1[0]
        M = np.array([[1.0, 0.0], [2 * dP, -1.0 / (1 - abs(zn) ** 2)]], dtype=np.complex128)
        a[n], b[n] = np.linalg.solve(M, [problem.values[n], problem.derivatives[n]])
    return HermiteInterpolant(z, a, b)


# --------------------------------------------------------------------------
# constructions
# --------------------------------------------------------------------------

def _off_discs(z, centres, radius):
    keep = np.ones(z.shape, dtype=bool)
    for c in centres:
        keep &= pseudo_hyperbolic(c, z) > radius
    return keep


def _residual_rows(tag, A, f, centres, grid, far_tol=1e-8, near_tol=1e-6):
    z = grid.points.ravel() if hasattr(grid, "points") else np.asarray(grid)
    keep = _off_discs(z, centres, REMOVABLE_RADIUS)
    rows = [AuditRow.upper(f"{tag}/residual", "max|f''+Af|/(1+|f|) off removable discs",
                           residual(A, f, z[keep]), far_tol, "A = -f''/f is analytic")]
    near = []
    for c in centres:
        # rings inside the removable-singularity discs plus the centre itself
        th = 2 * np.pi * np.arange(16) / 16
        for s in (0.0, 1e-4, 1e-3, 5e-3, 9e-3):
            pts = (c + s * np.exp(1j * th)) / (1 + np.conj(c) * s * np.exp(1j * th))
            near.append(pts)
    if near:
        v = residual(A, f, np.concatenate(near))
        rows.append(AuditRow.upper(f"{tag}/residual-near", "max|f''+Af|/(1+|f|) inside removable discs",
                                   v, near_tol, "removable singularities of A"))
    return rows


def _pick_alpha(exclusions):
    for cand in [0.0] + [0.5 * np.exp(2j * np.pi * k / 8) for k in range(8)]:
        if all(pseudo_hyperbolic(c, cand) >= d * (1 + 1e-9) for c, d in exclusions):
            return complex(cand)
    raise ValueError("no admissible base point for the reduction of order")


@dataclass(eq=False)
class Construction:
    A: J.Analytic
    f1: J.Analytic
    f2: J.Analytic = None
    parts: dict = field(default_factory=dict)
    audits: list = field(default_factory=list)

    @property
    def basis(self):
        if self.f2 is None:
            raise ValueError("this construction has no second solution")
        return SolutionBasis(self.f1, self.f2, 1.0 + 0j, A=self.A)

    @property
    def passed(self):
        return all(r.passed for r in self.audits)


def prescribed_zero_equation(zeros, grid=None):
    """``f1 = B e^{B k}`` with ``k(z_n) = -B''(z_n)/(2 B'(z_n)^2)``.

    Then ``f1''(z_n) = 0`` at every zero, so ``A = -f1''/f1`` is analytic;
    ``f2`` comes from reduction of order (``W = 1``).
    """
    lam = _nodes(zeros)
    B = FiniteBlaschke(lam)
    jb = B.jet(lam, 2)
    k, krep = lagrange_blaschke_solve(InterpolationProblem(lam, -jb.d2 / (2 * jb.d1**2)))
    f1 = B * J.exp(B * k)
    A = J.RemovableQuotient(-f1.derivative(2), f1, lam, radius=REMOVABLE_RADIUS)
    delta = exclusion_radius(lam)
    excl = tuple((complex(c), delta) for c in lam)
    f2 = ReductionOfOrder(f1, _pick_alpha(excl), excl)
    grid = default_grid() if grid is None else grid

    rows = _residual_rows("zeros", A, f1, lam, grid)
    j1 = f1.jet(lam, 2)
    f2v = f2(lam)
    for n, c in enumerate(lam):
        tag = f"zeros/z{n}"
        rows.append(AuditRow.upper(f"{tag}/value", "|f1(z_n)|", abs(j1.value[n]), 1e-12,
                                   "f1 vanishes on the prescribed set"))
        rows.append(AuditRow.lower(f"{tag}/simple", "|f1'(z_n)|", abs(j1.d1[n]), 1e-12,
                                   "the zeros are simple"))
        s = 1 - abs(c) ** 2
        lhs = 1.0 / abs(f2v[n]) ** 2 * s**2
        rhs = abs(jb.d1[n]) ** 2 * s**2
        rows.append(AuditRow.upper(f"{tag}/spherical", "rel. gap (f1/f2)^#(1-|z|^2)^2 vs |B'|^2(1-|z|^2)^2",
                                   abs(lhs - rhs) / rhs, 1e-6,
                                   "spherical derivative of f1/f2 at z_n equals |B'(z_n)|^2"))
    rows.append(AuditRow.info("zeros/k-norm", "sup_{|z|=1} |k|", krep.boundary_sup, LIMITATION))
    return Construction(A, f1, f2, dict(B=B, k=k, exclusions=excl, k_report=krep), rows)


def interpolating_solution_equation(problem, grid=None):
    """``f = I e^{B g}`` with ``f(z_n) = w_n`` and ``A = -f''/f`` analytic.

    ``I`` is the Lagrange-Blaschke interpolant (the constant ``C`` is
    absorbed), ``B`` the Blaschke product over the nodes and ``g`` the
    osculating interpolant with ``g(ζ) = -I''(ζ)/(2 I'(ζ) B'(ζ))`` and
    ``g'(ζ) = 0`` at the zeros ``ζ`` of ``I``.
    """
    if not isinstance(problem, InterpolationProblem):
        problem = InterpolationProblem(*problem)
    if np.all(problem.targets == 0):
        raise ValueError("all targets are zero: the interpolating solution would vanish identically")
    z = problem.nodes
    I, irep = lagrange_blaschke_solve(problem)
    zeta = I.zeros()
    B = FiniteBlaschke(z)
    if len(zeta):
        ji = I.jet(zeta, 2)
        bd = B.jet(zeta, 1).d1
        if np.any(np.abs(bd) < 1e-14) or np.any(np.abs(ji.d1) < 1e-14):
            raise ValueError("a zero of I is multiple or a critical point of B")
        g = hermite_solve(HermiteProblem(zeta, -ji.d2 / (2 * ji.d1 * bd), np.zeros(len(zeta))))
        f = I * J.exp(B * g)
        A = J.RemovableQuotient(-f.derivative(2), f, zeta, radius=REMOVABLE_RADIUS)
    else:
        g = J.constant(0.0)
        f = I
        A = -f.derivative(2) / f
    delta = exclusion_radius(zeta)
    excl = tuple((complex(c), delta) for c in zeta)
    f2 = ReductionOfOrder(f, _pick_alpha(excl), excl)
    grid = default_grid() if grid is None else grid

    rows = _residual_rows("interp", A, f, zeta, grid)
    fv = f(z)
    for n in range(len(z)):
        rows.append(AuditRow.upper(f"interp/z{n}/value", "|f(z_n) - w_n|",
                                   abs(fv[n] - problem.targets[n]), 1e-9, "f(z_n) = w_n"))
    delta_sep = problem.separation
    eta = earl_eta(min(1.0, delta_sep))
    disp = [float(np.min(pseudo_hyperbolic(z, c))) for c in zeta]
    for i, d in enumerate(disp):
        rows.append(AuditRow.info(f"interp/zeta{i}/displacement",
                                  f"rho_p(zeta, nearest node); eta = {eta:.6g}", d,
                                  "zeros of I near the nodes (reported, not assumed)"))
    rows.append(AuditRow.info("interp/I-norm", "sup_{|z|=1} |I|", irep.boundary_sup, LIMITATION))
    parts = dict(I=I, B=B, g=g, zeros=zeta, eta=eta, displacement=disp, exclusions=excl,
                 I_report=irep)
    return Construction(A, f, f2, parts, rows)


def fixed_point_simple(zeros, epsilon, grid=None):
    """``f1(z) = z + ε z^3 B(z)``: fixes 0 and every zero of ``B``."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0,1)")
    lam = _nodes(zeros)
    B = FiniteBlaschke(lam)
    z_ = J.identity
    f1 = z_ + epsilon * z_**3 * B
    A = J.RemovableQuotient(-f1.derivative(2), f1, [0.0], radius=REMOVABLE_RADIUS)
    excl = ((0j, 0.2),)
    f2 = ReductionOfOrder(f1, _pick_alpha(excl), excl)
    grid = default_grid() if grid is None else grid

    rows = _residual_rows("simple", A, f1, [0.0], grid)
    fv = f1(lam)
    for n in range(len(lam)):
        rows.append(AuditRow.upper(f"simple/z{n}/fixed", "|f1(z_n) - z_n|", abs(fv[n] - lam[n]), 1e-9,
                                   "zeros of B are fixed points"))
    j0 = f1.jet(np.array([0j]), 2)
    rows.append(AuditRow.upper("simple/origin/value", "|f1(0)|", abs(j0.value[0]), 1e-12, "f1(0) = 0"))
    rows.append(AuditRow.upper("simple/origin/derivative", "|f1'(0) - 1|", abs(j0.d1[0] - 1), 1e-12,
                               "f1'(0) = 1"))
    rows.append(AuditRow.upper("simple/origin/second", "|f1''(0)|", abs(j0.d2[0]), 1e-12, "f1''(0) = 0"))
    pts = grid.points.ravel()
    af, az = np.abs(f1(pts)), np.abs(pts)
    margin = min(np.min(af - (1 - epsilon) * az), np.min((1 + epsilon) * az - af))
    rows.append(AuditRow.lower("simple/sandwich", "min margin of (1-eps)|z| <= |f1| <= (1+eps)|z|",
                               margin, -1e-12, "two-sided modulus bound"))
    sup = float(np.max(af))
    rows.append(AuditRow.upper("simple/norm", "grid sup |f1|", sup, 1 + epsilon, "norm below 1 + eps"))
    # f1(z) - z = O(z^3) is audited above; dividing out z^3 keeps the other
    # fixed points well conditioned (the triple one at 0 cannot be located
    # better than ~1e-5 from f1(z) - z in double precision)
    q = J.RemovableQuotient(f1 - z_, z_**3, [0.0], orders=[3], radius=REMOVABLE_RADIUS)
    found = [0j] + find_zeros(q, grid)
    targets = np.concatenate([[0j], lam])
    worst = max((float(np.min(np.abs(targets - w))) for w in found), default=0.0)
    rows.append(AuditRow.upper("simple/fixed-points", "max distance of detected fixed points to {0} and zeros",
                               worst, 1e-8, "no spurious fixed points on the grid"))
    return Construction(A, f1, f2, dict(B=B, epsilon=epsilon, fixed_points=found, exclusions=excl), rows)


def _check_branch(z):
    for p in z:
        if p.real < 0 and abs(p.imag) < 1e-6:
            raise ValueError(f"node {p} lies within 1e-6 of the branch cut of log")


def fixed_point_typed(spec, grid=None):
    """``f1 = exp(h + B g)`` with ``f1(z_n) = z_n`` and ``f1'(z_n) = C_n``.

    ``h`` interpolates ``log z_n`` (principal branch) and ``g`` interpolates
    ``(C_n/z_n - h'(z_n))/B'(z_n)``.  Since ``f1`` is zero-free,
    ``A = -(Φ'' + Φ'^2)`` with ``Φ = h + B g`` needs no division.
    """
    if not isinstance(spec, FixedPointSpec):
        spec = FixedPointSpec(*spec)
    z = spec.nodes
    _check_branch(z)
    C = spec.multipliers
    B = FiniteBlaschke(z)
    h, hrep = lagrange_blaschke_solve(InterpolationProblem(z, np.log(z)))
    hd = h.jet(z, 1).d1
    bd = B.jet(z, 1).d1
    g, grep_ = lagrange_blaschke_solve(InterpolationProblem(z, (C / z - hd) / bd))
    phi = h + B * g
    f1 = J.exp(phi)
    dphi = phi.derivative(1)
    A = -(phi.derivative(2) + dphi * dphi)
    f2 = ReductionOfOrder(f1, 0.0)
    grid = default_grid() if grid is None else grid

    rows = _residual_rows("typed", A, f1, [], grid)
    j = f1.jet(z, 1)
    for n in range(len(z)):
        rows.append(AuditRow.upper(f"typed/z{n}/fixed", "|f1(z_n) - z_n|", abs(j.value[n] - z[n]), 1e-9,
                                   "f1(z_n) = z_n"))
        rows.append(AuditRow.upper(f"typed/z{n}/multiplier", f"|f1'(z_n) - C_n| ({spec.types[n]})",
                                   abs(j.d1[n] - C[n]), 1e-9, "fixed point of prescribed type"))
    rows.append(AuditRow.info("typed/h-norm", "sup_{|z|=1} |h|", hrep.boundary_sup, LIMITATION))
    rows.append(AuditRow.info("typed/g-norm", "sup_{|z|=1} |g|", grep_.boundary_sup, LIMITATION))
    return Construction(A, f1, f2, dict(B=B, h=h, g=g, multipliers=C), rows)


# --------------------------------------------------------------------------
# separation
# --------------------------------------------------------------------------

def separation_audit(basis, grid=None, r_max=0.99):
    """Ratios ``ρ_p(z1,z2) ‖f1‖ ‖f2‖ / (|W| max(1-|z1|, 1-|z2|))`` for the pair
    classes zero/critical point of one solution, zero/zero and
    critical/critical across the two solutions.  The minimum of each class
    is the empirical constant; a class without pairs gives a vacuous row.
    """
    grid = make_grid(64, 256, r_max, "boundary-refined") if grid is None else grid
    pts = grid.points.ravel()
    n1 = float(np.max(np.abs(basis.f1(pts))))
    n2 = float(np.max(np.abs(basis.f2(pts))))
    W = abs(basis.wronskian)
    Z = {
        "f1": find_zeros(basis.f1, grid),
        "f2": find_zeros(basis.f2, grid),
        "f1'": find_zeros(basis.f1.derivative(1), grid),
        "f2'": find_zeros(basis.f2.derivative(1), grid),
    }
    classes = {
        "zero-critical/f1": ("f1", "f1'"),
        "zero-critical/f2": ("f2", "f2'"),
        "zero-zero": ("f1", "f2"),
        "critical-critical": ("f1'", "f2'"),
    }
    rows = []
    for name, (s, t) in classes.items():
        ratios = [
            pseudo_hyperbolic(a, b) * n1 * n2 / (W * max(1 - abs(a), 1 - abs(b)))
            for a in Z[s] for b in Z[t]
        ]
        if ratios:
            c = float(min(ratios))
            rows.append(AuditRow(f"separation/{name}", f"min ratio over {len(ratios)} pair(s)",
                                 c, 0.0, c > 0, "separation of zeros and critical points"))
        else:
            rows.append(AuditRow(f"separation/{name}", "vacuous: no pairs on the grid", float("inf"),
                                 0.0, True, "separation of zeros and critical points"))
    return rows, Z
