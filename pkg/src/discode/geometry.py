"""Disc automorphisms, metrics, quadrature grids and zero-avoiding paths."""

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import roots_legendre

POLYGON_SIDES = 32


class DiscPoint(complex):
    """A complex number strictly inside the unit disc."""

    def __new__(cls, value):
        z = complex(value)
        if not abs(z) < 1.0:
            raise ValueError(f"point {z!r} is not inside the unit disc")
        return super().__new__(cls, z.real, z.imag)


def mobius_involution(a, z):
    a = np.asarray(a, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    out = (a - z) / (1.0 - np.conj(a) * z)
    return out[()] if out.ndim == 0 else out


def pseudo_hyperbolic(z, w):
    z = np.asarray(z, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    out = np.abs(w - z) / np.abs(1.0 - np.conj(w) * z)
    return out[()] if out.ndim == 0 else out


def hyperbolic(z, w):
    return np.arctanh(pseudo_hyperbolic(z, w))


def euclidean_disc(a, delta):
    """Centre and radius of the pseudo-hyperbolic disc of radius ``delta`` about ``a``."""
    a = complex(a)
    s = 1.0 - delta**2 * abs(a) ** 2
    return (1.0 - delta**2) * a / s, delta * (1.0 - abs(a) ** 2) / s


def hyperbolic_segment(z1, z2, knots=128):
    """Points on the geodesic from ``z1`` to ``z2`` (``knots`` chords)."""
    t = np.linspace(0.0, 1.0, knots + 1)
    w = mobius_involution(z1, z2)
    return mobius_involution(z1, t * w)


def polyline_integral(vertices, g, nodes=64):
    """``∫ g(z) |dz|`` along a polyline, Gauss-Legendre on every chord."""
    x, wq = roots_legendre(nodes)
    v = np.asarray(vertices, dtype=np.complex128)
    a, b = v[:-1, None], v[1:, None]
    pts = 0.5 * (a + b) + 0.5 * (b - a) * x[None, :]
    jac = 0.5 * np.abs(b - a)
    return float(np.sum(jac * (g(pts) @ wq)[:, None]))


def omega_distance(z1, z2, omega, knots=128, nodes=64):
    """``∫ |dz|/omega(|z|)`` along the polylined hyperbolic segment."""
    if z1 == z2:
        return 0.0
    verts = hyperbolic_segment(z1, z2, knots)
    return polyline_integral(verts, lambda z: 1.0 / omega(np.abs(z)), nodes)


# --------------------------------------------------------------------------
# paths
# --------------------------------------------------------------------------

def _fmt(x):
    return format(float(x), ".17g")


@dataclass(frozen=True)
class PathSpec:
    vertices: tuple
    exclusions: tuple = ()
    length_bound: float = float("nan")

    def __post_init__(self):
        for v in self.vertices:
            if not abs(v) < 1.0:
                raise ValueError(f"path vertex {v!r} is outside the unit disc")

    @property
    def start(self):
        return self.vertices[0]

    @property
    def end(self):
        return self.vertices[-1]

    @cached_property
    def length(self):
        v = np.asarray(self.vertices, dtype=np.complex128)
        return float(np.sum(np.abs(np.diff(v))))

    def sample(self, n):
        """``n`` points equally spaced in arclength, endpoints included."""
        v = np.asarray(self.vertices, dtype=np.complex128)
        if len(v) == 1:
            return np.repeat(v, n)
        seg = np.abs(np.diff(v))
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        s = np.linspace(0.0, cum[-1], n)
        idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(seg) - 1)
        frac = np.where(seg[idx] > 0, (s - cum[idx]) / np.where(seg[idx] > 0, seg[idx], 1), 0)
        return v[idx] + frac * (v[idx + 1] - v[idx])

    def audit(self, n=10_000):
        """Independent check of the exclusion rule at ``n`` sampled points.

        Returns a list of offending sample points (empty when the path is
        valid).  Points inside the exclusion disc that holds the endpoint
        are allowed.
        """
        pts = self.sample(n)
        bad = pts[np.abs(pts) >= 1.0].tolist()
        for c, d in self.exclusions:
            if pseudo_hyperbolic(c, self.end) < d:
                continue
            inside = pseudo_hyperbolic(c, pts) < d
            bad.extend(pts[inside].tolist())
        return bad

    def to_record(self):
        verts = ",".join(f"[{_fmt(v.real)},{_fmt(v.imag)}]" for v in self.vertices)
        excl = ",".join(
            f"[{_fmt(complex(c).real)},{_fmt(complex(c).imag)},{_fmt(d)}]" for c, d in self.exclusions
        )
        return (
            f'{{"vertices":[{verts}],"exclusions":[{excl}],'
            f'"length":{_fmt(self.length)},"length_bound":{_fmt(self.length_bound)}}}'
        )


def _segment_hits(p, q, c, R):
    """Parameters ``t`` in (0,1) where segment p->q crosses the circle |z-c|=R."""
    d = q - p
    f = p - c
    a = abs(d) ** 2
    b = 2 * (f.real * d.real + f.imag * d.imag)
    cc = abs(f) ** 2 - R**2
    disc = b * b - 4 * a * cc
    if a == 0 or disc <= 0:
        return None
    s = np.sqrt(disc)
    t0, t1 = (-b - s) / (2 * a), (-b + s) / (2 * a)
    if t1 <= 0 or t0 >= 1:
        return None
    return t0, t1


def _arc(c, R, th0, th1, direction):
    """Points on |z-c|=R from th0 to th1 going in ``direction`` (+1/-1)."""
    span = (direction * (th1 - th0)) % (2 * np.pi)
    k = max(1, int(np.ceil(span / (2 * np.pi / POLYGON_SIDES))))
    th = th0 + direction * span * np.arange(1, k) / k
    return list(c + R * np.exp(1j * th))


def build_avoiding_path(start, target, exclusions=(), radial_entry=False):
    """Polyline from ``start`` to ``target`` that skirts exclusion discs.

    ``exclusions`` is a sequence of ``(centre, delta)`` pseudo-hyperbolic
    discs.  Each disc met by the straight line is bypassed along a polygon
    inscribed in a circle slightly larger than the disc's circumscribed
    32-gon, so every chord stays outside the disc.  The disc holding
    ``target`` (if any) is entered straight, or with ``radial_entry`` along
    the ring and then radially, which keeps the path away from its centre.
    """
    start, target = complex(DiscPoint(start)), complex(DiscPoint(target))
    excl = tuple((complex(DiscPoint(c)), float(d)) for c, d in exclusions)
    for c, d in excl:
        if not 0 < d < 1:
            raise ValueError(f"exclusion radius {d} not in (0,1)")
        if pseudo_hyperbolic(c, start) < d:
            raise ValueError(f"start {start} lies inside exclusion disc at {c}")
    eu = [euclidean_disc(c, d) for c, d in excl]
    terminal = [i for i, (c, d) in enumerate(excl) if pseudo_hyperbolic(c, target) < d]
    for i in terminal:
        for j in range(len(excl)):
            if j != i and abs(eu[i][0] - eu[j][0]) <= eu[i][1] + eu[j][1]:
                raise ValueError(
                    f"terminal exclusion disc at {excl[i][0]} overlaps the disc at {excl[j][0]}"
                )
    grow = (1.0 + 1e-6) / np.cos(np.pi / POLYGON_SIDES)
    Rv = [r * grow for _, r in eu]
    bound = abs(target - start) + sum(2 * np.pi * r for r in Rv)

    verts = [start]
    cur = start
    done = set() if radial_entry else set(terminal)
    while True:
        best = None
        for i, (c, _) in enumerate(eu):
            if i in done:
                continue
            hit = _segment_hits(cur, target, c, Rv[i])
            if hit is not None and (best is None or hit[0] < best[1][0]):
                best = (i, hit)
        if best is None:
            break
        i, (t0, t1) = best
        done.add(i)
        c, R = eu[i][0], Rv[i]
        p_in = cur + max(t0, 0.0) * (target - cur)
        th0 = np.angle(p_in - c)
        ring_in = c + R * np.exp(1j * th0)
        last = t1 >= 1.0
        # a target inside the ring (but outside the disc) is reached radially
        th1 = np.angle((target if last else cur + t1 * (target - cur)) - c)
        ring_out = c + R * np.exp(1j * th1)
        ccw = (th1 - th0) % (2 * np.pi)
        order = (1, -1) if ccw <= np.pi else (-1, 1)
        chosen = None
        for direction in order:
            arc = [p_in, ring_in] + _arc(c, R, th0, th1, direction) + [ring_out]
            if _arc_ok(arc, excl, i, terminal):
                chosen = arc
                break
        if chosen is None:
            raise ValueError(f"no admissible detour around exclusion disc at {excl[i][0]}")
        verts.extend(chosen)
        cur = ring_out
    verts.append(target)
    clean = [verts[0]]
    for v in verts[1:-1]:
        if abs(v - clean[-1]) > 1e-15:
            clean.append(v)
    # the end point itself is never dropped, only a ring vertex sitting on it
    if target != clean[-1]:
        if len(clean) > 1 and abs(target - clean[-1]) <= 1e-15:
            clean[-1] = target
        else:
            clean.append(target)
    return PathSpec(tuple(clean), excl, bound)


def _arc_ok(arc, excl, skip, terminal):
    pts = np.asarray(arc)
    if np.any(np.abs(pts) >= 1.0):
        return False
    # dense check of the chords against the other discs
    t = np.linspace(0, 1, 17)[None, :]
    dense = (pts[:-1, None] + t * (pts[1:, None] - pts[:-1, None])).ravel()
    for j, (c, d) in enumerate(excl):
        if j == skip or j in terminal:
            continue
        if np.any(pseudo_hyperbolic(c, dense) < d):
            return False
    return True


# --------------------------------------------------------------------------
# quadrature grids
# --------------------------------------------------------------------------

def _radial_edges(radial_count, r_max, spacing, breakpoints=()):
    if spacing == "uniform":
        marks = [0.0] + sorted(b for b in breakpoints if 0 < b < r_max) + [r_max]
        transform, inverse = (lambda r: r), (lambda t: t)
    elif spacing == "boundary-refined":
        # uniform in hyperbolic radius: 1 - rho decays geometrically
        marks = [0.0] + sorted(b for b in breakpoints if 0 < b < r_max) + [r_max]
        transform, inverse = np.arctanh, np.tanh
    else:
        raise ValueError(f"unknown spacing rule {spacing!r}")
    t = transform(np.asarray(marks))
    spans = np.diff(t)
    n_pieces = len(spans)
    if radial_count < n_pieces:
        raise ValueError("radial_count smaller than the number of breakpoint bands")
    alloc = np.maximum(1, np.floor(radial_count * spans / spans.sum()).astype(int))
    while alloc.sum() < radial_count:
        alloc[np.argmax(spans / alloc)] += 1
    while alloc.sum() > radial_count:
        alloc[np.argmax(np.where(alloc > 1, alloc, 0))] -= 1
    edges = [0.0]
    for k in range(n_pieces):
        seg = inverse(np.linspace(t[k], t[k + 1], alloc[k] + 1))[1:]
        edges.extend(seg.tolist())
    edges[-1] = r_max
    for k, b in enumerate(marks[1:-1]):
        edges[int(alloc[: k + 1].sum())] = b
    return np.asarray(edges)


@dataclass(frozen=True, eq=False)
class SampleGrid:
    """Tensor-product midpoint rule in (r**2, theta) over ``D(0, r_max)``."""

    edges: np.ndarray
    angular_count: int
    spacing: str = "uniform"
    breakpoints: tuple = field(default=())

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=float)
        # r_max = 1 is allowed: every node stays strictly inside the disc
        if e[0] != 0.0 or np.any(np.diff(e) <= 0) or not e[-1] <= 1.0:
            raise ValueError("radial edges must increase from 0 to r_max <= 1")
        object.__setattr__(self, "edges", e)

    @property
    def r_max(self):
        return float(self.edges[-1])

    @property
    def radial_count(self):
        return len(self.edges) - 1

    @cached_property
    def radii(self):
        # midpoint in rho**2, the natural variable for dm = d(rho**2)/2 dtheta
        return np.sqrt(0.5 * (self.edges[:-1] ** 2 + self.edges[1:] ** 2))

    @cached_property
    def angles(self):
        return 2 * np.pi * np.arange(self.angular_count) / self.angular_count

    @cached_property
    def points(self):
        """Node array of shape ``(radial_count, angular_count)``."""
        return self.radii[:, None] * np.exp(1j * self.angles)[None, :]

    @cached_property
    def weights(self):
        dth = 2 * np.pi / self.angular_count
        w = 0.5 * np.diff(self.edges**2) * dth
        return np.repeat(w[:, None], self.angular_count, axis=1)

    @property
    def nodes(self):
        return self.points.ravel(), self.weights.ravel()

    def area(self):
        return float(self.weights.sum())

    def integrate(self, values):
        return float(np.sum(np.asarray(values) * self.weights).real)

    def log_kernel_weights(self, r=None):
        """Weights for ``∫_{D(0,r)} f(z) log(r/|z|) dm``; ``r`` must be an edge.

        The log kernel is integrated exactly across each radial cell, so the
        integrable singularity at the origin costs no accuracy.
        """
        if r is None:
            r = self.r_max
        k = int(np.argmin(np.abs(self.edges - r)))
        if abs(self.edges[k] - r) > 1e-14:
            raise ValueError(f"radius {r} is not a radial edge of the grid")

        def prim(rho):
            rho = np.asarray(rho, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                val = rho**2 / 2 * np.log(r / rho) + rho**2 / 4
            return np.where(rho > 0, val, 0.0)

        e = self.edges[: k + 1]
        w = (prim(e[1:]) - prim(e[:-1])) * 2 * np.pi / self.angular_count
        out = np.zeros_like(self.weights)
        out[:k, :] = w[:, None]
        return out

    def edge_index(self, r):
        k = int(np.argmin(np.abs(self.edges - r)))
        if abs(self.edges[k] - r) > 1e-14:
            raise ValueError(f"radius {r} is not a radial edge of the grid")
        return k

    def refined(self):
        """Grid with both counts doubled (cells bisected in the spacing variable)."""
        if self.spacing == "boundary-refined":
            t = np.arctanh(self.edges)
            mid = np.tanh(0.5 * (t[:-1] + t[1:]))
        else:
            mid = 0.5 * (self.edges[:-1] + self.edges[1:])
        e = np.empty(2 * len(self.edges) - 1)
        e[0::2] = self.edges
        e[1::2] = mid
        return SampleGrid(e, 2 * self.angular_count, self.spacing, self.breakpoints)

    def integrate_with_error(self, fn):
        """Integral of ``fn`` and an error estimate from one doubling."""
        coarse = self.integrate(fn(self.points))
        fine_grid = self.refined()
        fine = fine_grid.integrate(fn(fine_grid.points))
        return fine, abs(fine - coarse) / 3.0

    def descriptor(self):
        return {
            "radial_count": self.radial_count,
            "angular_count": self.angular_count,
            "r_max": self.r_max,
            "spacing": self.spacing,
        }

    def to_record(self):
        pts, w = self.nodes
        body = ",".join(f"[{_fmt(p.real)},{_fmt(p.imag)},{_fmt(x)}]" for p, x in zip(pts, w))
        return f'{{"scheme":{json.dumps(self.descriptor())},"nodes":[{body}]}}'


def make_grid(radial_count, angular_count, r_max, spacing_rule="uniform", breakpoints=()):
    """Quadrature grid on ``D(0, r_max)``.

    ``boundary-refined`` places radial edges uniformly in hyperbolic radius
    ``atanh(rho)``, so ``1 - rho`` shrinks geometrically toward the rim
    (halving every ~0.35 units of ``atanh``).  Optional ``breakpoints`` are
    forced to be edges, which lets one grid serve several radii.
    """
    if radial_count < 1 or angular_count < 1:
        raise ValueError("counts must be positive")
    if not 0 < r_max < 1:
        raise ValueError("r_max must lie in (0,1)")
    edges = _radial_edges(radial_count, r_max, spacing_rule, tuple(breakpoints))
    return SampleGrid(edges, int(angular_count), spacing_rule, tuple(breakpoints))


def circle_mean(f, r, angular_count=256):
    th = 2 * np.pi * np.arange(angular_count) / angular_count
    vals = np.asarray(f(r * np.exp(1j * th)))
    m = vals.mean()
    return float(m) if np.isrealobj(vals) else complex(m)
