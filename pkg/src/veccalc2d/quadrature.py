"""Integrals of 1-forms along curves and 2-forms over plane regions.

Everything is composite Gauss-Legendre.  Curves are parametrized by
expressions in ``t``; regions are rectangles, discs (polar map with the
Jacobian ``r``) and simple counter-clockwise polygons (ear clipping, then a
collapsed-square rule on each triangle).  Boundaries are always returned
counter-clockwise so that Green's theorem holds with a plus sign.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field as dc_field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .calc2d import (
    OneForm2,
    ScalarField2,
    TwoForm2,
    VectorField2,
    curl3,
    div2,
    field,
    flat,
    grad2,
    ham,
    hodge1,
)
from .fieldexpr import FieldError, FieldExpr, parse_expr


class RegionError(FieldError, ValueError):
    """Invalid region or curve description."""


class NonSimplePolygonError(RegionError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    panels: int = 32
    order: int = 8

    def __post_init__(self):
        if self.panels < 1:
            raise ValueError(f"panels must be positive, got {self.panels}")
        if not 2 <= self.order <= 16:
            raise ValueError(f"Gauss order must be in 2..16, got {self.order}")

    def refined(self) -> "QuadratureSpec":
        return QuadratureSpec(2 * self.panels, self.order)


DEFAULT_SPEC = QuadratureSpec()


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def composite_rule(a: float, b: float, q: QuadratureSpec) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [a, b], panel by panel."""
    x, w = gauss_legendre(q.order)
    edges = np.linspace(a, b, q.panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _full(value, shape) -> np.ndarray:
    return np.broadcast_to(np.asarray(value, dtype=float), shape)


# --------------------------------------------------------------------------
# Curves


@dataclass(frozen=True)
class Curve2:
    """Parametrized path ``t -> (x(t), y(t))`` for ``t0 <= t <= t1``."""

    x_of_t: FieldExpr
    y_of_t: FieldExpr
    t0: float = 0.0
    t1: float = 1.0
    closed: bool = False

    def __post_init__(self):
        for comp in (self.x_of_t, self.y_of_t):
            if comp.vars != ("t",):
                raise RegionError(f"curve components must be expressions in t, got variables {comp.vars}")
        if not self.t0 < self.t1:
            raise RegionError(f"need t0 < t1, got [{self.t0}, {self.t1}]")
        if self.closed:
            gap = math.dist(self.start, self.end)
            if gap > 1e-12:
                raise RegionError(f"closed curve does not return to its start (gap {gap:.3g})")

    @classmethod
    def from_text(cls, x: str, y: str, t0: float = 0.0, t1: float = 1.0, closed: bool | None = None) -> "Curve2":
        c = cls(parse_expr(x, ("t",)), parse_expr(y, ("t",)), float(t0), float(t1))
        if closed is None:
            closed = math.dist(c.start, c.end) <= 1e-12
        return cls(c.x_of_t, c.y_of_t, c.t0, c.t1, closed)

    @classmethod
    def segment(cls, a: Sequence[float], b: Sequence[float]) -> "Curve2":
        ax, ay = map(float, a)
        bx, by = map(float, b)
        return cls.from_text(f"{ax!r} + ({bx - ax!r})*t", f"{ay!r} + ({by - ay!r})*t", 0.0, 1.0, closed=False)

    @classmethod
    def circle(cls, center: Sequence[float] = (0.0, 0.0), radius: float = 1.0) -> "Curve2":
        cx, cy = map(float, center)
        r = float(radius)
        return cls.from_text(f"{cx!r} + {r!r}*cos(t)", f"{cy!r} + {r!r}*sin(t)", 0.0, 2 * math.pi, closed=True)

    @classmethod
    def arc(cls, center: Sequence[float], radius: float, a0: float, a1: float) -> "Curve2":
        cx, cy = map(float, center)
        r = float(radius)
        return cls.from_text(f"{cx!r} + {r!r}*cos(t)", f"{cy!r} + {r!r}*sin(t)", a0, a1)

    def point(self, t: float) -> tuple[float, float]:
        return float(self.x_of_t.value((t,))), float(self.y_of_t.value((t,)))

    @property
    def start(self) -> tuple[float, float]:
        return self.point(self.t0)

    @property
    def end(self) -> tuple[float, float]:
        return self.point(self.t1)

    def sample(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Positions and velocities ``x, y, dx/dt, dy/dt`` at parameters ``t``."""
        jx = self.x_of_t.jet((t,), 1)
        jy = self.y_of_t.jet((t,), 1)
        shape = np.shape(t)
        return _full(jx.v, shape), _full(jy.v, shape), _full(jx.d[0], shape), _full(jy.d[0], shape)

    def reversed(self) -> "Curve2":
        """Same trace, opposite direction (``t -> t0 + t1 - t``)."""
        from .fieldexpr import Binary, Const, Var

        flip = Binary("-", Const(self.t0 + self.t1), Var("t"))
        return Curve2(self.x_of_t.substitute("t", flip), self.y_of_t.substitute("t", flip), self.t0, self.t1, self.closed)


# --------------------------------------------------------------------------
# Regions


class Region2:
    """Integration domain with a counter-clockwise boundary."""

    def boundary(self) -> list[Curve2]:
        raise NotImplementedError

    def nodes(self, q: QuadratureSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Quadrature points ``x, y`` and weights for area integrals."""
        raise NotImplementedError

    def contains(self, p: Sequence[float]) -> bool:
        raise NotImplementedError

    def bbox(self) -> tuple[float, float, float, float]:
        raise NotImplementedError

    @property
    def area(self) -> float:
        raise NotImplementedError

    def sample(self, n: int, rng: np.random.Generator) -> list[tuple[float, float]]:
        """``n`` uniformly distributed interior points, by rejection."""
        a, b, c, d = self.bbox()
        out: list[tuple[float, float]] = []
        while len(out) < n:
            x, y = rng.uniform(a, b), rng.uniform(c, d)
            if self.contains((x, y)):
                out.append((float(x), float(y)))
        return out


@dataclass(frozen=True)
class Rectangle(Region2):
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if not (self.a < self.b and self.c < self.d):
            raise RegionError(f"degenerate rectangle [{self.a}, {self.b}] x [{self.c}, {self.d}]")

    def corners(self) -> list[tuple[float, float]]:
        return [(self.a, self.c), (self.b, self.c), (self.b, self.d), (self.a, self.d)]

    def boundary(self) -> list[Curve2]:
        v = self.corners()
        return [Curve2.segment(v[k], v[(k + 1) % 4]) for k in range(4)]

    def nodes(self, q):
        x, wx = composite_rule(self.a, self.b, q)
        y, wy = composite_rule(self.c, self.d, q)
        X, Y = np.meshgrid(x, y, indexing="ij")
        return X.ravel(), Y.ravel(), np.outer(wx, wy).ravel()

    def contains(self, p):
        return self.a <= p[0] <= self.b and self.c <= p[1] <= self.d

    def bbox(self):
        return self.a, self.b, self.c, self.d

    @property
    def area(self):
        return (self.b - self.a) * (self.d - self.c)


@dataclass(frozen=True)
class Disc(Region2):
    cx: float
    cy: float
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise RegionError(f"disc radius must be positive, got {self.radius}")

    def boundary(self):
        return [Curve2.circle((self.cx, self.cy), self.radius)]

    def nodes(self, q):
        r, wr = composite_rule(0.0, self.radius, q)
        th, wth = composite_rule(0.0, 2 * math.pi, q)
        R, T = np.meshgrid(r, th, indexing="ij")
        W = np.outer(wr * r, wth)
        return (self.cx + R * np.cos(T)).ravel(), (self.cy + R * np.sin(T)).ravel(), W.ravel()

    def contains(self, p):
        return math.hypot(p[0] - self.cx, p[1] - self.cy) <= self.radius

    def bbox(self):
        r = self.radius
        return self.cx - r, self.cx + r, self.cy - r, self.cy + r

    @property
    def area(self):
        return math.pi * self.radius**2


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def signed_area(vertices: Sequence[Sequence[float]]) -> float:
    n = len(vertices)
    s = 0.0
    for k in range(n):
        x0, y0 = vertices[k]
        x1, y1 = vertices[(k + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def _on_segment(p, a, b) -> bool:
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def segments_intersect(p1, p2, p3, p4) -> bool:
    """Closed segments [p1, p2] and [p3, p4] share at least one point."""
    d1, d2 = _cross(p3, p4, p1), _cross(p3, p4, p2)
    d3, d4 = _cross(p1, p2, p3), _cross(p1, p2, p4)
    if ((d1 > 0 > d2) or (d1 < 0 < d2)) and ((d3 > 0 > d4) or (d3 < 0 < d4)):
        return True
    return (
        (d1 == 0 and _on_segment(p1, p3, p4))
        or (d2 == 0 and _on_segment(p2, p3, p4))
        or (d3 == 0 and _on_segment(p3, p1, p2))
        or (d4 == 0 and _on_segment(p4, p1, p2))
    )


def is_simple(vertices: Sequence[Sequence[float]]) -> bool:
    n = len(vertices)
    if len(set(map(tuple, vertices))) != n:
        return False
    edges = [(vertices[k], vertices[(k + 1) % n]) for k in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            a, b = edges[i]
            c, d = edges[j]
            if j == i + 1 or (i == 0 and j == n - 1):
                # neighbours share one vertex; they may not fold back onto each other
                shared = b if j == i + 1 else a
                other_i = a if j == i + 1 else b
                other_j = d if j == i + 1 else c
                if _cross(shared, other_i, other_j) == 0 and (
                    _on_segment(other_j, shared, other_i) or _on_segment(other_i, shared, other_j)
                ):
                    return False
                continue
            if segments_intersect(a, b, c, d):
                return False
    return True


def _in_triangle(p, a, b, c) -> bool:
    return _cross(a, b, p) >= 0 and _cross(b, c, p) >= 0 and _cross(c, a, p) >= 0


def ear_clip(vertices: Sequence[Sequence[float]]) -> list[tuple[int, int, int]]:
    """Triangulate a simple counter-clockwise polygon; returns index triples."""
    idx = list(range(len(vertices)))
    triangles = []
    while len(idx) > 3:
        m = len(idx)
        for k in range(m):
            i, j, l = idx[k - 1], idx[k], idx[(k + 1) % m]
            a, b, c = vertices[i], vertices[j], vertices[l]
            turn = _cross(a, b, c)
            if turn == 0:
                # straight vertex: drop it without emitting a sliver
                del idx[k]
                break
            if turn < 0:
                continue
            if any(_in_triangle(vertices[o], a, b, c) for o in idx if o not in (i, j, l)):
                continue
            triangles.append((i, j, l))
            del idx[k]
            break
        else:
            raise NonSimplePolygonError("no ear found; polygon is not simple")
    if _cross(*(vertices[i] for i in idx)) != 0:
        triangles.append(tuple(idx))
    return triangles


@dataclass(frozen=True)
class Polygon(Region2):
    vertices: tuple[tuple[float, float], ...]
    triangles: tuple[tuple[int, int, int], ...] = dc_field(init=False, repr=False, compare=False)

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 3:
            raise RegionError(f"polygon needs at least 3 vertices, got {len(verts)}")
        if not is_simple(verts):
            raise NonSimplePolygonError("polygon edges intersect")
        if signed_area(verts) <= 0:
            raise RegionError("polygon vertices must be listed counter-clockwise")
        object.__setattr__(self, "triangles", tuple(ear_clip(verts)))

    def boundary(self):
        v = self.vertices
        return [Curve2.segment(v[k], v[(k + 1) % len(v)]) for k in range(len(v))]

    def nodes(self, q):
        u, wu = composite_rule(0.0, 1.0, q)
        U, V = np.meshgrid(u, u, indexing="ij")
        Wref = np.outer(wu * u, wu)  # collapsed square: Jacobian factor u
        xs, ys, ws = [], [], []
        for i, j, k in self.triangles:
            p0, p1, p2 = (np.array(self.vertices[n]) for n in (i, j, k))
            pts = p0 + U[..., None] * (p1 - p0) + (U * V)[..., None] * (p2 - p1)
            jac = abs(_cross(p0, p1, p2))
            xs.append(pts[..., 0].ravel())
            ys.append(pts[..., 1].ravel())
            ws.append((jac * Wref).ravel())
        return np.concatenate(xs), np.concatenate(ys), np.concatenate(ws)

    def contains(self, p):
        v = self.vertices
        return any(_in_triangle(p, v[i], v[j], v[k]) for i, j, k in self.triangles)

    def bbox(self):
        xs = [x for x, _ in self.vertices]
        ys = [y for _, y in self.vertices]
        return min(xs), max(xs), min(ys), max(ys)

    @property
    def area(self):
        return signed_area(self.vertices)


def parse_region(tokens: Sequence[str]) -> Region2:
    """``rect a b c d`` | ``disc cx cy r`` | ``poly x1 y1 x2 y2 ...``."""
    if not tokens:
        raise RegionError("empty region spec")
    kind, nums = tokens[0], tokens[1:]
    try:
        vals = [float(t) for t in nums]
    except ValueError as exc:
        raise RegionError(f"bad number in region spec: {exc}") from None
    if kind == "rect":
        if len(vals) != 4:
            raise RegionError("rect needs a b c d")
        return Rectangle(*vals)
    if kind == "disc":
        if len(vals) != 3:
            raise RegionError("disc needs cx cy r")
        return Disc(*vals)
    if kind == "poly":
        if len(vals) < 6 or len(vals) % 2:
            raise RegionError("poly needs at least three x y pairs")
        return Polygon(tuple(zip(vals[0::2], vals[1::2])))
    raise RegionError(f"unknown region kind {kind!r}")


# --------------------------------------------------------------------------
# Integrals


def line_integral(alpha: OneForm2, c: Curve2, q: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``integral over c of p dx + q dy = integral (p x' + q y') dt``."""
    t, w = composite_rule(c.t0, c.t1, q)
    x, y, xd, yd = c.sample(t)
    p = _full(alpha.p((x, y), 0).v, t.shape)
    qq = _full(alpha.q((x, y), 0).v, t.shape)
    return float(np.dot(w, p * xd + qq * yd))


def area_integral(beta: TwoForm2, S: Region2, q: QuadratureSpec = DEFAULT_SPEC) -> float:
    x, y, w = S.nodes(q)
    g = _full(beta.g((x, y), 0).v, x.shape)
    return float(np.dot(w, g))


def boundary_integral(alpha: OneForm2, S: Region2, q: QuadratureSpec = DEFAULT_SPEC) -> float:
    return math.fsum(line_integral(alpha, c, q) for c in S.boundary())


def with_error(integral, *args, q: QuadratureSpec = DEFAULT_SPEC) -> tuple[float, float]:
    """Value at ``q`` and the estimate ``|I(q) - I(2q)|`` (panels doubled)."""
    coarse = integral(*args, q)
    fine = integral(*args, q.refined())
    return coarse, abs(coarse - fine)


# --------------------------------------------------------------------------
# Theorem checks


@dataclass(frozen=True)
class GradientReport:
    """Gradient theorem along a curve from A to B, in both forms.

    ``lhs`` integrates ``grad f . dr`` and should equal ``rhs = f(B) - f(A)``.
    The starred twin integrates ``*(ham f . dr)``, which should equal
    ``f(A) - f(B)``; ``twin_gap = |lhs + starred_lhs|`` measures how far the
    two statements are from being the same identity.
    """

    lhs: float
    rhs: float
    residual: float
    starred_lhs: float
    starred_rhs: float
    starred_residual: float
    twin_gap: float
    panels: int
    order: int

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class GreenReport:
    circulation: float
    area_term: float
    residual: float
    panels: int
    order: int

    def to_dict(self) -> dict:
        return {"lhs": self.area_term, "rhs": self.circulation, **asdict(self)}


@dataclass(frozen=True)
class FluxReport:
    flux: float
    div_term: float
    residual: float
    panels: int
    order: int

    def to_dict(self) -> dict:
        return {"lhs": self.div_term, "rhs": self.flux, **asdict(self)}


def verify_gradient_theorem(f: ScalarField2 | str, c: Curve2, q: QuadratureSpec = DEFAULT_SPEC) -> GradientReport:
    f = field(f)
    fa, fb = float(f.value(c.start)), float(f.value(c.end))
    lhs = line_integral(flat(grad2(f)), c, q)
    starred = line_integral(hodge1(flat(ham(f))), c, q)
    return GradientReport(
        lhs=lhs,
        rhs=fb - fa,
        residual=abs(lhs - (fb - fa)),
        starred_lhs=starred,
        starred_rhs=fa - fb,
        starred_residual=abs(starred - (fa - fb)),
        twin_gap=abs(lhs + starred),
        panels=q.panels,
        order=q.order,
    )


def verify_green(A: VectorField2, S: Region2, q: QuadratureSpec = DEFAULT_SPEC) -> GreenReport:
    """Circulation around the boundary against the integral of curl3 A."""
    circulation = boundary_integral(flat(A), S, q)
    area_term = area_integral(TwoForm2(curl3(A)), S, q)
    return GreenReport(circulation, area_term, abs(circulation - area_term), q.panels, q.order)


def verify_green_flux(A: VectorField2, S: Region2, q: QuadratureSpec = DEFAULT_SPEC) -> FluxReport:
    """Outward flux ``integral of *(A . dr)`` against the integral of div A."""
    flux = boundary_integral(hodge1(flat(A)), S, q)
    div_term = area_integral(TwoForm2(div2(A)), S, q)
    return FluxReport(flux, div_term, abs(flux - div_term), q.panels, q.order)
