"""Planar incompressible and irrotational flow.

A velocity field with zero divergence is the Hamiltonian field of a stream
function; one with zero scalar curl is the gradient of a velocity potential.
Both are recovered here by integrating the matching 1-form along straight
rays from a base point, which is valid on regions star-shaped about it.
The additive constant is pinned by ``f(base) = 0``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field as dc_field
from typing import NamedTuple, Sequence

import numpy as np

from .calc2d import OneForm2, ScalarField2, VectorField2, _neg, curl3, div2, field, laplacian
from .fieldexpr import DomainError, FieldError, Jet
from .quadrature import DEFAULT_SPEC, Curve2, QuadratureSpec, Rectangle, Region2, composite_rule, line_integral

RECONSTRUCTION_TOL = 1e-6
CR_TOL = 1e-8
INCOMPRESSIBLE_TOL = 1e-10
PATH_TOL = 1e-6


class PreconditionError(FieldError):
    """The flow does not satisfy what the requested construction needs."""


class IncompressibilityError(PreconditionError):
    pass


class VorticityError(PreconditionError):
    pass


class PathDependenceError(FieldError):
    """Ray and axis-aligned path integrals disagree: the form is not closed."""


@dataclass(frozen=True)
class FlowField:
    v: VectorField2
    domain_hint: Region2 | None = None
    base_point: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "base_point", tuple(map(float, self.base_point)))
        if self.domain_hint is not None and not self.domain_hint.contains(self.base_point):
            raise ValueError(f"base point {self.base_point} lies outside the domain")

    @classmethod
    def parse(cls, text: str, **kwargs) -> "FlowField":
        return cls(VectorField2.parse(text), **kwargs)

    @property
    def sampling_region(self) -> Region2:
        if self.domain_hint is not None:
            return self.domain_hint
        bx, by = self.base_point
        return Rectangle(bx - 1.0, bx + 1.0, by - 1.0, by + 1.0)

    def samples(self, n: int = 32, seed: int = 0) -> list[tuple[float, float]]:
        return self.sampling_region.sample(n, np.random.default_rng(seed))


class CheckResult(NamedTuple):
    ok: bool
    max_abs: float


def _max_abs(s: ScalarField2, points) -> float:
    if not points:
        return 0.0
    xs = np.array([p[0] for p in points], dtype=float)
    ys = np.array([p[1] for p in points], dtype=float)
    return float(np.max(np.abs(np.broadcast_to(s.value((xs, ys)), xs.shape))))


def check_incompressible(F: FlowField, sample_points=None, tol: float = INCOMPRESSIBLE_TOL) -> CheckResult:
    """Whether ``|div v| <= tol`` at every sample point."""
    pts = F.samples() if sample_points is None else list(sample_points)
    m = _max_abs(div2(F.v), pts)
    return CheckResult(m <= tol, m)


def check_irrotational(F: FlowField, sample_points=None, tol: float = INCOMPRESSIBLE_TOL) -> CheckResult:
    pts = F.samples() if sample_points is None else list(sample_points)
    m = _max_abs(curl3(F.v), pts)
    return CheckResult(m <= tol, m)


def vorticity_at(F: FlowField, p: Sequence[float]) -> float:
    """Scalar curl of the velocity at ``p``."""
    return float(curl3(F.v).value(tuple(p)))


def cork_angular_velocity(F: FlowField, p: Sequence[float]) -> float:
    """Angular velocity of a small floating body, taken as half the vorticity.

    This follows the rule that vorticity is twice the local angular velocity
    of the fluid.  A competing statement (angular velocity equal to twice
    the scalar curl) differs by a factor of four; :func:`vorticity_at` is the
    unambiguous quantity.
    """
    return 0.5 * vorticity_at(F, p)


# --------------------------------------------------------------------------
# Path integrals used by the reconstructions


def _as_arrays(p) -> tuple[np.ndarray, np.ndarray]:
    return np.asarray(p[0], dtype=float), np.asarray(p[1], dtype=float)


def _ray_integral(a: ScalarField2, b: ScalarField2, base, p, order: int, q: QuadratureSpec) -> Jet:
    """Integral of ``a dx + b dy`` along the segment from ``base`` to ``p``.

    With ``order >= 1`` the partials with respect to the end point are
    obtained by differentiating under the integral sign:
    ``dI/dPx = int_0^1 s (a_x Dx + b_x Dy) + a ds`` and likewise for ``Py``.
    """
    X, Y = _as_arrays(p)
    shape = np.broadcast(X, Y).shape
    X, Y = np.broadcast_to(X, shape), np.broadcast_to(Y, shape)
    s, w = composite_rule(0.0, 1.0, q)
    dX, dY = X - base[0], Y - base[1]
    xs = base[0] + dX[..., None] * s
    ys = base[1] + dY[..., None] * s
    full = xs.shape
    ja, jb = a((xs, ys), min(order, 1)), b((xs, ys), min(order, 1))
    av, bv = np.broadcast_to(ja.v, full), np.broadcast_to(jb.v, full)
    value = (av * dX[..., None] + bv * dY[..., None]) @ w
    if order == 0:
        return Jet(value)
    if ja.d is None or jb.d is None:
        raise ValueError("velocity components have no first derivatives")
    ax_, ay_ = (np.broadcast_to(t, full) for t in ja.d)
    bx_, by_ = (np.broadcast_to(t, full) for t in jb.d)
    ddx = (s * (ax_ * dX[..., None] + bx_ * dY[..., None]) + av) @ w
    ddy = (s * (ay_ * dX[..., None] + by_ * dY[..., None]) + bv) @ w
    return Jet(value, (ddx, ddy))


def _axis_integral(a: ScalarField2, b: ScalarField2, base, p, q: QuadratureSpec) -> np.ndarray:
    """Same integral along ``base -> (Px, base_y) -> P``."""
    X, Y = _as_arrays(p)
    shape = np.broadcast(X, Y).shape
    X, Y = np.broadcast_to(X, shape), np.broadcast_to(Y, shape)
    s, w = composite_rule(0.0, 1.0, q)
    dX, dY = X - base[0], Y - base[1]
    xs = base[0] + dX[..., None] * s
    leg1 = np.broadcast_to(a.value((xs, np.full_like(xs, base[1]))), xs.shape) * dX[..., None]
    ys = base[1] + dY[..., None] * s
    leg2 = np.broadcast_to(b.value((np.broadcast_to(X[..., None], ys.shape), ys)), ys.shape) * dY[..., None]
    return (leg1 + leg2) @ w


def _stream_form(v: VectorField2) -> tuple[ScalarField2, ScalarField2]:
    # df = v_y dx - v_x dy
    return v.ay, _neg(v.ax)


def _potential_form(v: VectorField2) -> tuple[ScalarField2, ScalarField2]:
    return v.ax, v.ay


def path_discrepancy(F: FlowField, points, kind: str = "stream", q: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Largest gap between ray and axis-path integrals over ``points``.

    ``kind`` selects the 1-form: ``"stream"`` for ``v_y dx - v_x dy`` or
    ``"potential"`` for ``v_x dx + v_y dy``.  No precondition is checked, so
    this also measures how badly a non-closed form fails.
    """
    a, b = _stream_form(F.v) if kind == "stream" else _potential_form(F.v)
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    ray = _ray_integral(a, b, F.base_point, (pts[:, 0], pts[:, 1]), 0, q).v
    axis = _axis_integral(a, b, F.base_point, (pts[:, 0], pts[:, 1]), q)
    return float(np.max(np.abs(ray - axis))) if len(pts) else 0.0


def _reconstruct(F, a, b, label, derivative, q) -> ScalarField2:
    base = F.base_point

    if derivative == "analytic":

        def fn(p, order):
            return _ray_integral(a, b, base, p, order, q)

    elif derivative == "fd":
        h = 1e-6

        def fn(p, order):
            value = _ray_integral(a, b, base, p, 0, q).v
            if order == 0:
                return Jet(value)
            X, Y = _as_arrays(p)
            fx = (_ray_integral(a, b, base, (X + h, Y), 0, q).v - _ray_integral(a, b, base, (X - h, Y), 0, q).v) / (2 * h)
            fy = (_ray_integral(a, b, base, (X, Y + h), 0, q).v - _ray_integral(a, b, base, (X, Y - h), 0, q).v) / (2 * h)
            return Jet(value, (fx, fy))

    else:
        raise ValueError(f"derivative must be 'analytic' or 'fd', got {derivative!r}")

    return ScalarField2(fn, 1, label)


def _check_paths(F, kind, points, q):
    region = F.sampling_region
    bx, by = F.base_point
    usable = [p for p in points if region.contains((p[0], by))]
    gap = path_discrepancy(F, usable, kind, q) if usable else 0.0
    if gap > PATH_TOL:
        raise PathDependenceError(f"ray and axis paths disagree by {gap:.3g}")


def reconstruct_stream_function(
    F: FlowField,
    sample_points=None,
    tol: float = INCOMPRESSIBLE_TOL,
    q: QuadratureSpec = DEFAULT_SPEC,
    derivative: str = "analytic",
) -> ScalarField2:
    """Stream function ``f`` with ``ham(f) = v`` and ``f(base) = 0``.

    Raises :class:`IncompressibilityError` if the divergence is not within
    ``tol`` at the sample points, and :class:`PathDependenceError` if ray and
    axis-path integrals disagree there.  The result carries value and first
    partials only.
    """
    pts = F.samples() if sample_points is None else list(sample_points)
    check = check_incompressible(F, pts, tol)
    if not check.ok:
        raise IncompressibilityError(f"velocity is not divergence-free: max |div v| = {check.max_abs:.3g}")
    _check_paths(F, "stream", pts, q)
    a, b = _stream_form(F.v)
    return _reconstruct(F, a, b, "stream", derivative, q)


def reconstruct_potential(
    F: FlowField,
    sample_points=None,
    tol: float = INCOMPRESSIBLE_TOL,
    q: QuadratureSpec = DEFAULT_SPEC,
    derivative: str = "analytic",
) -> ScalarField2:
    """Velocity potential ``g`` with ``grad2(g) = v`` and ``g(base) = 0``."""
    pts = F.samples() if sample_points is None else list(sample_points)
    check = check_irrotational(F, pts, tol)
    if not check.ok:
        raise VorticityError(f"velocity has vorticity: max |curl3 v| = {check.max_abs:.3g}")
    _check_paths(F, "potential", pts, q)
    a, b = _potential_form(F.v)
    return _reconstruct(F, a, b, "potential", derivative, q)


# --------------------------------------------------------------------------
# Streamlines


@dataclass
class Streamline:
    points: list[tuple[float, float]]
    dt: float
    method: str = "RK4"
    truncated: bool = False
    reason: str | None = None
    values: list[float] | None = dc_field(default=None, repr=False)

    @property
    def times(self) -> list[float]:
        return [k * self.dt for k in range(len(self.points))]

    def to_csv(self, f: ScalarField2 | None = None) -> str:
        """Rows ``t, x, y, f_value``; ``f_value`` is ``nan`` without ``f``."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "x", "y", "f_value"])
        for t, (x, y) in zip(self.times, self.points):
            fv = float(f.value((x, y))) if f is not None else math.nan
            writer.writerow([repr(float(t)), repr(x), repr(y), repr(fv)])
        return buf.getvalue()


def trace_streamline(
    F: FlowField,
    start: Sequence[float],
    dt: float = 1e-3,
    steps: int = 1000,
    bounds: Region2 | None = None,
) -> Streamline:
    """Integrate ``r' = v(r)`` with classical fixed-step RK4.

    Tracing stops early, with ``truncated`` set, if the path leaves
    ``bounds`` (default: the flow's domain hint, unbounded if none) or the
    velocity cannot be evaluated.
    """
    region = bounds if bounds is not None else F.domain_hint
    v = F.v

    def vel(x, y):
        vx, vy = v((x, y))
        return float(vx), float(vy)

    x, y = map(float, start)
    line = Streamline([(x, y)], dt)
    if region is not None and not region.contains((x, y)):
        line.truncated, line.reason = True, "start point outside domain"
        return line
    for _ in range(steps):
        try:
            k1 = vel(x, y)
            k2 = vel(x + 0.5 * dt * k1[0], y + 0.5 * dt * k1[1])
            k3 = vel(x + 0.5 * dt * k2[0], y + 0.5 * dt * k2[1])
            k4 = vel(x + dt * k3[0], y + dt * k3[1])
        except DomainError as exc:
            line.truncated, line.reason = True, f"domain error: {exc}"
            break
        x += dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        y += dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        if not (math.isfinite(x) and math.isfinite(y)):
            line.truncated, line.reason = True, "non-finite position"
            break
        if region is not None and not region.contains((x, y)):
            line.truncated, line.reason = True, "left domain"
            break
        line.points.append((x, y))
    return line


def area_flux(F: FlowField, path: Curve2, q: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Net area crossing ``path`` per unit time: ``int v_y dx - v_x dy``."""
    a, b = _stream_form(F.v)
    return line_integral(OneForm2(a, b), path, q)


# --------------------------------------------------------------------------
# Complex potential


class ComplexDerivative(NamedTuple):
    value: complex
    holomorphic: bool


def complex_derivative(F: FlowField, p: Sequence[float], tol: float = INCOMPRESSIBLE_TOL) -> ComplexDerivative:
    """``h'(z) = v_y + i v_x`` at ``p``, where ``h = f + i g``.

    ``holomorphic`` reports whether the flow is both divergence- and
    curl-free at ``p``; the value is returned either way.
    """
    p = tuple(map(float, p))
    vx, vy = F.v(p)
    ok = abs(float(div2(F.v).value(p))) <= tol and abs(float(curl3(F.v).value(p))) <= tol
    return ComplexDerivative(complex(float(vy), float(vx)), ok)


@dataclass(frozen=True)
class CauchyRiemannReport:
    """Residuals of ``-f_y = g_x`` and ``f_x = g_y`` over the samples."""

    residual_x: float  # max |-f_y - g_x|
    residual_y: float  # max |f_x - g_y|
    laplacian_f: float | None
    laplacian_g: float | None
    tol: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "residual_x": self.residual_x,
            "residual_y": self.residual_y,
            "laplacian_f": self.laplacian_f,
            "laplacian_g": self.laplacian_g,
            "tol": self.tol,
            "pass": self.passed,
        }


def check_cauchy_riemann(f, g, samples, tol: float = CR_TOL) -> CauchyRiemannReport:
    """Test whether ``h = f + i g`` satisfies the Cauchy-Riemann equations.

    When both residuals are within ``tol`` the Laplacians of ``f`` and ``g``
    are also required to vanish, if second partials are available.
    """
    f, g = field(f), field(g)
    pts = np.asarray(list(samples), dtype=float).reshape(-1, 2)
    P = (pts[:, 0], pts[:, 1])
    jf, jg = f(P, 1), g(P, 1)
    shape = pts[:, 0].shape
    fx, fy = (np.broadcast_to(t, shape) for t in jf.d)
    gx, gy = (np.broadcast_to(t, shape) for t in jg.d)
    r1 = float(np.max(np.abs(-fy - gx))) if len(pts) else 0.0
    r2 = float(np.max(np.abs(fx - gy))) if len(pts) else 0.0
    passed = r1 <= tol and r2 <= tol
    lf = lg = None
    if passed:
        if f.max_order >= 2:
            lf = _max_abs(laplacian(f), list(map(tuple, pts)))
            passed = passed and lf <= tol
        if g.max_order >= 2:
            lg = _max_abs(laplacian(g), list(map(tuple, pts)))
            passed = passed and lg <= tol
    return CauchyRiemannReport(r1, r2, lf, lg, tol, passed)
