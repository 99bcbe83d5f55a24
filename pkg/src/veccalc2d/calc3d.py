"""Cartesian grad, curl and div in three dimensions, and planar embeddings.

Only what is needed to check the classical identities and to compare the
planar operators with the third dimension added back in.  Jets here have
three variables (x, y, z).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .calc2d import ScalarField2, VectorField2, field as field2
from .fieldexpr import FieldExpr, Jet, Number, hessian_index, parse_expr

Point3 = tuple  # (x, y, z)


class ScalarField3:
    __slots__ = ("_fn", "max_order", "label")

    def __init__(self, fn: Callable[[Sequence[Number], int], Jet], max_order: int = 2, label: str = "<field>"):
        self._fn = fn
        self.max_order = max_order
        self.label = label

    def __call__(self, p: Point3, order: int = 2) -> Jet:
        return self._fn(p, min(order, self.max_order))

    def value(self, p: Point3) -> Number:
        return self(p, 0).v

    @classmethod
    def from_expr(cls, expr: FieldExpr | str) -> "ScalarField3":
        if isinstance(expr, str):
            expr = parse_expr(expr, ("x", "y", "z"))
        if expr.vars != ("x", "y", "z"):
            raise ValueError(f"space fields use variables (x, y, z), got {expr.vars}")
        return cls(expr.jet, 2, str(expr))

    @classmethod
    def constant(cls, c: float) -> "ScalarField3":
        return cls(lambda p, order: Jet.constant(c, 3, order), 2, repr(c))


def field3(source) -> ScalarField3:
    if isinstance(source, ScalarField3):
        return source
    if isinstance(source, (int, float)):
        return ScalarField3.constant(float(source))
    return ScalarField3.from_expr(source)


@dataclass(frozen=True)
class VectorField3:
    ax: ScalarField3
    ay: ScalarField3
    az: ScalarField3

    def __call__(self, p: Point3) -> tuple[Number, Number, Number]:
        return self.ax.value(p), self.ay.value(p), self.az.value(p)

    @property
    def components(self) -> tuple[ScalarField3, ScalarField3, ScalarField3]:
        return self.ax, self.ay, self.az

    @classmethod
    def from_exprs(cls, ax, ay, az) -> "VectorField3":
        return cls(field3(ax), field3(ay), field3(az))


def _order(*fields: ScalarField3) -> int:
    order = min(f.max_order for f in fields)
    if order < 1:
        raise ValueError("field has no derivatives left to take")
    return order - 1


def grad3(f) -> VectorField3:
    f = field3(f)
    m = _order(f)

    def comp(i):
        return ScalarField3(lambda p, order: f(p, order + 1).partial(i), m, f"grad({f.label})[{i}]")

    return VectorField3(comp(0), comp(1), comp(2))


def curl(A: VectorField3) -> VectorField3:
    m = _order(*A.components)
    c = A.components

    def comp(i):
        j, k = (i + 1) % 3, (i + 2) % 3

        def fn(p, order):
            # (curl A)_i = d_j A_k - d_k A_j, (i, j, k) cyclic
            return c[k](p, order + 1).partial(j) - c[j](p, order + 1).partial(k)

        return ScalarField3(fn, m, f"curl[{i}]")

    return VectorField3(comp(0), comp(1), comp(2))


def div3(A: VectorField3) -> ScalarField3:
    m = _order(*A.components)

    def fn(p, order):
        ax, ay, az = (c(p, order + 1) for c in A.components)
        return ax.partial(0) + ay.partial(1) + az.partial(2)

    return ScalarField3(fn, m, "div")


def lift(f: ScalarField2) -> ScalarField3:
    """View a plane field as a z-independent field in space."""

    def fn(p, order):
        j = f((p[0], p[1]), order)
        d = h = None
        if j.d is not None:
            d = (j.d[0], j.d[1], 0.0)
        if j.h is not None:
            h = [0.0] * 6
            h[hessian_index(0, 0, 3)] = j.dxx
            h[hessian_index(0, 1, 3)] = j.dxy
            h[hessian_index(1, 1, 3)] = j.dyy
            h = tuple(h)
        return Jet(j.v, d, h)

    return ScalarField3(fn, f.max_order, f.label)


def _negate3(f: ScalarField3) -> ScalarField3:
    return ScalarField3(lambda p, order: -f(p, order), f.max_order, f"-({f.label})")


def embed_scalar(f: ScalarField2) -> VectorField3:
    """``(0, 0, -f(x, y))``; its curl carries the Hamiltonian field of ``f``."""
    f = field2(f)
    zero = ScalarField3.constant(0.0)
    return VectorField3(zero, zero, _negate3(lift(f)))


def embed_vector(A: VectorField2) -> VectorField3:
    """``(Ax(x, y), Ay(x, y), 0)``."""
    return VectorField3(lift(A.ax), lift(A.ay), ScalarField3.constant(0.0))
