"""Exterior calculus in the Euclidean plane.

Forms are stored by their coefficient fields in the ``dx, dy`` basis:
a 0-form is a function ``f``, a 1-form ``p dx + q dy`` and a 2-form
``g dx^dy``.  The operators ``grad2``, ``curl3``, ``ham`` and ``div2`` are
written out directly from their Cartesian formulas.  The building blocks
``flat``, ``sharp``, ``hodge*`` and ``d0``/``d1`` are kept as separate
functions so that the composed routes can be checked against the direct ones
(see :func:`grad_via_forms` and friends).

Fields are lazy: an operator returns a new field whose jet is computed from
the jets of its inputs.  Differentiating a field lowers the available jet
order by one, so first-order operators may be chained once on top of an
expression field, and :func:`laplacian` reads second partials straight from
its source.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .fieldexpr import FieldExpr, Jet, Number, parse_expr

Point2 = tuple  # (x, y); coordinates may be numpy arrays of a common shape

JetFn = Callable[[Sequence[Number], int], Jet]


class ScalarField2:
    """A scalar field (0-form) on the plane.

    Calling the field returns a :class:`Jet` with derivatives up to the
    requested order, capped by what the field can supply.
    """

    __slots__ = ("_fn", "max_order", "label")

    def __init__(self, fn: JetFn, max_order: int = 2, label: str = "<field>"):
        self._fn = fn
        self.max_order = max_order
        self.label = label

    def __call__(self, p: Point2, order: int = 2) -> Jet:
        order = min(order, self.max_order)
        return self._fn(p, order)

    def value(self, p: Point2) -> Number:
        return self(p, 0).v

    def __repr__(self) -> str:
        return f"ScalarField2({self.label})"

    @classmethod
    def from_expr(cls, expr: FieldExpr | str) -> "ScalarField2":
        if isinstance(expr, str):
            expr = parse_expr(expr, ("x", "y"))
        if expr.vars != ("x", "y"):
            raise ValueError(f"plane fields use variables (x, y), got {expr.vars}")
        return cls(expr.jet, 2, str(expr))

    @classmethod
    def constant(cls, c: float) -> "ScalarField2":
        return cls(lambda p, order: Jet.constant(c, 2, order), 2, repr(c))


def field(source: str | FieldExpr | ScalarField2 | float) -> ScalarField2:
    """Coerce an expression string, a parsed expression or a number to a field."""
    if isinstance(source, ScalarField2):
        return source
    if isinstance(source, (int, float)):
        return ScalarField2.constant(float(source))
    return ScalarField2.from_expr(source)


def _require(order: int, *fields: ScalarField2) -> None:
    for f in fields:
        if f.max_order < order:
            raise ValueError(f"{f.label} has derivatives only up to order {f.max_order}; {order} needed")


def _partial(f: ScalarField2, i: int) -> ScalarField2:
    _require(1, f)
    return ScalarField2(lambda p, order: f(p, order + 1).partial(i), f.max_order - 1, f"d{'xy'[i]}({f.label})")


def _neg(f: ScalarField2) -> ScalarField2:
    return ScalarField2(lambda p, order: -f(p, order), f.max_order, f"-({f.label})")


def _sub(f: ScalarField2, g: ScalarField2) -> ScalarField2:
    return ScalarField2(
        lambda p, order: f(p, order) - g(p, order), min(f.max_order, g.max_order), f"{f.label} - {g.label}"
    )


def _add(f: ScalarField2, g: ScalarField2) -> ScalarField2:
    return ScalarField2(
        lambda p, order: f(p, order) + g(p, order), min(f.max_order, g.max_order), f"{f.label} + {g.label}"
    )


@dataclass(frozen=True)
class VectorField2:
    ax: ScalarField2
    ay: ScalarField2

    def __call__(self, p: Point2) -> tuple[Number, Number]:
        return self.ax.value(p), self.ay.value(p)

    @classmethod
    def from_exprs(cls, ax: str | FieldExpr | float, ay: str | FieldExpr | float) -> "VectorField2":
        return cls(field(ax), field(ay))

    @classmethod
    def parse(cls, text: str) -> "VectorField2":
        """Parse ``"Ax;Ay"``."""
        parts = text.split(";")
        if len(parts) != 2:
            raise ValueError(f"vector field needs two ';'-separated components, got {len(parts)}")
        return cls.from_exprs(parts[0], parts[1])


@dataclass(frozen=True)
class OneForm2:
    """The 1-form ``p dx + q dy``."""

    p: ScalarField2
    q: ScalarField2

    def __call__(self, pt: Point2) -> tuple[Number, Number]:
        return self.p.value(pt), self.q.value(pt)


@dataclass(frozen=True)
class TwoForm2:
    """The 2-form ``g dx^dy``."""

    g: ScalarField2

    def __call__(self, pt: Point2) -> Number:
        return self.g.value(pt)


# Area form dS = dx^dy.
dS = TwoForm2(ScalarField2.constant(1.0))


# --------------------------------------------------------------------------
# Building blocks


def flat(A: VectorField2) -> OneForm2:
    return OneForm2(A.ax, A.ay)


def sharp(alpha: OneForm2) -> VectorField2:
    return VectorField2(alpha.p, alpha.q)


def hodge0(f: ScalarField2) -> TwoForm2:
    return TwoForm2(f)


def hodge2(beta: TwoForm2) -> ScalarField2:
    return beta.g


def hodge1(alpha: OneForm2) -> OneForm2:
    """``*dx = dy``, ``*dy = -dx``: ``p dx + q dy -> -q dx + p dy``."""
    return OneForm2(_neg(alpha.q), alpha.p)


def hodge1_inv(alpha: OneForm2) -> OneForm2:
    # on 1-forms ** = -1, so the inverse is -*
    return OneForm2(alpha.q, _neg(alpha.p))


def d0(f: ScalarField2) -> OneForm2:
    return OneForm2(_partial(f, 0), _partial(f, 1))


def d1(alpha: OneForm2) -> TwoForm2:
    return TwoForm2(_sub(_partial(alpha.q, 0), _partial(alpha.p, 1)))


def neg_form(alpha: OneForm2) -> OneForm2:
    return OneForm2(_neg(alpha.p), _neg(alpha.q))


# --------------------------------------------------------------------------
# Direct Cartesian operators


def grad2(f: ScalarField2) -> VectorField2:
    f = field(f)
    _require(1, f)

    def comp(i):
        return ScalarField2(lambda p, order: f(p, order + 1).partial(i), f.max_order - 1, f"grad({f.label})[{i}]")

    return VectorField2(comp(0), comp(1))


def curl3(A: VectorField2) -> ScalarField2:
    """Scalar curl ``dAy/dx - dAx/dy``."""
    _require(1, A.ax, A.ay)

    def fn(p, order):
        return A.ay(p, order + 1).partial(0) - A.ax(p, order + 1).partial(1)

    return ScalarField2(fn, min(A.ax.max_order, A.ay.max_order) - 1, "curl3")


def ham(f: ScalarField2) -> VectorField2:
    """Hamiltonian field ``(-df/dy, df/dx)``."""
    f = field(f)
    _require(1, f)
    return VectorField2(
        ScalarField2(lambda p, order: -f(p, order + 1).partial(1), f.max_order - 1, f"ham({f.label})[0]"),
        ScalarField2(lambda p, order: f(p, order + 1).partial(0), f.max_order - 1, f"ham({f.label})[1]"),
    )


def div2(A: VectorField2) -> ScalarField2:
    _require(1, A.ax, A.ay)

    def fn(p, order):
        return A.ax(p, order + 1).partial(0) + A.ay(p, order + 1).partial(1)

    return ScalarField2(fn, min(A.ax.max_order, A.ay.max_order) - 1, "div")


def perp(A: VectorField2) -> VectorField2:
    """Rotation by a quarter turn counter-clockwise: ``(Ax, Ay) -> (-Ay, Ax)``."""
    return VectorField2(_neg(A.ay), A.ax)


def laplacian(f: ScalarField2) -> ScalarField2:
    """``d2f/dx2 + d2f/dy2`` read from the second-order jet of ``f``."""
    f = field(f)
    _require(2, f)

    def fn(p, order):
        j = f(p, 2)
        return Jet(j.dxx + j.dyy)

    return ScalarField2(fn, 0, f"lap({f.label})")


# --------------------------------------------------------------------------
# Composed routes through the form diagram


def grad_via_forms(f: ScalarField2) -> VectorField2:
    return sharp(d0(field(f)))


def curl3_via_forms(A: VectorField2) -> ScalarField2:
    return hodge2(d1(flat(A)))


def ham_via_forms(f: ScalarField2) -> VectorField2:
    return sharp(hodge1(d0(field(f))))


def div_via_forms(A: VectorField2) -> ScalarField2:
    """``-* d *^{-1} flat``: the sign makes it the ordinary divergence."""
    return _neg(hodge2(d1(hodge1_inv(flat(A)))))


def perp_via_forms(A: VectorField2) -> VectorField2:
    return sharp(hodge1(flat(A)))
