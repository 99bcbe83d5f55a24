"""Expression language for scalar fields, with exact derivatives.

Expressions are parsed into an immutable tree and evaluated with
second-order forward-mode automatic differentiation.  Every entry of a
:class:`Jet` is either a float or a numpy array, so the same tree can be
evaluated at one point or at a whole batch of quadrature nodes at once.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' number)?
    base   := number | ident | ident '(' expr ')' | '(' expr ')' | '-' base

Note that ``-`` binds tighter than ``^``: ``-x^2`` is ``(-x)^2``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

Number = Union[float, np.ndarray]

FUNCTIONS = ("sin", "cos", "exp", "ln", "sqrt", "tanh")
CONSTANTS = {"pi": math.pi}


class FieldError(Exception):
    """Base class for every error raised by this package."""


class ParseError(FieldError):
    """Malformed expression text."""

    def __init__(self, message: str, position: int, source: str = ""):
        self.position = position
        self.source = source
        super().__init__(f"{message} at offset {position}")


class UnknownVariableError(ParseError):
    """Identifier that is neither an admissible variable nor a function."""


class DomainError(FieldError):
    """Evaluation outside the domain of some node (ln of a negative, ...)."""

    def __init__(self, message: str, node: "Node | None" = None):
        self.node = node
        where = f" in '{to_text(node)}'" if node is not None else ""
        super().__init__(message + where)


class NonDifferentiableError(DomainError):
    """The value exists but the requested derivatives do not (sqrt at 0)."""


# --------------------------------------------------------------------------
# Jets


def _tri(n: int) -> int:
    return n * (n + 1) // 2


def hessian_index(i: int, j: int, n: int) -> int:
    """Position of d^2/dx_i dx_j in the packed upper triangle (row major)."""
    if i > j:
        i, j = j, i
    return i * n - i * (i - 1) // 2 + (j - i)


class Jet:
    """Truncated Taylor data of a scalar field at a point.

    ``d`` holds the first partials and ``h`` the packed upper triangle of the
    Hessian (for two variables: xx, xy, yy; for three: xx, xy, xz, yy, yz,
    zz).  ``d`` or ``h`` is ``None`` when that order is not available, which
    is how fields derived by differentiation report their reduced order.
    """

    __slots__ = ("v", "d", "h")

    def __init__(self, v: Number, d: tuple | None = None, h: tuple | None = None):
        self.v = v
        self.d = d
        self.h = h if d is not None else None

    @property
    def order(self) -> int:
        if self.d is None:
            return 0
        return 1 if self.h is None else 2

    @property
    def nvars(self) -> int:
        return len(self.d) if self.d is not None else 0

    def truncate(self, order: int) -> "Jet":
        if order >= self.order:
            return self
        if order == 0:
            return Jet(self.v)
        return Jet(self.v, self.d)

    @classmethod
    def constant(cls, value: Number, nvars: int, order: int = 2) -> "Jet":
        if order == 0:
            return cls(value)
        d = (0.0,) * nvars
        return cls(value, d, (0.0,) * _tri(nvars) if order > 1 else None)

    @classmethod
    def variable(cls, value: Number, index: int, nvars: int, order: int = 2) -> "Jet":
        if order == 0:
            return cls(value)
        d = tuple(1.0 if k == index else 0.0 for k in range(nvars))
        return cls(value, d, (0.0,) * _tri(nvars) if order > 1 else None)

    def partial(self, i: int) -> "Jet":
        """Jet of the field d/dx_i, one order lower than this one."""
        if self.d is None:
            raise ValueError("jet carries no derivatives; cannot differentiate further")
        if self.h is None:
            return Jet(self.d[i])
        n = len(self.d)
        return Jet(self.d[i], tuple(self.h[hessian_index(i, j, n)] for j in range(n)))

    # named accessors ----------------------------------------------------
    def _h(self, i: int, j: int) -> Number:
        if self.h is None:
            raise ValueError("second derivatives are not available on this jet")
        return self.h[hessian_index(i, j, len(self.d))]

    def _d(self, i: int) -> Number:
        if self.d is None:
            raise ValueError("first derivatives are not available on this jet")
        return self.d[i]

    dx = property(lambda self: self._d(0))
    dy = property(lambda self: self._d(1))
    dz = property(lambda self: self._d(2))
    dxx = property(lambda self: self._h(0, 0))
    dxy = property(lambda self: self._h(0, 1))
    dyy = property(lambda self: self._h(1, 1))
    dxz = property(lambda self: self._h(0, 2))
    dyz = property(lambda self: self._h(1, 2))
    dzz = property(lambda self: self._h(2, 2))

    def as_tuple(self) -> tuple:
        out = [self.v]
        if self.d is not None:
            out.extend(self.d)
        if self.h is not None:
            out.extend(self.h)
        return tuple(out)

    def __repr__(self) -> str:
        return f"Jet(v={self.v!r}, d={self.d!r}, h={self.h!r})"

    # arithmetic ---------------------------------------------------------
    def __add__(self, other: "Jet | float") -> "Jet":
        if not isinstance(other, Jet):
            return Jet(self.v + other, self.d, self.h)
        order = min(self.order, other.order)
        d = h = None
        if order >= 1:
            d = tuple(a + b for a, b in zip(self.d, other.d))
        if order >= 2:
            h = tuple(a + b for a, b in zip(self.h, other.h))
        return Jet(self.v + other.v, d, h)

    __radd__ = __add__

    def __neg__(self) -> "Jet":
        d = tuple(-a for a in self.d) if self.d is not None else None
        h = tuple(-a for a in self.h) if self.h is not None else None
        return Jet(-self.v, d, h)

    def __sub__(self, other: "Jet | float") -> "Jet":
        return self + (-other)

    def __rsub__(self, other: float) -> "Jet":
        return (-self) + other

    def scale(self, c: Number) -> "Jet":
        d = tuple(c * a for a in self.d) if self.d is not None else None
        h = tuple(c * a for a in self.h) if self.h is not None else None
        return Jet(c * self.v, d, h)

    def __mul__(self, other: "Jet | float") -> "Jet":
        if not isinstance(other, Jet):
            return self.scale(other)
        f, g = self, other
        order = min(f.order, g.order)
        d = h = None
        if order >= 1:
            d = tuple(f.v * gb + g.v * fa for fa, gb in zip(f.d, g.d))
        if order >= 2:
            n = len(f.d)
            h = []
            for i in range(n):
                for j in range(i, n):
                    k = hessian_index(i, j, n)
                    h.append(f.v * g.h[k] + g.v * f.h[k] + f.d[i] * g.d[j] + f.d[j] * g.d[i])
            h = tuple(h)
        return Jet(f.v * g.v, d, h)

    __rmul__ = __mul__

    def chain(self, f0: Number, f1: Number = None, f2: Number = None) -> "Jet":
        """Compose with a scalar function phi given phi(u), phi'(u), phi''(u)."""
        d = h = None
        if self.d is not None:
            d = tuple(f1 * a for a in self.d)
        if self.h is not None:
            n = len(self.d)
            h = []
            for i in range(n):
                for j in range(i, n):
                    h.append(f1 * self.h[hessian_index(i, j, n)] + f2 * self.d[i] * self.d[j])
            h = tuple(h)
        return Jet(f0, d, h)


# Spec-facing name: a jet in the two plane variables.
Jet2 = Jet


# --------------------------------------------------------------------------
# Tree


class Node:
    __slots__ = ()


@dataclass(frozen=True)
class Const(Node):
    value: float


@dataclass(frozen=True)
class Var(Node):
    name: str


@dataclass(frozen=True)
class Unary(Node):
    op: str  # 'neg' or one of FUNCTIONS
    arg: Node


@dataclass(frozen=True)
class Binary(Node):
    op: str  # '+', '-', '*', '/'
    left: Node
    right: Node


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: float


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _fmt_number(value: float) -> str:
    if value == int(value) and abs(value) < 1e15:
        text = str(int(value))
    else:
        text = repr(float(value))
    return f"({text})" if value < 0 else text


def _base_text(node: Node) -> str:
    # operands of unary minus and '^' must themselves be bases
    if isinstance(node, (Binary, Pow)):
        return f"({to_text(node)})"
    return to_text(node)


def to_text(node: Node, parent_prec: int = 0, right: bool = False) -> str:
    """Render a tree as source text that parses back to the same tree."""
    if isinstance(node, Const):
        return _fmt_number(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Unary):
        if node.op == "neg":
            return "-" + _base_text(node.arg)
        return f"{node.op}({to_text(node.arg)})"
    if isinstance(node, Pow):
        return f"{_base_text(node.base)}^{_fmt_number(node.exponent)}"
    if isinstance(node, Binary):
        prec = _PREC[node.op]
        text = f"{to_text(node.left, prec)} {node.op} {to_text(node.right, prec, right=True)}"
        if prec < parent_prec or (right and prec == parent_prec):
            return f"({text})"
        return text
    raise TypeError(f"not an expression node: {node!r}")


# --------------------------------------------------------------------------
# Parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(source) and source[pos].isspace():
            pos += 1
        if pos >= len(source):
            break
        m = _TOKEN.match(source, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {source[pos]!r}", pos, source)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str, variables: Sequence[str]):
        self.source = source
        self.vars = tuple(variables)
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected: str):
        kind, text, pos = self.peek()
        found = "end of input" if kind == "end" else repr(text)
        raise ParseError(f"expected {expected}, found {found}", pos, self.source)

    def expect(self, text: str) -> None:
        if self.peek()[1] != text or self.peek()[0] != "op":
            self.fail(repr(text))
        self.advance()

    def parse(self) -> Node:
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail("operator or end of input")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.advance()[1]
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.advance()[1]
            node = Binary(op, node, self.factor())
        return node

    def factor(self) -> Node:
        node = self.base()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.advance()
            if self.peek()[0] != "num":
                self.fail("numeric exponent")
            node = Pow(node, float(self.advance()[1]))
        return node

    def base(self) -> Node:
        kind, text, pos = self.peek()
        if kind == "num":
            self.advance()
            return Const(float(text))
        if kind == "id":
            self.advance()
            if self.peek()[0] == "op" and self.peek()[1] == "(":
                if text not in FUNCTIONS:
                    raise ParseError(f"unknown function {text!r}", pos, self.source)
                self.advance()
                arg = self.expr()
                self.expect(")")
                return Unary(text, arg)
            if text in self.vars:
                return Var(text)
            if text in CONSTANTS:
                return Const(CONSTANTS[text])
            if text in FUNCTIONS:
                self.fail("'(' after function name")
            raise UnknownVariableError(
                f"unknown variable {text!r} (admissible: {', '.join(self.vars)})", pos, self.source
            )
        if kind == "op" and text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if kind == "op" and text == "-":
            self.advance()
            return Unary("neg", self.base())
        self.fail("number, identifier, '(' or '-'")


# --------------------------------------------------------------------------
# Evaluation


def _any(cond) -> bool:
    return bool(np.any(cond))


def _integral(c: float) -> bool:
    return c == int(c)


def _pow(node: Pow, u: Jet, order: int) -> Jet:
    c = node.exponent
    x = u.v
    if c == 0:
        return u.chain(np.ones_like(x) if isinstance(x, np.ndarray) else 1.0, 0.0, 0.0)
    if c == 1:
        return u.chain(x, 1.0, 0.0)
    if _integral(c):
        if c < 0 and _any(x == 0):
            raise DomainError("negative power of zero", node)
        f0 = np.power(x, c)
        f1 = c * np.power(x, c - 1) if order >= 1 else None
        f2 = c * (c - 1) * np.power(x, c - 2) if order >= 2 else None
        return u.chain(f0, f1, f2)
    if _any(x < 0):
        raise DomainError("non-integer power of a negative number", node)
    if _any(x == 0):
        if c < 0:
            raise DomainError("negative power of zero", node)
        if (order >= 1 and c < 1) or (order >= 2 and c < 2):
            raise NonDifferentiableError(f"x^{c} is not differentiable at 0", node)
        with np.errstate(divide="ignore", invalid="ignore"):
            f1 = np.where(x == 0, 0.0, c * np.power(x, c - 1)) if order >= 1 else None
            f2 = np.where(x == 0, 0.0, c * (c - 1) * np.power(x, c - 2)) if order >= 2 else None
        return u.chain(np.power(x, c), f1, f2)
    f0 = np.power(x, c)
    f1 = c * f0 / x if order >= 1 else None
    f2 = c * (c - 1) * f0 / (x * x) if order >= 2 else None
    return u.chain(f0, f1, f2)


def _unary(node: Unary, u: Jet, order: int) -> Jet:
    op, x = node.op, u.v
    if op == "neg":
        return -u
    if op == "sin":
        s, c = np.sin(x), np.cos(x)
        return u.chain(s, c, -s)
    if op == "cos":
        s, c = np.sin(x), np.cos(x)
        return u.chain(c, -s, -c)
    if op == "exp":
        e = np.exp(x)
        return u.chain(e, e, e)
    if op == "tanh":
        t = np.tanh(x)
        s2 = 1.0 - t * t
        return u.chain(t, s2, -2.0 * t * s2)
    if op == "ln":
        if _any(x <= 0):
            raise DomainError("logarithm of a non-positive number", node)
        return u.chain(np.log(x), 1.0 / x, -1.0 / (x * x))
    if op == "sqrt":
        if _any(x < 0):
            raise DomainError("square root of a negative number", node)
        r = np.sqrt(x)
        if order >= 1 and _any(x == 0):
            raise NonDifferentiableError("sqrt is not differentiable at 0", node)
        if order == 0:
            return Jet(r)
        return u.chain(r, 0.5 / r, -0.25 / (r * x))
    raise ValueError(f"unknown function {op!r}")


def _eval(node: Node, env: dict[str, Jet], nvars: int, order: int) -> Jet:
    if isinstance(node, Const):
        return Jet.constant(node.value, nvars, order)
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Unary):
        return _unary(node, _eval(node.arg, env, nvars, order), order)
    if isinstance(node, Pow):
        return _pow(node, _eval(node.base, env, nvars, order), order)
    if isinstance(node, Binary):
        a = _eval(node.left, env, nvars, order)
        b = _eval(node.right, env, nvars, order)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if _any(b.v == 0):
            raise DomainError("division by zero", node)
        w = b.v
        return a * b.chain(1.0 / w, -1.0 / (w * w), 2.0 / (w * w * w))
    raise TypeError(f"not an expression node: {node!r}")


@dataclass(frozen=True)
class FieldExpr:
    """A parsed scalar expression over an ordered tuple of variables."""

    root: Node
    vars: tuple[str, ...] = ("x", "y")

    def __post_init__(self):
        unknown = free_variables(self.root) - set(self.vars)
        if unknown:
            raise UnknownVariableError(f"unknown variable(s) {sorted(unknown)}", 0)

    def __str__(self) -> str:
        return to_text(self.root)

    def jet(self, point: Sequence[Number], order: int = 2) -> Jet:
        """Value and partials (up to ``order``) at ``point``.

        ``point`` has one coordinate per variable; coordinates may be numpy
        arrays of a common shape for batch evaluation.
        """
        if len(point) != len(self.vars):
            raise ValueError(f"expected {len(self.vars)} coordinates, got {len(point)}")
        n = len(self.vars)
        env = {name: Jet.variable(point[k], k, n, order) for k, name in enumerate(self.vars)}
        return _eval(self.root, env, n, order)

    def value(self, point: Sequence[Number]) -> Number:
        return self.jet(point, order=0).v

    def substitute(self, name: str, replacement: Node) -> "FieldExpr":
        return FieldExpr(_substitute(self.root, name, replacement), self.vars)


def free_variables(node: Node) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Unary):
        return free_variables(node.arg)
    if isinstance(node, Pow):
        return free_variables(node.base)
    if isinstance(node, Binary):
        return free_variables(node.left) | free_variables(node.right)
    return set()


def _substitute(node: Node, name: str, replacement: Node) -> Node:
    if isinstance(node, Var):
        return replacement if node.name == name else node
    if isinstance(node, Unary):
        return Unary(node.op, _substitute(node.arg, name, replacement))
    if isinstance(node, Pow):
        return Pow(_substitute(node.base, name, replacement), node.exponent)
    if isinstance(node, Binary):
        return Binary(node.op, _substitute(node.left, name, replacement), _substitute(node.right, name, replacement))
    return node


def parse_expr(source: str, vars: Sequence[str] = ("x", "y")) -> FieldExpr:
    """Parse ``source`` into a :class:`FieldExpr` over ``vars``.

    >>> parse_expr("x^2 + y^2").root
    Binary(op='+', left=Pow(base=Var(name='x'), exponent=2.0), right=Pow(base=Var(name='y'), exponent=2.0))
    """
    return FieldExpr(_Parser(source, vars).parse(), tuple(vars))


def evaluate(f: FieldExpr, p: Sequence[Number]) -> Number:
    """Value of ``f`` at ``p``; raises :class:`DomainError` off the domain."""
    return f.value(p)


def eval_jet(f: FieldExpr, p: Sequence[Number], order: int = 2) -> Jet:
    return f.jet(p, order)
