"""Vector calculus in the plane, organised around differential forms.

Scalar fields are parsed expressions in ``x, y`` evaluated with exact
second-order automatic differentiation.  On top of them sit the planar
operators (``grad2``, ``curl3``, ``ham``, ``div2``, ``perp``, ``laplacian``),
the form-level building blocks they factor through, quadrature for the
gradient and Green theorems, and stream-function/potential tools for planar
flows.
"""

from .calc2d import (
    OneForm2,
    ScalarField2,
    TwoForm2,
    VectorField2,
    curl3,
    d0,
    d1,
    div2,
    field,
    flat,
    grad2,
    ham,
    hodge0,
    hodge1,
    hodge2,
    laplacian,
    perp,
    sharp,
)
from .calc3d import ScalarField3, VectorField3, curl, div3, embed_scalar, embed_vector, grad3
from .fieldexpr import (
    DomainError,
    FieldError,
    FieldExpr,
    Jet,
    Jet2,
    NonDifferentiableError,
    ParseError,
    UnknownVariableError,
    eval_jet,
    evaluate,
    parse_expr,
)
from .hydro import (
    FlowField,
    IncompressibilityError,
    PathDependenceError,
    Streamline,
    VorticityError,
    area_flux,
    check_cauchy_riemann,
    check_incompressible,
    complex_derivative,
    reconstruct_potential,
    reconstruct_stream_function,
    trace_streamline,
    vorticity_at,
)
from .quadrature import (
    Curve2,
    Disc,
    NonSimplePolygonError,
    Polygon,
    QuadratureSpec,
    Rectangle,
    Region2,
    area_integral,
    line_integral,
    verify_gradient_theorem,
    verify_green,
    verify_green_flux,
)

__version__ = "0.1.0"
