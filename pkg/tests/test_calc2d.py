import numpy as np
import pytest

from veccalc2d import calc2d as c2
from veccalc2d.calc2d import VectorField2, field

from corpus import SCALAR_2D, VECTOR_2D, random_points
from oracles import fd_jet


def _at(pts):
    return pts[:, 0], pts[:, 1]


def _vals(s, pts):
    return np.broadcast_to(np.asarray(s.value(_at(pts)), dtype=float), (len(pts),))


def _vec(A, pts):
    return np.stack([_vals(A.ax, pts), _vals(A.ay, pts)])


def _form(alpha, pts):
    return np.stack([_vals(alpha.p, pts), _vals(alpha.q, pts)])


PTS = random_points(100, seed=11)


# flat / sharp ---------------------------------------------------------------


def test_flat_of_unit_x_is_dx():
    alpha = c2.flat(VectorField2.from_exprs(1, 0))
    assert alpha((0.3, 0.4)) == (1.0, 0.0)


def test_flat_of_position_field():
    alpha = c2.flat(VectorField2.from_exprs("x", "y"))
    assert alpha((2.0, -3.0)) == (2.0, -3.0)


@pytest.mark.parametrize("comps", VECTOR_2D)
def test_sharp_flat_inverse(comps):
    A = VectorField2.from_exprs(*comps)
    assert np.array_equal(_vec(c2.sharp(c2.flat(A)), PTS), _vec(A, PTS))
    alpha = c2.OneForm2(field(comps[0]), field(comps[1]))
    assert np.array_equal(_form(c2.flat(c2.sharp(alpha)), PTS), _form(alpha, PTS))


# Hodge star -----------------------------------------------------------------


def test_hodge_of_one_is_area_form():
    beta = c2.hodge0(field(1))
    assert beta((0.1, 0.2)) == 1.0
    assert c2.hodge2(beta).value((0.1, 0.2)) == 1.0


def test_hodge0_transports_coefficient():
    beta = c2.hodge0(field("x^2*y"))
    assert beta((2.0, 3.0)) == 12.0


@pytest.mark.parametrize("source", SCALAR_2D)
def test_hodge2_hodge0_identity(source):
    f = field(source)
    assert np.array_equal(_vals(c2.hodge2(c2.hodge0(f)), PTS), _vals(f, PTS))


def test_hodge1_on_basis():
    dx = c2.OneForm2(field(1), field(0))
    dy = c2.OneForm2(field(0), field(1))
    assert c2.hodge1(dx)((0.0, 0.0)) == (-0.0, 1.0)
    assert c2.hodge1(dy)((0.0, 0.0)) == (-1.0, 0.0)


def test_hodge1_transports_coefficient():
    assert c2.hodge1(c2.OneForm2(field("y"), field(0)))((5.0, 2.0)) == (-0.0, 2.0)


@pytest.mark.parametrize("comps", VECTOR_2D)
def test_star_squared_is_minus_identity(comps):
    alpha = c2.OneForm2(field(comps[0]), field(comps[1]))
    assert np.array_equal(_form(c2.hodge1(c2.hodge1(alpha)), PTS), -_form(alpha, PTS))
    assert np.array_equal(_form(c2.hodge1_inv(c2.hodge1(alpha)), PTS), _form(alpha, PTS))


# exterior derivative --------------------------------------------------------


def test_d0_of_x_is_dx():
    assert c2.d0(field("x"))((0.7, -0.2)) == (1.0, 0.0)


def test_d0_sum_of_squares_matches_fd():
    f = field("x^2 + y^2")
    _, grad, _ = fd_jet(f.value, (1.0, 2.0), h=1e-5)
    assert c2.d0(f)((1.0, 2.0)) == (2.0, 4.0)
    assert grad == pytest.approx([2.0, 4.0], abs=1e-6)


def test_d1_examples():
    assert c2.d1(c2.OneForm2(field("-y"), field("x")))((0.3, 0.9)) == 2.0
    assert c2.d1(c2.OneForm2(field(0), field("x")))((0.3, 0.9)) == 1.0


@pytest.mark.parametrize("source", SCALAR_2D)
def test_dd_is_zero(source):
    assert np.max(np.abs(_vals(c2.d1(c2.d0(field(source))).g, PTS))) <= 1e-12


# operators ------------------------------------------------------------------


def test_grad_examples():
    assert c2.grad2("x^2 + y^2")((1.0, 2.0)) == (2.0, 4.0)
    assert c2.grad2(field(3.0))((1.0, 2.0)) == (0.0, 0.0)
    assert c2.grad2("x*y")((0.25, -4.0)) == (-4.0, 0.25)


def test_curl3_examples():
    assert c2.curl3(VectorField2.from_exprs("-y", "x")).value((0.3, 0.2)) == 2.0
    assert c2.curl3(VectorField2.from_exprs("x", "y")).value((0.3, 0.2)) == 0.0


def test_ham_examples():
    assert c2.ham("(x^2 + y^2)/2")((0.3, 0.7)) == pytest.approx((-0.7, 0.3), abs=1e-15)
    assert c2.ham("x*y")((0.3, 0.7)) == (-0.3, 0.7)


def test_div_examples():
    assert c2.div2(VectorField2.from_exprs("x", "y")).value((0.5, 0.5)) == 2.0
    assert c2.div2(VectorField2.from_exprs("-y", "x")).value((0.5, 0.5)) == 0.0


def test_perp_examples():
    assert c2.perp(VectorField2.from_exprs(1, 0))((0.0, 0.0)) == (-0.0, 1.0)


def test_laplacian_examples():
    assert c2.laplacian("x^2 + y^2").value((0.4, 1.3)) == 4.0
    assert np.max(np.abs(_vals(c2.laplacian("x^3 - 3*x*y^2"), PTS))) <= 1e-12


def test_laplacian_refuses_derived_fields():
    with pytest.raises(ValueError):
        c2.laplacian(c2.grad2("x*y").ax)


def test_chaining_beyond_available_order_is_an_error():
    g = c2.grad2("x^3")
    d = c2.div2(g)
    with pytest.raises(ValueError):
        c2.grad2(d)


@pytest.mark.parametrize("source", SCALAR_2D)
def test_identity_suite(source):
    f = field(source)
    assert np.max(np.abs(_vals(c2.curl3(c2.grad2(f)), PTS))) <= 1e-12
    assert np.max(np.abs(_vals(c2.div2(c2.ham(f)), PTS))) <= 1e-12


@pytest.mark.parametrize("source", SCALAR_2D)
def test_laplacian_routes(source):
    f = field(source)
    lap = _vals(c2.laplacian(f), PTS)
    assert np.allclose(_vals(c2.div2(c2.grad2(f)), PTS), lap, rtol=0, atol=1e-12)
    assert np.allclose(_vals(c2.curl3(c2.ham(f)), PTS), lap, rtol=0, atol=1e-12)


@pytest.mark.parametrize("source", SCALAR_2D)
def test_laplacian_matches_fd(source):
    f = field(source)
    for p in PTS[:10]:
        _, _, hess = fd_jet(f.value, p)
        assert f.value(tuple(p)) is not None
        assert c2.laplacian(f).value(tuple(p)) == pytest.approx(hess[0][0] + hess[1][1], rel=1e-6, abs=1e-6)


@pytest.mark.parametrize("source", SCALAR_2D)
def test_diagram_commutes_for_scalars(source):
    f = field(source)
    assert np.max(np.abs(_vec(c2.grad2(f), PTS) - _vec(c2.grad_via_forms(f), PTS))) <= 1e-12
    assert np.max(np.abs(_vec(c2.ham(f), PTS) - _vec(c2.ham_via_forms(f), PTS))) <= 1e-12


@pytest.mark.parametrize("comps", VECTOR_2D)
def test_diagram_commutes_for_vectors(comps):
    A = VectorField2.from_exprs(*comps)
    assert np.max(np.abs(_vals(c2.curl3(A), PTS) - _vals(c2.curl3_via_forms(A), PTS))) <= 1e-12
    assert np.max(np.abs(_vals(c2.div2(A), PTS) - _vals(c2.div_via_forms(A), PTS))) <= 1e-12
    assert np.max(np.abs(_vec(c2.perp(A), PTS) - _vec(c2.perp_via_forms(A), PTS))) <= 1e-12


@pytest.mark.parametrize("comps", VECTOR_2D)
def test_perp_squared(comps):
    A = VectorField2.from_exprs(*comps)
    assert np.array_equal(_vec(c2.perp(c2.perp(A)), PTS), -_vec(A, PTS))


@pytest.mark.parametrize("source", SCALAR_2D)
def test_perp_grad_is_ham_and_orthogonal(source):
    f = field(source)
    g, h = _vec(c2.grad2(f), PTS), _vec(c2.ham(f), PTS)
    assert np.array_equal(_vec(c2.perp(c2.grad2(f)), PTS), h)
    assert np.max(np.abs((g * h).sum(axis=0))) <= 1e-12


def test_vector_field_parse():
    A = VectorField2.parse("-y;x")
    assert A((1.0, 2.0)) == (-2.0, 1.0)
    with pytest.raises(ValueError):
        VectorField2.parse("x;y;1")
