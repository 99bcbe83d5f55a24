import numpy as np
import pytest

from veccalc2d import calc2d as c2
from veccalc2d.calc3d import VectorField3, curl, div3, embed_scalar, embed_vector, field3, grad3

from corpus import SCALAR_2D, SCALAR_3D, VECTOR_2D, VECTOR_3D, random_points

PTS3 = random_points(100, seed=5, dim=3)


def _v3(A, pts):
    P = (pts[:, 0], pts[:, 1], pts[:, 2])
    return np.stack([np.broadcast_to(np.asarray(c.value(P), dtype=float), (len(pts),)) for c in A.components])


def _v2(A, pts):
    P = (pts[:, 0], pts[:, 1])
    return np.stack([np.broadcast_to(np.asarray(c.value(P), dtype=float), (len(pts),)) for c in (A.ax, A.ay)])


def test_grad3_components():
    assert grad3("x*y*z")((1.0, 2.0, 3.0)) == (6.0, 3.0, 2.0)


def test_curl_of_rotation():
    assert curl(VectorField3.from_exprs("-y", "x", 0))((0.3, -0.1, 5.0)) == (0.0, 0.0, 2.0)


def test_curl_by_hand():
    # A = (y z, x z^2, sin(x y)); curl = (x cos(xy) - 2 x z, y - y cos(xy), z^2 - z)
    A = VectorField3.from_exprs("y*z", "x*z^2", "sin(x*y)")
    x, y, z = 0.7, -1.1, 0.4
    got = curl(A)((x, y, z))
    want = (x * np.cos(x * y) - 2 * x * z, y - y * np.cos(x * y), z**2 - z)
    assert got == pytest.approx(want, abs=1e-14)


@pytest.mark.parametrize("source", SCALAR_3D)
def test_curl_grad_zero(source):
    assert np.max(np.abs(_v3(curl(grad3(source)), PTS3))) <= 1e-10


@pytest.mark.parametrize("comps", VECTOR_3D)
def test_div_curl_zero(comps):
    A = VectorField3.from_exprs(*comps)
    P = (PTS3[:, 0], PTS3[:, 1], PTS3[:, 2])
    assert np.max(np.abs(div3(curl(A)).value(P))) <= 1e-10


def test_div3():
    assert div3(VectorField3.from_exprs("x", "y", "z")).value((1.0, 1.0, 1.0)) == 3.0


def test_embed_scalar_examples():
    assert embed_scalar(c2.field(1))((0.0, 0.0, 0.0)) == (0.0, 0.0, -1.0)
    for z in (-3.0, 0.0, 11.0):
        assert curl(embed_scalar("x*y"))((1.0, 2.0, z)) == (-1.0, 2.0, 0.0)


def test_embed_vector_examples():
    assert embed_vector(c2.VectorField2.from_exprs(1, 0))((4.0, 5.0, 6.0)) == (1.0, 0.0, 0.0)
    assert curl(embed_vector(c2.VectorField2.from_exprs("-y", "x")))((0.2, 0.3, 0.4)) == (0.0, 0.0, 2.0)


@pytest.mark.parametrize("source", SCALAR_2D)
def test_curl_of_embedded_scalar_is_ham(source):
    got = _v3(curl(embed_scalar(source)), PTS3)
    ham = _v2(c2.ham(source), PTS3)
    assert np.max(np.abs(got[:2] - ham)) <= 1e-12
    assert np.max(np.abs(got[2])) <= 1e-12


@pytest.mark.parametrize("comps", VECTOR_2D)
def test_curl_of_embedded_vector_is_curl3(comps):
    A = c2.VectorField2.from_exprs(*comps)
    got = _v3(curl(embed_vector(A)), PTS3)
    P = (PTS3[:, 0], PTS3[:, 1])
    assert np.max(np.abs(got[:2])) <= 1e-12
    assert np.max(np.abs(got[2] - c2.curl3(A).value(P))) <= 1e-12


def test_field3_rejects_plane_expression():
    from veccalc2d.fieldexpr import parse_expr

    with pytest.raises(ValueError):
        field3(parse_expr("x*y"))
