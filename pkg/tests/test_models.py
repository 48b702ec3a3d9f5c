import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from liegeom.calculus import fd_derivative
from liegeom.errors import ContractError, SingularMatrixError, UnsupportedOrderError
from liegeom.geometry import smooth_compat
from liegeom.models import (
    adjugate,
    det_map,
    determinant,
    euclidean_lie_group,
    flatten,
    gl_group,
    gl_manifold,
    matrix_inv,
    nonlinear_chart_pair,
    positive_det_region,
    test_diffeos as diffeo_fixtures,
    unflatten,
)


def test_determinant_examples():
    assert determinant(np.eye(3)) == 1.0
    assert determinant([[2.0, 0.0], [0.0, 4.0]]) == 8.0
    A = np.arange(1.0, 17.0).reshape(4, 4) + np.eye(4)
    assert determinant(A) == pytest.approx(np.linalg.det(A), rel=1e-12)


def test_det_derivative_is_trace():
    d = det_map(3)
    rng = np.random.default_rng(2)
    I = np.eye(3).ravel()
    for _ in range(5):
        B = rng.normal(size=(3, 3))
        ad = float(d.jet(I, 1)[0].gradient() @ B.ravel())
        assert ad == pytest.approx(np.trace(B), abs=1e-12)
        assert abs(fd_derivative(d, I, B.ravel()) - np.trace(B)) <= 1e-6
    # away from the identity: d det(A)[B] = det(A) tr(A^-1 B)
    A = np.eye(3) + 0.3 * rng.normal(size=(3, 3))
    B = rng.normal(size=(3, 3))
    ad = float(d.jet(A.ravel(), 1)[0].gradient() @ B.ravel())
    assert ad == pytest.approx(np.linalg.det(A) * np.trace(np.linalg.solve(A, B)), rel=1e-10)


def test_det_jet_limit():
    with pytest.raises(UnsupportedOrderError):
        det_map(5).jet(np.eye(5).ravel(), 1)
    assert det_map(5)(np.eye(5).ravel())[0] == pytest.approx(1.0)


def test_adjugate_and_inverse():
    a, b, c, d = 1.0, 2.0, 3.0, 4.0
    assert adjugate([[a, b], [c, d]]).tolist() == [[d, -b], [-c, a]]
    assert matrix_inv([[2.0, 0.0], [0.0, 4.0]]).tolist() == [[0.5, 0.0], [0.0, 0.25]]
    rng = np.random.default_rng(3)
    A = rng.normal(size=(3, 3)) + 3 * np.eye(3)
    assert np.max(np.abs(A @ matrix_inv(A) - np.eye(3))) <= 1e-8
    with pytest.raises(SingularMatrixError):
        matrix_inv([[1.0, 2.0], [2.0, 4.0]])


def test_flatten_contract():
    with pytest.raises(ContractError):
        flatten(np.zeros((2, 3)))
    with pytest.raises(ContractError):
        unflatten(np.zeros(5))


def test_gl1_is_the_nonzero_reals():
    G = gl_group(1)
    pts = G.manifold.carrier.points[:, 0]
    assert np.any(pts > 0) and np.any(pts < 0)
    assert all(0.5 <= abs(x) <= 2.0 for x in pts)
    assert G.mult_certificate.passed and G.inv_certificate.passed
    assert G.mul([2.0], [-0.5]).tolist() == [-1.0] and G.inv([4.0]).tolist() == [0.25]


def test_gl2_closure_and_unit():
    G = gl_group(2)
    pts = G.manifold.carrier.points
    for A in pts:
        for B in pts[:5]:
            AB = G.mul(A, B)
            assert G.manifold.contains(AB)
            assert determinant(unflatten(AB)) == pytest.approx(determinant(unflatten(A)) * determinant(unflatten(B)))
        assert np.array_equal(G.mul(G.unit, A), A) and np.array_equal(G.mul(A, G.unit), A)


def test_gl_region_has_both_components():
    M = gl_manifold(2)
    dets = [determinant(unflatten(p)) for p in M.carrier.points]
    assert min(abs(x) for x in dets) >= 0.2
    assert any(x < 0 for x in dets) and any(x > 0 for x in dets)
    plus = positive_det_region(M)
    assert len(plus.points) == sum(x > 0 for x in dets)
    with pytest.raises(ContractError):
        gl_group(4)


def test_fixtures():
    pairs = diffeo_fixtures(2)
    assert np.array_equal(pairs[0][0].jacobian([0.3, 0.4]), np.eye(2))
    for f, g in pairs:
        x = np.array([0.3, -0.8])
        assert np.allclose(g(f(x)), x, atol=1e-12)
    assert smooth_compat(*nonlinear_chart_pair(), 3).passed
    G = euclidean_lie_group(3)
    assert [g.tolist() for g in G.generators] == np.eye(3).tolist()


square = arrays(np.float64, (3, 3), elements=st.floats(-3, 3))


@settings(max_examples=50, deadline=None)
@given(square)
def test_flatten_round_trip(A):
    assert np.array_equal(unflatten(flatten(A)), A)


@settings(max_examples=50, deadline=None)
@given(square, square)
def test_det_is_multiplicative(A, B):
    lhs = determinant(A @ B)
    assert lhs == pytest.approx(determinant(A) * determinant(B), abs=1e-8 * (1 + abs(lhs)) + 1e-9)


@settings(max_examples=50, deadline=None)
@given(square)
def test_adjugate_identity(A):
    scale = 1 + np.max(np.abs(A)) ** 3
    assert np.allclose(A @ adjugate(A), determinant(A) * np.eye(3), atol=1e-10 * scale)
